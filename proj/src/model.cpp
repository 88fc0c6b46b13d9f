#include "hocd/model.hpp"

#include <cmath>
#include <random>

#include "hocd/rng.hpp"

namespace hocd {

namespace {

// zeta(2..5) to 15 digits; zeta(2) = pi^2/6, zeta(4) = pi^4/90.
constexpr double kZeta[6] = {0.0, 0.0,
                             1.644934066848226,
                             1.202056903159594,
                             1.082323233711138,
                             1.036927755143370};

constexpr double kEulerGamma = 0.5772156649015329;

constexpr double kFactorial[5] = {1.0, 1.0, 2.0, 6.0, 24.0};

double ipow(double base, int exp) {
    double r = 1.0;
    for (int k = 0; k < exp; ++k) r *= base;
    return r;
}

void validate_model(const PairModel& model) {
    if (model.lambda1 == 0.0 || model.lambda2 == 0.0)
        throw InvalidModel("confounder strengths lambda1, lambda2 must be nonzero");
    if (model.has_edge() && model.eta == 0.0)
        throw InvalidModel("edge structure requires nonzero eta");
    if (!model.has_edge() && model.eta != 0.0)
        throw InvalidModel("ConfounderOnly model must not carry an eta");
    auto positive_params = [](const NoiseSpec& s) {
        switch (s.family) {
            case NoiseFamily::Exponential: return s.param1 > 0.0;
            case NoiseFamily::Gamma: return s.param1 > 0.0 && s.param2 > 0.0;
            case NoiseFamily::Gumbel: return s.param2 > 0.0;
            case NoiseFamily::StandardNormal: return true;
        }
        return false;
    };
    if (!positive_params(model.noise_l) || !positive_params(model.noise_ex) ||
        !positive_params(model.noise_ey))
        throw InvalidModel("noise scale/rate/shape parameters must be positive");
}

// Draws n values from the spec, shifted to zero population mean.
Eigen::ArrayXd draw_noise(const NoiseSpec& spec, Index n, Rng& rng) {
    Eigen::ArrayXd out(n);
    const double shift = spec.mean();
    switch (spec.family) {
        case NoiseFamily::Exponential: {
            std::exponential_distribution<double> dist(spec.param1);
            for (Index t = 0; t < n; ++t) out[t] = dist(rng) - shift;
            break;
        }
        case NoiseFamily::Gamma: {
            std::gamma_distribution<double> dist(spec.param1, spec.param2);
            for (Index t = 0; t < n; ++t) out[t] = dist(rng) - shift;
            break;
        }
        case NoiseFamily::Gumbel: {
            std::extreme_value_distribution<double> dist(spec.param1, spec.param2);
            for (Index t = 0; t < n; ++t) out[t] = dist(rng) - shift;
            break;
        }
        case NoiseFamily::StandardNormal: {
            std::normal_distribution<double> dist(0.0, 1.0);
            for (Index t = 0; t < n; ++t) out[t] = dist(rng);
            break;
        }
    }
    return out;
}

} // namespace

double NoiseSpec::mean() const {
    switch (family) {
        case NoiseFamily::Exponential: return 1.0 / param1;
        case NoiseFamily::Gamma: return param1 * param2;
        case NoiseFamily::Gumbel: return param1 + param2 * kEulerGamma;
        case NoiseFamily::StandardNormal: return 0.0;
    }
    return 0.0;
}

MixingMatrix to_mixing(const PairModel& model) {
    validate_model(model);
    MixingMatrix mix;
    switch (model.structure) {
        case PairStructure::ConfounderOnly:
            mix = {model.lambda1, 1.0, 0.0, model.lambda2, 0.0, 1.0};
            break;
        case PairStructure::ConfounderXtoY:
            mix = {model.lambda1, 1.0, 0.0,
                   model.eta * model.lambda1 + model.lambda2, model.eta, 1.0};
            break;
        case PairStructure::ConfounderYtoX:
            mix = {model.lambda1 + model.eta * model.lambda2, 1.0, model.eta,
                   model.lambda2, 0.0, 1.0};
            break;
    }
    return mix;
}

double noise_cumulant(const NoiseSpec& spec, int order) {
    if (order < 2 || order > 5)
        throw OrderOutOfRange("noise cumulant order must be in [2, 5]");
    switch (spec.family) {
        case NoiseFamily::Exponential:
            return kFactorial[order - 1] / ipow(spec.param1, order);
        case NoiseFamily::Gamma:
            return kFactorial[order - 1] * spec.param1 * ipow(spec.param2, order);
        case NoiseFamily::Gumbel:
            return kFactorial[order - 1] * kZeta[order] * ipow(spec.param2, order);
        case NoiseFamily::StandardNormal:
            return order == 2 ? 1.0 : 0.0;
    }
    return 0.0;
}

double exact_joint_cumulant(const MixingMatrix& mix,
                            const NoiseSpec& noise_l,
                            const NoiseSpec& noise_ex,
                            const NoiseSpec& noise_ey,
                            CumulantKey key) {
    if (key.i < 0 || key.j < 0 || key.order() < 2 || key.order() > 5)
        throw OrderOutOfRange("cumulant key order must be in [2, 5]");
    const int k = key.order();
    return ipow(mix.alpha1, key.i) * ipow(mix.alpha2, key.j) * noise_cumulant(noise_l, k) +
           ipow(mix.beta1, key.i) * ipow(mix.beta2, key.j) * noise_cumulant(noise_ex, k) +
           ipow(mix.gamma1, key.i) * ipow(mix.gamma2, key.j) * noise_cumulant(noise_ey, k);
}

CumulantProfile exact_profile(const PairModel& model,
                              std::span<const CumulantKey> keys) {
    const MixingMatrix mix = to_mixing(model);
    CumulantProfile profile;
    for (const CumulantKey& key : keys)
        profile.set(key, exact_joint_cumulant(mix, model.noise_l, model.noise_ex,
                                              model.noise_ey, key));
    return profile;
}

NoiseSpec default_noise(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::Exponential: return NoiseSpec::exponential(1.0);
        case NoiseFamily::Gamma: return NoiseSpec::gamma(3.0, 1.0);
        case NoiseFamily::Gumbel: return NoiseSpec::gumbel(0.0, 1.0);
        case NoiseFamily::StandardNormal: return NoiseSpec::standard_normal();
    }
    return NoiseSpec::exponential(1.0);
}

PairModel random_model(ModelCase model_case, NoiseFamily family, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> coeff(0.8, 1.2);
    PairModel model;
    model.lambda1 = coeff(rng);
    model.lambda2 = coeff(rng);
    if (model_case == ModelCase::Case2) {
        model.structure = PairStructure::ConfounderXtoY;
        model.eta = coeff(rng);
    } else {
        model.structure = PairStructure::ConfounderOnly;
        model.eta = 0.0;
    }
    model.noise_l = default_noise(family);
    model.noise_ex = default_noise(family);
    model.noise_ey = default_noise(family);
    return model;
}

NonlinearSpec NonlinearSpec::random(std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> coeff(0.01, 0.03);
    NonlinearSpec nl;
    nl.d_lx = coeff(rng);
    nl.d_ly = coeff(rng);
    nl.d_edge = coeff(rng);
    return nl;
}

namespace {

PairedSample generate(const PairModel& model, const NonlinearSpec& nl,
                      Index n, std::uint64_t seed) {
    validate_model(model);
    if (n < 2) throw EmptySample("sample size must be at least 2");

    Rng rng = make_rng(seed);
    const Eigen::ArrayXd l = draw_noise(model.noise_l, n, rng);
    const Eigen::ArrayXd ex = draw_noise(model.noise_ex, n, rng);
    const Eigen::ArrayXd ey = draw_noise(model.noise_ey, n, rng);

    const double dlx = nl.cubic_on_latent_edges ? nl.d_lx : 0.0;
    const double dly = nl.cubic_on_latent_edges ? nl.d_ly : 0.0;

    PairedSample out;
    switch (model.structure) {
        case PairStructure::ConfounderOnly:
            out.x = model.lambda1 * l + dlx * l.cube() + ex;
            out.y = model.lambda2 * l + dly * l.cube() + ey;
            break;
        case PairStructure::ConfounderXtoY:
            out.x = model.lambda1 * l + dlx * l.cube() + ex;
            out.y = model.lambda2 * l + dly * l.cube() + model.eta * out.x +
                    nl.d_edge * out.x.cube() + ey;
            break;
        case PairStructure::ConfounderYtoX:
            out.y = model.lambda2 * l + dly * l.cube() + ey;
            out.x = model.lambda1 * l + dlx * l.cube() + model.eta * out.y +
                    nl.d_edge * out.y.cube() + ex;
            break;
    }
    return out;
}

} // namespace

PairedSample sample(const PairModel& model, Index n, std::uint64_t seed) {
    return generate(model, NonlinearSpec{}, n, seed);
}

PairedSample sample_nonlinear(const PairModel& model, const NonlinearSpec& nl,
                              Index n, std::uint64_t seed) {
    return generate(model, nl, n, seed);
}

std::string to_string(PairStructure structure) {
    switch (structure) {
        case PairStructure::ConfounderOnly: return "confounder-only";
        case PairStructure::ConfounderXtoY: return "x-to-y";
        case PairStructure::ConfounderYtoX: return "y-to-x";
    }
    return "?";
}

std::string to_string(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::Exponential: return "exp";
        case NoiseFamily::Gamma: return "gamma3";
        case NoiseFamily::Gumbel: return "gumbel";
        case NoiseFamily::StandardNormal: return "gaussian";
    }
    return "?";
}

} // namespace hocd
