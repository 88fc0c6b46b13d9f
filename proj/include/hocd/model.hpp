#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "hocd/cumulants.hpp"

namespace hocd {

enum class NoiseFamily { Exponential, Gamma, Gumbel, StandardNormal };

/// A noise distribution with analytic cumulants kappa_2..kappa_5.
/// Exponential(rate), Gamma(shape, scale), Gumbel(location, scale).
/// StandardNormal is test-only: its cumulants above order 2 vanish, which
/// makes every cumulant-based statistic uninformative.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Exponential;
    double param1 = 1.0; // rate | shape | location
    double param2 = 1.0; // unused | scale | scale

    static NoiseSpec exponential(double rate) { return {NoiseFamily::Exponential, rate, 0.0}; }
    static NoiseSpec gamma(double shape, double scale) { return {NoiseFamily::Gamma, shape, scale}; }
    static NoiseSpec gumbel(double location, double scale) { return {NoiseFamily::Gumbel, location, scale}; }
    static NoiseSpec standard_normal() { return {NoiseFamily::StandardNormal, 0.0, 1.0}; }

    /// Population mean, used to shift draws to zero mean.
    double mean() const;
};

enum class PairStructure { ConfounderOnly, ConfounderXtoY, ConfounderYtoX };

/// Generative pair model: L -> X with strength lambda1, L -> Y with lambda2,
/// and optionally a directed edge of strength eta between X and Y.
struct PairModel {
    PairStructure structure = PairStructure::ConfounderOnly;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double eta = 0.0; // required nonzero iff an edge is present
    NoiseSpec noise_l;
    NoiseSpec noise_ex;
    NoiseSpec noise_ey;

    bool has_edge() const { return structure != PairStructure::ConfounderOnly; }
};

/// Coefficients of the independent components (L, E_X, E_Y) on X (row 1)
/// and Y (row 2) in the overcomplete-ICA form of the pair model.
struct MixingMatrix {
    double alpha1 = 0.0, beta1 = 0.0, gamma1 = 0.0;
    double alpha2 = 0.0, beta2 = 0.0, gamma2 = 0.0;
};

/// Cubic coefficients per structural edge for the nonlinear generator:
/// each edge contributes B*parent + D*parent^3.
struct NonlinearSpec {
    double d_lx = 0.0;
    double d_ly = 0.0;
    double d_edge = 0.0;
    /// When false, the cubic applies only to the observed edge, not to
    /// L->X / L->Y.
    bool cubic_on_latent_edges = true;

    /// Draws all three coefficients i.i.d. Uniform[0.01, 0.03].
    static NonlinearSpec random(std::uint64_t seed);
};

enum class ModelCase { Case1, Case2 };

/// Rewrites the structural model in mixing-matrix form. For X->Y:
/// X = lambda1*L + E_X, Y = (eta*lambda1 + lambda2)*L + eta*E_X + E_Y.
/// Throws InvalidModel on zero lambdas or a missing/extraneous eta.
MixingMatrix to_mixing(const PairModel& model);

/// Analytic kappa_n for n in 2..5:
///   Exponential(rate):    (n-1)! / rate^n
///   Gamma(shape, scale):  (n-1)! * shape * scale^n
///   Gumbel(mu, beta):     (n-1)! * zeta(n) * beta^n
///   StandardNormal:       kappa_2 = 1, higher orders 0
double noise_cumulant(const NoiseSpec& spec, int order);

/// Population joint cumulant of the mixed pair:
///   C_{i,j} = a1^i a2^j k(L) + b1^i b2^j k(E_X) + g1^i g2^j k(E_Y),
/// with k the order-(i+j) cumulant of each component. This is the exact
/// oracle against which sample estimates and the ratio/residual estimators
/// are checked.
double exact_joint_cumulant(const MixingMatrix& mix,
                            const NoiseSpec& noise_l,
                            const NoiseSpec& noise_ex,
                            const NoiseSpec& noise_ey,
                            CumulantKey key);

/// All decision keys evaluated on the exact oracle.
CumulantProfile exact_profile(const PairModel& model,
                              std::span<const CumulantKey> keys);

/// Draws causal coefficients i.i.d. Uniform[0.8, 1.2]. Case1 has no edge;
/// Case2 fixes the direction X->Y (evaluation relabels for Y->X trials).
/// All three noises use the given family at its default parameters.
PairModel random_model(ModelCase model_case, NoiseFamily family, std::uint64_t seed);

/// Default parameters per family: Exp(1), Gamma(3, 1), Gumbel(0, 1), N(0,1).
NoiseSpec default_noise(NoiseFamily family);

/// Draws L, E_X, E_Y i.i.d. from their specs (shifted to zero mean) and
/// composes X, Y per the structure. Deterministic for a fixed seed.
PairedSample sample(const PairModel& model, Index n, std::uint64_t seed);

/// Nonlinear variant: every structural edge contributes B*parent +
/// D*parent^3. With D = 0 this reproduces sample() bit for bit under the
/// same seed.
PairedSample sample_nonlinear(const PairModel& model, const NonlinearSpec& nl,
                              Index n, std::uint64_t seed);

std::string to_string(PairStructure structure);
std::string to_string(NoiseFamily family);

} // namespace hocd
