#include "hocd/inference.hpp"

#include <cmath>

#include "hocd/rng.hpp"

namespace hocd {

namespace {

constexpr std::uint64_t kEdgeStageTag = 0x65646765;      // "edge"
constexpr std::uint64_t kFourthStageTag = 0x63346f72;    // corroborating 4th order
constexpr std::uint64_t kDirectionStageTag = 0x64697265; // "dire"
constexpr Index kSmallSampleFloor = 5000;

void validate_config(const BootstrapConfig& config, Index n) {
    if (config.B < 1) throw Error("bootstrap B must be positive");
    if (!(config.m_fraction > 0.0 && config.m_fraction <= 1.0))
        throw Error("bootstrap m_fraction must be in (0, 1]");
    if (static_cast<Index>(config.m_fraction * static_cast<double>(n)) < 2)
        throw Error("bootstrap resample size floor(m_fraction*n) must be >= 2");
}

PairedSample resample_with_replacement(const PairedSample& sample, Index m, Rng& rng) {
    std::uniform_int_distribution<Index> pick(0, sample.n() - 1);
    PairedSample out;
    out.x.resize(m);
    out.y.resize(m);
    for (Index t = 0; t < m; ++t) {
        const Index idx = pick(rng);
        out.x[t] = sample.x[idx];
        out.y[t] = sample.y[idx];
    }
    return out;
}

// Shared resampling loop; Statistic returns double or std::pair<double,double>.
template <typename Statistic, typename Collect>
int run_bootstrap(const PairedSample& sample, const BootstrapConfig& config,
                  const Statistic& statistic, const Collect& collect) {
    validate_config(config, sample.n());
    const Index m = static_cast<Index>(config.m_fraction * static_cast<double>(sample.n()));
    int failed = 0;
    for (int rep = 0; rep < config.B; ++rep) {
        Rng rng = make_rng(derive_seed(config.seed, static_cast<std::uint64_t>(rep)));
        const PairedSample draw = resample_with_replacement(sample, m, rng);
        try {
            collect(statistic(draw));
        } catch (const Error&) {
            ++failed;
        }
    }
    return failed;
}

// P(K <= k) for K ~ Binomial(n, 1/2), by direct summation of the pmf.
double binomial_half_cdf(int n, int k) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    long double term = std::ldexp(static_cast<long double>(1), -n); // pmf(0)
    long double cdf = term;
    for (int t = 0; t < k; ++t) {
        term *= static_cast<long double>(n - t) / static_cast<long double>(t + 1);
        cdf += term;
    }
    return static_cast<double>(cdf);
}

CumulantProfile direction_profile(const PairedSample& sample) {
    const auto keys = decision_keys();
    return cumulant_profile(sample, std::span<const CumulantKey>(keys));
}

std::pair<double, double> direction_statistics(const PairedSample& sample) {
    const CumulantProfile profile = direction_profile(sample);
    const RatioPair ratios = solve_ratio_quadratic(ratio_quadratic_coefficients(profile));
    const DirectionResiduals res = direction_residuals(profile, ratios);
    return {res.r_x_to_y, res.r_y_to_x};
}

StageEvaluation evaluate_edge_stage(const PairedSample& sample,
                                    const BootstrapConfig& config,
                                    int i, int j, std::uint64_t tag,
                                    const CumulantProfile& full_profile) {
    StageEvaluation stage;
    stage.full_sample_statistic = edge_statistic(full_profile, i, j);
    BootstrapConfig staged = config;
    staged.seed = derive_seed(config.seed, tag);
    const auto keys = edge_statistic_keys(i, j);
    stage.boot = bootstrap_statistics(
        sample,
        [&](const PairedSample& draw) {
            return edge_statistic(
                cumulant_profile(draw, std::span<const CumulantKey>(keys)), i, j);
        },
        staged);
    stage.test = sign_test(stage.boot.values);
    return stage;
}

} // namespace

DirectionEvaluation evaluate_direction_stage(const PairedSample& sample,
                                             const BootstrapConfig& config) {
    DirectionEvaluation dir;
    BootstrapConfig staged = config;
    staged.seed = derive_seed(config.seed, kDirectionStageTag);
    dir.boot_x_to_y.requested = staged.B;
    dir.boot_y_to_x.requested = staged.B;
    const int failed = run_bootstrap(
        sample, staged, direction_statistics, [&](std::pair<double, double> r) {
            dir.boot_x_to_y.values.push_back(r.first);
            dir.boot_y_to_x.values.push_back(r.second);
        });
    dir.boot_x_to_y.failed = failed;
    dir.boot_y_to_x.failed = failed;
    dir.majority_failed = failed > staged.B / 2;
    dir.test_x_to_y = sign_test(dir.boot_x_to_y.values);
    dir.test_y_to_x = sign_test(dir.boot_y_to_x.values);
    return dir;
}

BootstrapStatistics bootstrap_statistics(
    const PairedSample& sample,
    const std::function<double(const PairedSample&)>& statistic,
    const BootstrapConfig& config) {
    BootstrapStatistics out;
    out.requested = config.B;
    out.failed = run_bootstrap(sample, config, statistic,
                               [&](double v) { out.values.push_back(v); });
    if (out.failed > config.B / 2)
        throw TooManyFailedReplicates(std::to_string(out.failed) + " of " +
                                      std::to_string(config.B) +
                                      " bootstrap replicates failed");
    return out;
}

SignTestResult sign_test(std::span<const double> values) {
    SignTestResult result;
    for (double v : values) {
        if (v > 0.0)
            ++result.positives;
        else if (v < 0.0)
            ++result.negatives;
        else
            ++result.zeros;
    }
    const int nonzero = result.positives + result.negatives;
    if (nonzero == 0) {
        result.p_value = 1.0;
        result.all_zeros = true;
        return result;
    }
    const int k = std::min(result.positives, result.negatives);
    result.p_value = std::min(1.0, 2.0 * binomial_half_cdf(nonzero, k));
    return result;
}

PairTestEvaluation evaluate_pair_tests(const PairedSample& sample,
                                       const BootstrapConfig& config,
                                       const DecisionOptions& options,
                                       bool include_direction) {
    PairTestEvaluation eval;
    eval.n = sample.n();
    eval.config = config;
    eval.options = options;
    if (sample.n() < kSmallSampleFloor)
        eval.diagnostics.push_back(
            "small-sample warning: n = " + std::to_string(sample.n()) +
            " is below 5000; order-5 cumulant estimates are noisy");

    std::vector<CumulantKey> full_keys = decision_keys();
    full_keys.push_back({1, 1});
    if (options.corroborate_fourth_order)
        for (CumulantKey key : edge_statistic_keys(1, 1)) full_keys.push_back(key);
    const CumulantProfile full_profile =
        cumulant_profile(sample, std::span<const CumulantKey>(full_keys));

    eval.edge = evaluate_edge_stage(sample, config, 2, 1, kEdgeStageTag, full_profile);
    if (options.corroborate_fourth_order)
        eval.edge_fourth_order =
            evaluate_edge_stage(sample, config, 1, 1, kFourthStageTag, full_profile);

    // Full-sample point estimates for reporting; degenerate cases stay empty.
    try {
        eval.ratios = solve_ratio_quadratic(ratio_quadratic_coefficients(full_profile));
        eval.residuals = direction_residuals(full_profile, *eval.ratios);
    } catch (const EstimationDegeneracy&) {
    }
    try {
        eval.confounder_coefficients = estimate_confounder_coefficients(full_profile);
    } catch (const EstimationDegeneracy& e) {
        eval.diagnostics.push_back(std::string("confounder coefficient recovery: ") +
                                   e.what());
    }

    if (include_direction)
        eval.direction = evaluate_direction_stage(sample, config);
    return eval;
}

Verdict verdict_from_pvalues(double p_edge, std::optional<double> p_edge_fourth,
                             bool direction_majority_failed, double p_x_to_y,
                             double p_y_to_x, double alpha) {
    bool edge_accepted = p_edge >= alpha;
    if (p_edge_fourth) edge_accepted = edge_accepted && *p_edge_fourth >= alpha;
    if (edge_accepted) return Verdict::NoEdge;

    if (direction_majority_failed) return Verdict::InconclusiveBothRejected;
    const bool accept_x_to_y = p_x_to_y >= alpha;
    const bool accept_y_to_x = p_y_to_x >= alpha;
    if (accept_x_to_y && !accept_y_to_x) return Verdict::XtoY;
    if (accept_y_to_x && !accept_x_to_y) return Verdict::YtoX;
    if (accept_x_to_y && accept_y_to_x) return Verdict::InconclusiveBothAccepted;
    return Verdict::InconclusiveBothRejected;
}

PairDecision decide_from_evaluation(const PairTestEvaluation& eval, double alpha) {
    PairDecision decision;
    decision.alpha = alpha;
    decision.edge_test = eval.edge.test;
    decision.diagnostics = eval.diagnostics;

    std::optional<double> p_fourth;
    if (eval.options.corroborate_fourth_order && eval.edge_fourth_order)
        p_fourth = eval.edge_fourth_order->test.p_value;

    bool edge_accepted = eval.edge.test.p_value >= alpha;
    if (p_fourth) edge_accepted = edge_accepted && *p_fourth >= alpha;

    if (edge_accepted) {
        decision.verdict = Verdict::NoEdge;
        decision.confounder_coefficients = eval.confounder_coefficients;
        return decision;
    }

    if (!eval.direction)
        throw Error("direction stage was not evaluated");
    const DirectionEvaluation& dir = *eval.direction;
    decision.direction_test_x_to_y = dir.test_x_to_y;
    decision.direction_test_y_to_x = dir.test_y_to_x;

    decision.verdict =
        verdict_from_pvalues(eval.edge.test.p_value, p_fourth, dir.majority_failed,
                             dir.test_x_to_y.p_value, dir.test_y_to_x.p_value, alpha);
    if (dir.majority_failed)
        decision.diagnostics.push_back(
            "majority of direction replicates degenerate; likely the no-edge "
            "regime leaking past the edge test");
    return decision;
}

PairDecision decide_pair(const PairedSample& sample, double alpha,
                         const BootstrapConfig& config,
                         const DecisionOptions& options) {
    PairTestEvaluation eval =
        evaluate_pair_tests(sample, config, options, /*include_direction=*/false);

    bool edge_accepted = eval.edge.test.p_value >= alpha;
    if (options.corroborate_fourth_order && eval.edge_fourth_order)
        edge_accepted = edge_accepted && eval.edge_fourth_order->test.p_value >= alpha;
    if (!edge_accepted)
        eval.direction = evaluate_direction_stage(sample, config);

    return decide_from_evaluation(eval, alpha);
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::NoEdge: return "no-edge";
        case Verdict::XtoY: return "x-to-y";
        case Verdict::YtoX: return "y-to-x";
        case Verdict::InconclusiveBothAccepted: return "inconclusive-both-accepted";
        case Verdict::InconclusiveBothRejected: return "inconclusive-both-rejected";
    }
    return "?";
}

} // namespace hocd
