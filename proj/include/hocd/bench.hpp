#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hocd/inference.hpp"
#include "hocd/model.hpp"

namespace hocd {

enum class ExperimentCase { Case1, Case2, Case2Nonlinear };

/// One simulation-study grid: every (case, family, n) cell is evaluated on
/// `replicates` independently drawn models/datasets and scored at every
/// significance level.
struct ExperimentGrid {
    std::vector<ExperimentCase> cases;
    std::vector<NoiseFamily> families;
    std::vector<Index> sample_sizes;
    int replicates = 100;
    std::vector<double> alphas = {0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001};
    std::uint64_t master_seed = 0;
    double m_fraction = 0.8;
    int bootstrap_B = 30;
};

/// Everything the level sweep needs from one replicate. Stage-2 p-values
/// are evaluated unconditionally so error curves do not depend on the
/// stage-1 gate.
struct ReplicateOutcome {
    Verdict truth = Verdict::NoEdge;
    double p_edge = 1.0;
    double p_x_to_y = 1.0;
    double p_y_to_x = 1.0;
    bool direction_majority_failed = false;
    bool error = false; // hard failure; scored as incorrect at every level
    /// Head-to-head direction call: the direction whose zero-residual null
    /// has the higher p-value, ties broken by the smaller full-sample
    /// residual magnitude. Unset when even the tie-break was degenerate.
    std::optional<Verdict> forced_direction;
};

struct CellOutcomes {
    ExperimentCase exp_case = ExperimentCase::Case1;
    NoiseFamily family = NoiseFamily::Exponential;
    Index n = 0;
    std::vector<ReplicateOutcome> replicates;
    double seconds = 0.0;
};

/// One row of the results table: a grid cell scored at one level.
///
/// Accuracy follows the simulation study's table protocol: Case 1 counts a
/// replicate correct iff the procedure's verdict is NoEdge; edge-present
/// cases count it correct iff the edge test rejects AND the head-to-head
/// direction call picks the true direction. The four-outcome verdicts per
/// replicate are kept alongside.
struct ResultRecord {
    ExperimentCase exp_case = ExperimentCase::Case1;
    NoiseFamily family = NoiseFamily::Exponential;
    Index n = 0;
    double alpha = 0.0;
    int replicates = 0;
    std::vector<Verdict> verdicts; // per replicate at this level (not exported)
    double accuracy = 0.0;
    /// Edge-test error rates; only the applicable one is set per case
    /// (Case 1 rows carry type1, Case 2 rows carry type2), the other is NaN.
    double type1 = 0.0;
    double type2 = 0.0;
    double seconds = 0.0;
};

/// Per-level error rates of one hypothesis test, from one cell's data.
struct CurveRecord {
    std::string test; // "edge" | "direction"
    ExperimentCase exp_case = ExperimentCase::Case1;
    NoiseFamily family = NoiseFamily::Exponential;
    Index n = 0;
    double alpha = 0.0;
    int replicates = 0;
    double type1 = 0.0; // NaN when not derivable from this case
    double type2 = 0.0;
};

/// Runs every cell's replicates. Replicate-level parallelism with derived
/// seed streams; results are identical for any thread count.
/// threads = 0 uses the hardware concurrency.
std::vector<CellOutcomes> evaluate_grid(const ExperimentGrid& grid, int threads = 0);

std::vector<ResultRecord> score_grid(const ExperimentGrid& grid,
                                     const std::vector<CellOutcomes>& outcomes);
std::vector<CurveRecord> score_curves(const ExperimentGrid& grid,
                                      const std::vector<CellOutcomes>& outcomes);

/// evaluate_grid + score_grid. Accuracy is the fraction of replicates whose
/// verdict equals the ground truth exactly; inconclusive verdicts count as
/// incorrect.
std::vector<ResultRecord> run_grid(const ExperimentGrid& grid, int threads = 0);

/// evaluate_grid + score_curves.
std::vector<CurveRecord> type_error_curves(const ExperimentGrid& grid, int threads = 0);

/// CSV with header case,family,n,alpha,replicates,accuracy,type1,type2,seconds;
/// floats rendered with 6 significant digits, NaN as an empty field.
void export_results(const std::vector<ResultRecord>& records,
                    const std::filesystem::path& path);
std::vector<ResultRecord> import_results(const std::filesystem::path& path);

/// CSV with header test,case,family,n,alpha,replicates,type1,type2.
void export_curves(const std::vector<CurveRecord>& records,
                   const std::filesystem::path& path);

std::string to_string(ExperimentCase exp_case);
ExperimentCase experiment_case_from_string(const std::string& name);
NoiseFamily noise_family_from_string(const std::string& name);

} // namespace hocd
