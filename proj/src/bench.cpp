#include "hocd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "hocd/rng.hpp"

namespace hocd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_grid(const ExperimentGrid& grid) {
    if (grid.cases.empty() || grid.families.empty() || grid.sample_sizes.empty() ||
        grid.alphas.empty())
        throw Error("experiment grid has an empty dimension");
    if (grid.replicates < 1) throw Error("experiment grid needs replicates >= 1");
}

std::uint64_t cell_seed(const ExperimentGrid& grid, ExperimentCase exp_case,
                        NoiseFamily family, Index n) {
    return derive_seed(grid.master_seed, static_cast<std::uint64_t>(exp_case) + 1,
                       static_cast<std::uint64_t>(family) + 1,
                       static_cast<std::uint64_t>(n));
}

ReplicateOutcome run_replicate(const ExperimentGrid& grid, ExperimentCase exp_case,
                               NoiseFamily family, Index n, int rep,
                               std::uint64_t cell) {
    const std::uint64_t model_seed = derive_seed(cell, rep, 0);
    const std::uint64_t data_seed = derive_seed(cell, rep, 1);
    const std::uint64_t boot_seed = derive_seed(cell, rep, 2);
    const std::uint64_t nl_seed = derive_seed(cell, rep, 3);

    ReplicateOutcome outcome;
    try {
        PairedSample data;
        if (exp_case == ExperimentCase::Case1) {
            const PairModel model = random_model(ModelCase::Case1, family, model_seed);
            data = sample(model, n, data_seed);
            outcome.truth = Verdict::NoEdge;
        } else {
            const PairModel model = random_model(ModelCase::Case2, family, model_seed);
            if (exp_case == ExperimentCase::Case2Nonlinear)
                data = sample_nonlinear(model, NonlinearSpec::random(nl_seed), n, data_seed);
            else
                data = sample(model, n, data_seed);
            // Alternate the labeled direction so a direction-biased method
            // cannot score well by construction.
            if (rep % 2 == 1) {
                data = swap_columns(data);
                outcome.truth = Verdict::YtoX;
            } else {
                outcome.truth = Verdict::XtoY;
            }
        }

        BootstrapConfig config{grid.m_fraction, grid.bootstrap_B, boot_seed};
        const PairTestEvaluation eval =
            evaluate_pair_tests(data, config, {}, /*include_direction=*/true);
        outcome.p_edge = eval.edge.test.p_value;
        outcome.p_x_to_y = eval.direction->test_x_to_y.p_value;
        outcome.p_y_to_x = eval.direction->test_y_to_x.p_value;
        outcome.direction_majority_failed = eval.direction->majority_failed;
        if (!outcome.direction_majority_failed) {
            if (outcome.p_x_to_y > outcome.p_y_to_x)
                outcome.forced_direction = Verdict::XtoY;
            else if (outcome.p_y_to_x > outcome.p_x_to_y)
                outcome.forced_direction = Verdict::YtoX;
            else if (eval.residuals)
                outcome.forced_direction =
                    std::abs(eval.residuals->r_x_to_y) <= std::abs(eval.residuals->r_y_to_x)
                        ? Verdict::XtoY
                        : Verdict::YtoX;
        }
    } catch (const std::exception&) {
        outcome.error = true;
    }
    return outcome;
}

Verdict replicate_verdict(const ReplicateOutcome& r, double alpha) {
    return verdict_from_pvalues(r.p_edge, std::nullopt, r.direction_majority_failed,
                                r.p_x_to_y, r.p_y_to_x, alpha);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_optional_double(const std::string& s) {
    return s.empty() ? kNaN : std::stod(s);
}

} // namespace

std::vector<CellOutcomes> evaluate_grid(const ExperimentGrid& grid, int threads) {
    validate_grid(grid);
    if (threads <= 0)
        threads = std::max(1u, std::thread::hardware_concurrency());

    std::vector<CellOutcomes> cells;
    for (ExperimentCase exp_case : grid.cases) {
        for (NoiseFamily family : grid.families) {
            for (Index n : grid.sample_sizes) {
                const auto start = std::chrono::steady_clock::now();
                CellOutcomes cell;
                cell.exp_case = exp_case;
                cell.family = family;
                cell.n = n;
                cell.replicates.resize(grid.replicates);
                const std::uint64_t seed = cell_seed(grid, exp_case, family, n);

                const int workers = std::min(threads, grid.replicates);
                std::vector<std::thread> pool;
                pool.reserve(workers);
                for (int w = 0; w < workers; ++w) {
                    pool.emplace_back([&, w]() {
                        for (int rep = w; rep < grid.replicates; rep += workers)
                            cell.replicates[rep] =
                                run_replicate(grid, exp_case, family, n, rep, seed);
                    });
                }
                for (auto& t : pool) t.join();

                cell.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
                int errors = 0;
                for (const ReplicateOutcome& r : cell.replicates)
                    if (r.error) ++errors;
                if (errors > 0)
                    std::fprintf(stderr,
                                 "bench: %d/%d replicates failed in %s/%s/n=%lld "
                                 "(scored as incorrect)\n",
                                 errors, grid.replicates, to_string(exp_case).c_str(),
                                 to_string(family).c_str(),
                                 static_cast<long long>(n));
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

std::vector<ResultRecord> score_grid(const ExperimentGrid& grid,
                                     const std::vector<CellOutcomes>& outcomes) {
    std::vector<ResultRecord> records;
    for (const CellOutcomes& cell : outcomes) {
        for (double alpha : grid.alphas) {
            ResultRecord rec;
            rec.exp_case = cell.exp_case;
            rec.family = cell.family;
            rec.n = cell.n;
            rec.alpha = alpha;
            rec.replicates = static_cast<int>(cell.replicates.size());
            rec.seconds = cell.seconds;

            int correct = 0;
            int edge_rejected = 0;
            int edge_accepted = 0;
            for (const ReplicateOutcome& r : cell.replicates) {
                const Verdict v = r.error ? Verdict::InconclusiveBothRejected
                                          : replicate_verdict(r, alpha);
                rec.verdicts.push_back(v);
                if (!r.error) {
                    if (cell.exp_case == ExperimentCase::Case1) {
                        if (v == Verdict::NoEdge) ++correct;
                    } else if (r.p_edge < alpha && r.forced_direction == r.truth) {
                        ++correct;
                    }
                }
                if (r.error || r.p_edge < alpha)
                    ++edge_rejected;
                else
                    ++edge_accepted;
            }
            const double nrep = static_cast<double>(rec.replicates);
            rec.accuracy = correct / nrep;
            if (cell.exp_case == ExperimentCase::Case1) {
                rec.type1 = edge_rejected / nrep; // reject no-edge | no edge
                rec.type2 = kNaN;
            } else {
                rec.type1 = kNaN;
                rec.type2 = edge_accepted / nrep; // accept no-edge | edge
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::vector<CurveRecord> score_curves(const ExperimentGrid& grid,
                                      const std::vector<CellOutcomes>& outcomes) {
    std::vector<CurveRecord> records;
    for (const CellOutcomes& cell : outcomes) {
        const double nrep = static_cast<double>(cell.replicates.size());
        for (double alpha : grid.alphas) {
            CurveRecord edge;
            edge.test = "edge";
            edge.exp_case = cell.exp_case;
            edge.family = cell.family;
            edge.n = cell.n;
            edge.alpha = alpha;
            edge.replicates = static_cast<int>(nrep);

            int edge_rejected = 0;
            for (const ReplicateOutcome& r : cell.replicates)
                if (r.error || r.p_edge < alpha) ++edge_rejected;
            if (cell.exp_case == ExperimentCase::Case1) {
                edge.type1 = edge_rejected / nrep;
                edge.type2 = kNaN;
            } else {
                edge.type1 = kNaN;
                edge.type2 = (nrep - edge_rejected) / nrep;
            }
            records.push_back(edge);

            if (cell.exp_case == ExperimentCase::Case1) continue;

            // Direction test, evaluated unconditionally on all replicates of
            // an edge-present cell. A degenerate replicate counts as a
            // rejection of both nulls.
            CurveRecord dir = edge;
            dir.test = "direction";
            int reject_true = 0;
            int accept_anti = 0;
            for (const ReplicateOutcome& r : cell.replicates) {
                const double p_true =
                    r.truth == Verdict::XtoY ? r.p_x_to_y : r.p_y_to_x;
                const double p_anti =
                    r.truth == Verdict::XtoY ? r.p_y_to_x : r.p_x_to_y;
                const bool broken = r.error || r.direction_majority_failed;
                if (broken || p_true < alpha) ++reject_true;
                if (!broken && p_anti >= alpha) ++accept_anti;
            }
            dir.type1 = reject_true / nrep;
            dir.type2 = accept_anti / nrep;
            records.push_back(dir);
        }
    }
    return records;
}

std::vector<ResultRecord> run_grid(const ExperimentGrid& grid, int threads) {
    return score_grid(grid, evaluate_grid(grid, threads));
}

std::vector<CurveRecord> type_error_curves(const ExperimentGrid& grid, int threads) {
    return score_curves(grid, evaluate_grid(grid, threads));
}

void export_results(const std::vector<ResultRecord>& records,
                    const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "case,family,n,alpha,replicates,accuracy,type1,type2,seconds\n";
    for (const ResultRecord& r : records) {
        out << to_string(r.exp_case) << ',' << to_string(r.family) << ',' << r.n << ','
            << format_double(r.alpha) << ',' << r.replicates << ','
            << format_double(r.accuracy) << ',' << format_double(r.type1) << ','
            << format_double(r.type2) << ',' << format_double(r.seconds) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ResultRecord> import_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": missing header");
    if (line != "case,family,n,alpha,replicates,accuracy,type1,type2,seconds")
        throw ParseError(path.string() + ": unexpected header '" + line + "'");

    std::vector<ResultRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 9)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 9 fields, got " + std::to_string(fields.size()));
        ResultRecord r;
        try {
            r.exp_case = experiment_case_from_string(fields[0]);
            r.family = noise_family_from_string(fields[1]);
            r.n = static_cast<Index>(std::stoll(fields[2]));
            r.alpha = std::stod(fields[3]);
            r.replicates = std::stoi(fields[4]);
            r.accuracy = std::stod(fields[5]);
            r.type1 = parse_optional_double(fields[6]);
            r.type2 = parse_optional_double(fields[7]);
            r.seconds = std::stod(fields[8]);
        } catch (const std::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
        records.push_back(std::move(r));
    }
    return records;
}

void export_curves(const std::vector<CurveRecord>& records,
                   const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "test,case,family,n,alpha,replicates,type1,type2\n";
    for (const CurveRecord& r : records) {
        out << r.test << ',' << to_string(r.exp_case) << ',' << to_string(r.family)
            << ',' << r.n << ',' << format_double(r.alpha) << ',' << r.replicates << ','
            << format_double(r.type1) << ',' << format_double(r.type2) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

std::string to_string(ExperimentCase exp_case) {
    switch (exp_case) {
        case ExperimentCase::Case1: return "case1";
        case ExperimentCase::Case2: return "case2";
        case ExperimentCase::Case2Nonlinear: return "case2-nonlinear";
    }
    return "?";
}

ExperimentCase experiment_case_from_string(const std::string& name) {
    if (name == "case1") return ExperimentCase::Case1;
    if (name == "case2") return ExperimentCase::Case2;
    if (name == "case2-nonlinear") return ExperimentCase::Case2Nonlinear;
    throw ParseError("unknown experiment case '" + name + "'");
}

NoiseFamily noise_family_from_string(const std::string& name) {
    if (name == "exp") return NoiseFamily::Exponential;
    if (name == "gamma3") return NoiseFamily::Gamma;
    if (name == "gumbel") return NoiseFamily::Gumbel;
    if (name == "gaussian") return NoiseFamily::StandardNormal;
    throw ParseError("unknown noise family '" + name + "'");
}

} // namespace hocd
