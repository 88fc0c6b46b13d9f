// hocd: pairwise causal discovery under a latent confounder, driven by
// higher-order joint cumulants. Subcommands: generate, cumulants, discover,
// bench.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hocd/bench.hpp"
#include "hocd/dataset_io.hpp"
#include "hocd/discovery.hpp"
#include "hocd/inference.hpp"
#include "hocd/model.hpp"
#include "hocd/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace hocd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Loads one subcommand's section from the optional config file.
json load_config_section(const std::string& path, const std::string& section) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("config file " + path + ": " + e.what());
    }
    if (!doc.contains(section)) return json::object();
    if (!doc[section].is_object())
        throw ParseError("config file " + path + ": section '" + section +
                         "' must be an object");
    return doc[section];
}

// Flags override file values: apply the config value only when the flag was
// not given on the command line.
template <typename T>
void apply_config(const CLI::App& cmd, const json& section, const std::string& key,
                  T& value) {
    if (!section.contains(key)) return;
    const CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (opt != nullptr && opt->count() > 0) return;
    try {
        value = section.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("config key '" + key + "': " + e.what());
    }
}

PairStructure structure_from_string(const std::string& name) {
    if (name == "confounder-only") return PairStructure::ConfounderOnly;
    if (name == "x-to-y") return PairStructure::ConfounderXtoY;
    if (name == "y-to-x") return PairStructure::ConfounderYtoX;
    throw ParseError("unknown case '" + name +
                     "' (expected confounder-only | x-to-y | y-to-x)");
}

std::vector<CumulantKey> parse_keys(const std::vector<std::string>& specs) {
    std::vector<CumulantKey> keys;
    for (const std::string& spec : specs) {
        int i = 0, j = 0;
        char tail = 0;
        if (std::sscanf(spec.c_str(), "%d,%d%c", &i, &j, &tail) != 2)
            throw ParseError("bad --keys value '" + spec + "' (expected i,j)");
        keys.push_back({i, j});
    }
    return keys;
}

json sign_test_to_json(const SignTestResult& t) {
    json out;
    out["positives"] = t.positives;
    out["negatives"] = t.negatives;
    out["zeros"] = t.zeros;
    out["p_value"] = t.p_value;
    if (t.all_zeros) out["all_zeros"] = true;
    return out;
}

json stage_to_json(const StageEvaluation& stage) {
    json out;
    out["statistic_full_sample"] = stage.full_sample_statistic;
    out["sign_test"] = sign_test_to_json(stage.test);
    out["replicates"] = stage.boot.values;
    out["failed_replicates"] = stage.boot.failed;
    return out;
}

// ---------------------------------------------------------------------------

int cmd_generate(const std::string& config_path, CLI::App& cmd, std::string case_name,
                 std::string family_name, long long n, std::uint64_t seed,
                 std::string out_path, double lambda1, double lambda2, double eta,
                 bool nonlinear, double d_lx, double d_ly, double d_edge,
                 bool no_latent_cubic) {
    const json section = load_config_section(config_path, "generate");
    apply_config(cmd, section, "case", case_name);
    apply_config(cmd, section, "family", family_name);
    apply_config(cmd, section, "n", n);
    apply_config(cmd, section, "seed", seed);
    apply_config(cmd, section, "out", out_path);

    if (out_path.empty()) throw ParseError("generate needs --out");
    const PairStructure structure = structure_from_string(case_name);
    const NoiseFamily family = noise_family_from_string(family_name);
    if (family == NoiseFamily::StandardNormal)
        std::cerr << "warning: Gaussian noise makes every cumulant of order >= 3 "
                     "vanish; discovery on such data is uninformative\n";

    // Coefficients default to the seeded Uniform[0.8, 1.2] draw; explicit
    // flags pin individual values.
    PairModel model = random_model(structure == PairStructure::ConfounderOnly
                                       ? ModelCase::Case1
                                       : ModelCase::Case2,
                                   family, seed);
    model.structure = structure;
    if (cmd.get_option("--lambda1")->count() > 0) model.lambda1 = lambda1;
    if (cmd.get_option("--lambda2")->count() > 0) model.lambda2 = lambda2;
    if (cmd.get_option("--eta")->count() > 0) model.eta = eta;

    PairedSample data;
    if (nonlinear) {
        NonlinearSpec nl = NonlinearSpec::random(derive_seed(seed, 0x6e6cULL));
        if (cmd.get_option("--d-lx")->count() > 0) nl.d_lx = d_lx;
        if (cmd.get_option("--d-ly")->count() > 0) nl.d_ly = d_ly;
        if (cmd.get_option("--d-edge")->count() > 0) nl.d_edge = d_edge;
        nl.cubic_on_latent_edges = !no_latent_cubic;
        data = sample_nonlinear(model, nl, n, derive_seed(seed, 0x64617461ULL));
        std::cout << "# nonlinear d_lx=" << nl.d_lx << " d_ly=" << nl.d_ly
                  << " d_edge=" << nl.d_edge
                  << " latent_cubics=" << (nl.cubic_on_latent_edges ? 1 : 0) << "\n";
    } else {
        data = sample(model, n, derive_seed(seed, 0x64617461ULL));
    }
    write_dataset_csv(data, out_path);

    std::cout << "# case=" << case_name << " family=" << family_name << " n=" << n
              << " seed=" << seed << " lambda1=" << model.lambda1
              << " lambda2=" << model.lambda2;
    if (model.has_edge()) std::cout << " eta=" << model.eta;
    std::cout << " out=" << out_path << "\n";
    std::cout << "wrote " << n << " rows to " << out_path << "\n";
    return kExitOk;
}

int cmd_cumulants(const std::string& config_path, CLI::App& cmd, std::string in_path,
                  std::vector<std::string> key_specs) {
    const json section = load_config_section(config_path, "cumulants");
    apply_config(cmd, section, "in", in_path);
    apply_config(cmd, section, "keys", key_specs);

    if (in_path.empty()) throw ParseError("cumulants needs --in");
    std::vector<CumulantKey> keys =
        key_specs.empty() ? decision_keys() : parse_keys(key_specs);

    const PairedSample data = read_dataset_csv(in_path);
    const CumulantProfile profile =
        cumulant_profile(data, std::span<const CumulantKey>(keys));

    std::cout << "# in=" << in_path << " n=" << data.n() << "\n";
    std::cout << "i,j,value\n";
    for (const CumulantKey& key : keys)
        std::cout << key.i << ',' << key.j << ',' << format_full(profile.at(key))
                  << "\n";
    return kExitOk;
}

int cmd_discover(const std::string& config_path, CLI::App& cmd, std::string in_path,
                 double alpha, double m_fraction, int B, std::uint64_t seed,
                 std::string report_path, bool corroborate) {
    const json section = load_config_section(config_path, "discover");
    apply_config(cmd, section, "in", in_path);
    apply_config(cmd, section, "alpha", alpha);
    apply_config(cmd, section, "m-fraction", m_fraction);
    apply_config(cmd, section, "B", B);
    apply_config(cmd, section, "seed", seed);
    apply_config(cmd, section, "report", report_path);

    if (in_path.empty()) throw ParseError("discover needs --in");
    const PairedSample data = read_dataset_csv(in_path);
    const BootstrapConfig config{m_fraction, B, seed};
    DecisionOptions options;
    options.corroborate_fourth_order = corroborate;

    // Same staging as decide_pair, keeping the evaluation for the report.
    PairTestEvaluation eval =
        evaluate_pair_tests(data, config, options, /*include_direction=*/false);
    bool edge_accepted = eval.edge.test.p_value >= alpha;
    if (options.corroborate_fourth_order && eval.edge_fourth_order)
        edge_accepted = edge_accepted && eval.edge_fourth_order->test.p_value >= alpha;
    if (!edge_accepted) eval.direction = evaluate_direction_stage(data, config);
    const PairDecision decision = decide_from_evaluation(eval, alpha);

    const bool definitive = decision.verdict == Verdict::NoEdge ||
                            decision.verdict == Verdict::XtoY ||
                            decision.verdict == Verdict::YtoX;

    json report;
    report["config"] = {{"in", in_path},
                        {"alpha", alpha},
                        {"m_fraction", m_fraction},
                        {"B", B},
                        {"seed", seed},
                        {"corroborate_fourth_order", corroborate}};
    report["n"] = static_cast<long long>(data.n());
    report["verdict"] = to_string(decision.verdict);
    report["exit_code"] = definitive ? kExitOk : kExitInconclusive;
    report["edge_test"] = stage_to_json(eval.edge);
    if (eval.edge_fourth_order)
        report["edge_test_fourth_order"] = stage_to_json(*eval.edge_fourth_order);
    if (eval.direction) {
        json dir;
        dir["x_to_y"] = sign_test_to_json(eval.direction->test_x_to_y);
        dir["x_to_y"]["replicates"] = eval.direction->boot_x_to_y.values;
        dir["y_to_x"] = sign_test_to_json(eval.direction->test_y_to_x);
        dir["y_to_x"]["replicates"] = eval.direction->boot_y_to_x.values;
        dir["failed_replicates"] = eval.direction->boot_x_to_y.failed;
        report["direction_tests"] = dir;
    }
    if (eval.ratios)
        report["ratio_estimates"] = {{"theta_a", eval.ratios->theta_a()},
                                     {"theta_b", eval.ratios->theta_b()}};
    if (eval.residuals)
        report["direction_residuals"] = {{"r_x_to_y", eval.residuals->r_x_to_y},
                                         {"r_y_to_x", eval.residuals->r_y_to_x}};
    if (decision.verdict == Verdict::NoEdge && decision.confounder_coefficients) {
        report["confounder_coefficients"] = {
            {"alpha1", decision.confounder_coefficients->alpha1_hat},
            {"alpha2", decision.confounder_coefficients->alpha2_hat},
            {"note", "up to a joint sign; the latent scale is normalized to unit "
                     "variance"}};
    }
    report["diagnostics"] = decision.diagnostics;

    const std::string text = report.dump(2) + "\n";
    if (report_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(report_path);
        if (!out) throw IoError("cannot open " + report_path + " for writing");
        out << text;
        std::cout << "verdict " << to_string(decision.verdict) << "; report written to "
                  << report_path << "\n";
    }
    return definitive ? kExitOk : kExitInconclusive;
}

int cmd_bench(const std::string& config_path, CLI::App& cmd, std::string out_dir,
              int scale, int threads) {
    if (config_path.empty()) throw ParseError("bench needs --config");
    const json section = load_config_section(config_path, "bench");
    for (const char* required : {"cases", "families", "sample_sizes", "master_seed"})
        if (!section.contains(required))
            throw ParseError("bench config: missing key '" + std::string(required) + "'");

    ExperimentGrid grid;
    for (const auto& name : section.at("cases"))
        grid.cases.push_back(experiment_case_from_string(name.get<std::string>()));
    for (const auto& name : section.at("families"))
        grid.families.push_back(noise_family_from_string(name.get<std::string>()));
    for (const auto& n : section.at("sample_sizes"))
        grid.sample_sizes.push_back(n.get<Index>());
    grid.master_seed = section.at("master_seed").get<std::uint64_t>();
    if (section.contains("replicates"))
        grid.replicates = section.at("replicates").get<int>();
    if (section.contains("alphas")) {
        grid.alphas.clear();
        for (const auto& a : section.at("alphas")) grid.alphas.push_back(a.get<double>());
    }
    if (section.contains("m_fraction"))
        grid.m_fraction = section.at("m_fraction").get<double>();
    if (section.contains("B")) grid.bootstrap_B = section.at("B").get<int>();

    apply_config(cmd, section, "out", out_dir);
    if (out_dir.empty()) throw ParseError("bench needs --out");

    if (scale > 1) {
        grid.replicates = std::max(1, grid.replicates / scale);
        for (Index& n : grid.sample_sizes) n = std::max<Index>(100, n / scale);
    }

    fs::create_directories(out_dir);
    const auto outcomes = evaluate_grid(grid, threads);
    export_results(score_grid(grid, outcomes), fs::path(out_dir) / "results.csv");
    export_curves(score_curves(grid, outcomes), fs::path(out_dir) / "curves.csv");

    json resolved;
    resolved["config_file"] = config_path;
    resolved["scale"] = scale;
    resolved["threads"] = threads;
    json cases = json::array(), families = json::array();
    for (ExperimentCase c : grid.cases) cases.push_back(to_string(c));
    for (NoiseFamily f : grid.families) families.push_back(to_string(f));
    resolved["grid"] = {{"cases", cases},
                        {"families", families},
                        {"sample_sizes", grid.sample_sizes},
                        {"replicates", grid.replicates},
                        {"alphas", grid.alphas},
                        {"master_seed", grid.master_seed},
                        {"m_fraction", grid.m_fraction},
                        {"B", grid.bootstrap_B}};
    std::ofstream cfg(fs::path(out_dir) / "resolved_config.json");
    cfg << resolved.dump(2) << "\n";

    std::cout << "wrote " << (fs::path(out_dir) / "results.csv").string() << " and "
              << (fs::path(out_dir) / "curves.csv").string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pairwise causal discovery with higher-order cumulants"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config file, one section per subcommand")
        ->envname("HOCD_CONFIG");

    // generate
    auto* gen = app.add_subcommand("generate", "generate a synthetic dataset CSV");
    std::string gen_case = "confounder-only", gen_family = "exp", gen_out;
    long long gen_n = 10000;
    std::uint64_t gen_seed = 0;
    double gen_l1 = 1.0, gen_l2 = 1.0, gen_eta = 1.0;
    bool gen_nonlinear = false, gen_no_latent_cubic = false;
    double gen_dlx = 0.02, gen_dly = 0.02, gen_dedge = 0.02;
    gen->add_option("--case", gen_case, "confounder-only | x-to-y | y-to-x");
    gen->add_option("--family", gen_family, "exp | gamma3 | gumbel | gaussian");
    gen->add_option("--n", gen_n, "sample size");
    gen->add_option("--seed", gen_seed, "master seed")->envname("HOCD_SEED");
    gen->add_option("--out", gen_out, "output CSV path");
    gen->add_option("--lambda1", gen_l1, "override L->X strength");
    gen->add_option("--lambda2", gen_l2, "override L->Y strength");
    gen->add_option("--eta", gen_eta, "override edge strength");
    gen->add_flag("--nonlinear", gen_nonlinear, "add cubic terms per structural edge");
    gen->add_option("--d-lx", gen_dlx, "cubic coefficient on L->X");
    gen->add_option("--d-ly", gen_dly, "cubic coefficient on L->Y");
    gen->add_option("--d-edge", gen_dedge, "cubic coefficient on the observed edge");
    gen->add_flag("--no-latent-cubic", gen_no_latent_cubic,
                  "apply the cubic only to the observed edge");

    // cumulants
    auto* cum = app.add_subcommand("cumulants", "estimate joint cumulants of a dataset");
    std::string cum_in;
    std::vector<std::string> cum_keys;
    cum->add_option("--in", cum_in, "input dataset CSV");
    cum->add_option("--keys", cum_keys,
                    "cumulant keys as i,j (repeatable; default: the decision set)");

    // discover
    auto* dis = app.add_subcommand("discover", "run the two-stage pair decision");
    std::string dis_in, dis_report;
    double dis_alpha = 1e-4, dis_mfrac = 0.8;
    int dis_B = 30;
    std::uint64_t dis_seed = 0;
    bool dis_corroborate = false;
    dis->add_option("--in", dis_in, "input dataset CSV");
    dis->add_option("--alpha", dis_alpha, "significance level (default 1e-4)");
    dis->add_option("--m-fraction", dis_mfrac,
                    "bootstrap resample fraction (default 0.8)");
    dis->add_option("--B", dis_B, "bootstrap replicates (default 30)");
    dis->add_option("--seed", dis_seed, "bootstrap seed")->envname("HOCD_SEED");
    dis->add_option("--report", dis_report, "write the JSON report here (default stdout)");
    dis->add_flag("--corroborate-fourth-order", dis_corroborate,
                  "also require the fourth-order edge statistic to accept");

    // bench
    auto* ben = app.add_subcommand("bench", "run a simulation-study grid");
    std::string ben_out;
    int ben_scale = 1, ben_threads = 0;
    ben->add_option("--out", ben_out, "output directory");
    ben->add_option("--scale", ben_scale,
                    "divide replicates and sample sizes for smoke runs");
    ben->add_option("--threads", ben_threads, "worker threads (default: hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(config_path, *gen, gen_case, gen_family, gen_n, gen_seed,
                                gen_out, gen_l1, gen_l2, gen_eta, gen_nonlinear, gen_dlx,
                                gen_dly, gen_dedge, gen_no_latent_cubic);
        if (cum->parsed()) return cmd_cumulants(config_path, *cum, cum_in, cum_keys);
        if (dis->parsed())
            return cmd_discover(config_path, *dis, dis_in, dis_alpha, dis_mfrac, dis_B,
                                dis_seed, dis_report, dis_corroborate);
        if (ben->parsed())
            return cmd_bench(config_path, *ben, ben_out, ben_scale, ben_threads);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
