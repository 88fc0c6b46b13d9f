#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hocd/bench.hpp"

using namespace hocd;

namespace {

ExperimentGrid tiny_grid() {
    ExperimentGrid grid;
    grid.cases = {ExperimentCase::Case1, ExperimentCase::Case2};
    grid.families = {NoiseFamily::Exponential};
    grid.sample_sizes = {5000};
    grid.replicates = 4;
    grid.alphas = {0.05, 1e-4};
    grid.master_seed = 77;
    return grid;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

// Everything except the wall-clock column, which is not reproducible.
std::string strip_seconds_column(const std::string& csv) {
    std::string out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t eol = csv.find('\n', pos);
        if (eol == std::string::npos) eol = csv.size();
        std::string line = csv.substr(pos, eol - pos);
        const std::size_t last_comma = line.rfind(',');
        if (last_comma != std::string::npos) line.resize(last_comma);
        out += line;
        out += '\n';
        pos = eol + 1;
    }
    return out;
}

} // namespace

TEST_CASE("grid validation") {
    ExperimentGrid grid = tiny_grid();
    grid.cases.clear();
    CHECK_THROWS_AS(run_grid(grid), Error);
    grid = tiny_grid();
    grid.replicates = 0;
    CHECK_THROWS_AS(run_grid(grid), Error);
}

TEST_CASE("single-replicate accuracy is 0 or 1") {
    ExperimentGrid grid = tiny_grid();
    grid.replicates = 1;
    grid.alphas = {1e-4};
    for (const ResultRecord& rec : run_grid(grid)) {
        CHECK((rec.accuracy == 0.0 || rec.accuracy == 1.0));
        CHECK(rec.verdicts.size() == 1);
    }
}

TEST_CASE("tiny grid smoke run") {
    const ExperimentGrid grid = tiny_grid();
    const auto records = run_grid(grid);
    REQUIRE(records.size() == 4); // 2 cases x 1 family x 1 size x 2 alphas

    for (const ResultRecord& rec : records) {
        CHECK(rec.replicates == 4);
        CHECK(rec.verdicts.size() == 4);
        CHECK(rec.accuracy >= 0.0);
        CHECK(rec.accuracy <= 1.0);
        CHECK(rec.seconds > 0.0);
        if (rec.exp_case == ExperimentCase::Case1) {
            CHECK(std::isfinite(rec.type1));
            CHECK(std::isnan(rec.type2));
        } else {
            CHECK(std::isnan(rec.type1));
            CHECK(std::isfinite(rec.type2));
        }
    }
}

TEST_CASE("results are identical for any worker-thread count") {
    const ExperimentGrid grid = tiny_grid();
    const auto a = run_grid(grid, 1);
    const auto b = run_grid(grid, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].accuracy == b[k].accuracy);
        CHECK(a[k].verdicts == b[k].verdicts);
        const bool t1_equal = (std::isnan(a[k].type1) && std::isnan(b[k].type1)) ||
                              a[k].type1 == b[k].type1;
        const bool t2_equal = (std::isnan(a[k].type2) && std::isnan(b[k].type2)) ||
                              a[k].type2 == b[k].type2;
        CHECK(t1_equal);
        CHECK(t2_equal);
    }

    const auto dir = std::filesystem::temp_directory_path();
    export_results(a, dir / "hocd_threads1.csv");
    export_results(b, dir / "hocd_threads4.csv");
    CHECK(strip_seconds_column(read_file(dir / "hocd_threads1.csv")) ==
          strip_seconds_column(read_file(dir / "hocd_threads4.csv")));
}

TEST_CASE("results CSV round-trips") {
    const auto dir = std::filesystem::temp_directory_path();

    SUBCASE("empty record list writes a header-only file") {
        const auto path = dir / "hocd_empty.csv";
        export_results({}, path);
        CHECK(read_file(path) == "case,family,n,alpha,replicates,accuracy,type1,type2,seconds\n");
        CHECK(import_results(path).empty());
    }

    SUBCASE("export / import / export is byte-identical") {
        ExperimentGrid grid = tiny_grid();
        grid.replicates = 2;
        const auto records = run_grid(grid);
        const auto p1 = dir / "hocd_rt1.csv";
        const auto p2 = dir / "hocd_rt2.csv";
        export_results(records, p1);
        const auto reread = import_results(p1);
        REQUIRE(reread.size() == records.size());
        export_results(reread, p2);
        CHECK(read_file(p1) == read_file(p2));
    }

    SUBCASE("unwritable path raises IoError") {
        CHECK_THROWS_AS(export_results({}, "/nonexistent-dir/out.csv"), IoError);
    }
}

TEST_CASE("row count is families x sizes x alphas per case") {
    ExperimentGrid grid;
    grid.cases = {ExperimentCase::Case2};
    grid.families = {NoiseFamily::Exponential, NoiseFamily::Gumbel};
    grid.sample_sizes = {5000, 6000};
    grid.replicates = 1;
    grid.alphas = {0.05, 0.01, 1e-4};
    grid.master_seed = 3;
    CHECK(run_grid(grid).size() == 2 * 2 * 3);
}

TEST_CASE("alpha = 1 is a degenerate level for the edge test") {
    ExperimentGrid grid = tiny_grid();
    grid.replicates = 3;
    grid.alphas = {1.0};
    grid.master_seed = 11;
    for (const ResultRecord& rec : run_grid(grid)) {
        if (rec.exp_case == ExperimentCase::Case1)
            CHECK(rec.type1 == 1.0); // always rejects the (true) no-edge null
        else
            CHECK(rec.type2 == 0.0); // never accepts the (false) no-edge null
    }
}

TEST_CASE("direction accuracy does not degrade with sample size (desk scale)") {
    ExperimentGrid grid;
    grid.cases = {ExperimentCase::Case2};
    grid.families = {NoiseFamily::Exponential};
    grid.sample_sizes = {5000, 20000};
    grid.replicates = 20;
    grid.alphas = {1e-4};
    grid.master_seed = 20250;
    const auto records = run_grid(grid);
    REQUIRE(records.size() == 2);
    CHECK(records[1].accuracy >= records[0].accuracy - 0.1);
}

TEST_CASE("nonlinear case runs end to end") {
    ExperimentGrid grid;
    grid.cases = {ExperimentCase::Case2Nonlinear};
    grid.families = {NoiseFamily::Exponential};
    grid.sample_sizes = {5000};
    grid.replicates = 2;
    grid.alphas = {1e-4};
    grid.master_seed = 5;
    const auto records = run_grid(grid);
    REQUIRE(records.size() == 1);
    CHECK(records[0].verdicts.size() == 2);
}

TEST_CASE("error curves carry the four rates with explicit provenance") {
    const ExperimentGrid grid = tiny_grid();
    const auto outcomes = evaluate_grid(grid);
    const auto curves = score_curves(grid, outcomes);

    int edge_case1 = 0, edge_case2 = 0, direction_rows = 0;
    for (const CurveRecord& c : curves) {
        CHECK((c.test == "edge" || c.test == "direction"));
        if (c.test == "edge" && c.exp_case == ExperimentCase::Case1) {
            ++edge_case1;
            CHECK(std::isfinite(c.type1));
            CHECK(std::isnan(c.type2));
        }
        if (c.test == "edge" && c.exp_case == ExperimentCase::Case2) {
            ++edge_case2;
            CHECK(std::isnan(c.type1));
            CHECK(std::isfinite(c.type2));
        }
        if (c.test == "direction") {
            ++direction_rows;
            CHECK(c.exp_case == ExperimentCase::Case2);
            CHECK(c.type1 >= 0.0);
            CHECK(c.type1 <= 1.0);
            CHECK(c.type2 >= 0.0);
            CHECK(c.type2 <= 1.0);
        }
    }
    CHECK(edge_case1 == 2);
    CHECK(edge_case2 == 2);
    CHECK(direction_rows == 2);

    const auto dir = std::filesystem::temp_directory_path();
    export_curves(curves, dir / "hocd_curves.csv");
    const std::string text = read_file(dir / "hocd_curves.csv");
    CHECK(text.find("test,case,family,n,alpha,replicates,type1,type2\n") == 0);

    // consistency with the scored records (same outcomes, same rule)
    const auto records = score_grid(grid, outcomes);
    for (const ResultRecord& rec : records) {
        for (const CurveRecord& c : curves) {
            if (c.test == "edge" && c.exp_case == rec.exp_case && c.alpha == rec.alpha &&
                c.n == rec.n) {
                if (rec.exp_case == ExperimentCase::Case1)
                    CHECK(c.type1 == rec.type1);
                else
                    CHECK(c.type2 == rec.type2);
            }
        }
    }
}
