#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hocd/discovery.hpp"
#include "hocd/model.hpp"
#include "test_support.hpp"

using namespace hocd;
using namespace hocd::testing;

namespace {

const std::vector<NoiseFamily> kFamilies = {
    NoiseFamily::Exponential, NoiseFamily::Gamma, NoiseFamily::Gumbel};

std::vector<CumulantKey> all_decision_keys() {
    auto keys = decision_keys();
    keys.push_back({1, 1});
    keys.push_back({2, 2});
    keys.push_back({1, 3});
    keys.push_back({3, 1});
    return keys;
}

CumulantProfile profile_of(const PairModel& m) {
    const auto keys = all_decision_keys();
    return exact_profile(m, std::span<const CumulantKey>(keys));
}

// lambda1 = lambda2 = eta = 1 with Exp(1) noises: every downstream quantity
// is hand-computable.
PairModel fixture_model() {
    PairModel m;
    m.structure = PairStructure::ConfounderXtoY;
    m.lambda1 = m.lambda2 = m.eta = 1.0;
    return m;
}

PairModel random_case2(NoiseFamily family, std::uint64_t seed, bool mirror) {
    PairModel m = random_model(ModelCase::Case2, family, seed);
    if (mirror) m.structure = PairStructure::ConfounderYtoX;
    return m;
}

// The two mixing-coefficient ratios of the shared components, read off the
// mixing matrix directly: the independent route the quadratic is checked
// against.
std::pair<double, double> expected_ratios(const PairModel& m) {
    const MixingMatrix mix = to_mixing(m);
    double r1 = mix.alpha2 / mix.alpha1;
    double r2 = m.structure == PairStructure::ConfounderYtoX
                    ? mix.gamma2 / mix.gamma1
                    : mix.beta2 / mix.beta1;
    if (r1 > r2) std::swap(r1, r2);
    return {r1, r2};
}

} // namespace

TEST_CASE("worked fixture: every stage is exact") {
    const PairModel m = fixture_model();
    const CumulantProfile p = profile_of(m);

    CHECK(p.at(2, 1) == 6.0);
    CHECK(p.at(1, 2) == 10.0);
    CHECK(p.at(3, 0) == 4.0);
    CHECK(p.at(0, 3) == 20.0);
    CHECK(p.at(4, 1) == 72.0);
    CHECK(p.at(3, 2) == 120.0);
    CHECK(p.at(2, 3) == 216.0);
    CHECK(p.at(1, 4) == 408.0);

    const QuadraticCoefficients q = ratio_quadratic_coefficients(p);
    CHECK(q.a == 120.0 * 120.0 - 216.0 * 72.0); // -1152
    CHECK(q.b == 408.0 * 72.0 - 216.0 * 120.0); // 3456
    CHECK(q.c == 216.0 * 216.0 - 408.0 * 120.0); // -2304

    const RatioPair roots = solve_ratio_quadratic(q);
    CHECK(roots.theta_a() == 1.0);
    CHECK(roots.theta_b() == 2.0);

    const auto [term1, term2] = shared_third_cumulant_terms(p, roots);
    CHECK(term1 == 2.0);
    CHECK(term2 == 2.0);

    const DirectionResiduals res = direction_residuals(p, roots);
    CHECK(res.r_x_to_y == 0.0);
    CHECK(res.r_y_to_x == 2.0);

    CHECK(edge_statistic(p) == -1152.0);
}

TEST_CASE("edge statistic on exact no-edge profiles vanishes") {
    PairModel m;
    m.lambda1 = m.lambda2 = 1.0; // confounder only
    const CumulantProfile p = profile_of(m);
    CHECK(edge_statistic(p) == 0.0);
    CHECK(edge_statistic(p, 1, 1) == 0.0); // fourth-order variant
}

TEST_CASE("ratio quadratic coefficient edge cases") {
    CumulantProfile zeros;
    for (CumulantKey k : ratio_quadratic_keys()) zeros.set(k, 0.0);
    const QuadraticCoefficients q = ratio_quadratic_coefficients(zeros);
    CHECK(q.a == 0.0);
    CHECK(q.b == 0.0);
    CHECK(q.c == 0.0);

    CumulantProfile missing;
    missing.set({4, 1}, 1.0);
    CHECK_THROWS_AS(ratio_quadratic_coefficients(missing), MissingCumulant);
}

TEST_CASE("solve_ratio_quadratic") {
    SUBCASE("factorable case") {
        const RatioPair r = solve_ratio_quadratic(1.0, -3.0, 2.0);
        CHECK(r.theta_a() == 1.0);
        CHECK(r.theta_b() == 2.0);
    }
    SUBCASE("degenerate leading coefficient") {
        CHECK_THROWS_AS(solve_ratio_quadratic(1e-12, 1.0, 1.0), DegenerateQuadratic);
        CHECK_THROWS_AS(solve_ratio_quadratic(0.0, 0.0, 0.0), DegenerateQuadratic);
    }
    SUBCASE("complex roots") {
        CHECK_THROWS_AS(solve_ratio_quadratic(1.0, 0.0, 1.0), ComplexRoots);
    }
    SUBCASE("repeated root") {
        CHECK_THROWS_AS(solve_ratio_quadratic(1.0, -2.0, 1.0), DegenerateRoots);
    }
    SUBCASE("tiny negative discriminant is clamped to zero") {
        // disc = -4e-12, within the clamp band: solves with nearly equal
        // roots instead of raising ComplexRoots
        const RatioPair r = solve_ratio_quadratic(1.0, 2.0, 1.0 + 1e-12);
        CHECK(rel_close(r.theta_a(), -1.0, 1e-9));
        CHECK(rel_close(r.theta_b(), -1.0, 1e-9));
    }
    SUBCASE("stable against cancellation") {
        // roots 1e3 and 1e-3: the naive formula loses digits in the small root
        const RatioPair r = solve_ratio_quadratic(1.0, -(1e3 + 1e-3), 1.0);
        CHECK(rel_close(r.theta_a(), 1e-3, 1e-12));
        CHECK(rel_close(r.theta_b(), 1e3, 1e-12));
    }
}

TEST_CASE("exact-oracle recovery of mixing ratios (100 models per structure)") {
    for (NoiseFamily family : kFamilies) {
        for (bool mirror : {false, true}) {
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                const PairModel m = random_case2(family, seed, mirror);
                const CumulantProfile p = profile_of(m);
                const RatioPair roots =
                    solve_ratio_quadratic(ratio_quadratic_coefficients(p));
                const auto [r1, r2] = expected_ratios(m);
                CHECK(rel_close(roots.theta_a(), r1, 1e-9));
                CHECK(rel_close(roots.theta_b(), r2, 1e-9));
            }
        }
    }
}

TEST_CASE("edge statistic separates the two regimes on exact profiles") {
    for (NoiseFamily family : kFamilies) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const PairModel none = random_model(ModelCase::Case1, family, seed);
            const CumulantProfile p0 = profile_of(none);
            const double scale =
                std::max(p0.at(3, 2) * p0.at(3, 2), std::abs(p0.at(2, 3) * p0.at(4, 1)));
            CHECK(std::abs(edge_statistic(p0)) <= 1e-12 * scale);

            const PairModel edge = random_case2(family, seed, seed % 2 == 1);
            CHECK(std::abs(edge_statistic(profile_of(edge))) > 1e-6);
        }
    }
}

TEST_CASE("direction residuals vanish exactly in the causal direction") {
    for (NoiseFamily family : kFamilies) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const bool mirror = seed % 2 == 1;
            const PairModel m = random_case2(family, seed, mirror);
            const CumulantProfile p = profile_of(m);
            const RatioPair roots =
                solve_ratio_quadratic(ratio_quadratic_coefficients(p));
            const DirectionResiduals res = direction_residuals(p, roots);

            // anti-causal residual recovers the effect's private-noise cubic
            const MixingMatrix mix = to_mixing(m);
            if (!mirror) {
                const double expected =
                    mix.gamma2 * mix.gamma2 * mix.gamma2 * noise_cumulant(m.noise_ey, 3);
                CHECK(std::abs(res.r_x_to_y) <= 1e-9 * std::abs(p.at(3, 0)));
                CHECK(rel_close(res.r_y_to_x, expected, 1e-9));
            } else {
                const double expected =
                    mix.beta1 * mix.beta1 * mix.beta1 * noise_cumulant(m.noise_ex, 3);
                CHECK(std::abs(res.r_y_to_x) <= 1e-9 * std::abs(p.at(0, 3)));
                CHECK(rel_close(res.r_x_to_y, expected, 1e-9));
            }
        }
    }
}

TEST_CASE("residuals are invariant under relabeling the ratio pair") {
    const CumulantProfile p = profile_of(fixture_model());
    const RatioPair fwd(2.0, 1.0);
    const RatioPair rev(1.0, 2.0);
    CHECK(fwd.theta_a() == rev.theta_a());
    CHECK(fwd.theta_b() == rev.theta_b());
    const DirectionResiduals a = direction_residuals(p, fwd);
    const DirectionResiduals b = direction_residuals(p, rev);
    CHECK(a.r_x_to_y == b.r_x_to_y);
    CHECK(a.r_y_to_x == b.r_y_to_x);
    CHECK(a.shared_term_1 == b.shared_term_1);
}

TEST_CASE("scale invariance at the population level") {
    const PairModel m = fixture_model();
    const CumulantProfile p = profile_of(m);
    const double a = 1.3, b = 0.7;
    CumulantProfile scaled;
    for (const auto& [key, value] : p.values())
        scaled.set(key, std::pow(a, key.i) * std::pow(b, key.j) * value);

    // s at keys (2,1) scales by a^6 b^4
    CHECK(rel_close(edge_statistic(scaled),
                    std::pow(a, 6) * std::pow(b, 4) * edge_statistic(p), 1e-12,
                    1e-300));

    const RatioPair r0 = solve_ratio_quadratic(ratio_quadratic_coefficients(p));
    const RatioPair r1 = solve_ratio_quadratic(ratio_quadratic_coefficients(scaled));
    const DirectionResiduals d0 = direction_residuals(p, r0);
    const DirectionResiduals d1 = direction_residuals(scaled, r1);
    CHECK(std::abs(d1.r_x_to_y) <= 1e-9 * std::abs(scaled.at(3, 0)));
    CHECK(rel_close(d1.r_y_to_x, b * b * b * d0.r_y_to_x, 1e-9));
}

TEST_CASE("shared-term recovery degeneracies") {
    const CumulantProfile p = profile_of(fixture_model());
    CHECK_THROWS_AS(shared_third_cumulant_terms(p, RatioPair(1.0, 1.0 + 1e-9)),
                    DivisionNearZero);
    CHECK_THROWS_AS(shared_third_cumulant_terms(p, RatioPair(1e-9, 1.0)),
                    DivisionNearZero);
    CHECK_THROWS_AS(RatioPair(1.0, 1.0), DegenerateRoots);
    CHECK_THROWS_AS(RatioPair(std::nan(""), 1.0), DegenerateRoots);
}

TEST_CASE("no-edge coefficient recovery") {
    SUBCASE("worked example lambda = (1, 2)") {
        PairModel m;
        m.lambda1 = 1.0;
        m.lambda2 = 2.0;
        const CumulantProfile p = profile_of(m);
        CHECK(p.at(2, 1) == 4.0);
        CHECK(p.at(1, 2) == 8.0);
        CHECK(p.at(1, 1) == 2.0);
        const ConfounderCoefficients est = estimate_confounder_coefficients(p);
        CHECK(rel_close(est.alpha1_hat, 1.0, 1e-12));
        CHECK(rel_close(est.alpha2_hat, 2.0, 1e-12));
        CHECK(rel_close(est.alpha1_hat * est.alpha2_hat, p.at(1, 1), 1e-12));
    }
    SUBCASE("symmetric lambdas give sqrt(C11) twice") {
        PairModel m;
        m.lambda1 = m.lambda2 = 1.1;
        const CumulantProfile p = profile_of(m);
        const ConfounderCoefficients est = estimate_confounder_coefficients(p);
        CHECK(rel_close(est.alpha1_hat, std::sqrt(p.at(1, 1)), 1e-12));
        CHECK(rel_close(est.alpha2_hat, est.alpha1_hat, 1e-12));
    }
    SUBCASE("recovery over random no-edge models (up to joint sign)") {
        // The recovered pair is the latent's mixing coefficients under the
        // unit-variance normalization of L, i.e. lambda_i * sqrt(kappa_2(L));
        // the scale factor is 1 for Exp(1).
        for (NoiseFamily family : kFamilies) {
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                const PairModel m = random_model(ModelCase::Case1, family, seed);
                const double latent_scale = std::sqrt(noise_cumulant(m.noise_l, 2));
                const ConfounderCoefficients est =
                    estimate_confounder_coefficients(profile_of(m));
                CHECK(rel_close(std::abs(est.alpha1_hat),
                                std::abs(m.lambda1) * latent_scale, 1e-9));
                CHECK(rel_close(std::abs(est.alpha2_hat),
                                std::abs(m.lambda2) * latent_scale, 1e-9));
            }
        }
    }
    SUBCASE("negative radicand") {
        CumulantProfile p;
        p.set({2, 1}, -4.0);
        p.set({1, 2}, 8.0);
        p.set({1, 1}, 2.0);
        CHECK_THROWS_AS(estimate_confounder_coefficients(p), NegativeUnderRoot);
    }
}
