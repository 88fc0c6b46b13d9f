#include "hocd/discovery.hpp"

#include <algorithm>
#include <cmath>

namespace hocd {

namespace {

constexpr double kDegenerateRel = 1e-8;   // |a| relative floor for the quadratic
constexpr double kDistinctRel = 1e-6;     // ratio-distinctness tolerance

double cube(double v) { return v * v * v; }

} // namespace

RatioPair::RatioPair(double first, double second) {
    if (!std::isfinite(first) || !std::isfinite(second))
        throw DegenerateRoots("ratio pair must be finite");
    if (first == second)
        throw DegenerateRoots("ratio pair must be distinct");
    theta_a_ = std::min(first, second);
    theta_b_ = std::max(first, second);
}

QuadraticCoefficients ratio_quadratic_coefficients(const CumulantProfile& profile,
                                                   int i, int j) {
    const double c30 = profile.at(i + 3, j);
    const double c21 = profile.at(i + 2, j + 1);
    const double c12 = profile.at(i + 1, j + 2);
    const double c03 = profile.at(i, j + 3);
    QuadraticCoefficients q;
    q.a = c21 * c21 - c12 * c30;
    q.b = c03 * c30 - c12 * c21;
    q.c = c12 * c12 - c03 * c21;
    return q;
}

RatioPair solve_ratio_quadratic(double a, double b, double c) {
    const double scale = std::max({std::abs(b), std::abs(c), 1.0});
    if (std::abs(a) <= kDegenerateRel * scale)
        throw DegenerateQuadratic("leading coefficient relatively zero (no-edge regime)");

    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        if (disc >= -kDegenerateRel * (b * b + std::abs(4.0 * a * c)))
            disc = 0.0;
        else
            throw ComplexRoots("discriminant significantly negative (model misfit)");
    }

    const double sqrt_disc = std::sqrt(disc);
    const double q = -0.5 * (b >= 0.0 ? b + sqrt_disc : b - sqrt_disc);
    if (q == 0.0) {
        // b == 0 and disc == 0: the double root 0.
        throw DegenerateRoots("quadratic has a repeated root");
    }
    const double root1 = q / a;
    const double root2 = c / q;
    if (root1 == root2)
        throw DegenerateRoots("quadratic has a repeated root");
    return RatioPair(root1, root2);
}

RatioPair solve_ratio_quadratic(const QuadraticCoefficients& q) {
    return solve_ratio_quadratic(q.a, q.b, q.c);
}

double edge_statistic(const CumulantProfile& profile, int i, int j) {
    const double mid = profile.at(i + 1, j + 1);
    const double lo = profile.at(i, j + 2);
    const double hi = profile.at(i + 2, j);
    return mid * mid - lo * hi;
}

std::pair<double, double> shared_third_cumulant_terms(const CumulantProfile& profile,
                                                      const RatioPair& ratios) {
    const double ta = ratios.theta_a();
    const double tb = ratios.theta_b();
    const double span = std::max(std::abs(ta), std::abs(tb));
    if (span == 0.0 || std::abs(ta - tb) <= kDistinctRel * span ||
        std::min(std::abs(ta), std::abs(tb)) <= kDistinctRel * span)
        throw DivisionNearZero("mixing-coefficient ratios too close or too small");

    const double c21 = profile.at(2, 1);
    const double c12 = profile.at(1, 2);
    const double term1 = (c12 - tb * c21) / (ta * (ta - tb));
    const double term2 = (c12 - ta * c21) / (tb * (tb - ta));
    return {term1, term2};
}

DirectionResiduals direction_residuals(const CumulantProfile& profile,
                                       const RatioPair& ratios) {
    const auto [term1, term2] = shared_third_cumulant_terms(profile, ratios);
    DirectionResiduals res;
    res.shared_term_1 = term1;
    res.shared_term_2 = term2;
    res.r_x_to_y = profile.at(3, 0) - term1 - term2;
    res.r_y_to_x = profile.at(0, 3) - cube(ratios.theta_a()) * term1 -
                   cube(ratios.theta_b()) * term2;
    return res;
}

ConfounderCoefficients estimate_confounder_coefficients(const CumulantProfile& profile,
                                                        int i, int j) {
    const double num = profile.at(i + 1, j);
    const double den = profile.at(i, j + 1);
    const double c11 = profile.at(1, 1);
    if (den == 0.0)
        throw DivisionNearZero("C_{i,j+1} is zero in coefficient recovery");
    const double radicand = (num / den) * c11;
    if (radicand <= 0.0)
        throw NegativeUnderRoot("radicand not positive; coefficient recovery inapplicable");
    ConfounderCoefficients out;
    out.alpha1_hat = std::sqrt(radicand);
    out.alpha2_hat = c11 / out.alpha1_hat;
    return out;
}

std::vector<CumulantKey> ratio_quadratic_keys(int i, int j) {
    return {{i + 3, j}, {i + 2, j + 1}, {i + 1, j + 2}, {i, j + 3}};
}

std::vector<CumulantKey> edge_statistic_keys(int i, int j) {
    return {{i + 1, j + 1}, {i, j + 2}, {i + 2, j}};
}

} // namespace hocd
