#pragma once

#include <utility>

#include "hocd/cumulants.hpp"

namespace hocd {

/// Coefficients of the ratio quadratic a*theta^2 + b*theta + c = 0 whose
/// roots are the two mixing-coefficient ratios of the shared components.
struct QuadraticCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Unordered pair of candidate ratios {alpha2/alpha1, beta2/beta1}.
/// Stored in canonical order (theta_a <= theta_b) so that every downstream
/// formula is literally label-independent.
class RatioPair {
public:
    RatioPair(double first, double second);

    double theta_a() const { return theta_a_; }
    double theta_b() const { return theta_b_; }

private:
    double theta_a_;
    double theta_b_;
};

/// Direction criteria R and the recovered shared-component third-cumulant
/// contributions they are built from.
struct DirectionResiduals {
    double r_x_to_y = 0.0;
    double r_y_to_x = 0.0;
    double shared_term_1 = 0.0;
    double shared_term_2 = 0.0;
};

/// Mixing coefficients of the single latent confounder on X and Y in the
/// no-edge case, recovered up to a joint sign (positive root reported).
struct ConfounderCoefficients {
    double alpha1_hat = 0.0;
    double alpha2_hat = 0.0;
};

/// Builds the ratio quadratic from order-(i+j+3) cumulants:
///   a = C_{i+2,j+1}^2 - C_{i+1,j+2} C_{i+3,j}
///   b = C_{i,j+3} C_{i+3,j} - C_{i+1,j+2} C_{i+2,j+1}
///   c = C_{i+1,j+2}^2 - C_{i,j+3} C_{i+2,j+1}
/// Defaults i = j = 1, so all four keys are fifth-order.
QuadraticCoefficients ratio_quadratic_coefficients(const CumulantProfile& profile,
                                                   int i = 1, int j = 1);

/// Solves the quadratic with the numerically stable form (larger-magnitude
/// root first, the other as c/(a*root)). Tiny negative discriminants are
/// clamped to zero.
///
/// Throws DegenerateQuadratic when |a| <= 1e-8 * max(|b|, |c|, 1) -- the
/// no-edge regime of the edge-existence criterion; ComplexRoots when the
/// discriminant is significantly negative; DegenerateRoots on equal roots.
RatioPair solve_ratio_quadratic(double a, double b, double c);
RatioPair solve_ratio_quadratic(const QuadraticCoefficients& q);

/// Edge-existence statistic s = C_{i+1,j+1}^2 - C_{i,j+2} C_{i+2,j};
/// zero iff no directed edge under a single shared confounder. The decision
/// procedure uses (i,j) = (2,1), i.e. s = C_{3,2}^2 - C_{2,3} C_{4,1}.
double edge_statistic(const CumulantProfile& profile, int i = 2, int j = 1);

/// Recovers the shared-component contributions from third-order cumulants:
///   term1 = (C_{1,2} - theta_b C_{2,1}) / (theta_a (theta_a - theta_b))
///   term2 = (C_{1,2} - theta_a C_{2,1}) / (theta_b (theta_b - theta_a))
/// term1 is alpha1^3 C_3(S_1) when theta_a is the alpha ratio; swapping the
/// labels swaps the terms.
std::pair<double, double> shared_third_cumulant_terms(const CumulantProfile& profile,
                                                      const RatioPair& ratios);

/// R_{X->Y} = C_3(X) - term1 - term2;
/// R_{Y->X} = C_3(Y) - theta_a^3 term1 - theta_b^3 term2.
/// The residual in the true causal direction vanishes; the anti-causal one
/// equals the cubed private-noise contribution.
DirectionResiduals direction_residuals(const CumulantProfile& profile,
                                       const RatioPair& ratios);

/// No-edge coefficient recovery:
///   alpha1_hat = sqrt( (C_{i+1,j} / C_{i,j+1}) * C_{1,1} ),
///   alpha2_hat = C_{1,1} / alpha1_hat.
/// Valid when the edge test concluded no edge. Throws NegativeUnderRoot
/// when the radicand is negative (estimator inapplicable / sampling noise).
ConfounderCoefficients estimate_confounder_coefficients(const CumulantProfile& profile,
                                                        int i = 1, int j = 1);

/// Keys the ratio quadratic needs at offsets (i, j).
std::vector<CumulantKey> ratio_quadratic_keys(int i = 1, int j = 1);

/// Keys the edge statistic needs at offsets (i, j).
std::vector<CumulantKey> edge_statistic_keys(int i = 2, int j = 1);

} // namespace hocd
