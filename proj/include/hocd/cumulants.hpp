#pragma once

#include <Eigen/Core>

#include <compare>
#include <map>
#include <span>
#include <vector>

#include "hocd/errors.hpp"

namespace hocd {

using Eigen::Index;

/// n paired observations of the two observed variables.
struct PairedSample {
    Eigen::ArrayXd x;
    Eigen::ArrayXd y;

    Index n() const { return x.size(); }
};

/// Returns (y, x): the same observations with the column roles exchanged.
PairedSample swap_columns(const PairedSample& sample);

/// Multiplicities (i, j) of X and Y in the joint cumulant C_{i,j}(X, Y).
struct CumulantKey {
    int i = 0;
    int j = 0;

    int order() const { return i + j; }
    auto operator<=>(const CumulantKey&) const = default;
};

/// Central moments E[(X-mu_X)^a (Y-mu_Y)^b] for every a+b <= max_order.
/// Plug-in (divide-by-n) convention throughout. (1,0) and (0,1) are zero
/// by construction; (0,0) is one.
class MomentTable {
public:
    MomentTable(double mean_x, double mean_y, int max_order, Index n);

    double mean_x() const { return mean_x_; }
    double mean_y() const { return mean_y_; }
    int max_order() const { return max_order_; }
    Index n() const { return n_; }

    /// E[(X - mu_X)^a (Y - mu_Y)^b]; throws OrderOutOfRange if a+b exceeds
    /// the table's order.
    double central(int a, int b) const;

    void set_central(int a, int b, double value);

private:
    double mean_x_ = 0.0;
    double mean_y_ = 0.0;
    int max_order_ = 0;
    Index n_ = 0;
    double m_[6][6] = {};
};

/// Estimated joint cumulants keyed by (i, j).
class CumulantProfile {
public:
    CumulantProfile() = default;

    bool has(CumulantKey key) const { return values_.count(key) != 0; }
    bool empty() const { return values_.empty(); }
    std::size_t size() const { return values_.size(); }

    /// Throws MissingCumulant if the key was not requested.
    double at(CumulantKey key) const;
    double at(int i, int j) const { return at(CumulantKey{i, j}); }

    void set(CumulantKey key, double value) { values_[key] = value; }

    const std::map<CumulantKey, double>& values() const { return values_; }

private:
    std::map<CumulantKey, double> values_;
};

/// Subtracts the empirical mean from each column. Order preserved.
/// Throws EmptySample if n < 2, NonFiniteInput on NaN/Inf entries.
PairedSample center(const PairedSample& sample);

/// One pass over the data accumulating all central moments of total order
/// <= max_order (2 <= max_order <= 5). Power sums are chunked and the chunk
/// partial sums combined with Neumaier compensation, so fifth powers of
/// heavy-tailed draws do not lose precision.
MomentTable moment_table(const PairedSample& sample, int max_order);

/// Evaluates the cumulant partition sum
///   sum over set partitions (D_1..D_h) of (-1)^{h-1}(h-1)! prod_b E[prod D_b]
/// on centered moments, where singleton blocks vanish. Reduces to the central
/// moment for orders 2 and 3, to m4 minus the three pair products for order 4,
/// and to m5 minus the ten pair*triple products for order 5.
double joint_cumulant(const MomentTable& table, CumulantKey key);

/// Centers once, builds one MomentTable of the maximal requested order, and
/// evaluates every key. Empty key list yields an empty profile.
CumulantProfile cumulant_profile(const PairedSample& sample,
                                 std::span<const CumulantKey> keys);
CumulantProfile cumulant_profile(const PairedSample& sample,
                                 std::initializer_list<CumulantKey> keys);

/// The eight keys consumed by the decision procedure: third-order
/// (3,0),(0,3),(2,1),(1,2) and fifth-order (4,1),(3,2),(2,3),(1,4).
std::vector<CumulantKey> decision_keys();

} // namespace hocd
