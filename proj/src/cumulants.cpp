#include "hocd/cumulants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace hocd {

namespace {

constexpr int kMaxOrder = 5;
constexpr Index kChunk = 4096;

void validate_sample(const PairedSample& sample) {
    if (sample.x.size() != sample.y.size())
        throw EmptySample("paired sample columns differ in length");
    if (sample.n() < 2)
        throw EmptySample("paired sample needs at least 2 observations");
    if (!sample.x.allFinite() || !sample.y.allFinite())
        throw NonFiniteInput("paired sample contains NaN or Inf");
}

// Running compensated sum (Neumaier). Used to combine chunk partial sums.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    double total() const { return sum + comp; }
};

double compensated_mean(const Eigen::ArrayXd& v) {
    CompensatedSum acc;
    const Index n = v.size();
    for (Index start = 0; start < n; start += kChunk) {
        const Index len = std::min(kChunk, n - start);
        acc.add(v.segment(start, len).sum());
    }
    return acc.total() / static_cast<double>(n);
}

} // namespace

PairedSample swap_columns(const PairedSample& sample) {
    return PairedSample{sample.y, sample.x};
}

MomentTable::MomentTable(double mean_x, double mean_y, int max_order, Index n)
    : mean_x_(mean_x), mean_y_(mean_y), max_order_(max_order), n_(n) {
    if (max_order < 2 || max_order > kMaxOrder)
        throw OrderOutOfRange("moment table order must be in [2, 5]");
    m_[0][0] = 1.0;
}

double MomentTable::central(int a, int b) const {
    if (a < 0 || b < 0 || a + b > max_order_)
        throw OrderOutOfRange("central moment (" + std::to_string(a) + "," +
                              std::to_string(b) + ") outside table order " +
                              std::to_string(max_order_));
    return m_[a][b];
}

void MomentTable::set_central(int a, int b, double value) { m_[a][b] = value; }

double CumulantProfile::at(CumulantKey key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw MissingCumulant("cumulant (" + std::to_string(key.i) + "," +
                              std::to_string(key.j) + ") not in profile");
    return it->second;
}

PairedSample center(const PairedSample& sample) {
    validate_sample(sample);
    PairedSample out;
    out.x = sample.x - compensated_mean(sample.x);
    out.y = sample.y - compensated_mean(sample.y);
    return out;
}

MomentTable moment_table(const PairedSample& sample, int max_order) {
    if (max_order < 2 || max_order > kMaxOrder)
        throw OrderOutOfRange("max_order must be in [2, 5]");
    validate_sample(sample);

    const Index n = sample.n();
    const double mx = compensated_mean(sample.x);
    const double my = compensated_mean(sample.y);

    // Chunked power-sum accumulation: plain sums inside a fixed-size chunk,
    // chunk totals combined with compensation. Deterministic for fixed kChunk.
    CompensatedSum acc[6][6];
    const double* xs = sample.x.data();
    const double* ys = sample.y.data();
    for (Index start = 0; start < n; start += kChunk) {
        const Index end = std::min(start + kChunk, n);
        double part[6][6] = {};
        for (Index t = start; t < end; ++t) {
            double px[6], py[6];
            px[0] = 1.0;
            py[0] = 1.0;
            px[1] = xs[t] - mx;
            py[1] = ys[t] - my;
            for (int p = 2; p <= max_order; ++p) {
                px[p] = px[p - 1] * px[1];
                py[p] = py[p - 1] * py[1];
            }
            for (int a = 0; a <= max_order; ++a)
                for (int b = 0; b <= max_order - a; ++b)
                    part[a][b] += px[a] * py[b];
        }
        for (int a = 0; a <= max_order; ++a)
            for (int b = 0; b <= max_order - a; ++b)
                acc[a][b].add(part[a][b]);
    }

    MomentTable table(mx, my, max_order, n);
    for (int a = 0; a <= max_order; ++a) {
        for (int b = 0; b <= max_order - a; ++b) {
            if (a + b < 2) continue; // (0,0)=1, (1,0)=(0,1)=0 by construction
            table.set_central(a, b, acc[a][b].total() / static_cast<double>(n));
        }
    }
    return table;
}

namespace {

// Partition sum over set partitions of the multiset {X*i, Y*j}, restricted to
// partitions without singleton blocks (those vanish on centered moments).
// Elements 0..i-1 stand for X. Enumeration via restricted growth strings.
template <typename CentralFn>
double partition_sum(int i, int j, const CentralFn& central) {
    const int k = i + j;
    std::array<int, 5> assign{};
    double total = 0.0;

    // (-1)^(h-1) (h-1)! for h = 1..5
    constexpr double kSign[6] = {0.0, 1.0, -1.0, 2.0, -6.0, 24.0};

    auto recurse = [&](auto&& self, int e, int nblocks) -> void {
        if (e == k) {
            int ax[5] = {}; // X count per block
            int sz[5] = {}; // block sizes
            for (int t = 0; t < k; ++t) {
                ++sz[assign[t]];
                if (t < i) ++ax[assign[t]];
            }
            for (int b = 0; b < nblocks; ++b)
                if (sz[b] == 1) return; // singleton: zero on centered data
            double prod = kSign[nblocks];
            for (int b = 0; b < nblocks; ++b)
                prod *= central(ax[b], sz[b] - ax[b]);
            total += prod;
            return;
        }
        for (int b = 0; b <= nblocks; ++b) {
            assign[static_cast<std::size_t>(e)] = b;
            self(self, e + 1, std::max(nblocks, b + 1));
        }
    };
    recurse(recurse, 0, 0);
    return total;
}

} // namespace

double joint_cumulant(const MomentTable& table, CumulantKey key) {
    if (key.i < 0 || key.j < 0 || key.order() < 2 || key.order() > table.max_order())
        throw OrderOutOfRange("cumulant key (" + std::to_string(key.i) + "," +
                              std::to_string(key.j) + ") outside table order");

    // Canonical orientation (i >= j): makes C_{i,j}(X,Y) and C_{j,i}(Y,X)
    // the same arithmetic, so the symmetry invariant holds exactly.
    int i = key.i, j = key.j;
    const bool transposed = i < j;
    if (transposed) std::swap(i, j);
    auto central = [&](int a, int b) {
        return transposed ? table.central(b, a) : table.central(a, b);
    };
    return partition_sum(i, j, central);
}

CumulantProfile cumulant_profile(const PairedSample& sample,
                                 std::span<const CumulantKey> keys) {
    CumulantProfile profile;
    if (keys.empty()) return profile;

    int max_order = 0;
    for (const CumulantKey& key : keys) {
        if (key.i < 0 || key.j < 0 || key.order() < 2 || key.order() > kMaxOrder)
            throw OrderOutOfRange("cumulant key (" + std::to_string(key.i) + "," +
                                  std::to_string(key.j) + ") outside [2, 5]");
        max_order = std::max(max_order, key.order());
    }

    const MomentTable table = moment_table(sample, max_order);
    for (const CumulantKey& key : keys)
        profile.set(key, joint_cumulant(table, key));
    return profile;
}

CumulantProfile cumulant_profile(const PairedSample& sample,
                                 std::initializer_list<CumulantKey> keys) {
    return cumulant_profile(sample, std::span<const CumulantKey>(keys.begin(), keys.size()));
}

std::vector<CumulantKey> decision_keys() {
    return {{3, 0}, {0, 3}, {2, 1}, {1, 2}, {4, 1}, {3, 2}, {2, 3}, {1, 4}};
}

} // namespace hocd
