#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hocd/cumulants.hpp"
#include "hocd/rng.hpp"

namespace hocd::testing {

inline PairedSample uniform_pair(Index n, std::uint64_t seed,
                                 double lo = -1.0, double hi = 1.0) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    PairedSample s;
    s.x.resize(n);
    s.y.resize(n);
    for (Index t = 0; t < n; ++t) {
        s.x[t] = dist(rng);
        s.y[t] = dist(rng);
    }
    return s;
}

// Correlated columns so cross cumulants are nonzero.
inline PairedSample correlated_pair(Index n, std::uint64_t seed) {
    PairedSample s = uniform_pair(n, seed);
    s.y = 0.5 * s.x + 0.5 * s.y + 0.2 * s.x * s.x;
    return s;
}

inline bool rel_close(double a, double b, double rel, double scale_floor = 0.0) {
    const double scale = std::max({std::abs(a), std::abs(b), scale_floor});
    return std::abs(a - b) <= rel * scale;
}

// ---------------------------------------------------------------------------
// Independent oracle: the cumulant partition sum evaluated over ALL set
// partitions (including singleton blocks) on RAW moments of uncentered data.
// Deliberately built from scratch -- recursive block construction and direct
// raw-moment averaging -- so it shares no code path with the library.

struct BruteForceCumulant {
    double value = 0.0;
    double term_scale = 0.0; // sum of |partition terms|, for tolerances
};

inline double raw_moment(const PairedSample& s, int a, int b) {
    double acc = 0.0;
    for (Index t = 0; t < s.n(); ++t)
        acc += std::pow(s.x[t], a) * std::pow(s.y[t], b);
    return acc / static_cast<double>(s.n());
}

inline void all_partitions(int k, std::vector<std::vector<std::vector<int>>>& out) {
    std::vector<std::vector<int>> current;
    auto place = [&](auto&& self, int e) -> void {
        if (e == k) {
            out.push_back(current);
            return;
        }
        // index-based: recursion grows/shrinks `current`, so references and
        // iterators into it do not survive the recursive call
        for (std::size_t bi = 0; bi < current.size(); ++bi) {
            current[bi].push_back(e);
            self(self, e + 1);
            current[bi].pop_back();
        }
        current.push_back({e});
        self(self, e + 1);
        current.pop_back();
    };
    place(place, 0);
}

inline BruteForceCumulant brute_force_joint_cumulant(const PairedSample& s,
                                                     int i, int j) {
    const int k = i + j;
    std::vector<std::vector<std::vector<int>>> partitions;
    all_partitions(k, partitions);

    BruteForceCumulant result;
    for (const auto& partition : partitions) {
        const int h = static_cast<int>(partition.size());
        double coeff = (h % 2 == 1) ? 1.0 : -1.0;
        for (int f = 1; f < h; ++f) coeff *= f; // (h-1)!
        double prod = coeff;
        for (const auto& block : partition) {
            int a = 0, b = 0;
            for (int e : block)
                (e < i ? a : b) += 1;
            prod *= raw_moment(s, a, b);
        }
        result.value += prod;
        result.term_scale += std::abs(prod);
    }
    return result;
}

} // namespace hocd::testing
