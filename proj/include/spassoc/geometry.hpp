#ifndef SPASSOC_GEOMETRY_HPP
#define SPASSOC_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

#include "spassoc/errors.hpp"

namespace spassoc {

/// Two spatial processes observed at the same n planar locations.
/// 1-D (time) index sets are embedded as coordinates (t, const).
struct PointSample {
    std::vector<double> s1; ///< first coordinate of each location
    std::vector<double> s2; ///< second coordinate
    std::vector<double> x;  ///< first observed variable
    std::vector<double> y;  ///< second observed variable

    std::size_t size() const { return s1.size(); }
};

/// Checks the PointSample invariants: aligned lengths, n >= 3, finite entries,
/// nonzero sample variance of both variables. Throws input_error for structural
/// problems and degeneracy_error("constant variable") for zero variance.
void validate(const PointSample& sample);

/// Distance strata shared by the binned estimators. The K upper bounds split
/// (0, max_dist] into equal-width intervals ((k-1)*D/K, k*D/K]; card[k] is the
/// number of unordered pairs whose distance falls in interval k. Pairs at
/// distance exactly zero belong to no class and are counted in zero_pairs, so
/// sum(card) + zero_pairs == n(n-1)/2.
struct LagClasses {
    std::vector<double> upper_bounds;
    std::vector<std::int64_t> card;
    double max_dist = 0.0;
    std::int64_t zero_pairs = 0;

    int nclass() const { return static_cast<int>(upper_bounds.size()); }
};

/// Default number of distance classes when none is requested.
inline constexpr int kDefaultNClass = 13;

/// Number of unordered pairs n(n-1)/2.
inline std::uint64_t pair_count(std::size_t n) {
    return static_cast<std::uint64_t>(n) * (n - 1) / 2;
}

/// Sturges' rule applied to the pair count: K = ceil(1 + log2(n(n-1)/2)).
int sturges_classes(std::size_t n);

/// Class index for a positive distance, or -1 for a coincident pair.
/// Intervals are left-open, right-closed; dist == max_dist lands in the last class.
inline int lag_class_index(double dist, double max_dist, int nclass) {
    if (!(dist > 0.0)) return -1;
    int k = static_cast<int>(std::ceil(dist * static_cast<double>(nclass) / max_dist)) - 1;
    if (k < 0) k = 0;
    if (k >= nclass) k = nclass - 1;
    return k;
}

/// Largest pairwise Euclidean distance, streamed (no distance matrix).
/// Throws degeneracy_error("degenerate geometry") if all points coincide.
double max_pair_distance(const PointSample& sample, int threads = 1);

/// Builds nclass equal-width classes over (0, max_pair_distance].
LagClasses build_lag_classes(const PointSample& sample, int nclass = kDefaultNClass,
                             int threads = 1);

/// Same, with K chosen by Sturges' rule on the pair count.
LagClasses build_lag_classes_sturges(const PointSample& sample, int threads = 1);

namespace detail {

/// Maps a linear pair index m in [0, n(n-1)/2) to the m-th unordered pair in
/// lexicographic (i, j) order, i < j.
inline std::pair<std::size_t, std::size_t> pair_from_index(std::size_t n, std::uint64_t m) {
    const double nn = static_cast<double>(n);
    double disc = (2.0 * nn - 1.0) * (2.0 * nn - 1.0) - 8.0 * static_cast<double>(m);
    std::size_t i = static_cast<std::size_t>((2.0 * nn - 1.0 - std::sqrt(disc)) / 2.0);
    auto row_start = [n](std::size_t r) {
        return static_cast<std::uint64_t>(r) * (2 * n - r - 1) / 2;
    };
    while (i > 0 && row_start(i) > m) --i;               // guard fp rounding
    while (i + 1 < n && row_start(i + 1) <= m) ++i;
    std::size_t j = i + 1 + static_cast<std::size_t>(m - row_start(i));
    return {i, j};
}

} // namespace detail

/// Visits every unordered pair i < j exactly once, in lexicographic (i, j)
/// order, with the Euclidean distance between the locations. This is the
/// single traversal primitive all estimators are built on.
template <class Visitor>
void for_each_pair(const PointSample& sample, Visitor&& visit) {
    const std::size_t n = sample.size();
    const double* s1 = sample.s1.data();
    const double* s2 = sample.s2.data();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a1 = s1[i], a2 = s2[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d1 = a1 - s1[j];
            const double d2 = a2 - s2[j];
            visit(i, j, std::sqrt(d1 * d1 + d2 * d2));
        }
    }
}

/// Streams the pair set in `threads` contiguous chunks of the linear pair
/// index space and merges the per-chunk accumulators in chunk order, so the
/// reduction is deterministic for a fixed thread count. threads <= 1 is the
/// single-threaded reference mode (plain lexicographic order).
///
/// Acc must be copy-constructible and provide merge(const Acc&).
template <class Acc, class Visitor>
Acc reduce_pairs(const PointSample& sample, int threads, Acc acc, Visitor&& visit) {
    const std::size_t n = sample.size();
    const std::uint64_t total = pair_count(n);
    const double* s1 = sample.s1.data();
    const double* s2 = sample.s2.data();

    auto run_range = [&](Acc& a, std::uint64_t m0, std::uint64_t m1) {
        if (m0 >= m1) return;
        auto [i, j] = detail::pair_from_index(n, m0);
        for (std::uint64_t m = m0; m < m1; ++m) {
            const double d1 = s1[i] - s1[j];
            const double d2 = s2[i] - s2[j];
            visit(a, i, j, std::sqrt(d1 * d1 + d2 * d2));
            if (++j == n) { ++i; j = i + 1; }
        }
    };

    int nthreads = threads < 1 ? 1 : threads;
    if (static_cast<std::uint64_t>(nthreads) > total) {
        nthreads = total > 0 ? static_cast<int>(total) : 1;
    }
    if (nthreads == 1) {
        run_range(acc, 0, total);
        return acc;
    }

    std::vector<Acc> parts(static_cast<std::size_t>(nthreads), acc);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        const std::uint64_t m0 = total * static_cast<std::uint64_t>(t) / nthreads;
        const std::uint64_t m1 = total * (static_cast<std::uint64_t>(t) + 1) / nthreads;
        workers.emplace_back([&, t, m0, m1] { run_range(parts[static_cast<std::size_t>(t)], m0, m1); });
    }
    for (auto& w : workers) w.join();
    for (auto& part : parts) acc.merge(part);
    return acc;
}

} // namespace spassoc

#endif // SPASSOC_GEOMETRY_HPP
