#ifndef SPASSOC_CROSSSTATS_HPP
#define SPASSOC_CROSSSTATS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "spassoc/geometry.hpp"

namespace spassoc {

/// Per-stratum covariance estimates for both variables,
///   c_v[k] = sum_{(i,j) in class k} (v_i - vbar)(v_j - vbar) / n_k,
/// with the lag-0 variances c_v0 = sum_i (v_i - vbar)^2 / n. Empty strata get
/// c_v[k] = 0. The per-point class counts are carried along so the Dutilleul
/// trace expression can be evaluated later without touching the geometry again.
struct StratumCovariances {
    std::vector<double> c_x;
    std::vector<double> c_y;
    double c_x0 = 0.0;
    double c_y0 = 0.0;
    LagClasses classes;

    /// counts[i*K + k] = number of partners of point i in class k
    std::vector<std::uint32_t> point_class_counts;
    /// number of coincident (distance 0) partners of point i
    std::vector<std::uint32_t> point_zero_counts;

    std::size_t npoints() const { return point_zero_counts.size(); }
};

/// One streamed pass over the pairs. Throws degeneracy_error("constant
/// variable") when either variable has zero sample variance.
StratumCovariances stratum_covariances(const PointSample& sample, const LagClasses& classes,
                                       int threads = 1);

/// Moran index per class and variable: imoran[k] = { c_x[k]/c_x0, c_y[k]/c_y0 }.
std::vector<std::array<double, 2>> moran_indices(const StratumCovariances& cov);

} // namespace spassoc

#endif // SPASSOC_CROSSSTATS_HPP
