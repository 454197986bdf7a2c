#ifndef SPASSOC_TJOSTHEIM_HPP
#define SPASSOC_TJOSTHEIM_HPP

#include <span>
#include <vector>

#include "spassoc/geometry.hpp"

namespace spassoc {

/// Tjostheim's rank-based coefficient of spatial association and its variance
/// under the independence null.
struct TjostheimResult {
    double coef = 0.0;     ///< A, in [-1, 1]
    double variance = 0.0; ///< Var(A) under independence
};

/// Ranks 1..n with ties broken by first occurrence (the earlier index gets the
/// smaller rank).
std::vector<int> rank_first(std::span<const double> values);

/// Coordinates indexed by rank: F[i], G[i] are the first and second coordinate
/// of the observation holding rank i+1. `ranks` must be a permutation of 1..n.
struct RankCoordinates {
    std::vector<double> f;
    std::vector<double> g;
};
RankCoordinates coordinate_of_rank(const PointSample& sample, std::span<const int> ranks);

/// Computes A on column-centered coordinates:
///   A = sum_i [Fx(i) Fy(i) + Gx(i) Gy(i)]
///       / sqrt( sum_i [Fx(i)^2 + Gx(i)^2] * sum_i [Fy(i)^2 + Gy(i)^2] ),
/// where (Fx, Gx) come from the x-ranks and (Fy, Gy) from the y-ranks, and the
/// independence variance
///   Var(A) = [ (sum s1^2)^2 + 2 (sum s1 s2)^2 + (sum s2^2)^2 ]
///            / [ (n-1) (sum s1^2 + sum s2^2)^2 ]
/// over the same centered coordinates. A constant coordinate column raises
/// degeneracy_error("degenerate coordinates").
TjostheimResult tjostheim_coef(const PointSample& sample);

} // namespace spassoc

#endif // SPASSOC_TJOSTHEIM_HPP
