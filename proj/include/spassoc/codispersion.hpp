#ifndef SPASSOC_CODISPERSION_HPP
#define SPASSOC_CODISPERSION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "spassoc/geometry.hpp"

namespace spassoc {

/// Binned codispersion curve. coef[k] is
///   sum (x_i-x_j)(y_i-y_j) / sqrt( sum (x_i-x_j)^2 * sum (y_i-y_j)^2 )
/// over the pairs of class k; strata that are empty or have zero increment
/// energy in either variable carry no value (nullopt) rather than 0 or NaN.
struct CodispResult {
    std::vector<std::optional<double>> coef;
    LagClasses classes;
};

/// Directional codispersion values on a polar grid of A angles in [0, pi) and
/// R radii in (0, max_radius]. values is row-major [angle][radius]; a cell is
/// missing exactly when no pair fell in its neighborhood.
struct CodispMap {
    std::vector<double> angles;                 ///< cell centers (a+1/2)*pi/A
    std::vector<double> radii;                  ///< cell centers j*max_radius/R, j=1..R
    std::vector<std::optional<double>> values;  ///< A*R, row-major
    std::vector<std::int64_t> npairs;           ///< pairs accumulated per cell
    double tolerance = 0.0;                     ///< radial tolerance in force

    std::size_t n_angles() const { return angles.size(); }
    std::size_t n_radii() const { return radii.size(); }
    const std::optional<double>& at(std::size_t a, std::size_t r) const {
        return values[a * radii.size() + r];
    }
};

/// Omnidirectional curve over nclass equal-width distance classes; one
/// streamed pass accumulating the three increment sums per stratum.
CodispResult codisp_binned(const PointSample& sample, int nclass = kDefaultNClass,
                           int threads = 1);

/// Sturges' rule variant.
CodispResult codisp_binned_sturges(const PointSample& sample, int threads = 1);

/// Codispersion at one lag vector: pairs (i, j) with ||(s_i - s_j) - h|| <= tol
/// in either orientation. Returns nullopt when the neighborhood is empty or
/// increment-degenerate.
std::optional<double> codisp_directional(const PointSample& sample, double h1, double h2,
                                         double tol, int threads = 1);

/// Full directional map. Each pair is assigned to the nearest angular cell
/// (axes theta and theta+pi are identified) and the nearest radial cell whose
/// center is within `tol` of the pair distance; tol <= 0 selects the natural
/// radial half-spacing max_radius/(2R). Pairs farther than the last radial
/// cell's tolerance band are dropped.
CodispMap codisp_map(const PointSample& sample, int n_angles, int n_radii,
                     double max_radius, double tol = 0.0, int threads = 1);

/// Comovement between two equal-length series: the codispersion ratio per
/// integer lag h = 1..max_lag over the pairs (t+h, t). max_lag <= 0 selects
/// ceil(T/2). A lag whose increments vanish in either series yields nullopt;
/// a constant series is an error.
std::vector<std::optional<double>> comovement(const std::vector<double>& x,
                                              const std::vector<double>& y, int max_lag = 0);

} // namespace spassoc

#endif // SPASSOC_CODISPERSION_HPP
