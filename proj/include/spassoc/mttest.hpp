#ifndef SPASSOC_MTTEST_HPP
#define SPASSOC_MTTEST_HPP

#include <array>
#include <vector>

#include "spassoc/crossstats.hpp"
#include "spassoc/geometry.hpp"

namespace spassoc {

/// Which estimator of the squared standard error of the sample correlation
/// between two autocorrelated processes to use.
enum class VarianceEstimator {
    dutilleul, ///< trace form tr(B Sx B Sy) / (tr(B Sx) tr(B Sy)), the default
    clifford,  ///< sum_k n_k Cx(k) Cy(k) / (n^2 sx^2 sy^2)
};

/// Modified t-test of association between two spatially autocorrelated
/// processes, reported in its F form.
struct MTTestResult {
    double fstat = 0.0;    ///< F = (M-2) r^2 / (1 - r^2)
    double dof = 0.0;      ///< denominator degrees of freedom M-2 (fractional)
    double ess = 0.0;      ///< effective sample size M = 1 + 1/sigma2_r
    double p_value = 0.0;  ///< upper tail of F(1, dof)
    double corr = 0.0;     ///< Pearson correlation between x and y
    double sigma2_r = 0.0; ///< estimated variance of the sample correlation
    std::vector<std::array<double, 2>> imoran; ///< per-class Moran indices (x, y)
    LagClasses classes;
};

/// Dutilleul's trace expression evaluated from the stratum covariances. The
/// covariance matrices Sx, Sy (entry (i,j) = C(class(i,j)), diagonal C(0)) and
/// the centering matrix B = I - 11'/n are never materialized; both traces are
/// expanded into per-class and per-point sums:
///   tr(B Sx B Sy) = tr(Sx Sy) - (2/n) 1'Sx Sy 1 + (1'Sx 1)(1'Sy 1)/n^2
///   tr(B S)       = tr(S) - 1'S 1 / n
/// Coincident (distance 0) off-diagonal entries take the lag-0 value C(0).
/// Throws degeneracy_error("nonpositive effective variance") when the ratio is
/// not a positive finite number.
double effective_variance_dutilleul(const StratumCovariances& cov);

/// Clifford's direct estimator sum_k n_k c_x[k] c_y[k] / (n^2 c_x0 c_y0).
/// Same nonpositive guard.
double effective_variance_clifford(const StratumCovariances& cov, std::size_t n);

/// Cumulative distribution function of the F(d1, d2) distribution,
/// evaluated through the regularized incomplete beta function.
double f_cdf(double q, double d1, double d2);

/// Upper tail 1 - f_cdf(q, d1, d2), computed directly for small p-values.
double f_sf(double q, double d1, double d2);

/// Runs the full test: builds the lag classes, estimates the stratum
/// covariances, computes sigma_r^2 with the requested estimator, and evaluates
///   M = 1 + 1/sigma_r^2,  F = (M-2) r^2 / (1-r^2),  p = P(F(1, M-2) > F).
/// Errors: |r| == 1 -> "degenerate correlation"; M <= 2 -> "insufficient
/// effective sample size"; plus anything propagated from the stages above.
MTTestResult modified_ttest(const PointSample& sample, int nclass = kDefaultNClass,
                            VarianceEstimator estimator = VarianceEstimator::dutilleul,
                            int threads = 1);

/// Sturges' rule variant.
MTTestResult modified_ttest_sturges(const PointSample& sample,
                                    VarianceEstimator estimator = VarianceEstimator::dutilleul,
                                    int threads = 1);

/// Pearson correlation of the two observation vectors.
double pearson_corr(const std::vector<double>& x, const std::vector<double>& y);

} // namespace spassoc

#endif // SPASSOC_MTTEST_HPP
