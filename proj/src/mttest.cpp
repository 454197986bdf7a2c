#include "spassoc/mttest.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

namespace spassoc {

double f_cdf(double q, double d1, double d2) {
    if (!(q > 0.0)) return 0.0;
    const double z = d1 * q / (d1 * q + d2);
    return boost::math::ibeta(d1 / 2.0, d2 / 2.0, z);
}

double f_sf(double q, double d1, double d2) {
    if (!(q > 0.0)) return 1.0;
    const double z = d1 * q / (d1 * q + d2);
    return boost::math::ibetac(d1 / 2.0, d2 / 2.0, z);
}

double pearson_corr(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - xbar;
        const double dy = y[i] - ybar;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

namespace {

double checked_variance(double value) {
    if (!std::isfinite(value) || !(value > 0.0)) {
        throw degeneracy_error("nonpositive effective variance");
    }
    return value;
}

} // namespace

double effective_variance_dutilleul(const StratumCovariances& cov) {
    const std::size_t n = cov.npoints();
    const std::size_t nclass = cov.c_x.size();
    const double nn = static_cast<double>(n);

    // Row sums of the implicit covariance matrices: diagonal C(0), coincident
    // partners at C(0), stratified partners at C(k).
    double one_sx_one = 0.0, one_sy_one = 0.0, one_sxsy_one = 0.0;
    std::int64_t zero_pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double rx = cov.c_x0 * (1.0 + cov.point_zero_counts[i]);
        double ry = cov.c_y0 * (1.0 + cov.point_zero_counts[i]);
        const std::uint32_t* cnt = &cov.point_class_counts[i * nclass];
        for (std::size_t k = 0; k < nclass; ++k) {
            rx += cnt[k] * cov.c_x[k];
            ry += cnt[k] * cov.c_y[k];
        }
        one_sx_one += rx;
        one_sy_one += ry;
        one_sxsy_one += rx * ry;
        zero_pairs += cov.point_zero_counts[i];
    }
    zero_pairs /= 2; // each coincident pair was counted from both endpoints

    double tr_sxsy = nn * cov.c_x0 * cov.c_y0 + 2.0 * zero_pairs * cov.c_x0 * cov.c_y0;
    for (std::size_t k = 0; k < nclass; ++k) {
        tr_sxsy += 2.0 * static_cast<double>(cov.classes.card[k]) * cov.c_x[k] * cov.c_y[k];
    }

    const double tr_bsx = nn * cov.c_x0 - one_sx_one / nn;
    const double tr_bsy = nn * cov.c_y0 - one_sy_one / nn;
    const double tr_bsxbsy =
        tr_sxsy - 2.0 / nn * one_sxsy_one + one_sx_one * one_sy_one / (nn * nn);

    return checked_variance(tr_bsxbsy / (tr_bsx * tr_bsy));
}

double effective_variance_clifford(const StratumCovariances& cov, std::size_t n) {
    double num = 0.0;
    for (std::size_t k = 0; k < cov.c_x.size(); ++k) {
        num += static_cast<double>(cov.classes.card[k]) * cov.c_x[k] * cov.c_y[k];
    }
    const double nn = static_cast<double>(n);
    return checked_variance(num / (nn * nn * cov.c_x0 * cov.c_y0));
}

namespace {

MTTestResult run_test(const PointSample& sample, const LagClasses& classes,
                      VarianceEstimator estimator, int threads) {
    const StratumCovariances cov = stratum_covariances(sample, classes, threads);
    const double sigma2_r = estimator == VarianceEstimator::dutilleul
                                ? effective_variance_dutilleul(cov)
                                : effective_variance_clifford(cov, sample.size());

    const double ess = 1.0 + 1.0 / sigma2_r;
    if (!(ess > 2.0)) throw degeneracy_error("insufficient effective sample size");

    const double r = pearson_corr(sample.x, sample.y);
    if (!(1.0 - r * r > 0.0)) throw degeneracy_error("degenerate correlation");

    MTTestResult res;
    res.corr = r;
    res.sigma2_r = sigma2_r;
    res.ess = ess;
    res.dof = ess - 2.0;
    res.fstat = res.dof * r * r / (1.0 - r * r);
    res.p_value = f_sf(res.fstat, 1.0, res.dof);
    res.imoran = moran_indices(cov);
    res.classes = classes;
    return res;
}

} // namespace

MTTestResult modified_ttest(const PointSample& sample, int nclass,
                            VarianceEstimator estimator, int threads) {
    validate(sample);
    return run_test(sample, build_lag_classes(sample, nclass, threads), estimator, threads);
}

MTTestResult modified_ttest_sturges(const PointSample& sample, VarianceEstimator estimator,
                                    int threads) {
    validate(sample);
    return run_test(sample, build_lag_classes_sturges(sample, threads), estimator, threads);
}

} // namespace spassoc
