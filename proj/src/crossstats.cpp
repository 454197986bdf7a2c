#include "spassoc/crossstats.hpp"

#include <numeric>

namespace spassoc {

namespace {

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct CovAcc {
    std::vector<double> sx, sy;
    std::vector<std::uint32_t> counts;      // n x K
    std::vector<std::uint32_t> zero_counts; // n
    void merge(const CovAcc& o) {
        for (std::size_t k = 0; k < sx.size(); ++k) {
            sx[k] += o.sx[k];
            sy[k] += o.sy[k];
        }
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
        for (std::size_t i = 0; i < zero_counts.size(); ++i) zero_counts[i] += o.zero_counts[i];
    }
};

} // namespace

StratumCovariances stratum_covariances(const PointSample& sample, const LagClasses& classes,
                                       int threads) {
    const std::size_t n = sample.size();
    const int nclass = classes.nclass();
    const double xbar = mean(sample.x);
    const double ybar = mean(sample.y);

    // centered copies; the pair kernel reads them by index
    std::vector<double> xc(n), yc(n);
    double ssx = 0.0, ssy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xc[i] = sample.x[i] - xbar;
        yc[i] = sample.y[i] - ybar;
        ssx += xc[i] * xc[i];
        ssy += yc[i] * yc[i];
    }
    if (!(ssx > 0.0) || !(ssy > 0.0)) throw degeneracy_error("constant variable");

    CovAcc zero;
    zero.sx.assign(static_cast<std::size_t>(nclass), 0.0);
    zero.sy.assign(static_cast<std::size_t>(nclass), 0.0);
    zero.counts.assign(n * static_cast<std::size_t>(nclass), 0);
    zero.zero_counts.assign(n, 0);

    const double max_dist = classes.max_dist;
    const double* px = xc.data();
    const double* py = yc.data();
    CovAcc acc = reduce_pairs(
        sample, threads, std::move(zero),
        [=](CovAcc& a, std::size_t i, std::size_t j, double dist) {
            const int k = lag_class_index(dist, max_dist, nclass);
            if (k < 0) {
                ++a.zero_counts[i];
                ++a.zero_counts[j];
                return;
            }
            const auto ku = static_cast<std::size_t>(k);
            a.sx[ku] += px[i] * px[j];
            a.sy[ku] += py[i] * py[j];
            ++a.counts[i * static_cast<std::size_t>(nclass) + ku];
            ++a.counts[j * static_cast<std::size_t>(nclass) + ku];
        });

    StratumCovariances cov;
    cov.classes = classes;
    cov.c_x0 = ssx / static_cast<double>(n);
    cov.c_y0 = ssy / static_cast<double>(n);
    cov.c_x.resize(static_cast<std::size_t>(nclass));
    cov.c_y.resize(static_cast<std::size_t>(nclass));
    for (int k = 0; k < nclass; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const auto nk = classes.card[ku];
        cov.c_x[ku] = nk > 0 ? acc.sx[ku] / static_cast<double>(nk) : 0.0;
        cov.c_y[ku] = nk > 0 ? acc.sy[ku] / static_cast<double>(nk) : 0.0;
    }
    cov.point_class_counts = std::move(acc.counts);
    cov.point_zero_counts = std::move(acc.zero_counts);
    return cov;
}

std::vector<std::array<double, 2>> moran_indices(const StratumCovariances& cov) {
    std::vector<std::array<double, 2>> imoran(cov.c_x.size());
    for (std::size_t k = 0; k < cov.c_x.size(); ++k) {
        imoran[k] = {cov.c_x[k] / cov.c_x0, cov.c_y[k] / cov.c_y0};
    }
    return imoran;
}

} // namespace spassoc
