#include "spassoc/codispersion.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "spassoc/errors.hpp"

namespace spassoc {

namespace {

/// Per-stratum increment sums: sum dx*dy, sum dx^2, sum dy^2 and cardinality.
struct StratumSums {
    std::vector<double> sxy;
    std::vector<double> sxx;
    std::vector<double> syy;
    std::vector<std::int64_t> card;
    std::int64_t zero_pairs = 0;

    explicit StratumSums(std::size_t k)
        : sxy(k, 0.0), sxx(k, 0.0), syy(k, 0.0), card(k, 0) {}

    void add(std::size_t k, double dx, double dy) {
        sxy[k] += dx * dy;
        sxx[k] += dx * dx;
        syy[k] += dy * dy;
        ++card[k];
    }

    void merge(const StratumSums& other) {
        for (std::size_t k = 0; k < sxy.size(); ++k) {
            sxy[k] += other.sxy[k];
            sxx[k] += other.sxx[k];
            syy[k] += other.syy[k];
            card[k] += other.card[k];
        }
        zero_pairs += other.zero_pairs;
    }
};

std::optional<double> ratio(double sxy, double sxx, double syy, std::int64_t card) {
    if (card <= 0 || !(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

CodispResult binned_impl(const PointSample& sample, int nclass, int threads) {
    validate(sample);
    if (nclass < 1) throw input_error("nclass must be positive");

    const double max_dist = max_pair_distance(sample, threads);
    const double* px = sample.x.data();
    const double* py = sample.y.data();

    auto sums = reduce_pairs(
        sample, threads, StratumSums(static_cast<std::size_t>(nclass)),
        [&](StratumSums& acc, std::size_t i, std::size_t j, double dist) {
            const int k = lag_class_index(dist, max_dist, nclass);
            if (k < 0) {
                ++acc.zero_pairs;
                return;
            }
            acc.add(static_cast<std::size_t>(k), px[i] - px[j], py[i] - py[j]);
        });

    CodispResult result;
    result.classes.max_dist = max_dist;
    result.classes.zero_pairs = sums.zero_pairs;
    result.classes.upper_bounds.resize(static_cast<std::size_t>(nclass));
    for (int k = 0; k < nclass; ++k) {
        result.classes.upper_bounds[static_cast<std::size_t>(k)] =
            max_dist * static_cast<double>(k + 1) / static_cast<double>(nclass);
    }
    result.classes.upper_bounds.back() = max_dist;
    result.classes.card = sums.card;

    result.coef.resize(static_cast<std::size_t>(nclass));
    for (std::size_t k = 0; k < result.coef.size(); ++k) {
        result.coef[k] = ratio(sums.sxy[k], sums.sxx[k], sums.syy[k], sums.card[k]);
    }
    return result;
}

} // namespace

CodispResult codisp_binned(const PointSample& sample, int nclass, int threads) {
    return binned_impl(sample, nclass, threads);
}

CodispResult codisp_binned_sturges(const PointSample& sample, int threads) {
    validate(sample);
    return binned_impl(sample, sturges_classes(sample.size()), threads);
}

std::optional<double> codisp_directional(const PointSample& sample, double h1, double h2,
                                         double tol, int threads) {
    validate(sample);
    if (!std::isfinite(h1) || !std::isfinite(h2)) throw input_error("lag must be finite");
    if (!(tol >= 0.0)) throw input_error("tolerance must be nonnegative");

    struct Acc {
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        std::int64_t npairs = 0;
        void merge(const Acc& o) {
            sxy += o.sxy;
            sxx += o.sxx;
            syy += o.syy;
            npairs += o.npairs;
        }
    };

    const double* s1 = sample.s1.data();
    const double* s2 = sample.s2.data();
    const double* px = sample.x.data();
    const double* py = sample.y.data();
    const double tol2 = tol * tol;

    // A pair belongs to the lag-h neighborhood when either orientation of its
    // displacement is within tol of h. Increment products are orientation-free,
    // so a pair matching both ways (e.g. h = 0) just doubles every sum.
    auto sums = reduce_pairs(
        sample, threads, Acc{},
        [&](Acc& acc, std::size_t i, std::size_t j, double) {
            const double d1 = s1[i] - s1[j];
            const double d2 = s2[i] - s2[j];
            const double f1 = d1 - h1, f2 = d2 - h2;
            const double b1 = d1 + h1, b2 = d2 + h2;
            int weight = 0;
            if (f1 * f1 + f2 * f2 <= tol2) ++weight;
            if (b1 * b1 + b2 * b2 <= tol2) ++weight;
            if (weight == 0) return;
            const double w = static_cast<double>(weight);
            const double dx = px[i] - px[j];
            const double dy = py[i] - py[j];
            acc.sxy += w * dx * dy;
            acc.sxx += w * dx * dx;
            acc.syy += w * dy * dy;
            acc.npairs += weight;
        });

    return ratio(sums.sxy, sums.sxx, sums.syy, sums.npairs);
}

CodispMap codisp_map(const PointSample& sample, int n_angles, int n_radii,
                     double max_radius, double tol, int threads) {
    validate(sample);
    if (n_angles < 2) throw input_error("n_angles must be at least 2");
    if (n_radii < 1) throw input_error("n_radii must be positive");
    if (!(max_radius > 0.0) || !std::isfinite(max_radius)) {
        throw input_error("max_radius must be positive");
    }
    if (std::isnan(tol)) throw input_error("tolerance must not be NaN");
    if (max_radius > max_pair_distance(sample, threads) * (1.0 + 1e-12)) {
        throw input_error("max_radius exceeds the largest pair distance");
    }

    const std::size_t na = static_cast<std::size_t>(n_angles);
    const std::size_t nr = static_cast<std::size_t>(n_radii);
    const double step = max_radius / static_cast<double>(n_radii);
    const double tol_eff = tol > 0.0 ? tol : 0.5 * step;

    struct Acc {
        std::vector<double> sxy, sxx, syy;
        std::vector<std::int64_t> npairs;
        explicit Acc(std::size_t cells)
            : sxy(cells, 0.0), sxx(cells, 0.0), syy(cells, 0.0), npairs(cells, 0) {}
        void merge(const Acc& o) {
            for (std::size_t c = 0; c < sxy.size(); ++c) {
                sxy[c] += o.sxy[c];
                sxx[c] += o.sxx[c];
                syy[c] += o.syy[c];
                npairs[c] += o.npairs[c];
            }
        }
    };

    const double* s1 = sample.s1.data();
    const double* s2 = sample.s2.data();
    const double* px = sample.x.data();
    const double* py = sample.y.data();
    const double pi = std::numbers::pi;

    auto sums = reduce_pairs(
        sample, threads, Acc(na * nr),
        [&](Acc& acc, std::size_t i, std::size_t j, double dist) {
            if (!(dist > 0.0)) return; // coincident pair: no direction
            // Nearest radial cell center j*step, j = 1..R; keep the pair only
            // if that center lies within the radial tolerance.
            long jr = std::lround(dist / step);
            if (jr < 1) jr = 1;
            if (jr > n_radii) jr = n_radii;
            if (std::abs(dist - static_cast<double>(jr) * step) > tol_eff) return;
            // Direction folded into [0, pi): h and -h carry the same value.
            double theta = std::atan2(s2[i] - s2[j], s1[i] - s1[j]);
            if (theta < 0.0) theta += pi;
            if (theta >= pi) theta = 0.0;
            // Cell centers sit at (a + 1/2)*pi/A, so the containing interval
            // [a*pi/A, (a+1)*pi/A) is exactly the nearest-center cell.
            long ja = static_cast<long>(theta * static_cast<double>(n_angles) / pi);
            if (ja < 0) ja = 0;
            if (ja >= n_angles) ja = n_angles - 1;
            const std::size_t cell =
                static_cast<std::size_t>(ja) * nr + static_cast<std::size_t>(jr - 1);
            const double dx = px[i] - px[j];
            const double dy = py[i] - py[j];
            acc.sxy[cell] += dx * dy;
            acc.sxx[cell] += dx * dx;
            acc.syy[cell] += dy * dy;
            ++acc.npairs[cell];
        });

    CodispMap map;
    map.tolerance = tol_eff;
    map.angles.resize(na);
    for (std::size_t a = 0; a < na; ++a) {
        map.angles[a] = (static_cast<double>(a) + 0.5) * pi / static_cast<double>(n_angles);
    }
    map.radii.resize(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        map.radii[r] = static_cast<double>(r + 1) * step;
    }
    map.values.resize(na * nr);
    map.npairs = sums.npairs;
    for (std::size_t c = 0; c < map.values.size(); ++c) {
        map.values[c] = ratio(sums.sxy[c], sums.sxx[c], sums.syy[c], sums.npairs[c]);
    }
    return map;
}

std::vector<std::optional<double>> comovement(const std::vector<double>& x,
                                              const std::vector<double>& y, int max_lag) {
    if (x.size() != y.size()) throw input_error("series lengths differ");
    const std::size_t t_len = x.size();
    if (t_len < 2) throw input_error("series too short");
    for (std::size_t t = 0; t < t_len; ++t) {
        if (!std::isfinite(x[t]) || !std::isfinite(y[t])) {
            throw input_error("series values must be finite");
        }
    }
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    if (*xmin == *xmax || *ymin == *ymax) throw degeneracy_error("constant series");

    int lags = max_lag;
    if (lags <= 0) lags = static_cast<int>((t_len + 1) / 2);
    if (static_cast<std::size_t>(lags) >= t_len) {
        throw input_error("max_lag must be smaller than the series length");
    }

    std::vector<std::optional<double>> coef(static_cast<std::size_t>(lags));
    for (int h = 1; h <= lags; ++h) {
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        const std::size_t hh = static_cast<std::size_t>(h);
        for (std::size_t t = 0; t + hh < t_len; ++t) {
            const double dx = x[t + hh] - x[t];
            const double dy = y[t + hh] - y[t];
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        coef[hh - 1] = ratio(sxy, sxx, syy, static_cast<std::int64_t>(t_len - hh));
    }
    return coef;
}

} // namespace spassoc
