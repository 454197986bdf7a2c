#include "spassoc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spassoc {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

bool has_variance(const std::vector<double>& v) {
    const double first = v.front();
    return std::any_of(v.begin(), v.end(), [first](double e) { return e != first; });
}

} // namespace

void validate(const PointSample& sample) {
    const std::size_t n = sample.s1.size();
    if (sample.s2.size() != n || sample.x.size() != n || sample.y.size() != n) {
        throw input_error("point sample columns have mismatched lengths");
    }
    if (n < 3) {
        throw input_error("point sample needs at least 3 locations, got " + std::to_string(n));
    }
    if (!all_finite(sample.s1) || !all_finite(sample.s2) ||
        !all_finite(sample.x) || !all_finite(sample.y)) {
        throw input_error("point sample contains non-finite values");
    }
    if (!has_variance(sample.x) || !has_variance(sample.y)) {
        throw degeneracy_error("constant variable");
    }
}

int sturges_classes(std::size_t n) {
    const double pairs = static_cast<double>(pair_count(n));
    return static_cast<int>(std::ceil(1.0 + std::log2(pairs)));
}

namespace {

struct MaxAcc {
    double value = 0.0;
    void merge(const MaxAcc& o) { value = std::max(value, o.value); }
};

struct CardAcc {
    std::vector<std::int64_t> card;
    std::int64_t zero_pairs = 0;
    void merge(const CardAcc& o) {
        for (std::size_t k = 0; k < card.size(); ++k) card[k] += o.card[k];
        zero_pairs += o.zero_pairs;
    }
};

} // namespace

double max_pair_distance(const PointSample& sample, int threads) {
    if (sample.size() < 2) throw degeneracy_error("degenerate geometry");
    MaxAcc acc = reduce_pairs(sample, threads, MaxAcc{},
                              [](MaxAcc& a, std::size_t, std::size_t, double dist) {
                                  if (dist > a.value) a.value = dist;
                              });
    if (!(acc.value > 0.0)) throw degeneracy_error("degenerate geometry");
    return acc.value;
}

LagClasses build_lag_classes(const PointSample& sample, int nclass, int threads) {
    if (nclass < 1) throw input_error("nclass must be >= 1");
    const double max_dist = max_pair_distance(sample, threads);

    CardAcc zero;
    zero.card.assign(static_cast<std::size_t>(nclass), 0);
    CardAcc acc = reduce_pairs(sample, threads, std::move(zero),
                               [max_dist, nclass](CardAcc& a, std::size_t, std::size_t, double dist) {
                                   const int k = lag_class_index(dist, max_dist, nclass);
                                   if (k < 0) {
                                       ++a.zero_pairs;
                                   } else {
                                       ++a.card[static_cast<std::size_t>(k)];
                                   }
                               });

    LagClasses classes;
    classes.max_dist = max_dist;
    classes.zero_pairs = acc.zero_pairs;
    classes.card = std::move(acc.card);
    classes.upper_bounds.resize(static_cast<std::size_t>(nclass));
    for (int k = 0; k < nclass; ++k) {
        classes.upper_bounds[static_cast<std::size_t>(k)] =
            max_dist * static_cast<double>(k + 1) / static_cast<double>(nclass);
    }
    classes.upper_bounds.back() = max_dist; // exact, not K/K rounded
    return classes;
}

LagClasses build_lag_classes_sturges(const PointSample& sample, int threads) {
    return build_lag_classes(sample, sturges_classes(sample.size()), threads);
}

} // namespace spassoc
