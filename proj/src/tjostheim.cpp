#include "spassoc/tjostheim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spassoc {

std::vector<int> rank_first(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<int> ranks(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        ranks[order[pos]] = static_cast<int>(pos) + 1;
    }
    return ranks;
}

RankCoordinates coordinate_of_rank(const PointSample& sample, std::span<const int> ranks) {
    const std::size_t n = sample.size();
    if (ranks.size() != n) throw input_error("rank vector length mismatch");
    RankCoordinates rc;
    rc.f.assign(n, 0.0);
    rc.g.assign(n, 0.0);
    std::vector<char> seen(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        const int r = ranks[j];
        if (r < 1 || static_cast<std::size_t>(r) > n || seen[static_cast<std::size_t>(r - 1)]) {
            throw input_error("ranks are not a permutation of 1..n");
        }
        seen[static_cast<std::size_t>(r - 1)] = 1;
        rc.f[static_cast<std::size_t>(r - 1)] = sample.s1[j];
        rc.g[static_cast<std::size_t>(r - 1)] = sample.s2[j];
    }
    return rc;
}

TjostheimResult tjostheim_coef(const PointSample& sample) {
    validate(sample);
    const std::size_t n = sample.size();

    PointSample centered = sample;
    const double m1 = std::accumulate(centered.s1.begin(), centered.s1.end(), 0.0) / n;
    const double m2 = std::accumulate(centered.s2.begin(), centered.s2.end(), 0.0) / n;
    double ss1 = 0.0, ss2 = 0.0, s12 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centered.s1[i] -= m1;
        centered.s2[i] -= m2;
        ss1 += centered.s1[i] * centered.s1[i];
        ss2 += centered.s2[i] * centered.s2[i];
        s12 += centered.s1[i] * centered.s2[i];
    }
    if (!(ss1 > 0.0) || !(ss2 > 0.0)) throw degeneracy_error("degenerate coordinates");

    const auto rx = rank_first(sample.x);
    const auto ry = rank_first(sample.y);
    const RankCoordinates cx = coordinate_of_rank(centered, rx);
    const RankCoordinates cy = coordinate_of_rank(centered, ry);

    double num = 0.0, den_x = 0.0, den_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += cx.f[i] * cy.f[i] + cx.g[i] * cy.g[i];
        den_x += cx.f[i] * cx.f[i] + cx.g[i] * cx.g[i];
        den_y += cy.f[i] * cy.f[i] + cy.g[i] * cy.g[i];
    }

    TjostheimResult res;
    res.coef = num / std::sqrt(den_x * den_y);
    const double tot = ss1 + ss2;
    res.variance = (ss1 * ss1 + 2.0 * s12 * s12 + ss2 * ss2) /
                   (static_cast<double>(n - 1) * tot * tot);
    return res;
}

} // namespace spassoc
