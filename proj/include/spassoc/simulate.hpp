#ifndef SPASSOC_SIMULATE_HPP
#define SPASSOC_SIMULATE_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "spassoc/geometry.hpp"

namespace spassoc {

/// Parameters of the nonseparable covariance family
///   C(h, u) = eta(||h||^2 / psi(u^2)) / psi(u^2)^{d/2}
/// with psi(r) = (a r^alpha + 1)^beta and
/// eta(r) = (1 + (r/sigma^2)^{gamma/2})^{-c/gamma}, i.e. a generalized Cauchy
/// kernel in the scaled distance ||h||/(sigma sqrt(psi)); that form is
/// positive definite for every gamma in (0,2]. u is the process-index
/// separation: C(., 0) is the within-field covariance, C(., 1) the
/// between-field one. Defaults are the reference parameter set
/// (a = alpha = beta = sigma = 1, c = 3, gamma = 2), for which the colocated
/// cross-covariance C(0, 1) equals 1/2 and C(1, 0) equals 2^{-3/2}.
struct CovSpec {
    double a = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double sigma = 1.0;
    double c = 3.0;
    double gamma = 2.0;
    int d = 2;

    /// Throws input_error when a parameter leaves its admissible range
    /// (a > 0, alpha in (0,1], beta in (0,1], sigma > 0, c > 0, gamma in (0,2], d >= 1).
    void validate() const;
};

/// Covariance value C(h_norm, u); strictly positive, decreasing in h_norm.
double nonsep_cov(double h_norm, double u, const CovSpec& spec);

/// Largest point count accepted by the dense sampler (64x64 grid).
inline constexpr std::size_t kSimulateCap = 4096;

/// The 2n x 2n covariance of the stacked pair (X, Y): blocks [[S0, S1], [S1, S0]]
/// with S0(i,j) = C(||s_i - s_j||, 0) and S1(i,j) = C(||s_i - s_j||, 1).
/// Exactly symmetric by construction. Throws input_error beyond the cap.
Eigen::MatrixXd build_block_sigma(const std::vector<double>& s1, const std::vector<double>& s2,
                                  const CovSpec& spec, std::size_t cap = kSimulateCap);

/// Coordinates of an nrow x ncol unit-spaced grid in row-major order,
/// 1-based: point (r, c) -> (s1, s2) = (c, r).
std::pair<std::vector<double>, std::vector<double>> grid_coords(int nrow, int ncol);

/// Draws correlated Gaussian field pairs on a fixed point set: factor the block
/// covariance once, then draw any number of times. Each draw is Z = L eps with
/// L L^T = Sigma and eps ~ N(0, I) from a seeded generator, so a (seed, spec,
/// coords) triple reproduces bit-identically. A failed factorization retries
/// with jitter delta*I, delta = 1e-10 escalating tenfold to 1e-6, then throws
/// degeneracy_error("covariance not positive definite").
class FieldSampler {
public:
    FieldSampler(std::vector<double> s1, std::vector<double> s2, CovSpec spec,
                 std::size_t cap = kSimulateCap);

    std::size_t size() const { return m_n; }
    const std::vector<double>& coord1() const { return m_s1; }
    const std::vector<double>& coord2() const { return m_s2; }
    const CovSpec& spec() const { return m_spec; }

    /// Diagonal jitter that was needed to factor Sigma (0 when none).
    double jitter() const { return m_jitter; }

    /// Identity of the pinned generator, recorded in output metadata.
    static const char* rng_name() { return "mt19937_64-boxmuller"; }

    /// One field pair: x = Z[0..n), y = Z[n..2n).
    std::pair<std::vector<double>, std::vector<double>> draw(std::uint64_t seed) const;

private:
    std::size_t m_n;
    std::vector<double> m_s1;
    std::vector<double> m_s2;
    CovSpec m_spec;
    double m_jitter = 0.0;
    Eigen::MatrixXd m_chol; ///< lower triangle holds L
};

/// Convenience wrapper: factor once, draw once.
std::pair<std::vector<double>, std::vector<double>> sample_gaussian_pair(
    const std::vector<double>& s1, const std::vector<double>& s2, const CovSpec& spec,
    std::uint64_t seed, std::size_t cap = kSimulateCap);

/// One line of the timing table: mean wall seconds over `reps` runs of one
/// method on simulated size x size field pairs, plus the nominal operation
/// count (nclass+1) n(n-1)/2, with n^2 more for the t-test path.
struct BenchRow {
    int size = 0;
    std::uint64_t n = 0;
    std::string method;
    int reps = 0;
    double mean_seconds = 0.0;
    std::uint64_t op_count = 0;
};

/// Times codisp_binned and/or modified_ttest on freshly simulated grids.
/// Simulation happens outside the timed region; replicates run sequentially.
/// Sub-millisecond runs are repeated in an inner loop and averaged so small
/// sizes still give stable means.
std::vector<BenchRow> bench(const std::vector<int>& sizes, int reps, bool time_codisp,
                            bool time_ttest, int nclass = kDefaultNClass,
                            std::uint64_t seed = 1, int threads = 1);

namespace detail {

/// `count` standard normals from mt19937_64 via Box-Muller (the pinned RNG).
std::vector<double> standard_normals(std::uint64_t seed, std::size_t count);

} // namespace detail

} // namespace spassoc

#endif // SPASSOC_SIMULATE_HPP
