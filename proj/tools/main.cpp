#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spassoc/codispersion.hpp"
#include "spassoc/dataset.hpp"
#include "spassoc/errors.hpp"
#include "spassoc/mttest.hpp"
#include "spassoc/serialize.hpp"
#include "spassoc/simulate.hpp"
#include "spassoc/tjostheim.hpp"

namespace {

/// Command-line combinations that cannot be expressed as CLI11 constraints;
/// reported like any other usage problem (exit 64).
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputOpts {
    std::string coords;
    std::string image_x;
    std::string image_y;
};

struct CommonOpts {
    std::string format = "json";
    std::string out;
    int threads = 1;
};

spassoc::PointSample load_sample(const InputOpts& in) {
    if (!in.coords.empty()) return spassoc::parse_points_csv(in.coords);
    if (!in.image_x.empty() && !in.image_y.empty()) {
        return spassoc::parse_grid_pair(in.image_x, in.image_y);
    }
    throw usage_error("provide --coords FILE or --image-x FILE --image-y FILE");
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out || !(out << content)) throw spassoc::input_error("cannot write " + path);
}

void add_input_options(CLI::App* sub, InputOpts& in) {
    auto* coords = sub->add_option("--coords", in.coords, "points CSV with header s1,s2,x,y");
    auto* ix = sub->add_option("--image-x", in.image_x, "first grid (matrix text or PGM)");
    auto* iy = sub->add_option("--image-y", in.image_y, "second grid (matrix text or PGM)");
    coords->excludes(ix)->excludes(iy);
    ix->needs(iy);
    iy->needs(ix);
}

void add_common_options(CLI::App* sub, CommonOpts& common, bool threaded = true) {
    sub->add_option("--format", common.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "summary"}))
        ->capture_default_str();
    sub->add_option("--out", common.out, "output file (default: stdout)");
    if (threaded) {
        sub->add_option("--threads", common.threads, "worker threads; 1 is the reference mode")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }
}

struct ClassOpts {
    int nclass = spassoc::kDefaultNClass;
    bool sturges = false;
};

void add_class_options(CLI::App* sub, ClassOpts& opts) {
    auto* nclass = sub->add_option("--nclass", opts.nclass, "number of distance classes")
                       ->check(CLI::PositiveNumber)
                       ->capture_default_str();
    sub->add_flag("--sturges", opts.sturges, "choose the class count by Sturges' rule")
        ->excludes(nclass);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatial association statistics: modified t-test, Tjostheim's "
                 "coefficient, codispersion"};
    app.require_subcommand(1);

    // --- ttest ---------------------------------------------------------
    auto* c_ttest = app.add_subcommand("ttest", "modified t-test with effective sample size");
    InputOpts ttest_in;
    CommonOpts ttest_common;
    ClassOpts ttest_classes;
    std::string ttest_estimator = "dutilleul";
    add_input_options(c_ttest, ttest_in);
    add_class_options(c_ttest, ttest_classes);
    add_common_options(c_ttest, ttest_common);
    c_ttest->add_option("--estimator", ttest_estimator, "variance estimator")
        ->check(CLI::IsMember({"dutilleul", "clifford"}))
        ->capture_default_str();

    // --- tjostheim ------------------------------------------------------
    auto* c_tjo = app.add_subcommand("tjostheim", "Tjostheim's nonparametric coefficient");
    InputOpts tjo_in;
    CommonOpts tjo_common;
    add_input_options(c_tjo, tjo_in);
    add_common_options(c_tjo, tjo_common, /*threaded=*/false);

    // --- codisp ---------------------------------------------------------
    auto* c_codisp = app.add_subcommand("codisp", "binned codispersion coefficient");
    InputOpts codisp_in;
    CommonOpts codisp_common;
    ClassOpts codisp_classes;
    add_input_options(c_codisp, codisp_in);
    add_class_options(c_codisp, codisp_classes);
    add_common_options(c_codisp, codisp_common);

    // --- comovement -----------------------------------------------------
    auto* c_comove = app.add_subcommand("comovement", "per-lag comovement of two series");
    CommonOpts comove_common;
    std::string comove_x, comove_y;
    int comove_max_lag = 0;
    c_comove->add_option("--x", comove_x, "first series (single-column CSV)")->required();
    c_comove->add_option("--y", comove_y, "second series (single-column CSV)")->required();
    c_comove->add_option("--max-lag", comove_max_lag,
                         "largest lag (default: half the series length)");
    add_common_options(c_comove, comove_common, /*threaded=*/false);

    // --- map --------------------------------------------------------------
    auto* c_map = app.add_subcommand("map", "directional codispersion map on a polar grid");
    InputOpts map_in;
    CommonOpts map_common;
    int map_angles = 8;
    int map_radii = 8;
    double map_max_radius = 0.0;
    double map_tol = 0.0;
    add_input_options(c_map, map_in);
    c_map->add_option("--angles", map_angles, "number of angular cells in [0, pi)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_map->add_option("--radii", map_radii, "number of radial cells")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_map->add_option("--max-radius", map_max_radius,
                      "largest lag distance (default: the sample's largest pair distance)");
    c_map->add_option("--tol", map_tol, "radial tolerance (default: half the radial spacing)");
    add_common_options(c_map, map_common);

    // --- simulate ---------------------------------------------------------
    auto* c_sim = app.add_subcommand("simulate", "correlated Gaussian field pair on a grid");
    CommonOpts sim_common;
    int sim_nrow = 16, sim_ncol = 16;
    std::uint64_t sim_seed = 1;
    spassoc::CovSpec sim_spec;
    c_sim->add_option("--nrow", sim_nrow, "grid rows")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sim->add_option("--ncol", sim_ncol, "grid columns")->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    c_sim->add_option("--a", sim_spec.a, "covariance scale a > 0")->capture_default_str();
    c_sim->add_option("--alpha", sim_spec.alpha, "psi exponent in (0,1]")->capture_default_str();
    c_sim->add_option("--beta", sim_spec.beta, "psi exponent in (0,1]")->capture_default_str();
    c_sim->add_option("--sigma", sim_spec.sigma, "eta scale sigma > 0")->capture_default_str();
    c_sim->add_option("--c", sim_spec.c, "eta decay c > 0")->capture_default_str();
    c_sim->add_option("--gamma", sim_spec.gamma, "eta exponent in (0,2]")->capture_default_str();
    c_sim->add_option("--dim", sim_spec.d, "space dimension d")->capture_default_str();
    add_common_options(c_sim, sim_common, /*threaded=*/false);

    // --- bench -------------------------------------------------------------
    auto* c_bench = app.add_subcommand("bench", "timing benchmark on simulated grids");
    CommonOpts bench_common;
    std::vector<int> bench_sizes{8, 16, 32, 64};
    int bench_reps = 10;
    int bench_nclass = spassoc::kDefaultNClass;
    std::uint64_t bench_seed = 1;
    std::string bench_method = "both";
    c_bench->add_option("--sizes", bench_sizes, "grid sides, e.g. 8,16,32,64")
        ->delimiter(',')
        ->capture_default_str();
    c_bench->add_option("--reps", bench_reps, "replicates per size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_bench->add_option("--nclass", bench_nclass, "number of distance classes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_bench->add_option("--seed", bench_seed, "RNG seed")->capture_default_str();
    c_bench->add_option("--method", bench_method, "what to time")
        ->check(CLI::IsMember({"codisp", "ttest", "both"}))
        ->capture_default_str();
    add_common_options(c_bench, bench_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 64;
    }

    try {
        if (*c_ttest) {
            const auto sample = load_sample(ttest_in);
            const auto estimator = ttest_estimator == "clifford"
                                       ? spassoc::VarianceEstimator::clifford
                                       : spassoc::VarianceEstimator::dutilleul;
            const auto result =
                ttest_classes.sturges
                    ? spassoc::modified_ttest_sturges(sample, estimator, ttest_common.threads)
                    : spassoc::modified_ttest(sample, ttest_classes.nclass, estimator,
                                              ttest_common.threads);
            const std::string& fmt = ttest_common.format;
            write_output(ttest_common.out, fmt == "csv"       ? spassoc::ttest_csv(result)
                                           : fmt == "summary" ? spassoc::ttest_summary(result)
                                                              : spassoc::ttest_json(result));
        } else if (*c_tjo) {
            const auto result = spassoc::tjostheim_coef(load_sample(tjo_in));
            const std::string& fmt = tjo_common.format;
            write_output(tjo_common.out, fmt == "csv"       ? spassoc::tjostheim_csv(result)
                                         : fmt == "summary" ? spassoc::tjostheim_summary(result)
                                                            : spassoc::tjostheim_json(result));
        } else if (*c_codisp) {
            const auto sample = load_sample(codisp_in);
            const auto result =
                codisp_classes.sturges
                    ? spassoc::codisp_binned_sturges(sample, codisp_common.threads)
                    : spassoc::codisp_binned(sample, codisp_classes.nclass,
                                             codisp_common.threads);
            const std::string& fmt = codisp_common.format;
            write_output(codisp_common.out, fmt == "csv"       ? spassoc::codisp_csv(result)
                                            : fmt == "summary" ? spassoc::codisp_summary(result)
                                                               : spassoc::codisp_json(result));
        } else if (*c_comove) {
            const auto x = spassoc::parse_series_csv(comove_x);
            const auto y = spassoc::parse_series_csv(comove_y);
            const auto coef = spassoc::comovement(x, y, comove_max_lag);
            const std::string& fmt = comove_common.format;
            write_output(comove_common.out, fmt == "csv" ? spassoc::comovement_csv(coef)
                                            : fmt == "summary"
                                                ? spassoc::comovement_summary(coef)
                                                : spassoc::comovement_json(coef));
        } else if (*c_map) {
            const auto sample = load_sample(map_in);
            const double radius = map_max_radius > 0.0
                                      ? map_max_radius
                                      : spassoc::max_pair_distance(sample, map_common.threads);
            const auto result = spassoc::codisp_map(sample, map_angles, map_radii, radius,
                                                    map_tol, map_common.threads);
            const std::string& fmt = map_common.format;
            write_output(map_common.out, fmt == "csv"       ? spassoc::map_csv(result)
                                         : fmt == "summary" ? spassoc::map_summary(result)
                                                            : spassoc::map_json(result));
        } else if (*c_sim) {
            auto [s1, s2] = spassoc::grid_coords(sim_nrow, sim_ncol);
            const spassoc::FieldSampler sampler(std::move(s1), std::move(s2), sim_spec);
            auto [x, y] = sampler.draw(sim_seed);
            const std::string& fmt = sim_common.format;
            if (fmt == "csv") {
                spassoc::PointSample sample{sampler.coord1(), sampler.coord2(), std::move(x),
                                            std::move(y)};
                write_output(sim_common.out, spassoc::points_csv(sample));
                const std::string sidecar =
                    spassoc::simulate_sidecar_json(sampler, sim_seed, sim_nrow, sim_ncol);
                if (sim_common.out.empty()) {
                    std::cerr << sidecar; // keep stdout a clean CSV stream
                } else {
                    write_output(sim_common.out + ".json", sidecar);
                }
            } else if (fmt == "summary") {
                write_output(sim_common.out,
                             spassoc::simulate_sidecar_json(sampler, sim_seed, sim_nrow,
                                                            sim_ncol));
            } else {
                write_output(sim_common.out, spassoc::simulate_json(sampler, sim_seed, sim_nrow,
                                                                    sim_ncol, x, y));
            }
        } else if (*c_bench) {
            const bool time_codisp = bench_method != "ttest";
            const bool time_ttest = bench_method != "codisp";
            const auto rows = spassoc::bench(bench_sizes, bench_reps, time_codisp, time_ttest,
                                             bench_nclass, bench_seed, bench_common.threads);
            const std::string& fmt = bench_common.format;
            write_output(bench_common.out, fmt == "csv"       ? spassoc::bench_csv(rows)
                                           : fmt == "summary" ? spassoc::bench_summary(rows)
                                                              : spassoc::bench_json(rows));
        }
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 64;
    } catch (const spassoc::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const spassoc::degeneracy_error& e) {
        std::cerr << "degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
