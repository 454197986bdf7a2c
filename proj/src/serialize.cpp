#include "spassoc/serialize.hpp"

#include <cstdio>

#include <json.hpp>

namespace spassoc {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string printf_string(const char* fmt, double value) {
    const int needed = std::snprintf(nullptr, 0, fmt, value);
    std::string out(static_cast<std::size_t>(needed), '\0');
    std::snprintf(out.data(), out.size() + 1, fmt, value);
    return out;
}

ordered_json to_json(const std::optional<double>& value) {
    return value ? ordered_json(*value) : ordered_json(nullptr);
}

ordered_json to_json(const std::vector<std::optional<double>>& values) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : values) arr.push_back(to_json(v));
    return arr;
}

std::string cell(const std::optional<double>& value) {
    return value ? format_full(*value) : std::string("NA");
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json spec_json(const CovSpec& spec) {
    return ordered_json{{"a", spec.a},         {"alpha", spec.alpha}, {"beta", spec.beta},
                        {"sigma", spec.sigma}, {"c", spec.c},         {"gamma", spec.gamma},
                        {"d", spec.d}};
}

ordered_json sidecar_json(const FieldSampler& sampler, std::uint64_t seed, int nrow, int ncol) {
    return ordered_json{{"spec", spec_json(sampler.spec())},
                        {"seed", seed},
                        {"rng", FieldSampler::rng_name()},
                        {"jitter", sampler.jitter()},
                        {"nrow", nrow},
                        {"ncol", ncol},
                        {"n", sampler.size()}};
}

} // namespace

std::string format_full(double value) { return printf_string("%.17g", value); }

std::string format_fixed4(double value) { return printf_string("%.4f", value); }

std::string ttest_json(const MTTestResult& result) {
    ordered_json doc;
    doc["fstat"] = result.fstat;
    doc["dof"] = result.dof;
    doc["ess"] = result.ess;
    doc["p_value"] = result.p_value;
    doc["corr"] = result.corr;
    doc["sigma2_r"] = result.sigma2_r;
    doc["upper_bounds"] = result.classes.upper_bounds;
    doc["card"] = result.classes.card;
    ordered_json imoran = ordered_json::array();
    for (const auto& pair : result.imoran) imoran.push_back({pair[0], pair[1]});
    doc["imoran"] = imoran;
    return dump(doc);
}

std::string tjostheim_json(const TjostheimResult& result) {
    return dump(ordered_json{{"coef", result.coef}, {"variance", result.variance}});
}

std::string codisp_json(const CodispResult& result) {
    ordered_json doc;
    doc["upper_bounds"] = result.classes.upper_bounds;
    doc["card"] = result.classes.card;
    doc["coef"] = to_json(result.coef);
    doc["max_dist"] = result.classes.max_dist;
    doc["zero_pairs"] = result.classes.zero_pairs;
    return dump(doc);
}

std::string map_json(const CodispMap& map) {
    ordered_json values = ordered_json::array();
    ordered_json npairs = ordered_json::array();
    for (std::size_t a = 0; a < map.n_angles(); ++a) {
        ordered_json vrow = ordered_json::array();
        ordered_json nrow = ordered_json::array();
        for (std::size_t r = 0; r < map.n_radii(); ++r) {
            vrow.push_back(to_json(map.at(a, r)));
            nrow.push_back(map.npairs[a * map.n_radii() + r]);
        }
        values.push_back(vrow);
        npairs.push_back(nrow);
    }
    return dump(ordered_json{{"angles", map.angles},
                             {"radii", map.radii},
                             {"values", values},
                             {"npairs", npairs},
                             {"tolerance", map.tolerance}});
}

std::string comovement_json(const std::vector<std::optional<double>>& coef) {
    std::vector<int> lags(coef.size());
    for (std::size_t h = 0; h < coef.size(); ++h) lags[h] = static_cast<int>(h) + 1;
    return dump(ordered_json{{"lags", lags}, {"coef", to_json(coef)}});
}

std::string bench_json(const std::vector<BenchRow>& rows) {
    ordered_json doc = ordered_json::array();
    for (const auto& row : rows) {
        doc.push_back(ordered_json{{"size", row.size},
                                   {"n", row.n},
                                   {"method", row.method},
                                   {"reps", row.reps},
                                   {"mean_seconds", row.mean_seconds},
                                   {"op_count", row.op_count}});
    }
    return dump(doc);
}

std::string simulate_json(const FieldSampler& sampler, std::uint64_t seed, int nrow, int ncol,
                          const std::vector<double>& x, const std::vector<double>& y) {
    ordered_json doc = sidecar_json(sampler, seed, nrow, ncol);
    doc["s1"] = sampler.coord1();
    doc["s2"] = sampler.coord2();
    doc["x"] = x;
    doc["y"] = y;
    return dump(doc);
}

std::string simulate_sidecar_json(const FieldSampler& sampler, std::uint64_t seed, int nrow,
                                  int ncol) {
    return dump(sidecar_json(sampler, seed, nrow, ncol));
}

std::string ttest_csv(const MTTestResult& result) {
    std::string out = "key,index,value\n";
    const auto scalar = [&out](const char* key, double value) {
        out += key;
        out += ",,";
        out += format_full(value);
        out += '\n';
    };
    scalar("fstat", result.fstat);
    scalar("dof", result.dof);
    scalar("ess", result.ess);
    scalar("p_value", result.p_value);
    scalar("corr", result.corr);
    scalar("sigma2_r", result.sigma2_r);
    const auto indexed = [&out](const char* key, std::size_t index, const std::string& value) {
        out += key;
        out += ',';
        out += std::to_string(index + 1);
        out += ',';
        out += value;
        out += '\n';
    };
    for (std::size_t k = 0; k < result.classes.upper_bounds.size(); ++k) {
        indexed("upper_bound", k, format_full(result.classes.upper_bounds[k]));
    }
    for (std::size_t k = 0; k < result.classes.card.size(); ++k) {
        indexed("card", k, std::to_string(result.classes.card[k]));
    }
    for (std::size_t k = 0; k < result.imoran.size(); ++k) {
        indexed("imoran_x", k, format_full(result.imoran[k][0]));
    }
    for (std::size_t k = 0; k < result.imoran.size(); ++k) {
        indexed("imoran_y", k, format_full(result.imoran[k][1]));
    }
    return out;
}

std::string tjostheim_csv(const TjostheimResult& result) {
    return "coef,variance\n" + format_full(result.coef) + "," + format_full(result.variance) +
           "\n";
}

std::string codisp_csv(const CodispResult& result) {
    std::string out = "upper_bound,card,coef\n";
    for (std::size_t k = 0; k < result.coef.size(); ++k) {
        out += format_full(result.classes.upper_bounds[k]);
        out += ',';
        out += std::to_string(result.classes.card[k]);
        out += ',';
        out += cell(result.coef[k]);
        out += '\n';
    }
    return out;
}

std::string map_csv(const CodispMap& map) {
    std::string out = "angle_rad,radius,value,npairs\n";
    for (std::size_t a = 0; a < map.n_angles(); ++a) {
        for (std::size_t r = 0; r < map.n_radii(); ++r) {
            out += format_full(map.angles[a]);
            out += ',';
            out += format_full(map.radii[r]);
            out += ',';
            out += cell(map.at(a, r));
            out += ',';
            out += std::to_string(map.npairs[a * map.n_radii() + r]);
            out += '\n';
        }
    }
    return out;
}

std::string comovement_csv(const std::vector<std::optional<double>>& coef) {
    std::string out = "lag,coef\n";
    for (std::size_t h = 0; h < coef.size(); ++h) {
        out += std::to_string(h + 1);
        out += ',';
        out += cell(coef[h]);
        out += '\n';
    }
    return out;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "size,n,method,reps,mean_seconds,op_count\n";
    for (const auto& row : rows) {
        out += std::to_string(row.size);
        out += ',';
        out += std::to_string(row.n);
        out += ',';
        out += row.method;
        out += ',';
        out += std::to_string(row.reps);
        out += ',';
        out += format_full(row.mean_seconds);
        out += ',';
        out += std::to_string(row.op_count);
        out += '\n';
    }
    return out;
}

std::string points_csv(const PointSample& sample) {
    std::string out = "s1,s2,x,y\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
        out += format_full(sample.s1[i]);
        out += ',';
        out += format_full(sample.s2[i]);
        out += ',';
        out += format_full(sample.x[i]);
        out += ',';
        out += format_full(sample.y[i]);
        out += '\n';
    }
    return out;
}

namespace {

std::string summary_cell(const std::optional<double>& value) {
    return value ? format_fixed4(*value) : std::string("NA");
}

void pad_to(std::string& out, const std::string& text, int width) {
    for (int i = static_cast<int>(text.size()); i < width; ++i) out += ' ';
    out += text;
}

} // namespace

std::string ttest_summary(const MTTestResult& result) {
    std::string out = "Modified t-test of spatial association\n";
    out += "  F statistic:           " + format_fixed4(result.fstat) + "\n";
    out += "  degrees of freedom:    1, " + format_fixed4(result.dof) + "\n";
    out += "  p-value:               " + format_fixed4(result.p_value) + "\n";
    out += "  correlation:           " + format_fixed4(result.corr) + "\n";
    out += "  effective sample size: " + format_fixed4(result.ess) + "\n";
    out += "  corr. variance est.:   " + format_fixed4(result.sigma2_r) + "\n";
    out += "  upper_bound        card  imoran_x  imoran_y\n";
    for (std::size_t k = 0; k < result.imoran.size(); ++k) {
        out += ' ';
        pad_to(out, format_fixed4(result.classes.upper_bounds[k]), 12);
        pad_to(out, std::to_string(result.classes.card[k]), 12);
        pad_to(out, format_fixed4(result.imoran[k][0]), 10);
        pad_to(out, format_fixed4(result.imoran[k][1]), 10);
        out += '\n';
    }
    return out;
}

std::string tjostheim_summary(const TjostheimResult& result) {
    std::string out = "Tjostheim coefficient\n";
    out += "  A:      " + format_fixed4(result.coef) + "\n";
    out += "  Var(A): " + format_fixed4(result.variance) + "\n";
    return out;
}

std::string codisp_summary(const CodispResult& result) {
    std::string out = "Codispersion coefficient (" + std::to_string(result.coef.size()) +
                      " classes, max distance " + format_fixed4(result.classes.max_dist) + ")\n";
    out += "  upper_bound        card     coef\n";
    for (std::size_t k = 0; k < result.coef.size(); ++k) {
        out += ' ';
        pad_to(out, format_fixed4(result.classes.upper_bounds[k]), 12);
        pad_to(out, std::to_string(result.classes.card[k]), 12);
        pad_to(out, summary_cell(result.coef[k]), 9);
        out += '\n';
    }
    if (result.classes.zero_pairs > 0) {
        out += "  coincident pairs excluded: " + std::to_string(result.classes.zero_pairs) + "\n";
    }
    return out;
}

std::string map_summary(const CodispMap& map) {
    std::string out = "Codispersion map (" + std::to_string(map.n_angles()) + " angles x " +
                      std::to_string(map.n_radii()) + " radii, tolerance " +
                      format_fixed4(map.tolerance) + ")\n";
    out += "  angle\\radius";
    for (std::size_t r = 0; r < map.n_radii(); ++r) {
        pad_to(out, format_fixed4(map.radii[r]), 10);
    }
    out += '\n';
    for (std::size_t a = 0; a < map.n_angles(); ++a) {
        out += "  ";
        pad_to(out, format_fixed4(map.angles[a]), 12);
        for (std::size_t r = 0; r < map.n_radii(); ++r) {
            pad_to(out, summary_cell(map.at(a, r)), 10);
        }
        out += '\n';
    }
    return out;
}

std::string comovement_summary(const std::vector<std::optional<double>>& coef) {
    std::string out =
        "Comovement coefficient (max lag " + std::to_string(coef.size()) + ")\n";
    out += "  lag     coef\n";
    for (std::size_t h = 0; h < coef.size(); ++h) {
        out += ' ';
        pad_to(out, std::to_string(h + 1), 5);
        pad_to(out, summary_cell(coef[h]), 10);
        out += '\n';
    }
    return out;
}

std::string bench_summary(const std::vector<BenchRow>& rows) {
    std::string out = "Timing benchmark\n";
    out += "  size        n  method  reps  mean_seconds      op_count\n";
    for (const auto& row : rows) {
        out += ' ';
        pad_to(out, std::to_string(row.size), 5);
        pad_to(out, std::to_string(row.n), 9);
        pad_to(out, row.method, 8);
        pad_to(out, std::to_string(row.reps), 6);
        pad_to(out, printf_string("%.6f", row.mean_seconds), 14);
        pad_to(out, std::to_string(row.op_count), 14);
        out += '\n';
    }
    return out;
}

} // namespace spassoc
