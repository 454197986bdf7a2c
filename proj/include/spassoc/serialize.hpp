#ifndef SPASSOC_SERIALIZE_HPP
#define SPASSOC_SERIALIZE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spassoc/codispersion.hpp"
#include "spassoc/geometry.hpp"
#include "spassoc/mttest.hpp"
#include "spassoc/simulate.hpp"
#include "spassoc/tjostheim.hpp"

namespace spassoc {

/// Full round-trip text of a double (17 significant digits).
std::string format_full(double value);

/// Fixed 4-decimal rendering for the human-readable summaries.
std::string format_fixed4(double value);

// JSON documents (full precision; missing values serialize as null).
std::string ttest_json(const MTTestResult& result);
std::string tjostheim_json(const TjostheimResult& result);
std::string codisp_json(const CodispResult& result);
std::string map_json(const CodispMap& map);
std::string comovement_json(const std::vector<std::optional<double>>& coef);
std::string bench_json(const std::vector<BenchRow>& rows);
std::string simulate_json(const FieldSampler& sampler, std::uint64_t seed, int nrow, int ncol,
                          const std::vector<double>& x, const std::vector<double>& y);
std::string simulate_sidecar_json(const FieldSampler& sampler, std::uint64_t seed, int nrow,
                                  int ncol);

// CSV documents (17 significant digits, "NA" for missing values).
std::string ttest_csv(const MTTestResult& result);           // key,index,value long format
std::string tjostheim_csv(const TjostheimResult& result);    // coef,variance
std::string codisp_csv(const CodispResult& result);          // upper_bound,card,coef
std::string map_csv(const CodispMap& map);                   // angle_rad,radius,value,npairs
std::string comovement_csv(const std::vector<std::optional<double>>& coef); // lag,coef
std::string bench_csv(const std::vector<BenchRow>& rows);
std::string points_csv(const PointSample& sample);           // s1,s2,x,y

// Human-readable 4-decimal summaries.
std::string ttest_summary(const MTTestResult& result);
std::string tjostheim_summary(const TjostheimResult& result);
std::string codisp_summary(const CodispResult& result);
std::string map_summary(const CodispMap& map);
std::string comovement_summary(const std::vector<std::optional<double>>& coef);
std::string bench_summary(const std::vector<BenchRow>& rows);

} // namespace spassoc

#endif // SPASSOC_SERIALIZE_HPP
