#pragma once

// JSON views of the library's reports (nlohmann::ordered_json keeps key order
// stable, so identical runs print identical bytes).

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>

#include <json.hpp>

#include "qmclab/qmclab.hpp"

namespace qmclab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "qmclab/1";
inline constexpr const char* kVersion = "1.0.0";

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json metadata(std::uint64_t seed, int chunk_count) {
  return Json{{"seed", seed},
              {"chunk_count", chunk_count},
              {"version", kVersion},
              {"gaussian", kGaussianAlgorithm},
              {"timestamp", utc_timestamp()}};
}

inline Json to_json(const UnitVectorAssignment& f) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < f.vectors().rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < f.vectors().cols(); ++j) row.push_back(f.vectors()(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"labels", f.labels()}, {"r", f.rank()}, {"rows", std::move(rows)}};
}

inline Json to_json(const RatioReport& r) {
  return Json{{"kind", r.kind}, {"k", r.k}, {"alpha", r.alpha}, {"rho_star", r.rho_star}, {"refine_tol", r.refine_tol}};
}

inline Json to_json(const RoundingReport& r) {
  Json j{{"graph_id", r.graph_id},
         {"objective", to_string(r.objective.kind)},
         {"k", r.k},
         {"trials", r.trials},
         {"sdp_value", r.sdp_value},
         {"mean_rounded", r.mean_rounded},
         {"ratio", r.ratio},
         {"stderr", r.stderr_mean},
         {"zero_image_retries", r.zero_image_retries}};
  if (!r.per_edge_mean.empty()) j["per_edge_mean"] = r.per_edge_mean;
  return j;
}

inline Json to_json(const KeyLemmaReport& r) {
  Json violations = Json::array();
  for (const auto& [d, t] : r.violations) violations.push_back(Json{{"d", d}, {"t", t}});
  return Json{{"passed", r.passed},
              {"worst_margin", r.worst_margin},
              {"worst_relative_margin", r.worst_relative_margin},
              {"worst_d", r.worst_d},
              {"worst_t", r.worst_t},
              {"max_nu1", r.max_nu1},
              {"points", r.points},
              {"violations", std::move(violations)}};
}

inline Json to_json(const BorellReport& r) {
  Json cands = Json::array();
  for (const auto& c : r.candidates) {
    cands.push_back(Json{{"name", c.name},
                         {"stab", c.stab},
                         {"stderr", c.stderr_mean},
                         {"diff_vs_opt", c.diff_vs_opt},
                         {"diff_stderr", c.diff_stderr},
                         {"passed", c.passed}});
  }
  return Json{{"n", r.n},
              {"rho", r.rho},
              {"samples", r.samples},
              {"opt_stab", r.opt_stab},
              {"opt_stderr", r.opt_stderr},
              {"f_star", r.f_star_value},
              {"opt_matches_f_star", r.opt_matches_f_star},
              {"candidates", std::move(cands)},
              {"passed", r.passed}};
}

}  // namespace qmclab
