#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "trapcc/explore.hpp"
#include "trapcc/kkt.hpp"

namespace trapcc {

// 17 significant digits round-trip IEEE doubles exactly, so serialized
// solutions replay bit-faithfully.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

template <typename It>
inline std::string json_number_array(It begin, It end) {
  std::string out = "[";
  for (It it = begin; it != end; ++it) {
    if (it != begin) out += ", ";
    out += format_double(*it);
  }
  out += "]";
  return out;
}

inline const char* json_bool(bool b) { return b ? "true" : "false"; }

}  // namespace detail

inline std::string to_json(const CertificateReport& rep,
                           const std::string& indent) {
  const std::string pad = indent + "  ";
  std::string out = "{\n";
  out += pad + "\"f_diag\": " +
         detail::json_number_array(rep.f_diag.begin(), rep.f_diag.end()) +
         ",\n";
  out += pad + "\"a_terms\": " +
         detail::json_number_array(rep.a_terms.begin(), rep.a_terms.end()) +
         ",\n";
  out += pad + "\"minors\": " +
         detail::json_number_array(rep.minors.begin(), rep.minors.end()) +
         ",\n";
  out += pad + "\"lambda_positive\": " +
         std::string(detail::json_bool(rep.lambda_positive)) + ",\n";
  out += pad + "\"all_minors_positive\": " +
         std::string(detail::json_bool(rep.all_minors_positive)) + ",\n";
  out += pad + "\"a_terms_match_3mm\": " +
         std::string(detail::json_bool(rep.a_terms_match_3mm)) + "\n";
  out += indent + "}";
  return out;
}

inline std::string to_json(const Solution& sol, const MassVector& m,
                           const std::string& indent = "") {
  const std::string pad = indent + "  ";
  std::string out = "{\n";
  out += pad + "\"masses\": " +
         detail::json_number_array(m.data().begin(), m.data().end()) + ",\n";
  out += pad + "\"r\": " +
         detail::json_number_array(sol.r.data().begin(), sol.r.data().end()) +
         ",\n";
  out += pad + "\"lambda\": " + format_double(sol.mult.lambda) + ",\n";
  out += pad + "\"sigma\": " + format_double(sol.mult.sigma) + ",\n";
  out += pad + "\"residual_norm\": " + format_double(sol.residual_norm) + ",\n";
  out += pad + "\"iterations\": " + std::to_string(sol.iterations) + ",\n";
  out += pad + "\"realizable\": " +
         std::string(detail::json_bool(sol.realizable)) + ",\n";
  out += pad + "\"convex_sequential\": " +
         std::string(detail::json_bool(sol.convex_sequential)) + ",\n";
  out += pad + "\"sigma_sq_spread\": " + format_double(sol.sigma_sq_spread) +
         ",\n";
  out += pad + "\"certificate\": " + to_json(sol.certificate, pad) + "\n";
  out += indent + "}";
  return out;
}

inline std::string to_json(const UniquenessReport& rep,
                           const std::string& indent = "") {
  const std::string pad = indent + "  ";
  std::string out = "{\n";
  out += pad + "\"masses\": " +
         detail::json_number_array(rep.masses.data().begin(),
                                   rep.masses.data().end()) +
         ",\n";
  out += pad + "\"n_starts\": " + std::to_string(rep.n_starts) + ",\n";
  out += pad + "\"n_converged\": " + std::to_string(rep.n_converged) + ",\n";
  out += pad + "\"n_realizable\": " + std::to_string(rep.n_realizable) + ",\n";
  out += pad + "\"clusters\": [";
  for (std::size_t c = 0; c < rep.clusters.size(); ++c) {
    const auto& cl = rep.clusters[c];
    out += (c == 0 ? "\n" : ",\n");
    out += pad + "  {\n";
    out += pad + "    \"representative\": " +
           to_json(cl.representative, rep.masses, pad + "    ") + ",\n";
    out += pad + "    \"member_count\": " + std::to_string(cl.member_count) +
           ",\n";
    out += pad + "    \"max_intra_cluster_distance\": " +
           format_double(cl.max_intra_cluster_distance) + "\n";
    out += pad + "  }";
  }
  out += rep.clusters.empty() ? "],\n" : "\n" + pad + "],\n";
  out += pad + "\"distinct_realizable_clusters\": " +
         std::to_string(rep.distinct_realizable_clusters) + "\n";
  out += indent + "}";
  return out;
}

struct ParsedSolution {
  MassVector masses;
  Solution solution;
};

// Inverse of to_json(Solution). The schema stores no solver status; converged
// status is reconstructed from residual_norm against the default residual
// tolerance.
inline ParsedSolution solution_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const auto& jm = j.at("masses");
  const auto& jr = j.at("r");
  MassVector m(jm.at(0).get<double>(), jm.at(1).get<double>(),
               jm.at(2).get<double>(), jm.at(3).get<double>());
  DistanceVector r(jr.at(0).get<double>(), jr.at(1).get<double>(),
                   jr.at(2).get<double>(), jr.at(3).get<double>(),
                   jr.at(4).get<double>(), jr.at(5).get<double>());
  const double residual = j.at("residual_norm").get<double>();
  Solution sol{r,
               Multipliers{j.at("lambda").get<double>(),
                           j.at("sigma").get<double>()},
               residual,
               j.at("iterations").get<int>(),
               residual <= SolverConfig{}.tol_residual
                   ? SolveStatus::Converged
                   : SolveStatus::MaxItersExceeded,
               j.at("realizable").get<bool>(),
               j.at("convex_sequential").get<bool>(),
               j.at("sigma_sq_spread").get<double>(),
               CertificateReport{}};
  const auto& jc = j.at("certificate");
  for (int k = 0; k < 6; ++k) {
    sol.certificate.f_diag[static_cast<std::size_t>(k)] =
        jc.at("f_diag").at(static_cast<std::size_t>(k)).get<double>();
    sol.certificate.minors[static_cast<std::size_t>(k)] =
        jc.at("minors").at(static_cast<std::size_t>(k)).get<double>();
  }
  for (int k = 0; k < 5; ++k) {
    sol.certificate.a_terms[static_cast<std::size_t>(k)] =
        jc.at("a_terms").at(static_cast<std::size_t>(k)).get<double>();
  }
  sol.certificate.lambda_positive = jc.at("lambda_positive").get<bool>();
  sol.certificate.all_minors_positive =
      jc.at("all_minors_positive").get<bool>();
  sol.certificate.a_terms_match_3mm = jc.at("a_terms_match_3mm").get<bool>();
  return ParsedSolution{m, sol};
}

inline std::string sweep_csv_header() {
  return "m1,m2,m3,m4,clusters,r12,r13,r14,r23,r24,r34,lambda,sigma,"
         "minors_min,residual";
}

inline std::string sweep_csv_row(const SweepRow& row) {
  std::string out;
  for (double mi : row.masses.data()) {
    out += format_double(mi) + ",";
  }
  out += std::to_string(row.report.distinct_realizable_clusters);
  if (row.entry) {
    const Solution& s = *row.entry;
    for (double d : s.r.data()) out += "," + format_double(d);
    out += "," + format_double(s.mult.lambda);
    out += "," + format_double(s.mult.sigma);
    out += "," + format_double(*std::min_element(s.certificate.minors.begin(),
                                                 s.certificate.minors.end()));
    out += "," + format_double(s.residual_norm);
  } else {
    for (int k = 0; k < 10; ++k) out += ",nan";
  }
  return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = sweep_csv_header() + "\n";
  for (const SweepRow& row : rows) {
    out += sweep_csv_row(row) + "\n";
  }
  return out;
}

}  // namespace trapcc
