// io.hpp: JSON encodings for states, observables, reports and audit dumps
//
// Matrices are row-major nested arrays of [re, im] pairs:
//   {"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}
// Observables add a "label" field. Single-system states omit "dims".

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "steer/closed_forms.hpp"
#include "steer/criteria.hpp"
#include "steer/error.hpp"
#include "steer/inference.hpp"
#include "steer/linalg.hpp"
#include "steer/observables.hpp"
#include "steer/oracle.hpp"
#include "steer/states.hpp"
#include "steer/threshold.hpp"

namespace steer::io {

using nlohmann::json;

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
  ComplexMatrix m(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != j.size()) throw DimensionError("matrix must be square");
    for (std::size_t k = 0; k < row.size(); ++k) {
      const json& z = row[k];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw InvalidArgument("matrix entries must be [re, im] number pairs");
      }
      m(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  if (!m.all_finite()) throw InvalidArgument("matrix has non-finite entries");
  return m;
}

inline json state_to_json(const DensityMatrix& rho) {
  json j;
  if (rho.dims()) j["dims"] = {rho.dims()->a, rho.dims()->b};
  j["matrix"] = matrix_to_json(rho.matrix());
  return j;
}

inline std::optional<Dims> dims_from_json(const json& j) {
  if (!j.contains("dims") || j["dims"].is_null()) return std::nullopt;
  const json& d = j["dims"];
  if (!d.is_array() || d.size() != 2 || !d[0].is_number_unsigned() || !d[1].is_number_unsigned()) {
    throw InvalidArgument("\"dims\" must be [dA, dB] with positive integers");
  }
  return Dims{d[0].get<std::size_t>(), d[1].get<std::size_t>()};
}

// Parses the matrix without validating it as a state.
inline std::pair<ComplexMatrix, std::optional<Dims>> raw_state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("matrix")) throw InvalidArgument("state JSON needs a \"matrix\" field");
  return {matrix_from_json(j["matrix"]), dims_from_json(j)};
}

inline DensityMatrix state_from_json(const json& j) {
  auto [m, dims] = raw_state_from_json(j);
  return validate(std::move(m), dims);
}

inline json observable_to_json(const Observable& o) {
  return {{"label", o.label()}, {"dims", {o.dim()}}, {"matrix", matrix_to_json(o.matrix())}};
}

inline Observable observable_from_json(const json& j) {
  if (!j.is_object() || !j.contains("matrix")) throw InvalidArgument("observable JSON needs a \"matrix\" field");
  std::string label = j.value("label", std::string("B"));
  return Observable(std::move(label), matrix_from_json(j["matrix"]));
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

inline json table_to_json(const JointDistribution& t) {
  return {{"alice_outcomes", t.alice_outcomes}, {"bob_outcomes", t.bob_outcomes}, {"probs", t.probs}};
}

inline json moments_to_json(const InferredMoments& m, bool include_tables = false) {
  json j = {
      {"var_inf_b1", m.var_inf_b1},
      {"var_inf_b2", m.var_inf_b2},
      {"var_min_b1", m.var_min_b1},
      {"var_min_b2", m.var_min_b2},
      {"abs_mean_inf_commutator", m.abs_mean_inf_commutator},
      {"mean_inf_anticommutator", m.mean_inf_anticommutator},
      {"sq_mean_inf_b1", m.sq_mean_inf_b1},
      {"sq_mean_inf_b2", m.sq_mean_inf_b2},
      {"sq_mean_inf_b0", m.sq_mean_inf_b0},
      {"product_of_means_inf", m.product_of_means_inf},
      {"g1", m.g1},
      {"g2", m.g2},
  };
  if (include_tables) {
    json tables = json::object();
    for (const auto& t : m.tables) tables[t.setting] = table_to_json(t.table);
    j["tables"] = std::move(tables);
  }
  return j;
}

inline json report_to_json(const CriterionReport& r, bool include_tables = false) {
  return {
      {"criterion", to_string(r.criterion)},
      {"mode", to_string(r.mode)},
      {"lhs", r.lhs},
      {"rhs", r.rhs},
      {"margin", r.margin},
      {"violated", r.violated},
      {"moments", moments_to_json(r.moments, include_tables)},
      {"state_descriptor", r.state_descriptor},
  };
}

inline json threshold_to_json(const ThresholdResult& t) {
  return {
      {"p_star", t.p_star},
      {"bracket", {t.lo, t.hi}},
      {"evaluations", t.evaluations},
      {"margin_at_p_star", t.margin_at_p_star},
      {"multi_crossing", t.multi_crossing},
  };
}

inline json oracle_table_to_json(const oracle::OutcomeTable& t) {
  json entries = json::array();
  for (const auto& e : t.entries) entries.push_back({{"alice", e.alice}, {"bob", e.bob}, {"prob", e.prob}});
  return entries;
}

inline json oracle_moments_to_json(const oracle::Moments& m) {
  return {
      {"var_inf_b1", m.var_inf_b1},
      {"var_inf_b2", m.var_inf_b2},
      {"var_min_b1", m.var_min_b1},
      {"var_min_b2", m.var_min_b2},
      {"abs_mean_inf_commutator", m.abs_mean_inf_commutator},
      {"mean_inf_anticommutator", m.mean_inf_anticommutator},
      {"sq_mean_inf_b1", m.sq_mean_inf_b1},
      {"sq_mean_inf_b2", m.sq_mean_inf_b2},
      {"sq_mean_inf_b0", m.sq_mean_inf_b0},
      {"product_of_means_inf", m.product_of_means_inf},
      {"g1", m.g1},
      {"g2", m.g2},
  };
}

// Oracle tables and moments for every setting of an evaluation.
inline json oracle_audit(const DensityMatrix& rho, const MeasurementSetup& s) {
  json tables = {
      {"b1", oracle_table_to_json(oracle::enumerate_table(rho, s.p1))},
      {"b2", oracle_table_to_json(oracle::enumerate_table(rho, s.p2))},
      {"b3", oracle_table_to_json(oracle::enumerate_table(rho, s.p3))},
      {"b4", oracle_table_to_json(oracle::enumerate_table(rho, s.p4))},
      {"b0", oracle_table_to_json(oracle::enumerate_table(rho, s.p0))},
  };
  return {{"tables", std::move(tables)}, {"moments", oracle_moments_to_json(oracle::moments(rho, s))}};
}

inline json diff_to_json(const std::vector<DiffRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"p", r.p},
                   {"slot", r.slot},
                   {"engine_value", r.engine_value},
                   {"paper_value", r.reference_value},
                   {"abs_diff", r.abs_diff}});
  }
  return out;
}

}  // namespace steer::io
