// closed_forms.hpp: reference closed-form moments for the two isotropic
// examples (qubit Sx/Sz, qutrit B1/B2), and a slot-by-slot diff against the
// first-principles engine
//
// The formulas are taken as given, not derived. Several of them disagree
// with what the engine computes from the same state and observables; the
// diff report exists to make that visible.

#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "steer/criteria.hpp"
#include "steer/error.hpp"
#include "steer/inference.hpp"
#include "steer/observables.hpp"
#include "steer/states.hpp"

namespace steer {

enum class Family { QubitXZ, QutritB1B2 };

inline const char* to_string(Family f) { return f == Family::QubitXZ ? "qubit-xz" : "qutrit-b1b2"; }

inline Family family_for_dimension(std::size_t d) {
  if (d == 2) return Family::QubitXZ;
  if (d == 3) return Family::QutritB1B2;
  throw InvalidArgument("closed forms exist only for d = 2 and d = 3 (got " + std::to_string(d) + ")");
}

inline std::size_t dimension_of(Family f) { return f == Family::QubitXZ ? 2 : 3; }

// The Bob observable pair each family is evaluated with.
inline std::pair<Observable, Observable> family_observables(Family f) {
  if (f == Family::QubitXZ) return {spin_half(Axis::X), spin_half(Axis::Z)};
  auto set = qutrit_set();
  return {set.b1, set.b2};
}

struct ClosedFormMoments {
  Family family;
  double p;
  InferredMoments moments;  // tables left empty
};

namespace detail {
inline void require_unit_interval(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("closed forms: p must lie in [0, 1]");
}
}  // namespace detail

inline ClosedFormMoments qubit_closed_forms(double p) {
  detail::require_unit_interval(p);
  const double p2 = p * p;
  InferredMoments m;
  m.var_inf_b1 = 0.25 * (1.0 - p2);
  m.var_inf_b2 = 0.25 * (1.0 - p2);
  m.var_min_b1 = m.var_inf_b1;
  m.var_min_b2 = m.var_inf_b2;
  // No closed form given; (p/2)^2 is what [Sx,Sz] = -i Sy gives under
  // perfectly correlating settings, and it reproduces the 0.56 crossing.
  m.abs_mean_inf_commutator = 0.5 * p;
  m.mean_inf_anticommutator = 0.0;
  m.sq_mean_inf_b1 = 0.25 * p2;
  m.sq_mean_inf_b2 = 0.25 * p2;
  m.product_of_means_inf = ((1.0 - 2.0 * std::sqrt(2.0)) * p2 - 1.0) / 16.0;
  // Implied by the polarization identity.
  m.sq_mean_inf_b0 = m.sq_mean_inf_b1 + m.sq_mean_inf_b2 - 2.0 * m.product_of_means_inf;
  m.g1 = p;
  m.g2 = p;
  return {Family::QubitXZ, p, std::move(m)};
}

inline ClosedFormMoments qutrit_closed_forms(double p) {
  detail::require_unit_interval(p);
  const double p2 = p * p;
  InferredMoments m;
  m.var_inf_b1 = (2.0 / 3.0) * (1.0 - p2);
  m.var_inf_b2 = (1.0 / 3.0) * (1.0 - p2);
  m.var_min_b1 = m.var_inf_b1;
  m.var_min_b2 = m.var_inf_b2;
  m.abs_mean_inf_commutator = std::sqrt(p2 / 27.0);
  m.mean_inf_anticommutator = 0.0;
  m.sq_mean_inf_b1 = 2.0 * p2 / 27.0;
  m.sq_mean_inf_b2 = p2 / 27.0;
  m.product_of_means_inf = -p2 / 36.0;
  m.sq_mean_inf_b0 = m.sq_mean_inf_b1 + m.sq_mean_inf_b2 - 2.0 * m.product_of_means_inf;
  m.g1 = p;
  m.g2 = p;
  return {Family::QutritB1B2, p, std::move(m)};
}

inline ClosedFormMoments closed_forms(Family f, double p) {
  return f == Family::QubitXZ ? qubit_closed_forms(p) : qutrit_closed_forms(p);
}

inline std::string isotropic_descriptor(std::size_t d, double p) {
  std::ostringstream os;
  os.precision(12);
  os << "isotropic(d=" << d << ",p=" << p << ")";
  return os.str();
}

inline CriterionReport closed_form_report(Family f, double p, Criterion criterion = Criterion::Srur) {
  auto cf = closed_forms(f, p);
  return assemble_report(criterion, Mode::ClosedForm, std::move(cf.moments),
                         isotropic_descriptor(dimension_of(f), p));
}

struct DiffRow {
  double p;
  std::string slot;
  double engine_value;
  double reference_value;  // emitted as the paper_value CSV column
  double abs_diff;
};

// Engine (transpose pairing, linear-g) against the closed forms, one row per
// slot that has a closed form.
inline std::vector<DiffRow> closed_form_diff(Family f, const std::vector<double>& ps) {
  const auto [b1, b2] = family_observables(f);
  const MeasurementSetup setup = PairingRule::transpose_rule().resolve(b1, b2);
  std::vector<DiffRow> rows;
  for (double p : ps) {
    const InferredMoments engine = full_moments(isotropic({dimension_of(f), p}), setup);
    const InferredMoments reference = closed_forms(f, p).moments;
    const std::pair<const char*, double InferredMoments::*> slots[] = {
        {"var_inf_b1", &InferredMoments::var_inf_b1},
        {"var_inf_b2", &InferredMoments::var_inf_b2},
        {"abs_mean_inf_commutator", &InferredMoments::abs_mean_inf_commutator},
        {"mean_inf_anticommutator", &InferredMoments::mean_inf_anticommutator},
        {"sq_mean_inf_b1", &InferredMoments::sq_mean_inf_b1},
        {"sq_mean_inf_b2", &InferredMoments::sq_mean_inf_b2},
        {"product_of_means_inf", &InferredMoments::product_of_means_inf},
    };
    for (const auto& [name, member] : slots) {
      const double e = engine.*member;
      const double q = reference.*member;
      rows.push_back({p, name, e, q, std::abs(e - q)});
    }
  }
  return rows;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string diff_csv(const std::vector<DiffRow>& rows) {
  std::string out = "p,slot,engine_value,paper_value,abs_diff\n";
  for (const auto& r : rows) {
    out += format_number(r.p) + "," + r.slot + "," + format_number(r.engine_value) + "," +
           format_number(r.reference_value) + "," + format_number(r.abs_diff) + "\n";
  }
  return out;
}

}  // namespace steer
