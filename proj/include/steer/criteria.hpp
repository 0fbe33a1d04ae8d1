// criteria.hpp: inferred Schrödinger–Robertson steering criterion and the
// Heisenberg (commutator-only) baseline

#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "steer/error.hpp"
#include "steer/inference.hpp"
#include "steer/observables.hpp"
#include "steer/states.hpp"

namespace steer {

enum class Criterion { Srur, Hur };
enum class Mode { LinearG, ConditionalMean, ClosedForm };

inline const char* to_string(Criterion c) { return c == Criterion::Srur ? "srur" : "hur"; }

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::LinearG: return "linear-g";
    case Mode::ConditionalMean: return "conditional-mean";
    case Mode::ClosedForm: return "paper-closed-form";
  }
  return "unknown";
}

inline Criterion parse_criterion(const std::string& s) {
  if (s == "srur") return Criterion::Srur;
  if (s == "hur") return Criterion::Hur;
  throw InvalidArgument("unknown criterion '" + s + "'");
}

inline Mode parse_mode(const std::string& s) {
  if (s == "linear-g") return Mode::LinearG;
  if (s == "conditional-mean") return Mode::ConditionalMean;
  if (s == "paper-closed-form") return Mode::ClosedForm;
  throw InvalidArgument("unknown mode '" + s + "'");
}

struct CriterionReport {
  Criterion criterion = Criterion::Srur;
  Mode mode = Mode::LinearG;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs; negative means steering detected
  bool violated = false;
  InferredMoments moments;
  std::string state_descriptor;
};

// Right-hand sides of the inferred criterion, from already-computed moments.
inline double hur_rhs(const InferredMoments& m) {
  return 0.25 * m.abs_mean_inf_commutator * m.abs_mean_inf_commutator;
}

inline double srur_rhs(const InferredMoments& m) {
  const double cov = 0.5 * m.mean_inf_anticommutator - m.product_of_means_inf;
  return hur_rhs(m) + cov * cov;
}

// Assembles a report from moments. The flag is the exact sign of the margin.
inline CriterionReport assemble_report(Criterion criterion, Mode mode, InferredMoments moments,
                                       std::string state_descriptor) {
  CriterionReport r;
  r.criterion = criterion;
  r.mode = mode;
  r.lhs = mode == Mode::ConditionalMean ? moments.var_min_b1 * moments.var_min_b2
                                        : moments.var_inf_b1 * moments.var_inf_b2;
  r.rhs = criterion == Criterion::Srur ? srur_rhs(moments) : hur_rhs(moments);
  r.margin = r.lhs - r.rhs;
  r.violated = r.margin < 0.0;
  r.moments = std::move(moments);
  r.state_descriptor = std::move(state_descriptor);
  return r;
}

namespace detail {
inline void require_engine_mode(Mode mode) {
  if (mode == Mode::ClosedForm) {
    throw InvalidArgument("paper-closed-form mode has no state-based evaluation; use closed_form_report");
  }
}
}  // namespace detail

inline CriterionReport evaluate(Criterion criterion, const DensityMatrix& rho, const MeasurementSetup& setup,
                                Mode mode = Mode::LinearG, std::string state_descriptor = {}) {
  detail::require_engine_mode(mode);
  return assemble_report(criterion, mode, full_moments(rho, setup), std::move(state_descriptor));
}

inline CriterionReport evaluate_srur(const DensityMatrix& rho, const Observable& b1, const Observable& b2,
                                     const PairingRule& rule = PairingRule::transpose_rule(),
                                     Mode mode = Mode::LinearG, std::string state_descriptor = {}) {
  return evaluate(Criterion::Srur, rho, rule.resolve(b1, b2), mode, std::move(state_descriptor));
}

inline CriterionReport evaluate_hur(const DensityMatrix& rho, const Observable& b1, const Observable& b2,
                                    const PairingRule& rule = PairingRule::transpose_rule(),
                                    Mode mode = Mode::LinearG, std::string state_descriptor = {}) {
  return evaluate(Criterion::Hur, rho, rule.resolve(b1, b2), mode, std::move(state_descriptor));
}

// Ordinary (non-inferred) uncertainty relation on a single system:
//   Var(B1) Var(B2) >= 1/4 |<-i[B1,B2]>|^2 + (1/2 <{B1,B2}> - <B1><B2>)^2
struct UncertaintyTerms {
  double lhs;
  double commutator_term;  // Heisenberg–Robertson part
  double covariance_term;

  double rhs_hur() const { return commutator_term; }
  double rhs_srur() const { return commutator_term + covariance_term; }
  double margin_srur() const { return lhs - rhs_srur(); }
};

inline UncertaintyTerms single_system_uncertainty(const ComplexMatrix& rho, const Observable& b1,
                                                  const Observable& b2) {
  if (rho.dim() != b1.dim() || rho.dim() != b2.dim()) {
    throw DimensionError("single_system_uncertainty: state and observables differ in dimension");
  }
  const auto& x = b1.matrix();
  const auto& y = b2.matrix();
  const double m1 = expect(rho, x).real();
  const double m2 = expect(rho, y).real();
  const double v1 = expect(rho, x * x).real() - m1 * m1;
  const double v2 = expect(rho, y * y).real() - m2 * m2;
  const double comm = expect(rho, commutator_observable(b1, b2).matrix()).real();
  const double anti = expect(rho, anticommutator_observable(b1, b2).matrix()).real();
  const double cov = 0.5 * anti - m1 * m2;
  return {v1 * v2, 0.25 * comm * comm, cov * cov};
}

}  // namespace steer
