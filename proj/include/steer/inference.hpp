// inference.hpp: joint statistics of local measurements and every inferred
// moment the steering criteria consume
//
// Two routes are used on purpose: expectation values of operator products
// (Reid's g and the linear-estimate variance) are contracted directly from
// the state, while conditional statistics come from the outcome table
// P(a, b) = Tr[rho (P_a ⊗ Q_b)].

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "steer/error.hpp"
#include "steer/linalg.hpp"
#include "steer/observables.hpp"
#include "steer/states.hpp"

namespace steer {

inline constexpr double kProbClampTol = 1e-12;
inline constexpr double kNormalizationTol = 1e-10;
inline constexpr double kReidDenominatorTol = 1e-12;

struct JointDistribution {
  std::vector<double> alice_outcomes;
  std::vector<double> bob_outcomes;
  std::vector<std::vector<double>> probs;  // probs[a][b]

  double alice_marginal(std::size_t a) const {
    double s = 0.0;
    for (double v : probs[a]) s += v;
    return s;
  }

  double bob_marginal(std::size_t b) const {
    double s = 0.0;
    for (const auto& row : probs) s += row[b];
    return s;
  }

  double total() const {
    double s = 0.0;
    for (std::size_t a = 0; a < probs.size(); ++a) s += alice_marginal(a);
    return s;
  }
};

namespace detail {

inline void require_bipartite_match(const DensityMatrix& rho, const ObservablePairing& pairing) {
  if (!rho.dims()) throw DimensionError("joint statistics need a two-party state");
  if (rho.dims()->a != pairing.alice.dim() || rho.dims()->b != pairing.bob.dim()) {
    throw DimensionError("state dims (" + std::to_string(rho.dims()->a) + "," + std::to_string(rho.dims()->b) +
                         ") do not match observables (" + std::to_string(pairing.alice.dim()) + "," +
                         std::to_string(pairing.bob.dim()) + ")");
  }
}

inline double clamp_probability(double v) {
  if (std::abs(v) < kProbClampTol) return 0.0;
  if (v < 0.0) throw NumericalError("negative joint probability " + std::to_string(v));
  return v;
}

}  // namespace detail

inline JointDistribution joint_distribution(const DensityMatrix& rho, const ObservablePairing& pairing) {
  detail::require_bipartite_match(rho, pairing);
  const auto& sa = pairing.alice.spectral();
  const auto& sb = pairing.bob.spectral();
  JointDistribution jd{sa.eigenvalues, sb.eigenvalues, {}};
  jd.probs.assign(sa.size(), std::vector<double>(sb.size(), 0.0));
  for (std::size_t a = 0; a < sa.size(); ++a)
    for (std::size_t b = 0; b < sb.size(); ++b)
      jd.probs[a][b] = detail::clamp_probability(expect_local(rho.matrix(), sa.projectors[a], sb.projectors[b]).real());
  const double total = jd.total();
  if (std::abs(total - 1.0) > kNormalizationTol) {
    throw NumericalError("joint distribution sums to " + std::to_string(total));
  }
  return jd;
}

namespace detail {

inline double conditional_mean_at(const JointDistribution& jd, std::size_t a) {
  const double pa = jd.alice_marginal(a);
  if (pa <= 0.0) throw ZeroProbabilityError("conditioning on an Alice outcome of probability zero");
  double s = 0.0;
  for (std::size_t b = 0; b < jd.bob_outcomes.size(); ++b) s += jd.probs[a][b] * jd.bob_outcomes[b];
  return s / pa;
}

inline std::size_t alice_index(const JointDistribution& jd, double outcome) {
  for (std::size_t a = 0; a < jd.alice_outcomes.size(); ++a)
    if (std::abs(jd.alice_outcomes[a] - outcome) <= kDefaultMergeTol) return a;
  throw InvalidArgument("no Alice outcome " + std::to_string(outcome));
}

// Sum over Alice outcomes of P(A) f(<B>_A); zero-probability outcomes add nothing.
template <typename F>
double weighted_over_conditionals(const JointDistribution& jd, F&& f) {
  double s = 0.0;
  for (std::size_t a = 0; a < jd.alice_outcomes.size(); ++a) {
    const double pa = jd.alice_marginal(a);
    if (pa <= 0.0) continue;
    s += pa * f(conditional_mean_at(jd, a));
  }
  return s;
}

}  // namespace detail

// <B>_A for one Alice outcome label.
inline double conditional_mean(const JointDistribution& jd, double alice_outcome) {
  return detail::conditional_mean_at(jd, detail::alice_index(jd, alice_outcome));
}

// Second-order moments the linear estimate needs.
struct CorrelationMoments {
  double ab;  // <A ⊗ B>
  double aa;  // <A^2 ⊗ I>
  double bb;  // <I ⊗ B^2>
};

inline CorrelationMoments correlation_moments(const DensityMatrix& rho, const ObservablePairing& pairing) {
  detail::require_bipartite_match(rho, pairing);
  const auto& a = pairing.alice.matrix();
  const auto& b = pairing.bob.matrix();
  const auto ia = ComplexMatrix::identity(a.dim());
  const auto ib = ComplexMatrix::identity(b.dim());
  return {expect_local(rho.matrix(), a, b).real(), expect_local(rho.matrix(), a * a, ib).real(),
          expect_local(rho.matrix(), ia, b * b).real()};
}

inline double reid_g(const CorrelationMoments& m) {
  if (!(m.aa > kReidDenominatorTol)) throw NumericalError("reid_g: <A^2> vanishes");
  return m.ab / m.aa;
}

inline double reid_g(const DensityMatrix& rho, const ObservablePairing& pairing) {
  return reid_g(correlation_moments(rho, pairing));
}

// <(B - g A)^2> with g = <A⊗B>/<A^2>.
inline double inferred_variance_linear(const CorrelationMoments& m) {
  const double g = reid_g(m);
  return std::max(0.0, m.bb - 2.0 * g * m.ab + g * g * m.aa);
}

inline double inferred_variance_linear(const DensityMatrix& rho, const ObservablePairing& pairing) {
  return inferred_variance_linear(correlation_moments(rho, pairing));
}

// Sum_A P(A) Var(B|A): the variance left after the best possible estimate.
inline double inferred_variance_min(const JointDistribution& jd) {
  double s = 0.0;
  for (std::size_t a = 0; a < jd.alice_outcomes.size(); ++a) {
    const double pa = jd.alice_marginal(a);
    if (pa <= 0.0) continue;
    const double mean = detail::conditional_mean_at(jd, a);
    for (std::size_t b = 0; b < jd.bob_outcomes.size(); ++b) {
      const double dev = jd.bob_outcomes[b] - mean;
      s += jd.probs[a][b] * dev * dev;
    }
  }
  return std::max(0.0, s);
}

inline double inferred_abs_mean(const JointDistribution& jd) {
  return detail::weighted_over_conditionals(jd, [](double m) { return std::abs(m); });
}

inline double inferred_mean(const JointDistribution& jd) {
  return detail::weighted_over_conditionals(jd, [](double m) { return m; });
}

inline double inferred_sq_mean(const JointDistribution& jd) {
  return detail::weighted_over_conditionals(jd, [](double m) { return m * m; });
}

inline double inferred_abs_mean(const DensityMatrix& rho, const ObservablePairing& pairing) {
  return inferred_abs_mean(joint_distribution(rho, pairing));
}

inline double inferred_mean(const DensityMatrix& rho, const ObservablePairing& pairing) {
  return inferred_mean(joint_distribution(rho, pairing));
}

inline double inferred_sq_mean(const DensityMatrix& rho, const ObservablePairing& pairing) {
  return inferred_sq_mean(joint_distribution(rho, pairing));
}

// (<B1><B2>)_inf from three settings via the polarization identity
//   2 (<B1><B2>)_inf = (<B1>^2)_inf + (<B2>^2)_inf - (<B1 - B2>^2)_inf
inline double inferred_product_of_means(double sq_b1, double sq_b2, double sq_b0) {
  return 0.5 * (sq_b1 + sq_b2 - sq_b0);
}

inline double inferred_product_of_means(const DensityMatrix& rho, const ObservablePairing& p1,
                                        const ObservablePairing& p2, const ObservablePairing& p0) {
  return inferred_product_of_means(inferred_sq_mean(rho, p1), inferred_sq_mean(rho, p2), inferred_sq_mean(rho, p0));
}

struct NamedTable {
  std::string setting;  // "b1", "b2", "b3", "b4", "b0"
  JointDistribution table;
};

struct InferredMoments {
  double var_inf_b1 = 0.0;
  double var_inf_b2 = 0.0;
  double var_min_b1 = 0.0;
  double var_min_b2 = 0.0;
  double abs_mean_inf_commutator = 0.0;
  double mean_inf_anticommutator = 0.0;
  double sq_mean_inf_b1 = 0.0;
  double sq_mean_inf_b2 = 0.0;
  double sq_mean_inf_b0 = 0.0;
  double product_of_means_inf = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  std::vector<NamedTable> tables;  // raw joint tables, kept for audit output
};

inline InferredMoments full_moments(const DensityMatrix& rho, const MeasurementSetup& setup) {
  const JointDistribution t1 = joint_distribution(rho, setup.p1);
  const JointDistribution t2 = joint_distribution(rho, setup.p2);
  const JointDistribution t3 = joint_distribution(rho, setup.p3);
  const JointDistribution t4 = joint_distribution(rho, setup.p4);
  const JointDistribution t0 = joint_distribution(rho, setup.p0);
  const CorrelationMoments c1 = correlation_moments(rho, setup.p1);
  const CorrelationMoments c2 = correlation_moments(rho, setup.p2);

  InferredMoments m;
  m.g1 = reid_g(c1);
  m.g2 = reid_g(c2);
  m.var_inf_b1 = inferred_variance_linear(c1);
  m.var_inf_b2 = inferred_variance_linear(c2);
  m.var_min_b1 = inferred_variance_min(t1);
  m.var_min_b2 = inferred_variance_min(t2);
  m.abs_mean_inf_commutator = inferred_abs_mean(t3);
  m.mean_inf_anticommutator = inferred_mean(t4);
  m.sq_mean_inf_b1 = inferred_sq_mean(t1);
  m.sq_mean_inf_b2 = inferred_sq_mean(t2);
  m.sq_mean_inf_b0 = inferred_sq_mean(t0);
  m.product_of_means_inf = inferred_product_of_means(m.sq_mean_inf_b1, m.sq_mean_inf_b2, m.sq_mean_inf_b0);
  m.tables = {{"b1", t1}, {"b2", t2}, {"b3", t3}, {"b4", t4}, {"b0", t0}};
  return m;
}

inline InferredMoments full_moments(const DensityMatrix& rho, const Observable& b1, const Observable& b2,
                                    const PairingRule& rule = PairingRule::transpose_rule()) {
  return full_moments(rho, rule.resolve(b1, b2));
}

}  // namespace steer
