// oracle.hpp: brute-force recomputation of every inferred moment from an
// explicitly enumerated outcome table
//
// Deliberately naive: tensor products and products with the state are
// written out as plain loops, and every statistic is an explicit sum over
// (a, b, prob) triples. Nothing here calls into inference.hpp.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "steer/error.hpp"
#include "steer/linalg.hpp"
#include "steer/observables.hpp"
#include "steer/states.hpp"

namespace steer::oracle {

struct Entry {
  double alice;
  double bob;
  double prob;
};

struct OutcomeTable {
  std::vector<Entry> entries;
};

namespace detail {

inline std::vector<std::vector<Complex>> dense(const ComplexMatrix& m) {
  std::vector<std::vector<Complex>> out(m.dim(), std::vector<Complex>(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i][j] = m(i, j);
  return out;
}

// Tr[rho (P ⊗ Q)] the long way: build P ⊗ Q, multiply, sum the diagonal.
inline double joint_probability(const std::vector<std::vector<Complex>>& rho, const ComplexMatrix& pa,
                                const ComplexMatrix& qb) {
  const std::size_t m = pa.dim(), n = qb.dim(), big = m * n;
  std::vector<std::vector<Complex>> kr(big, std::vector<Complex>(big));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) kr[i * n + k][j * n + l] = pa(i, j) * qb(k, l);
  Complex tr{};
  for (std::size_t i = 0; i < big; ++i) {
    Complex diag{};
    for (std::size_t k = 0; k < big; ++k) diag += rho[i][k] * kr[k][i];
    tr += diag;
  }
  return tr.real();
}

}  // namespace detail

inline OutcomeTable enumerate_table(const DensityMatrix& rho, const ObservablePairing& pairing) {
  if (!rho.dims() || rho.dims()->a != pairing.alice.dim() || rho.dims()->b != pairing.bob.dim()) {
    throw DimensionError("oracle: state and pairing dimensions disagree");
  }
  const auto r = detail::dense(rho.matrix());
  const auto& sa = pairing.alice.spectral();
  const auto& sb = pairing.bob.spectral();
  OutcomeTable t;
  double total = 0.0;
  for (std::size_t a = 0; a < sa.size(); ++a) {
    for (std::size_t b = 0; b < sb.size(); ++b) {
      double pr = detail::joint_probability(r, sa.projectors[a], sb.projectors[b]);
      if (std::abs(pr) < 1e-12) pr = 0.0;
      if (pr < 0.0) throw NumericalError("oracle: negative probability");
      t.entries.push_back({sa.eigenvalues[a], sb.eigenvalues[b], pr});
      total += pr;
    }
  }
  if (std::abs(total - 1.0) > 1e-10) throw NumericalError("oracle: table does not sum to one");
  return t;
}

inline double table_moment(const OutcomeTable& t, const std::function<double(double, double)>& f) {
  double s = 0.0;
  for (const auto& e : t.entries) s += e.prob * f(e.alice, e.bob);
  return s;
}

// Conditional statistics keyed by Alice's outcome label.
struct Conditional {
  double prob_a = 0.0;
  double sum_b = 0.0;   // Σ_b P(a,b) b
  double sum_bb = 0.0;  // Σ_b P(a,b) b²
};

inline std::map<double, Conditional> conditionals(const OutcomeTable& t) {
  std::map<double, Conditional> by_a;
  for (const auto& e : t.entries) {
    auto& c = by_a[e.alice];
    c.prob_a += e.prob;
    c.sum_b += e.prob * e.bob;
    c.sum_bb += e.prob * e.bob * e.bob;
  }
  return by_a;
}

struct Moments {
  double var_inf_b1, var_inf_b2;
  double var_min_b1, var_min_b2;
  double abs_mean_inf_commutator;
  double mean_inf_anticommutator;
  double sq_mean_inf_b1, sq_mean_inf_b2, sq_mean_inf_b0;
  double product_of_means_inf;
  double g1, g2;
};

inline double g_of(const OutcomeTable& t) {
  const double ab = table_moment(t, [](double a, double b) { return a * b; });
  const double aa = table_moment(t, [](double a, double) { return a * a; });
  return ab / aa;
}

inline double var_linear(const OutcomeTable& t) {
  const double g = g_of(t);
  return table_moment(t, [g](double a, double b) { return (b - g * a) * (b - g * a); });
}

inline double var_min(const OutcomeTable& t) {
  double s = 0.0;
  for (const auto& [a, c] : conditionals(t)) {
    if (c.prob_a <= 0.0) continue;
    const double mean = c.sum_b / c.prob_a;
    s += c.sum_bb - c.prob_a * mean * mean;
  }
  return s;
}

inline double sum_over_conditionals(const OutcomeTable& t, double (*f)(double)) {
  double s = 0.0;
  for (const auto& [a, c] : conditionals(t)) {
    if (c.prob_a <= 0.0) continue;
    s += c.prob_a * f(c.sum_b / c.prob_a);
  }
  return s;
}

inline Moments moments(const DensityMatrix& rho, const MeasurementSetup& s) {
  const OutcomeTable t1 = enumerate_table(rho, s.p1);
  const OutcomeTable t2 = enumerate_table(rho, s.p2);
  const OutcomeTable t3 = enumerate_table(rho, s.p3);
  const OutcomeTable t4 = enumerate_table(rho, s.p4);
  const OutcomeTable t0 = enumerate_table(rho, s.p0);
  auto identity = +[](double x) { return x; };
  auto absolute = +[](double x) { return std::abs(x); };
  auto square = +[](double x) { return x * x; };

  Moments m{};
  m.g1 = g_of(t1);
  m.g2 = g_of(t2);
  m.var_inf_b1 = var_linear(t1);
  m.var_inf_b2 = var_linear(t2);
  m.var_min_b1 = var_min(t1);
  m.var_min_b2 = var_min(t2);
  m.abs_mean_inf_commutator = sum_over_conditionals(t3, absolute);
  m.mean_inf_anticommutator = sum_over_conditionals(t4, identity);
  m.sq_mean_inf_b1 = sum_over_conditionals(t1, square);
  m.sq_mean_inf_b2 = sum_over_conditionals(t2, square);
  m.sq_mean_inf_b0 = sum_over_conditionals(t0, square);
  m.product_of_means_inf = 0.5 * (m.sq_mean_inf_b1 + m.sq_mean_inf_b2 - m.sq_mean_inf_b0);
  return m;
}

}  // namespace steer::oracle
