// threshold.hpp: sweeps and bisection for the critical mixing weight p*

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "steer/closed_forms.hpp"
#include "steer/criteria.hpp"
#include "steer/error.hpp"
#include "steer/observables.hpp"
#include "steer/states.hpp"

namespace steer {

// Criterion report as a function of the family parameter p. Must be safe to
// call concurrently.
using Evaluator = std::function<CriterionReport(double)>;

inline Evaluator make_isotropic_evaluator(std::size_t d, Criterion criterion, Mode mode) {
  const Family family = family_for_dimension(d);
  if (mode == Mode::ClosedForm) {
    return [family, criterion](double p) { return closed_form_report(family, p, criterion); };
  }
  const auto [b1, b2] = family_observables(family);
  MeasurementSetup setup = PairingRule::transpose_rule().resolve(b1, b2);
  return [d, criterion, mode, setup = std::move(setup)](double p) {
    return evaluate(criterion, isotropic({d, p}), setup, mode, isotropic_descriptor(d, p));
  };
}

struct SweepRow {
  double p;
  double lhs;
  double rhs;
  double margin;
  bool violated;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

inline std::vector<double> uniform_grid(double p_start, double p_end, std::size_t steps) {
  if (!(p_start >= 0.0 && p_end <= 1.0 && p_start < p_end)) {
    throw InvalidArgument("sweep: need 0 <= p_start < p_end <= 1");
  }
  if (steps < 2) throw InvalidArgument("sweep: steps must be at least 2");
  std::vector<double> ps(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    ps[i] = p_start + (p_end - p_start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  ps.back() = p_end;
  return ps;
}

// Rows are computed in `jobs` interleaved slices and always returned in p order.
inline SweepResult sweep(const Evaluator& eval, double p_start, double p_end, std::size_t steps,
                         std::size_t jobs = 1) {
  const std::vector<double> ps = uniform_grid(p_start, p_end, steps);
  SweepResult result;
  result.rows.resize(steps);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < steps; i += stride) {
      const CriterionReport r = eval(ps[i]);
      result.rows[i] = {ps[i], r.lhs, r.rhs, r.margin, r.violated};
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, steps);
  if (jobs == 1) {
    work(0, 1);
    return result;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&, j] {
      try {
        work(j, jobs);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return result;
}

inline std::string sweep_csv(const SweepResult& s) {
  std::string out = "p,lhs,rhs,margin,violated\n";
  for (const auto& r : s.rows) {
    out += format_number(r.p) + "," + format_number(r.lhs) + "," + format_number(r.rhs) + "," +
           format_number(r.margin) + "," + (r.violated ? "true" : "false") + "\n";
  }
  return out;
}

class NoSignChangeError : public Error {
 public:
  using Error::Error;
};

struct ThresholdResult {
  double p_star = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int evaluations = 0;
  double margin_at_p_star = 0.0;
  bool multi_crossing = false;
};

inline constexpr std::size_t kPreSweepPoints = 32;
inline constexpr int kMaxBisections = 200;

// Requires margin(0) > 0 > margin(1). A 32-point pre-sweep locates the first
// crossing; more than one crossing sets multi_crossing.
inline ThresholdResult find_threshold(const Evaluator& eval, double tol = 1e-9) {
  if (!(tol > 0.0)) throw InvalidArgument("find_threshold: tolerance must be positive");
  ThresholdResult res;
  auto margin = [&](double p) {
    ++res.evaluations;
    return eval(p).margin;
  };

  const std::vector<double> grid = uniform_grid(0.0, 1.0, kPreSweepPoints);
  std::vector<double> m(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) m[i] = margin(grid[i]);
  if (!(m.front() > 0.0)) throw NoSignChangeError("criterion is already violated at p = 0 (margin " + format_number(m.front()) + ")");
  if (!(m.back() < 0.0)) throw NoSignChangeError("criterion is never violated on [0, 1] (margin at p = 1 is " + format_number(m.back()) + ")");

  std::size_t crossings = 0, first = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if ((m[i] > 0.0) != (m[i + 1] > 0.0)) {
      if (crossings++ == 0) first = i;
    }
  }
  res.multi_crossing = crossings > 1;

  double lo = grid[first], hi = grid[first + 1];
  for (int it = 0; it < kMaxBisections && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (margin(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  res.lo = lo;
  res.hi = hi;
  res.p_star = 0.5 * (lo + hi);
  res.margin_at_p_star = margin(res.p_star);
  return res;
}

}  // namespace steer
