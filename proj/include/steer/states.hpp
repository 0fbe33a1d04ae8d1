// states.hpp: validated density matrices and the isotropic family

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "steer/error.hpp"
#include "steer/linalg.hpp"

namespace steer {

inline constexpr double kTraceTol = 1e-10;
inline constexpr double kNegativeEigenTol = 1e-10;

// Local dimensions of a two-party state; single-system states have none.
struct Dims {
  std::size_t a = 0;
  std::size_t b = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

enum class StateDefect { NotSquare, NonFinite, NotHermitian, TraceNotOne, NegativeEigenvalue };

inline const char* to_string(StateDefect d) {
  switch (d) {
    case StateDefect::NotSquare: return "dims do not factor matrix";
    case StateDefect::NonFinite: return "non-finite entry";
    case StateDefect::NotHermitian: return "not Hermitian";
    case StateDefect::TraceNotOne: return "trace differs from 1";
    case StateDefect::NegativeEigenvalue: return "negative eigenvalue";
  }
  return "unknown";
}

struct StateDiagnostic {
  StateDefect defect;
  double residual;  // the measured quantity that failed its tolerance

  std::string message() const {
    std::ostringstream os;
    os.precision(12);
    os << to_string(defect) << " (residual " << residual << ")";
    return os.str();
  }
};

class InvalidStateError : public InvalidArgument {
 public:
  explicit InvalidStateError(StateDiagnostic d)
      : InvalidArgument("invalid density matrix: " + d.message()), diagnostic_(d) {}
  const StateDiagnostic& diagnostic() const noexcept { return diagnostic_; }

 private:
  StateDiagnostic diagnostic_;
};

inline std::optional<StateDiagnostic> diagnose_state(const ComplexMatrix& m,
                                                     std::optional<Dims> dims = std::nullopt) {
  if (dims && dims->a * dims->b != m.dim()) {
    return StateDiagnostic{StateDefect::NotSquare, static_cast<double>(m.dim())};
  }
  if (!m.all_finite()) return StateDiagnostic{StateDefect::NonFinite, 0.0};
  const double herm = hermiticity_residual(m);
  if (!(herm < kHermitianTol)) return StateDiagnostic{StateDefect::NotHermitian, herm};
  const double tr_err = std::abs(trace(m) - Complex(1.0));
  if (!(tr_err <= kTraceTol)) return StateDiagnostic{StateDefect::TraceNotOne, tr_err};
  const double lowest = eigenvalues_hermitian(m).back();
  if (lowest < -kNegativeEigenTol) return StateDiagnostic{StateDefect::NegativeEigenvalue, lowest};
  return std::nullopt;
}

class DensityMatrix {
 public:
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }
  const std::optional<Dims>& dims() const noexcept { return dims_; }
  bool bipartite() const noexcept { return dims_.has_value(); }

  ComplexMatrix marginal(Subsystem keep) const {
    if (!dims_) throw DimensionError("marginal of a single-system state");
    return partial_trace(matrix_, dims_->a, dims_->b, keep);
  }

  friend DensityMatrix validate(ComplexMatrix m, std::optional<Dims> dims);

 private:
  DensityMatrix(ComplexMatrix m, std::optional<Dims> dims) : matrix_(std::move(m)), dims_(dims) {}

  ComplexMatrix matrix_;
  std::optional<Dims> dims_;
};

// Throws InvalidStateError naming the first invariant that fails.
inline DensityMatrix validate(ComplexMatrix m, std::optional<Dims> dims = std::nullopt) {
  if (auto diag = diagnose_state(m, dims)) throw InvalidStateError(*diag);
  return DensityMatrix(std::move(m), dims);
}

inline ComplexMatrix max_entangled_projector(std::size_t d) {
  if (d < 2) throw InvalidArgument("max_entangled: d must be at least 2");
  std::vector<Complex> psi(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) psi[i * d + i] = amp;
  return ComplexMatrix::outer(psi);
}

inline DensityMatrix max_entangled(std::size_t d) {
  return validate(max_entangled_projector(d), Dims{d, d});
}

struct IsotropicParams {
  std::size_t d = 2;
  double p = 0.0;
};

// (1 - p) I / d^2 + p |Psi+><Psi+|
inline ComplexMatrix isotropic_matrix(const IsotropicParams& params) {
  const auto [d, p] = params;
  if (d < 2) throw InvalidArgument("isotropic: d must be at least 2");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("isotropic: p must lie in [0, 1]");
  const double noise = (1.0 - p) / static_cast<double>(d * d);
  return Complex(noise) * ComplexMatrix::identity(d * d) + Complex(p) * max_entangled_projector(d);
}

inline DensityMatrix isotropic(const IsotropicParams& params) {
  return validate(isotropic_matrix(params), Dims{params.d, params.d});
}

}  // namespace steer
