// observables.hpp: Hermitian observables, the fixed operator sets, and
// Alice/Bob pairings

#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "steer/error.hpp"
#include "steer/linalg.hpp"

namespace steer {

class Observable {
 public:
  Observable(std::string label, ComplexMatrix matrix, double merge_tol = kDefaultMergeTol)
      : label_(std::move(label)), matrix_(std::move(matrix)), cache_(std::make_shared<Cache>()) {
    cache_->merge_tol = merge_tol;
    if (matrix_.empty()) throw DimensionError("observable '" + label_ + "' has no matrix");
    if (!matrix_.all_finite()) throw InvalidArgument("observable '" + label_ + "' has non-finite entries");
    const double r = hermiticity_residual(matrix_);
    if (!(r < kHermitianTol)) {
      throw NotHermitianError("observable '" + label_ + "' is not Hermitian (residual " + std::to_string(r) + ")");
    }
  }

  const std::string& label() const noexcept { return label_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }

  // Computed once on first use; copies of an Observable share the result.
  const SpectralDecomposition& spectral() const {
    std::call_once(cache_->once, [this] { cache_->spectral = eig_hermitian(matrix_, cache_->merge_tol); });
    return cache_->spectral;
  }

  const std::vector<double>& outcomes() const { return spectral().eigenvalues; }

 private:
  struct Cache {
    std::once_flag once;
    double merge_tol = kDefaultMergeTol;
    SpectralDecomposition spectral;
  };

  std::string label_;
  ComplexMatrix matrix_;
  std::shared_ptr<Cache> cache_;
};

enum class Axis { X, Y, Z };

inline Observable spin_half(Axis axis) {
  const Complex i{0.0, 1.0};
  switch (axis) {
    case Axis::X: return {"Sx", {{0.0, 0.5}, {0.5, 0.0}}};
    case Axis::Y: return {"Sy", {{0.0, -0.5 * i}, {0.5 * i, 0.0}}};
    case Axis::Z: return {"Sz", {{0.5, 0.0}, {0.0, -0.5}}};
  }
  throw InvalidArgument("spin_half: unknown axis");
}

struct QutritSet {
  Observable b1, b2, b3;
};

// The three qutrit operators with [B1, B2] = i B3.
inline QutritSet qutrit_set() {
  const Complex i{0.0, 1.0};
  const double h = 1.0 / std::sqrt(2.0);
  const double r2 = std::sqrt(2.0);
  return {
      Observable{"B1", {{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 0.0}}},
      Observable{"B2", {{0.0, h, 0.0}, {h, 0.0, 0.0}, {0.0, 0.0, 0.0}}},
      Observable{"B3", {{0.0, -i * r2, 0.0}, {i * r2, 0.0, 0.0}, {0.0, 0.0, 0.0}}},
  };
}

namespace detail {
inline void require_same_dim(const Observable& a, const Observable& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(op) + ": observables '" + a.label() + "' and '" + b.label() +
                         "' differ in dimension");
  }
}
}  // namespace detail

// -i [b1, b2]
inline Observable commutator_observable(const Observable& b1, const Observable& b2) {
  detail::require_same_dim(b1, b2, "commutator_observable");
  const auto& x = b1.matrix();
  const auto& y = b2.matrix();
  return {"-i[" + b1.label() + "," + b2.label() + "]", Complex(0.0, -1.0) * (x * y - y * x)};
}

inline Observable anticommutator_observable(const Observable& b1, const Observable& b2) {
  detail::require_same_dim(b1, b2, "anticommutator_observable");
  const auto& x = b1.matrix();
  const auto& y = b2.matrix();
  return {"{" + b1.label() + "," + b2.label() + "}", x * y + y * x};
}

inline Observable difference_observable(const Observable& b1, const Observable& b2) {
  detail::require_same_dim(b1, b2, "difference_observable");
  return {b1.label() + "-" + b2.label(), b1.matrix() - b2.matrix()};
}

struct ObservablePairing {
  Observable bob;
  Observable alice;

  ObservablePairing(Observable bob_obs, Observable alice_obs)
      : bob(std::move(bob_obs)), alice(std::move(alice_obs)) {
    if (bob.dim() != alice.dim()) throw DimensionError("pairing: Alice and Bob observables differ in dimension");
  }
};

// Alice measures B^T. On |Psi+>, <B^T ⊗ B> = Tr[B^2]/d, the strongest
// correlation available.
inline ObservablePairing default_pairing(const Observable& bob) {
  return {bob, Observable{bob.label() + "^T", transpose(bob.matrix())}};
}

// Every Bob setting the inferred-SRUR criterion uses, together with Alice's
// partner for each. B0 = B1 - B2 is always paired with A0 = A1 - A2.
struct MeasurementSetup {
  ObservablePairing p1, p2;  // B1, B2
  ObservablePairing p3;      // B3 = -i[B1, B2]
  ObservablePairing p4;      // B4 = {B1, B2}
  ObservablePairing p0;      // B0 = B1 - B2
};

// How Alice's settings are chosen for a pair of Bob observables.
class PairingRule {
 public:
  static PairingRule transpose_rule() { return PairingRule{}; }

  // Explicit Alice observables for B1 and B2; A3/A4 fall back to transposes
  // when not given.
  static PairingRule explicit_rule(Observable a1, Observable a2, std::optional<Observable> a3 = std::nullopt,
                                   std::optional<Observable> a4 = std::nullopt) {
    PairingRule r;
    r.a1_ = std::move(a1);
    r.a2_ = std::move(a2);
    r.a3_ = std::move(a3);
    r.a4_ = std::move(a4);
    return r;
  }

  bool is_transpose() const noexcept { return !a1_.has_value(); }

  MeasurementSetup resolve(const Observable& b1, const Observable& b2) const {
    detail::require_same_dim(b1, b2, "measurement setup");
    Observable b3 = commutator_observable(b1, b2);
    Observable b4 = anticommutator_observable(b1, b2);
    Observable b0 = difference_observable(b1, b2);

    auto alice_for = [](const std::optional<Observable>& given, const Observable& bob) {
      return given ? ObservablePairing{bob, *given} : default_pairing(bob);
    };
    ObservablePairing p1 = alice_for(a1_, b1);
    ObservablePairing p2 = alice_for(a2_, b2);
    ObservablePairing p3 = alice_for(a3_, b3);
    ObservablePairing p4 = alice_for(a4_, b4);
    Observable a0{p1.alice.label() + "-" + p2.alice.label(), p1.alice.matrix() - p2.alice.matrix()};
    ObservablePairing p0{b0, a0};
    return {std::move(p1), std::move(p2), std::move(p3), std::move(p4), std::move(p0)};
  }

 private:
  std::optional<Observable> a1_, a2_, a3_, a4_;
};

}  // namespace steer
