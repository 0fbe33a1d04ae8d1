// linalg.hpp: dense complex matrices and Hermitian spectral decomposition
//
// Sized for the small operators that show up in two-party qudit problems
// (dimension up to ~16). Storage is row-major; every operation returns a new
// value, nothing is mutated in place through the public API.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "steer/error.hpp"

namespace steer {

using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kDefaultMergeTol = 1e-8;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0) throw DimensionError("matrix dimension must be at least 1");
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
      : ComplexMatrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != dim_) throw DimensionError("matrix rows must form a square array");
      std::size_t j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<double>& values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  // Rank-one |v><v|.
  static ComplexMatrix outer(const std::vector<Complex>& v) {
    ComplexMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  const std::vector<Complex>& data() const noexcept { return data_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

namespace detail {

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace detail

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_dim(a, b, "add");
  ComplexMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_dim(a, b, "sub");
  ComplexMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_dim(a, b, "mul");
  const std::size_t n = a.dim();
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

inline ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = s * a(i, j);
  return r;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, Complex s) { return s * a; }

inline ComplexMatrix dagger(const ComplexMatrix& a) {
  ComplexMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(j, i) = std::conj(a(i, j));
  return r;
}

// Plain transpose, no conjugation.
inline ComplexMatrix transpose(const ComplexMatrix& a) {
  ComplexMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(j, i) = a(i, j);
  return r;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t m = a.dim(), n = b.dim();
  ComplexMatrix r(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) r(i * n + k, j * n + l) = aij * b(k, l);
    }
  return r;
}

inline Complex trace(const ComplexMatrix& a) {
  Complex t{};
  for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

// Max absolute entry; the norm every validation threshold in this library refers to.
inline double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_dim(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

inline double hermiticity_residual(const ComplexMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = i; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol) {
  return hermiticity_residual(a) < tol;
}

enum class Subsystem { A, B };

inline ComplexMatrix partial_trace(const ComplexMatrix& a, std::size_t dim_a, std::size_t dim_b,
                                   Subsystem keep) {
  if (dim_a == 0 || dim_b == 0 || dim_a * dim_b != a.dim()) {
    throw DimensionError("partial_trace: " + std::to_string(a.dim()) + " does not factor as " +
                         std::to_string(dim_a) + "x" + std::to_string(dim_b));
  }
  if (keep == Subsystem::A) {
    ComplexMatrix r(dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t j = 0; j < dim_a; ++j)
        for (std::size_t k = 0; k < dim_b; ++k) r(i, j) += a(i * dim_b + k, j * dim_b + k);
    return r;
  }
  ComplexMatrix r(dim_b);
  for (std::size_t k = 0; k < dim_b; ++k)
    for (std::size_t l = 0; l < dim_b; ++l)
      for (std::size_t i = 0; i < dim_a; ++i) r(k, l) += a(i * dim_b + k, i * dim_b + l);
  return r;
}

// Tr[rho (x ⊗ y)] without forming the tensor product.
inline Complex expect_local(const ComplexMatrix& rho, const ComplexMatrix& x, const ComplexMatrix& y) {
  const std::size_t m = x.dim(), n = y.dim();
  if (rho.dim() != m * n) throw DimensionError("expect_local: state does not match operator dimensions");
  Complex s{};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const Complex xji = x(j, i);
      if (xji == Complex{}) continue;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) s += rho(i * n + k, j * n + l) * xji * y(l, k);
    }
  return s;
}

// Tr[rho x] for an operator on the full space.
inline Complex expect(const ComplexMatrix& rho, const ComplexMatrix& x) {
  detail::require_same_dim(rho, x, "expect");
  Complex s{};
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j) s += rho(i, j) * x(j, i);
  return s;
}

struct SpectralDecomposition {
  std::vector<double> eigenvalues;          // strictly descending
  std::vector<ComplexMatrix> projectors;    // one per eigenvalue

  std::size_t size() const noexcept { return eigenvalues.size(); }

  ComplexMatrix reconstruct() const {
    ComplexMatrix r(projectors.front().dim());
    for (std::size_t k = 0; k < size(); ++k) r = r + Complex(eigenvalues[k]) * projectors[k];
    return r;
  }
};

struct EigenSystem {
  std::vector<double> values;                 // descending
  std::vector<std::vector<Complex>> vectors;  // vectors[k] pairs with values[k]
};

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiOffTol = 1e-14;

// Cyclic complex Jacobi. Each rotation first phases the (p,q) entry real, then
// applies the classic real rotation that annihilates it.
inline EigenSystem eigensystem_hermitian(const ComplexMatrix& input) {
  const double herm = hermiticity_residual(input);
  if (!(herm < kHermitianTol)) {
    throw NotHermitianError("eig_hermitian: matrix is not Hermitian (residual " + std::to_string(herm) + ")");
  }
  if (!input.all_finite()) throw NotHermitianError("eig_hermitian: non-finite matrix entry");

  const std::size_t n = input.dim();
  ComplexMatrix a = Complex(0.5) * (input + dagger(input));
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);

  double frob = 0.0;
  for (const auto& z : a.data()) frob += std::norm(z);
  const double threshold = kJacobiOffTol * std::max(1.0, std::sqrt(frob));

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > threshold) {
    if (++sweep > kJacobiMaxSweeps) {
      throw ConvergenceError("eig_hermitian: no convergence after " + std::to_string(kJacobiMaxSweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        const Complex phase = std::conj(a(p, q)) / r;  // e^{-i phi}
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex gpp = c, gpq = s, gqp = -s * phase, gqq = c * phase;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

  EigenSystem es;
  for (std::size_t idx : order) {
    es.values.push_back(a(idx, idx).real());
    std::vector<Complex> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v(k, idx);
    es.vectors.push_back(std::move(col));
  }
  return es;
}

inline std::vector<double> eigenvalues_hermitian(const ComplexMatrix& a) {
  return eigensystem_hermitian(a).values;
}

// Eigenvalues closer than merge_tol to their neighbour collapse into one
// outcome; the merged label is the mean of the cluster.
inline SpectralDecomposition eig_hermitian(const ComplexMatrix& a, double merge_tol = kDefaultMergeTol) {
  const EigenSystem es = eigensystem_hermitian(a);
  const std::size_t n = a.dim();
  SpectralDecomposition sd;
  std::size_t k = 0;
  while (k < n) {
    std::size_t end = k + 1;
    while (end < n && es.values[end - 1] - es.values[end] <= merge_tol) ++end;
    double sum = 0.0;
    ComplexMatrix proj(n);
    for (std::size_t m = k; m < end; ++m) {
      sum += es.values[m];
      const auto& vec = es.vectors[m];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) proj(i, j) += vec[i] * std::conj(vec[j]);
    }
    sd.eigenvalues.push_back(sum / static_cast<double>(end - k));
    sd.projectors.push_back(std::move(proj));
    k = end;
  }
  return sd;
}

}  // namespace steer
