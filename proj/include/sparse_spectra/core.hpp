#pragma once

// Basic dense linear-algebra value types and error taxonomy shared by every
// module: row-major Matrix, validated SymMatrix, Gram factors, eigen pairs,
// and small free-function vector helpers. All floating point is 64-bit.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sparse_spectra {

using Vector = std::vector<double>;

// Invalid inputs: asymmetry, bad indices, malformed files, infeasible fixings.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Size / combinatorial guards (enumeration too large, dimension cap exceeded).
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pivot fell below the negative tolerance during factorization.
class NotPsdError : public ValidationError {
 public:
  NotPsdError(std::size_t pivot_index, double pivot_value)
      : ValidationError("matrix is not positive semidefinite: pivot " +
                        std::to_string(pivot_index + 1) + " = " +
                        std::to_string(pivot_value)),
        pivot_index(pivot_index),
        pivot_value(pivot_value) {}
  std::size_t pivot_index;
  double pivot_value;
};

// Iteration cap reached; carries the best iterate seen and its residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_value, double residual,
                   Vector best_iterate)
      : std::runtime_error(what + " (best value " + std::to_string(best_value) +
                           ", residual " + std::to_string(residual) + ")"),
        best_value(best_value),
        residual(residual),
        best_iterate(std::move(best_iterate)) {}
  double best_value;
  double residual;
  Vector best_iterate;
};

// ---------------------------------------------------------------------------
// Dense row-major matrix.
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
      if (r.size() != m.cols_) throw ValidationError("ragged initializer rows");
      std::size_t j = 0;
      for (double v : r) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  // y = M x
  Vector multiply(const Vector& x) const {
    Vector y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double acc = 0.0;
      const double* row = data_.data() + i * cols_;
      for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
    return y;
  }

  // y = M^T x
  Vector multiply_transposed(const Vector& x) const {
    Vector y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = data_.data() + i * cols_;
      const double xi = x[i];
      for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * xi;
    }
    return y;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Symmetric matrix with validated symmetry (relative tolerance 1e-10).
// ---------------------------------------------------------------------------

class SymMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-10;

  explicit SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw ValidationError("symmetric matrix must be square and non-empty");
    for (std::size_t i = 0; i < m_.rows(); ++i)
      for (std::size_t j = i + 1; j < m_.cols(); ++j) {
        const double a = m_(i, j), b = m_(j, i);
        if (std::abs(a - b) > kSymmetryTol * (1.0 + std::abs(a)))
          throw ValidationError("matrix not symmetric: entry (" + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + ") = " + std::to_string(a) +
                                " but entry (" + std::to_string(j + 1) + "," +
                                std::to_string(i + 1) + ") = " + std::to_string(b));
      }
  }

  static SymMatrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return SymMatrix(std::move(m));
  }

  static SymMatrix diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return SymMatrix(std::move(m));
  }

  std::size_t n() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& dense() const { return m_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n(); ++i) t += m_(i, i);
    return t;
  }

  SymMatrix principal_submatrix(const std::vector<std::size_t>& idx) const {
    Matrix s(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) s(a, b) = m_(idx[a], idx[b]);
    return SymMatrix(std::move(s));
  }

 private:
  Matrix m_;
};

// Rank-revealing Gram factor: C is d x n with C^T C = A; column i of C always
// corresponds to feature i of A regardless of the pivot order used internally.
struct GramFactor {
  std::size_t d = 0;
  std::size_t n = 0;
  std::vector<Vector> columns;  // n columns, each of dimension d
  Vector col_norms_sq;          // ||c_i||^2 for each column

  static GramFactor from_columns(std::vector<Vector> cols) {
    GramFactor f;
    f.n = cols.size();
    f.d = f.n ? cols.front().size() : 0;
    for (const auto& c : cols)
      if (c.size() != f.d) throw ValidationError("gram factor columns have mixed dimensions");
    f.columns = std::move(cols);
    f.col_norms_sq.resize(f.n);
    for (std::size_t i = 0; i < f.n; ++i) {
      double s = 0.0;
      for (double v : f.columns[i]) s += v * v;
      f.col_norms_sq[i] = s;
    }
    return f;
  }

  // A = C^T C, reconstructed densely.
  SymMatrix reconstruct() const {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < d; ++t) s += columns[i][t] * columns[j][t];
        a(i, j) = s;
        a(j, i) = s;
      }
    return SymMatrix(std::move(a));
  }
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
};

// ---------------------------------------------------------------------------
// Small vector helpers.
// ---------------------------------------------------------------------------

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline void scale(Vector& a, double s) {
  for (double& v : a) v *= s;
}

// Normalizes in place; returns the original norm (0 if the vector was zero).
inline double normalize(Vector& a) {
  const double n = norm2(a);
  if (n > 0.0) scale(a, 1.0 / n);
  return n;
}

// a += s * b
inline void axpy(Vector& a, double s, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

// Flips sign so the first entry with |x_i| > tol is positive (deterministic
// output convention for reported eigen/singular vectors).
inline void canonicalize_sign(Vector& x, double tol = 1e-12) {
  for (double v : x) {
    if (std::abs(v) > tol) {
      if (v < 0.0) scale(x, -1.0);
      return;
    }
  }
}

// Binomial coefficient with saturation at 2^63-1 (guards compare against it).
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // r * num / i is always integral at this point; guard overflow first.
    if (r > UINT64_MAX / num / 2) return UINT64_MAX / 2;
    r = r * num / i;
  }
  return r;
}

}  // namespace sparse_spectra
