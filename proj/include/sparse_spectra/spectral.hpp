#pragma once

// Deterministic dense spectral primitives: largest eigenpair via shifted power
// iteration, a full reference spectrum via cyclic Jacobi sweeps (test oracle),
// rank-revealing pivoted Cholesky, and the largest singular triplet through
// the augmented symmetric matrix.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>

#include "sparse_spectra/core.hpp"

namespace sparse_spectra {

inline constexpr double kDefaultEigTol = 1e-10;
inline constexpr std::size_t kPowerIterationCap = 10000;
inline constexpr std::size_t kReferenceSpectrumMaxN = 512;
inline constexpr double kDefaultRankTol = 1e-9;

namespace detail {

// Index-seeded perturbation in (-5e-4, 5e-4), distinct per index, so the fixed
// all-ones start never sits exactly orthogonal to a structured top eigenvector.
inline double index_perturbation(std::size_t i) {
  std::uint64_t x = static_cast<std::uint64_t>(i) + 0x9e3779b97f4a7c15ULL;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return (static_cast<double>(x % 100000) / 100000.0 - 0.5) * 1e-3;
}

inline Vector deterministic_start(std::size_t n) {
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + index_perturbation(i);
  normalize(v);
  return v;
}

// Gershgorin-based nonnegative shift s with M + sI positive semidefinite, so
// the algebraically largest eigenvalue is also the largest in magnitude.
inline double psd_shift(const Matrix& m) {
  double lo = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (j != i) radius += std::abs(m(i, j));
    lo = std::min(lo, m(i, i) - radius);
  }
  return -lo;  // lo <= 0 here, so the shift is >= 0
}

// Cyclic Jacobi sweeps in place: a is reduced to (near-)diagonal form and v
// accumulates the rotations columnwise, so a_in = v * diag(a_out) * v^T.
inline void jacobi_sweeps(Matrix& a, Matrix& v) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);
  const double stop = 1e-14 * (1.0 + frob);

  for (std::size_t sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= stop) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const double aip = a(i, p), aiq = a(i, q);
            a(i, p) = aip - s * (aiq + tau * aip);
            a(p, i) = a(i, p);
            a(i, q) = aiq + s * (aip - tau * aiq);
            a(q, i) = a(i, q);
          }
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }
}

// Dense finish for gap-limited power iterations: the full Jacobi
// decomposition converges regardless of the eigenvalue gaps.
inline EigenPair jacobi_top_pair(const Matrix& m) {
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix rot(n, n);
  jacobi_sweeps(a, rot);
  std::size_t top = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (a(j, j) > a(top, top)) top = j;
  EigenPair out;
  out.value = a(top, top);
  out.vector.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.vector[i] = rot(i, top);
  normalize(out.vector);
  canonicalize_sign(out.vector);
  return out;
}

// Power iteration on a dense matrix assumed symmetric (callers validate).
// Stops when ||Mv - lambda v|| <= tol * max(1, |lambda|). Two safety nets
// keep it total: warm starts are blended with the fixed perturbed start (a
// warm vector exactly orthogonal to the new top eigenspace — routine after a
// support swap replaces the dominant direction — would otherwise converge
// cleanly inside a lower invariant subspace), and a stalled residual (tiny
// eigenvalue gap) hands off to the dense Jacobi decomposition.
inline EigenPair power_iteration(const Matrix& m, const Vector* warm_start,
                                 double tol) {
  const std::size_t n = m.rows();
  const double shift = psd_shift(m);
  Vector v;
  if (warm_start && warm_start->size() == n && norm2(*warm_start) > 0.0) {
    v = *warm_start;
    normalize(v);
    const Vector p = deterministic_start(n);
    for (std::size_t i = 0; i < n; ++i) v[i] += 1e-2 * p[i];
    normalize(v);
  } else {
    v = deterministic_start(n);
  }
  double best_lambda = 0.0, best_residual = std::numeric_limits<double>::infinity();
  double window_best = std::numeric_limits<double>::infinity();
  Vector best_v = v;
  for (std::size_t iter = 0; iter <= kPowerIterationCap; ++iter) {
    Vector w = m.multiply(v);
    axpy(w, shift, v);                       // w = (M + shift I) v
    const double rq_shifted = dot(v, w);     // Rayleigh quotient of shifted M
    const double lambda = rq_shifted - shift;
    double resid_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = w[i] - rq_shifted * v[i];
      resid_sq += r * r;
    }
    const double resid = std::sqrt(resid_sq);
    if (resid < best_residual) {
      best_residual = resid;
      best_lambda = lambda;
      best_v = v;
    }
    if (resid <= tol * std::max(1.0, std::abs(lambda))) return {lambda, v};
    if ((iter & 255u) == 255u) {
      // Less than 1% residual progress over a 256-iteration window means the
      // convergence rate is gap-limited and no iteration budget will help.
      if (best_residual > 0.99 * window_best && n <= kReferenceSpectrumMaxN)
        return jacobi_top_pair(m);
      window_best = best_residual;
    }
    const double wn = norm2(w);
    if (wn == 0.0) return {-shift, v};       // exact null vector of M + shift I
    scale(w, 1.0 / wn);
    v = std::move(w);
  }
  if (n <= kReferenceSpectrumMaxN) return jacobi_top_pair(m);
  throw ConvergenceError("power iteration did not converge within cap",
                         best_lambda, best_residual, best_v);
}

}  // namespace detail

// Largest (algebraically) eigenvalue and an achieving unit eigenvector.
inline EigenPair largest_eigenpair(const SymMatrix& m,
                                   const std::optional<Vector>& warm_start = std::nullopt,
                                   double tol = kDefaultEigTol) {
  if (tol <= 0.0) throw ValidationError("eigen tolerance must be positive");
  return detail::power_iteration(m.dense(), warm_start ? &*warm_start : nullptr, tol);
}

// Full spectrum by cyclic Jacobi sweeps; eigenvalues sorted descending with
// mutually orthogonal eigenvectors. Intended as the independent test oracle.
inline std::vector<EigenPair> reference_spectrum(const SymMatrix& m) {
  const std::size_t n = m.n();
  if (n > kReferenceSpectrumMaxN)
    throw GuardError("reference_spectrum supports n <= " +
                     std::to_string(kReferenceSpectrumMaxN));
  Matrix a = m.dense();
  Matrix v(n, n);
  detail::jacobi_sweeps(a, v);

  std::vector<EigenPair> pairs(n);
  for (std::size_t j = 0; j < n; ++j) {
    pairs[j].value = a(j, j);
    pairs[j].vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) pairs[j].vector[i] = v(i, j);
    canonicalize_sign(pairs[j].vector);
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& x, const EigenPair& y) { return x.value > y.value; });
  return pairs;
}

// Diagonally pivoted outer-product Cholesky: A = C^T C with C (d x n) where d
// is the number of pivots exceeding rank_tol relative to the largest initial
// diagonal. Column i of C corresponds to feature i of A by construction.
inline GramFactor pivoted_cholesky(const SymMatrix& a, double rank_tol = kDefaultRankTol) {
  const std::size_t n = a.n();
  Vector diag(n);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = a(i, i);
    max_diag = std::max(max_diag, std::abs(diag[i]));
  }
  const double scale_ref = max_diag > 0.0 ? max_diag : 1.0;
  const double cutoff = rank_tol * scale_ref;

  std::vector<Vector> rows;  // rows of L in pivot order, each length n
  std::vector<bool> chosen(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t p = n;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (!chosen[i] && diag[i] > best) {
        best = diag[i];
        p = i;
      }
    if (best < -cutoff) throw NotPsdError(p, best);
    if (best <= cutoff) {
      // Every remaining residual diagonal is (near-)zero. For a PSD residual
      // |r_ij| <= sqrt(r_ii r_jj), so surviving off-diagonal mass certifies
      // indefiniteness (e.g. a zero-diagonal matrix with nonzero couplings),
      // which the pivot scan alone cannot see.
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
          if (chosen[j]) continue;
          double rij = a(i, j);
          for (const auto& prev : rows) rij -= prev[i] * prev[j];
          if (std::abs(rij) > 10.0 * cutoff) {
            const double rii = diag[i], rjj = diag[j];
            const double min_eig =
                0.5 * (rii + rjj) -
                std::sqrt(0.25 * (rii - rjj) * (rii - rjj) + rij * rij);
            throw NotPsdError(i, min_eig);
          }
        }
      }
      break;
    }
    const double s = std::sqrt(best);
    Vector row(n, 0.0);
    row[p] = s;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i] || i == p) continue;
      double val = a(p, i);
      for (const auto& prev : rows) val -= prev[p] * prev[i];
      row[i] = val / s;
      diag[i] -= row[i] * row[i];
    }
    diag[p] = 0.0;
    chosen[p] = true;
    rows.push_back(std::move(row));
  }

  const std::size_t d = rows.size();
  std::vector<Vector> columns(n, Vector(d, 0.0));
  for (std::size_t t = 0; t < d; ++t)
    for (std::size_t i = 0; i < n; ++i) columns[i][t] = rows[t][i];
  return GramFactor::from_columns(std::move(columns));
}

struct SingularTriplet {
  double sigma = 0.0;
  Vector u;  // unit, length m
  Vector v;  // unit, length n
};

// Largest singular value/vectors through the (m+n)-dimensional augmented
// symmetric matrix [[0, B], [B^T, 0]], whose top eigenvalue equals sigma_max.
inline SingularTriplet largest_singular_triplet(const Matrix& b, double tol = kDefaultEigTol) {
  const std::size_t m = b.rows(), n = b.cols();
  if (m == 0 || n == 0) throw ValidationError("singular triplet needs a non-empty matrix");
  Matrix aug(m + n, m + n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      aug(i, m + j) = b(i, j);
      aug(m + j, i) = b(i, j);
    }
  const EigenPair top = detail::power_iteration(aug, nullptr, tol);

  SingularTriplet out;
  out.sigma = std::max(0.0, top.value);  // spectrum is sign-symmetric; top >= 0
  out.u.assign(top.vector.begin(), top.vector.begin() + m);
  out.v.assign(top.vector.begin() + m, top.vector.end());
  if (normalize(out.u) == 0.0) {
    out.u.assign(m, 0.0);
    out.u[0] = 1.0;
  }
  if (normalize(out.v) == 0.0) {
    out.v.assign(n, 0.0);
    out.v[0] = 1.0;
  }
  // Deterministic sign: first significant entry of u positive, v flipped in
  // tandem so u^T B v = sigma is preserved.
  if (dot(out.u, b.multiply(out.v)) < 0.0) scale(out.v, -1.0);
  Vector u_before = out.u;
  canonicalize_sign(out.u);
  if (!out.u.empty() && !u_before.empty()) {
    // if canonicalize flipped u, flip v too
    for (std::size_t i = 0; i < out.u.size(); ++i) {
      if (std::abs(u_before[i]) > 1e-12) {
        if (u_before[i] * out.u[i] < 0.0) scale(out.v, -1.0);
        break;
      }
    }
  }
  return out;
}

}  // namespace sparse_spectra
