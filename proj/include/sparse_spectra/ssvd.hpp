#pragma once

// Rank-one sparse SVD: pick row support S1 (|S1| = k1) and column support S2
// (|S2| = k2) maximizing sigma_max(A_{S1,S2}). Everything reduces to the
// augmented symmetric matrix Abar = [[0, A], [A^T, 0]] whose top eigenvalue
// equals sigma_max, and to its PSD shift Abar + sigma_max * I for bound
// transfer through the sparse PCA saddle machinery (with one cardinality
// block for rows and one for columns).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "sparse_spectra/bounds.hpp"
#include "sparse_spectra/heuristics.hpp"
#include "sparse_spectra/parallel.hpp"
#include "sparse_spectra/problem.hpp"
#include "sparse_spectra/spectral.hpp"

namespace sparse_spectra {

struct SsvdInstance {
  Matrix a;
  std::size_t k1 = 1;
  std::size_t k2 = 1;

  SsvdInstance(Matrix matrix, std::size_t rows_k, std::size_t cols_k)
      : a(std::move(matrix)), k1(rows_k), k2(cols_k) {
    if (a.rows() == 0 || a.cols() == 0)
      throw ValidationError("ssvd instance requires a nonempty matrix");
    if (k1 < 1 || k1 > a.rows()) throw ValidationError("k1 must lie in [1, m]");
    if (k2 < 1 || k2 > a.cols()) throw ValidationError("k2 must lie in [1, n]");
  }

  std::size_t m() const { return a.rows(); }
  std::size_t n() const { return a.cols(); }
};

struct SsvdReport {
  double value = 0.0;
  Selection rows{std::vector<std::size_t>{}};
  Selection cols{std::vector<std::size_t>{}};
  Vector u;  // unit, supported on rows
  Vector v;  // unit, supported on cols
  Method method = Method::greedy;
  std::uint64_t iterations = 0;
  double wall_time_sec = 0.0;
};

// [[0, A], [A^T, 0]] of order m + n.
inline SymMatrix augment(const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  Matrix full(m + n, m + n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      full(i, m + j) = a(i, j);
      full(m + j, i) = a(i, j);
    }
  return SymMatrix(std::move(full));
}

// Abar + sigma_max * I; PSD whenever sigma_max >= sigma_max(A).
inline SymMatrix shift_psd(const SymMatrix& abar, double sigma_max) {
  Matrix shifted = abar.dense();
  for (std::size_t i = 0; i < abar.n(); ++i) shifted(i, i) += sigma_max;
  return SymMatrix(std::move(shifted));
}

namespace detail {

// sigma_max of A_{S1,S2} together with embedded unit vectors.
inline std::tuple<double, Vector, Vector> ssvd_triplet(const Matrix& a,
                                                       const Selection& rows,
                                                       const Selection& cols,
                                                       double tol = kDefaultEigTol) {
  if (rows.k() == 0 || cols.k() == 0)
    throw ValidationError("ssvd objective requires nonempty supports");
  for (std::size_t i : rows.support)
    if (i >= a.rows()) throw ValidationError("row index out of range");
  for (std::size_t j : cols.support)
    if (j >= a.cols()) throw ValidationError("column index out of range");
  Matrix sub(rows.k(), cols.k());
  for (std::size_t p = 0; p < rows.k(); ++p)
    for (std::size_t q = 0; q < cols.k(); ++q)
      sub(p, q) = a(rows.support[p], cols.support[q]);
  const SingularTriplet t = largest_singular_triplet(sub, tol);
  Vector u(a.rows(), 0.0), v(a.cols(), 0.0);
  for (std::size_t p = 0; p < rows.k(); ++p) u[rows.support[p]] = t.u[p];
  for (std::size_t q = 0; q < cols.k(); ++q) v[cols.support[q]] = t.v[q];
  return {t.sigma, std::move(u), std::move(v)};
}

inline SsvdReport make_ssvd_report(const SsvdInstance& inst, Selection rows,
                                   Selection cols, Method method,
                                   std::uint64_t iterations, double wall_time,
                                   double tol = kDefaultEigTol) {
  auto [sigma, u, v] = ssvd_triplet(inst.a, rows, cols, tol);
  SsvdReport r;
  r.value = sigma;
  r.rows = std::move(rows);
  r.cols = std::move(cols);
  r.u = std::move(u);
  r.v = std::move(v);
  r.method = method;
  r.iterations = iterations;
  r.wall_time_sec = wall_time;
  return r;
}

}  // namespace detail

// sigma_max(A_{S1,S2}).
inline double ssvd_objective(const Matrix& a, const Selection& rows,
                             const Selection& cols, double tol = kDefaultEigTol) {
  return std::get<0>(detail::ssvd_triplet(a, rows, cols, tol));
}

// Greedy augmentation: seed at the largest |A_ij| (lexicographic tie-break),
// grow both supports simultaneously while both are below capacity, then
// finish the longer side one index at a time; ties go to the smallest index
// (pairs: lexicographic).
inline SsvdReport greedy_ssvd(const SsvdInstance& inst, const HeuristicOpts& opts = {}) {
  Stopwatch sw;
  const Matrix& a = inst.a;
  const std::size_t m = inst.m(), n = inst.n();
  const unsigned threads = resolve_threads(opts.threads);

  std::size_t si = 0, sj = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(a(i, j)) > best + opts.tie_tol) {
        best = std::abs(a(i, j));
        si = i;
        sj = j;
      }
  std::vector<std::size_t> rows{si}, cols{sj};
  std::vector<char> in_rows(m, 0), in_cols(n, 0);
  in_rows[si] = 1;
  in_cols[sj] = 1;

  std::uint64_t evals = 0;
  auto value_of = [&](const std::vector<std::size_t>& r,
                      const std::vector<std::size_t>& c) {
    return ssvd_objective(a, Selection(r), Selection(c), opts.eig_tol);
  };

  while (rows.size() < inst.k1 || cols.size() < inst.k2) {
    const bool grow_rows = rows.size() < inst.k1;
    const bool grow_cols = cols.size() < inst.k2;
    if (grow_rows && grow_cols) {
      std::vector<std::pair<std::size_t, std::size_t>> cand;
      for (std::size_t i = 0; i < m; ++i) {
        if (in_rows[i]) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!in_cols[j]) cand.emplace_back(i, j);
      }
      Vector values(cand.size());
      parallel_for(cand.size(), threads, [&](std::size_t t) {
        auto r = rows;
        auto c = cols;
        r.push_back(cand[t].first);
        c.push_back(cand[t].second);
        values[t] = value_of(r, c);
      });
      evals += cand.size();
      std::size_t pick = 0;
      for (std::size_t t = 1; t < cand.size(); ++t)
        if (values[t] > values[pick] + opts.tie_tol) pick = t;
      rows.push_back(cand[pick].first);
      cols.push_back(cand[pick].second);
      in_rows[cand[pick].first] = 1;
      in_cols[cand[pick].second] = 1;
    } else {
      const bool row_side = grow_rows;
      const std::size_t limit = row_side ? m : n;
      const std::vector<char>& used = row_side ? in_rows : in_cols;
      std::vector<std::size_t> cand;
      for (std::size_t i = 0; i < limit; ++i)
        if (!used[i]) cand.push_back(i);
      Vector values(cand.size());
      parallel_for(cand.size(), threads, [&](std::size_t t) {
        auto r = rows;
        auto c = cols;
        (row_side ? r : c).push_back(cand[t]);
        values[t] = value_of(r, c);
      });
      evals += cand.size();
      std::size_t pick = 0;
      for (std::size_t t = 1; t < cand.size(); ++t)
        if (values[t] > values[pick] + opts.tie_tol) pick = t;
      (row_side ? rows : cols).push_back(cand[pick]);
      (row_side ? in_rows : in_cols)[cand[pick]] = 1;
    }
  }
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  return detail::make_ssvd_report(inst, Selection(rows), Selection(cols), Method::greedy,
                                  evals, sw.seconds(), opts.eig_tol);
}

// First-improvement local search over simultaneous (row, column) swaps in
// lexicographic (i1, j1, i2, j2) order. Unless pair_swaps_only is set, pure
// row-only and column-only swaps are scanned as well (a superset
// neighborhood, so the approximation guarantee is preserved).
inline SsvdReport local_search_ssvd(
    const SsvdInstance& inst,
    const std::optional<std::pair<Selection, Selection>>& init = std::nullopt,
    const HeuristicOpts& opts = {}, bool pair_swaps_only = false) {
  Stopwatch sw;
  const Matrix& a = inst.a;
  const std::size_t m = inst.m(), n = inst.n();

  std::vector<std::size_t> rows, cols;
  if (init) {
    init->first.validate_for(m);
    init->second.validate_for(n);
    if (init->first.k() != inst.k1 || init->second.k() != inst.k2)
      throw ValidationError("local_search_ssvd init must have sizes (k1, k2)");
    rows = init->first.support;
    cols = init->second.support;
  } else {
    const SsvdReport g = greedy_ssvd(inst, opts);
    rows = g.rows.support;
    cols = g.cols.support;
  }

  double current = ssvd_objective(a, Selection(rows), Selection(cols), opts.eig_tol);
  std::uint64_t accepted = 0;

  auto complement = [](const std::vector<std::size_t>& s, std::size_t limit) {
    std::vector<char> used(limit, 0);
    for (std::size_t i : s) used[i] = 1;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < limit; ++i)
      if (!used[i]) out.push_back(i);
    return out;
  };

  auto try_move = [&](const std::optional<std::pair<std::size_t, std::size_t>>& row_swap,
                      const std::optional<std::pair<std::size_t, std::size_t>>& col_swap) {
    auto r = rows;
    auto c = cols;
    if (row_swap) {
      r.erase(std::find(r.begin(), r.end(), row_swap->first));
      r.push_back(row_swap->second);
    }
    if (col_swap) {
      c.erase(std::find(c.begin(), c.end(), col_swap->first));
      c.push_back(col_swap->second);
    }
    const double val = ssvd_objective(a, Selection(r), Selection(c), opts.eig_tol);
    if (val > current + opts.strict_tol) {
      std::sort(r.begin(), r.end());
      std::sort(c.begin(), c.end());
      rows = std::move(r);
      cols = std::move(c);
      current = val;
      ++accepted;
      return true;
    }
    return false;
  };

  bool improved = true;
  while (improved) {
    improved = false;
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
    const auto row_in = rows;  // snapshots: try_move reassigns rows/cols on accept
    const auto col_in = cols;
    const auto row_out = complement(rows, m);
    const auto col_out = complement(cols, n);

    // Simultaneous row and column swaps, lexicographic (i1, j1, i2, j2).
    for (std::size_t i1 : row_in) {
      for (std::size_t j1 : row_out) {
        for (std::size_t i2 : col_in) {
          for (std::size_t j2 : col_out) {
            if (try_move(std::make_pair(i1, j1), std::make_pair(i2, j2))) {
              improved = true;
              break;
            }
          }
          if (improved) break;
        }
        if (improved) break;
      }
      if (improved) break;
    }
    if (improved || pair_swaps_only) {
      if (improved) continue;
      break;
    }
    // Row-only swaps.
    for (std::size_t i1 : row_in) {
      for (std::size_t j1 : row_out) {
        if (try_move(std::make_pair(i1, j1), std::nullopt)) {
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
    if (improved) continue;
    // Column-only swaps.
    for (std::size_t i2 : col_in) {
      for (std::size_t j2 : col_out) {
        if (try_move(std::nullopt, std::make_pair(i2, j2))) {
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
  }

  return detail::make_ssvd_report(inst, Selection(rows), Selection(cols),
                                  Method::local_search, accepted, sw.seconds(),
                                  opts.eig_tol);
}

// Keep the s largest-magnitude entries (ties: smaller index first), zero the
// rest, rescale to unit 2-norm. Signs are preserved.
inline Vector normalized_truncation(const Vector& x, std::size_t s) {
  if (s < 1) throw ValidationError("truncation size must be at least 1");
  const std::size_t p = x.size();
  std::vector<std::size_t> order(p);
  for (std::size_t i = 0; i < p; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(x[a]) > std::abs(x[b]);
  });
  Vector out(p, 0.0);
  const std::size_t keep = std::min(s, p);
  double norm_sq = 0.0;
  for (std::size_t t = 0; t < keep; ++t) {
    out[order[t]] = x[order[t]];
    norm_sq += x[order[t]] * x[order[t]];
  }
  if (norm_sq <= 0.0)
    throw ValidationError("truncation of a vector that vanishes on its top entries");
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& e : out) e *= inv;
  return out;
}

namespace detail {

// Pad a vector's support with the smallest unused indices up to `size`.
inline std::vector<std::size_t> padded_support(const Vector& x, std::size_t size) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) s.push_back(i);
  for (std::size_t i = 0; i < x.size() && s.size() < size; ++i)
    if (x[i] == 0.0) s.insert(std::lower_bound(s.begin(), s.end(), i), i);
  return s;
}

}  // namespace detail

// Normalized-truncation heuristic: every standard-basis column candidate
// (k1-truncation of A e_j), every standard-basis row candidate, and the
// eigen-space pair built from the top singular vector; each candidate is
// completed with the best-response truncation on the other side and the best
// pair wins.
inline SsvdReport truncation_ssvd(const SsvdInstance& inst,
                                  double tol = kDefaultEigTol) {
  Stopwatch sw;
  const Matrix& a = inst.a;
  const std::size_t m = inst.m(), n = inst.n();

  double frob = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
  if (frob == 0.0) {
    std::vector<std::size_t> r(inst.k1), c(inst.k2);
    for (std::size_t i = 0; i < inst.k1; ++i) r[i] = i;
    for (std::size_t j = 0; j < inst.k2; ++j) c[j] = j;
    SsvdReport rep;
    rep.value = 0.0;
    rep.rows = Selection(r);
    rep.cols = Selection(c);
    rep.u.assign(m, 0.0);
    rep.v.assign(n, 0.0);
    rep.u[r[0]] = 1.0;
    rep.v[c[0]] = 1.0;
    rep.method = Method::greedy;
    rep.wall_time_sec = sw.seconds();
    return rep;
  }

  double best_value = -1.0;
  Vector best_u, best_v;
  std::uint64_t candidates = 0;

  auto best_response_v = [&](const Vector& u) {
    Vector atu = a.multiply_transposed(u);
    bool zero = true;
    for (double e : atu)
      if (e != 0.0) zero = false;
    if (zero) {
      Vector v(n, 0.0);
      v[0] = 1.0;
      return v;
    }
    return normalized_truncation(atu, inst.k2);
  };
  auto best_response_u = [&](const Vector& v) {
    Vector av = a.multiply(v);
    bool zero = true;
    for (double e : av)
      if (e != 0.0) zero = false;
    if (zero) {
      Vector u(m, 0.0);
      u[0] = 1.0;
      return u;
    }
    return normalized_truncation(av, inst.k1);
  };
  auto consider = [&](const Vector& u, const Vector& v) {
    ++candidates;
    const double val = dot(u, a.multiply(v));
    if (val > best_value) {
      best_value = val;
      best_u = u;
      best_v = v;
    }
  };

  // Standard-basis column candidates: u = k1-truncation of A e_j.
  for (std::size_t j = 0; j < n; ++j) {
    Vector col(m);
    for (std::size_t i = 0; i < m; ++i) col[i] = a(i, j);
    bool zero = true;
    for (double e : col)
      if (e != 0.0) zero = false;
    if (zero) continue;
    const Vector u = normalized_truncation(col, inst.k1);
    consider(u, best_response_v(u));
  }
  // Standard-basis row candidates: v = k2-truncation of A^T e_i.
  for (std::size_t i = 0; i < m; ++i) {
    Vector row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = a(i, j);
    bool zero = true;
    for (double e : row)
      if (e != 0.0) zero = false;
    if (zero) continue;
    const Vector v = normalized_truncation(row, inst.k2);
    consider(best_response_u(v), v);
  }
  // Eigen-space candidate from the top singular pair.
  {
    const SingularTriplet t = largest_singular_triplet(a, tol);
    const Vector u = normalized_truncation(t.u, inst.k1);
    consider(u, best_response_v(u));
  }

  Selection rows(detail::padded_support(best_u, inst.k1));
  Selection cols(detail::padded_support(best_v, inst.k2));
  SsvdReport rep;
  rep.value = best_value;
  rep.rows = std::move(rows);
  rep.cols = std::move(cols);
  rep.u = std::move(best_u);
  rep.v = std::move(best_v);
  rep.method = Method::greedy;
  rep.iterations = candidates;
  rep.wall_time_sec = sw.seconds();
  return rep;
}

// Saddle-point upper bound on w*_SVD through the shifted augmented matrix:
// run the two-block saddle bound on Abar + sigma I and subtract the shift.
inline double upper_bound_ssvd(const SsvdInstance& inst, std::uint64_t budget = 2000,
                               double eig_tol = kDefaultEigTol) {
  const SingularTriplet t = largest_singular_triplet(inst.a, eig_tol);
  // Tiny inflation keeps the pivoted Cholesky of the shifted matrix clear of
  // negative round-off pivots without affecting bound validity.
  const double sigma = t.sigma * (1.0 + 1e-8) + 1e-12;
  const SymMatrix shifted = shift_psd(augment(inst.a), sigma);
  const GramFactor f = pivoted_cholesky(shifted);
  SaddleOpts so;
  so.max_iters = budget;
  so.eig_tol = eig_tol;
  const std::vector<CardinalityBlock> blocks{{0, inst.m(), inst.k1},
                                             {inst.m(), inst.m() + inst.n(), inst.k2}};
  auto [bound, state] = detail::saddle_core(f, blocks, so, std::nullopt);
  (void)state;
  return bound - sigma;
}

// Worst case for greedy/local search: m = n = 2*k2 with an identity block on
// the first k2 indices and an all-ones block on the rest. Starting from the
// max-entry seed (all entries tie at 1, so the lexicographically first one),
// both heuristics settle on the identity block with value 1, while the best
// k1 x k2 submatrix lives in the all-ones block with value sqrt(k1*k2).
inline SsvdInstance gen_ssvd_tight(std::size_t k1, std::size_t k2) {
  if (k1 < 1 || k2 < k1)
    throw ValidationError("gen_ssvd_tight requires 1 <= k1 <= k2");
  const std::size_t half = k2, size = 2 * k2;
  Matrix a(size, size);
  for (std::size_t i = 0; i < half; ++i) a(i, i) = 1.0;
  for (std::size_t i = half; i < size; ++i)
    for (std::size_t j = half; j < size; ++j) a(i, j) = 1.0;
  return SsvdInstance(std::move(a), k1, k2);
}

}  // namespace sparse_spectra
