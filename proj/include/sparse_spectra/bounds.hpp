#pragma once

// Upper bounds for sparse PCA built from the Gram factorization A = C^T C:
//
//   * h1_binary: the closed-form selection bound
//         H1(z) = lambda_max(A_SS) + sum_{i not in S} ||c_i||^2
//     together with the affine coefficients (nu, mu) of the valid cut
//         w(z') <= nu + mu^T z'   for every admissible binary z'.
//
//   * h1_bar_value_and_subgradients: the continuous relaxation
//         H1bar(z, mu) = lambda_max(M(mu)) + mu^T z,
//         M(mu) = sum_i (1 - mu_i / ||c_i||^2) c_i c_i^T,
//     with subgradients in both arguments.
//
//   * saddle_upper_bound: alternating projected-subgradient ascent/descent on
//     the saddle problem max_z min_mu H1bar(z, mu). Every mu iterate yields a
//     certified bound g(mu) = lambda_max(M(mu)) + max_z mu^T z (the inner max
//     solved exactly per cardinality block), so the returned value is a valid
//     upper bound regardless of convergence. Seeding at mu = 0 and at the box
//     caps makes the bound at most min(lambda_max(A), top-k column norms).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sparse_spectra/problem.hpp"
#include "sparse_spectra/spectral.hpp"

namespace sparse_spectra {

// Coefficients of the affine majorant w <= nu + mu^T z.
struct CutCoefficients {
  double nu = 0.0;
  Vector mu;
};

inline double evaluate(const CutCoefficients& cut, const Vector& z) {
  if (z.size() != cut.mu.size())
    throw ValidationError("cut evaluation dimension mismatch");
  return cut.nu + dot(cut.mu, z);
}

// Closed-form bound at a binary selection plus the dual cut it certifies.
inline std::pair<double, CutCoefficients> h1_binary(const GramFactor& f,
                                                    const Selection& sel,
                                                    double eig_tol = kDefaultEigTol) {
  sel.validate_for(f.n);
  Matrix m(f.d, f.d);
  for (std::size_t i : sel.support) {
    const Vector& c = f.columns[i];
    for (std::size_t a = 0; a < f.d; ++a) {
      if (c[a] == 0.0) continue;
      for (std::size_t b = 0; b < f.d; ++b) m(a, b) += c[a] * c[b];
    }
  }
  const double lmax = detail::power_iteration(m, nullptr, eig_tol).value;
  CutCoefficients cut;
  cut.nu = lmax;
  cut.mu.assign(f.n, 0.0);
  double value = lmax;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    if (cursor < sel.support.size() && sel.support[cursor] == i) {
      ++cursor;
      continue;
    }
    cut.mu[i] = f.col_norms_sq[i];
    value += f.col_norms_sq[i];
  }
  return {value, std::move(cut)};
}

struct H1BarResult {
  double value = 0.0;
  Vector grad_z;   // subgradient in z (ascent direction component)
  Vector grad_mu;  // subgradient in mu (descent direction component)
  Vector eigvec;   // top unit eigenvector of M(mu)
};

inline H1BarResult h1_bar_value_and_subgradients(const GramFactor& f, const Vector& z,
                                                 const Vector& mu,
                                                 double eig_tol = kDefaultEigTol) {
  if (z.size() != f.n || mu.size() != f.n)
    throw ValidationError("h1_bar expects z and mu of length n");
  constexpr double kBoxSlack = 1e-9;
  for (std::size_t i = 0; i < f.n; ++i) {
    if (z[i] < -kBoxSlack || z[i] > 1.0 + kBoxSlack)
      throw ValidationError("z outside [0,1]");
    if (mu[i] < -kBoxSlack || mu[i] > f.col_norms_sq[i] + kBoxSlack)
      throw ValidationError("mu outside its box [0, ||c_i||^2]");
  }
  Matrix m(f.d, f.d);
  for (std::size_t i = 0; i < f.n; ++i) {
    const double cap = f.col_norms_sq[i];
    const double w = cap > 0.0 ? 1.0 - mu[i] / cap : 0.0;
    if (w == 0.0) continue;
    const Vector& c = f.columns[i];
    for (std::size_t a = 0; a < f.d; ++a) {
      if (c[a] == 0.0) continue;
      const double ca = w * c[a];
      for (std::size_t b = 0; b < f.d; ++b) m(a, b) += ca * c[b];
    }
  }
  const EigenPair top = detail::power_iteration(m, nullptr, eig_tol);
  H1BarResult r;
  r.value = top.value + dot(mu, z);
  r.grad_z = mu;
  r.grad_mu.assign(f.n, 0.0);
  for (std::size_t i = 0; i < f.n; ++i) {
    const double cap = f.col_norms_sq[i];
    const double ci_v = cap > 0.0 ? dot(f.columns[i], top.vector) : 0.0;
    r.grad_mu[i] = z[i] - (cap > 0.0 ? ci_v * ci_v / cap : 0.0);
  }
  r.eigvec = top.vector;
  return r;
}

// Euclidean projection onto { x : 0 <= x <= 1, sum x = budget } by bisection
// on the shift tau in x = clamp(v - tau, 0, 1).
inline Vector project_capped_simplex(const Vector& v, std::size_t budget) {
  const std::size_t n = v.size();
  if (budget > n) throw ValidationError("capped simplex budget exceeds dimension");
  if (budget == 0) return Vector(n, 0.0);
  if (budget == n) return Vector(n, 1.0);
  double lo = *std::min_element(v.begin(), v.end()) - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  const double target = static_cast<double>(budget);
  auto mass = [&](double tau) {
    double s = 0.0;
    for (double vi : v) s += std::clamp(vi - tau, 0.0, 1.0);
    return s;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  const double tau = 0.5 * (lo + hi);
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(v[i] - tau, 0.0, 1.0);
  return x;
}

// One cardinality constraint over the index range [begin, end): sum of those
// z entries equals budget. Sparse PCA uses a single block; the sparse SVD
// bound uses one block for rows and one for columns.
struct CardinalityBlock {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t budget = 0;
};

// Branch-and-bound style index fixings: z_i = 1 on `ones`, z_i = 0 on `zeros`.
struct Fixing {
  std::vector<std::size_t> ones;
  std::vector<std::size_t> zeros;
};

struct SaddleOpts {
  double alpha0 = 0.0;           // 0 = auto: mean of the mu box caps
  std::uint64_t max_iters = 2000;
  double eig_tol = kDefaultEigTol;
  double stall_improve = 1e-7;   // stop when the best bound improves less ...
  std::uint64_t stall_window = 100;  // ... than this over this many iterations
  std::optional<Vector> warm_mu;     // starting dual point (default 0)
};

struct SaddleState {
  Vector z;                  // final primal iterate
  Vector mu;                 // dual point attaining the best bound
  double best_bound = 0.0;
  std::uint64_t iterate_count = 0;
  Vector best_eigvec;        // top eigenvector of M(mu) at the best bound
};

namespace detail {

struct SaddleWorkspace {
  std::vector<char> fixed_one, fixed_zero;
  std::vector<std::size_t> free_budget;  // per block, after removing fixed ones
  Vector caps;
};

inline SaddleWorkspace prepare_saddle(const GramFactor& f,
                                      const std::vector<CardinalityBlock>& blocks,
                                      const std::optional<Fixing>& fixed) {
  SaddleWorkspace ws;
  ws.fixed_one.assign(f.n, 0);
  ws.fixed_zero.assign(f.n, 0);
  ws.caps = f.col_norms_sq;
  if (fixed) {
    for (std::size_t i : fixed->ones) {
      if (i >= f.n) throw ValidationError("fixed index out of range");
      ws.fixed_one[i] = 1;
    }
    for (std::size_t i : fixed->zeros) {
      if (i >= f.n) throw ValidationError("fixed index out of range");
      if (ws.fixed_one[i]) throw ValidationError("index fixed to both 0 and 1");
      ws.fixed_zero[i] = 1;
    }
  }
  ws.free_budget.resize(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    if (blk.end > f.n || blk.begin > blk.end)
      throw ValidationError("cardinality block out of range");
    std::size_t ones = 0, zeros = 0;
    for (std::size_t i = blk.begin; i < blk.end; ++i) {
      ones += ws.fixed_one[i] ? 1u : 0u;
      zeros += ws.fixed_zero[i] ? 1u : 0u;
    }
    if (ones > blk.budget)
      throw ValidationError("more indices fixed to one than the block budget");
    const std::size_t free_count = (blk.end - blk.begin) - ones - zeros;
    const std::size_t need = blk.budget - ones;
    if (need > free_count)
      throw ValidationError("block budget infeasible under the given fixings");
    ws.free_budget[b] = need;
  }
  return ws;
}

// Exact inner maximum of mu^T z over the fixed/blocked feasible z set:
// fixed ones contribute mu_i, each block adds its top free mu values.
inline double exact_z_value(const Vector& mu, const std::vector<CardinalityBlock>& blocks,
                            const SaddleWorkspace& ws) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (ws.fixed_one[i]) total += mu[i];
  Vector scratch;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    const std::size_t need = ws.free_budget[b];
    if (need == 0) continue;
    scratch.clear();
    for (std::size_t i = blk.begin; i < blk.end; ++i)
      if (!ws.fixed_one[i] && !ws.fixed_zero[i]) scratch.push_back(mu[i]);
    std::partial_sort(scratch.begin(),
                      scratch.begin() + static_cast<std::ptrdiff_t>(need), scratch.end(),
                      std::greater<double>());
    for (std::size_t t = 0; t < need; ++t) total += scratch[t];
  }
  return total;
}

// Shared saddle solver; caps are the per-coordinate mu box upper bounds
// (||c_i||^2 for the factor's columns).
inline std::pair<double, SaddleState> saddle_core(
    const GramFactor& f, const std::vector<CardinalityBlock>& blocks,
    const SaddleOpts& opts, const std::optional<Fixing>& fixed) {
  const std::size_t n = f.n;
  const SaddleWorkspace ws = prepare_saddle(f, blocks, fixed);

  double alpha0 = opts.alpha0;
  if (alpha0 <= 0.0) {
    double s = 0.0;
    for (double c : ws.caps) s += c;
    alpha0 = n > 0 ? s / static_cast<double>(n) : 1.0;
    if (alpha0 <= 0.0) alpha0 = 1.0;
  }

  // Weighted Gram accumulator M(mu) rebuilt per iterate.
  auto build = [&](const Vector& mu) {
    Matrix m(f.d, f.d);
    for (std::size_t i = 0; i < n; ++i) {
      const double cap = ws.caps[i];
      const double w = cap > 0.0 ? 1.0 - mu[i] / cap : 0.0;
      if (w == 0.0) continue;
      const Vector& c = f.columns[i];
      for (std::size_t a = 0; a < f.d; ++a) {
        if (c[a] == 0.0) continue;
        const double ca = w * c[a];
        for (std::size_t b = 0; b < f.d; ++b) m(a, b) += ca * c[b];
      }
    }
    return m;
  };

  SaddleState state;
  state.z.assign(n, 0.0);
  state.best_bound = std::numeric_limits<double>::infinity();

  Vector warm;  // eigenvector warm start across iterations
  auto consider = [&](const Vector& mu, double lmax, const Vector& eigvec) {
    const double bound = lmax + exact_z_value(mu, blocks, ws);
    if (bound < state.best_bound) {
      state.best_bound = bound;
      state.mu = mu;
      state.best_eigvec = eigvec;
      return true;
    }
    return false;
  };

  // Seed 1: mu = 0 gives lambda_max of the full accumulator.
  Vector mu(n, 0.0);
  {
    const EigenPair p = power_iteration(build(mu), nullptr, opts.eig_tol);
    warm = p.vector;
    consider(mu, p.value, p.vector);
  }
  // Seed 2: mu at the caps zeroes the accumulator.
  {
    const EigenPair zero_pair{0.0, Vector(f.d, 0.0)};
    consider(ws.caps, 0.0, zero_pair.vector);
  }
  // Seed 3: caps off the fixed-one set. The accumulator collapses to the
  // fixed columns, so the bound becomes lambda_max over the fixed support
  // plus the top free caps; exact when every block budget is already met.
  std::size_t total_free_budget = 0;
  for (std::size_t b : ws.free_budget) total_free_budget += b;
  bool has_ones = false;
  for (char c : ws.fixed_one)
    if (c) {
      has_ones = true;
      break;
    }
  if (has_ones || total_free_budget == 0) {
    Vector seed = ws.caps;
    for (std::size_t i = 0; i < n; ++i)
      if (ws.fixed_one[i]) seed[i] = 0.0;
    const EigenPair p = power_iteration(build(seed), nullptr, opts.eig_tol);
    consider(seed, p.value, p.vector);
    if (total_free_budget == 0) {
      // Fully determined z: the seed above is an exact minimizer.
      state.z.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (ws.fixed_one[i]) state.z[i] = 1.0;
      return {state.best_bound, std::move(state)};
    }
  }

  if (opts.warm_mu) {
    if (opts.warm_mu->size() != n) throw ValidationError("warm_mu dimension mismatch");
    mu = *opts.warm_mu;
    for (std::size_t i = 0; i < n; ++i) mu[i] = std::clamp(mu[i], 0.0, ws.caps[i]);
  }

  // Initial z: fixed entries pinned, free entries spread uniformly.
  Vector z(n, 0.0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    std::size_t free_count = 0;
    for (std::size_t i = blk.begin; i < blk.end; ++i)
      if (!ws.fixed_one[i] && !ws.fixed_zero[i]) ++free_count;
    const double fill =
        free_count > 0
            ? static_cast<double>(ws.free_budget[b]) / static_cast<double>(free_count)
            : 0.0;
    for (std::size_t i = blk.begin; i < blk.end; ++i) {
      if (ws.fixed_one[i])
        z[i] = 1.0;
      else if (ws.fixed_zero[i])
        z[i] = 0.0;
      else
        z[i] = fill;
    }
  }

  double window_anchor = state.best_bound;
  std::uint64_t window_start = 0;
  Vector grad_mu(n), free_scratch;
  for (std::uint64_t t = 1; t <= opts.max_iters; ++t) {
    const EigenPair p = power_iteration(build(mu), warm.empty() ? nullptr : &warm,
                                        opts.eig_tol);
    warm = p.vector;
    consider(mu, p.value, p.vector);
    ++state.iterate_count;

    // Early stop on a stalled bound.
    if (state.iterate_count - window_start >= opts.stall_window) {
      if (window_anchor - state.best_bound < opts.stall_improve) break;
      window_anchor = state.best_bound;
      window_start = state.iterate_count;
    }

    const double alpha = alpha0 / std::sqrt(static_cast<double>(t));

    // Subgradient in mu at the current (z, mu).
    for (std::size_t i = 0; i < n; ++i) {
      const double cap = ws.caps[i];
      const double ci_v = cap > 0.0 ? dot(f.columns[i], p.vector) : 0.0;
      grad_mu[i] = z[i] - (cap > 0.0 ? ci_v * ci_v / cap : 0.0);
    }

    // Ascent step in z (gradient is mu), projected blockwise.
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& blk = blocks[b];
      free_scratch.clear();
      for (std::size_t i = blk.begin; i < blk.end; ++i)
        if (!ws.fixed_one[i] && !ws.fixed_zero[i])
          free_scratch.push_back(z[i] + alpha * mu[i]);
      if (free_scratch.empty()) continue;
      const Vector projected = project_capped_simplex(free_scratch, ws.free_budget[b]);
      std::size_t cursor = 0;
      for (std::size_t i = blk.begin; i < blk.end; ++i)
        if (!ws.fixed_one[i] && !ws.fixed_zero[i]) z[i] = projected[cursor++];
    }

    // Descent step in mu, clamped to the box.
    for (std::size_t i = 0; i < n; ++i)
      mu[i] = std::clamp(mu[i] - alpha * grad_mu[i], 0.0, ws.caps[i]);
  }

  state.z = std::move(z);
  return {state.best_bound, std::move(state)};
}

}  // namespace detail

// Subgradient saddle-point upper bound on w* for supports of size k.
inline std::pair<double, SaddleState> saddle_upper_bound(
    const GramFactor& f, std::size_t k, const SaddleOpts& opts = {},
    const std::optional<Fixing>& fixed = std::nullopt) {
  if (k < 1 || k > f.n) throw ValidationError("saddle bound requires 1 <= k <= n");
  const std::vector<CardinalityBlock> blocks{{0, f.n, k}};
  return detail::saddle_core(f, blocks, opts, fixed);
}

// A-priori multiplicative certificate: w_bar2 <= min(k, n/k) * w*.
inline double gap_certificate(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw ValidationError("gap certificate requires 1 <= k <= n");
  return std::min(static_cast<double>(k),
                  static_cast<double>(n) / static_cast<double>(k));
}

}  // namespace sparse_spectra
