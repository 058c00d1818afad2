#pragma once

// Problem definitions for sparse PCA: instances, support selections, solve
// reports, the two objective routes (principal submatrix vs. Gram form), and
// generators for the tight worst-case instances used by the property suites.
//
// Indexing is 0-based throughout the C++ API.

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>

#include "sparse_spectra/spectral.hpp"

namespace sparse_spectra {

// Sorted, duplicate-free index set of fixed size k.
struct Selection {
  std::vector<std::size_t> support;

  Selection() = default;
  explicit Selection(std::vector<std::size_t> idx) : support(std::move(idx)) {
    std::sort(support.begin(), support.end());
    for (std::size_t i = 1; i < support.size(); ++i)
      if (support[i] == support[i - 1])
        throw ValidationError("selection has duplicate index " +
                              std::to_string(support[i] + 1));
  }

  std::size_t k() const { return support.size(); }

  bool contains(std::size_t i) const {
    return std::binary_search(support.begin(), support.end(), i);
  }

  void validate_for(std::size_t n) const {
    for (std::size_t i : support)
      if (i >= n)
        throw ValidationError("selection index " + std::to_string(i + 1) +
                              " out of range for n = " + std::to_string(n));
  }

  friend bool operator==(const Selection& a, const Selection& b) {
    return a.support == b.support;
  }
  friend bool operator<(const Selection& a, const Selection& b) {
    return a.support < b.support;
  }
};

// A sparse-PCA instance: symmetric PSD matrix A, sparsity k, and the Gram
// factor C with C^T C = A (derived lazily from A on first use, or supplied
// directly by generators that construct C explicitly).
class SpcaInstance {
 public:
  SpcaInstance(SymMatrix a, std::size_t k)
      : a_(std::make_shared<SymMatrix>(std::move(a))), k_(k), lazy_(std::make_shared<Lazy>()) {
    check_k();
  }

  SpcaInstance(GramFactor factor, std::size_t k)
      : a_(std::make_shared<SymMatrix>(factor.reconstruct())),
        k_(k),
        lazy_(std::make_shared<Lazy>()) {
    lazy_->value = std::move(factor);
    lazy_->ready = true;
    check_k();
  }

  std::size_t n() const { return a_->n(); }
  std::size_t k() const { return k_; }
  const SymMatrix& matrix() const { return *a_; }

  const GramFactor& factor() const {
    std::call_once(lazy_->once, [this] {
      if (!lazy_->ready) {
        lazy_->value = pivoted_cholesky(*a_);
        lazy_->ready = true;
      }
    });
    return lazy_->value;
  }

  SpcaInstance with_k(std::size_t k) const {
    SpcaInstance copy = *this;
    copy.k_ = k;
    copy.check_k();
    return copy;
  }

 private:
  struct Lazy {
    std::once_flag once;
    bool ready = false;
    GramFactor value;
  };

  void check_k() const {
    if (k_ < 1 || k_ > n())
      throw ValidationError("sparsity k = " + std::to_string(k_) +
                            " must lie in [1, n = " + std::to_string(n()) + "]");
  }

  std::shared_ptr<SymMatrix> a_;
  std::size_t k_;
  mutable std::shared_ptr<Lazy> lazy_;
};

enum class Method { greedy, local_search, s_swap, brute_force, exact, saddle_bound };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::greedy: return "greedy";
    case Method::local_search: return "local_search";
    case Method::s_swap: return "s_swap";
    case Method::brute_force: return "brute_force";
    case Method::exact: return "exact";
    case Method::saddle_bound: return "saddle_bound";
  }
  return "unknown";
}

enum class SolveStatus { complete, time_limit, node_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::complete: return "complete";
    case SolveStatus::time_limit: return "time_limit";
    case SolveStatus::node_limit: return "node_limit";
  }
  return "unknown";
}

struct SolveReport {
  double value = 0.0;
  Selection selection;
  Vector leading_vector;  // length n, unit norm, zero outside the support
  std::optional<double> upper_bound;
  std::optional<double> gap;  // (upper_bound - value) / max(value, 1e-12)
  Method method = Method::greedy;
  std::uint64_t iterations = 0;  // rounds / sweeps / nodes depending on method
  double wall_time_sec = 0.0;
  SolveStatus status = SolveStatus::complete;

  void set_bound(double ub) {
    upper_bound = ub;
    gap = (ub - value) / std::max(value, 1e-12);
  }
};

// ---------------------------------------------------------------------------
// Objective evaluation (two independent routes).
// ---------------------------------------------------------------------------

// lambda_max(A_{S,S}) with the submatrix eigenvector embedded into R^n.
inline std::pair<double, Vector> objective(const SpcaInstance& inst, const Selection& sel,
                                           double tol = kDefaultEigTol) {
  sel.validate_for(inst.n());
  if (sel.k() == 0) throw ValidationError("selection must be non-empty");
  const SymMatrix sub = inst.matrix().principal_submatrix(sel.support);
  const EigenPair top = largest_eigenpair(sub, std::nullopt, tol);
  Vector x(inst.n(), 0.0);
  for (std::size_t i = 0; i < sel.support.size(); ++i)
    x[sel.support[i]] = top.vector[i];
  canonicalize_sign(x);
  return {top.value, std::move(x)};
}

// lambda_max(sum_{i in S} c_i c_i^T) on the Gram side.
inline double gram_objective(const GramFactor& factor, const Selection& sel,
                             double tol = kDefaultEigTol,
                             const std::optional<Vector>& warm = std::nullopt) {
  sel.validate_for(factor.n);
  Matrix m(factor.d, factor.d);
  for (std::size_t idx : sel.support) {
    const Vector& c = factor.columns[idx];
    for (std::size_t a = 0; a < factor.d; ++a) {
      if (c[a] == 0.0) continue;
      for (std::size_t b = 0; b < factor.d; ++b) m(a, b) += c[a] * c[b];
    }
  }
  return detail::power_iteration(m, warm ? &*warm : nullptr, tol).value;
}

// Assembles a SolveReport for a known support: value and leading vector come
// from the principal-submatrix route so the report invariant is exact.
inline SolveReport make_report(const SpcaInstance& inst, Selection sel, Method method,
                               std::uint64_t iterations, double wall_time_sec) {
  auto [value, x] = objective(inst, sel);
  SolveReport r;
  r.value = value;
  r.selection = std::move(sel);
  r.leading_vector = std::move(x);
  r.method = method;
  r.iterations = iterations;
  r.wall_time_sec = wall_time_sec;
  return r;
}

// ---------------------------------------------------------------------------
// Tight worst-case generators.
// ---------------------------------------------------------------------------

// d = k+1, n = 2k; columns e_0..e_{k-1} then k copies of e_k. The brute-force
// optimum is k (all copies of e_k) while greedy with smallest-index ties stays
// on the orthonormal block with value 1.
inline SpcaInstance gen_greedy_tight(std::size_t k) {
  if (k < 2) throw ValidationError("gen_greedy_tight requires k >= 2");
  const std::size_t d = k + 1, n = 2 * k;
  std::vector<Vector> cols(n, Vector(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) cols[i][i < k ? i : k] = 1.0;
  return SpcaInstance(GramFactor::from_columns(std::move(cols)), k);
}

// d = k+1, n = (s+1)k; the first s*k columns cycle through e_0..e_{k-1} and
// the rest are copies of e_k. The prescribed start below is s-swap locally
// optimal with value s while the optimum is k.
inline SpcaInstance gen_sswap_tight(std::size_t k, std::size_t s) {
  if (s < 1 || s > k) throw ValidationError("gen_sswap_tight requires 1 <= s <= k");
  const std::size_t d = k + 1, n = (s + 1) * k;
  std::vector<Vector> cols(n, Vector(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) cols[i][i < s * k ? i % k : k] = 1.0;
  return SpcaInstance(GramFactor::from_columns(std::move(cols)), k);
}

// The start set {0..k-s} plus {l*k : l = 1..s-1} whose s-swap local optimum
// value is exactly s on gen_sswap_tight(k, s).
inline Selection sswap_tight_start(std::size_t k, std::size_t s) {
  if (s < 1 || s > k) throw ValidationError("sswap_tight_start requires 1 <= s <= k");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i + s <= k; ++i) idx.push_back(i);  // 0 .. k-s
  for (std::size_t l = 1; l < s; ++l) idx.push_back(l * k);
  return Selection(std::move(idx));
}

// Steady-clock stopwatch used by every solver for wall_time reporting.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace sparse_spectra
