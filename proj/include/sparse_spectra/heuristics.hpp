#pragma once

// Greedy augmentation, 1-swap local search, and s-swap local search for
// sparse PCA. All candidate evaluations run on the Gram side
// (lambda_max(sum_{i in S} c_i c_i^T), a d x d problem) with warm-started
// power iterations; acceptance rules are deterministic-by-contract:
// smallest-index tie-breaks for greedy, first-improvement sweeps for the
// local searches. Candidate values may be computed on several threads; the
// acceptance scan itself is always sequential over the stored values.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sparse_spectra/parallel.hpp"
#include "sparse_spectra/problem.hpp"

namespace sparse_spectra {

struct HeuristicOpts {
  double strict_tol = 1e-8;  // minimum accepted improvement for swaps
  double tie_tol = 1e-9;     // values within this are ties (smallest index wins)
  double eig_tol = 1e-10;
  unsigned threads = 1;      // 0 = honor SPARSE_SPECTRA_THREADS
};

namespace detail {

// Mutable d x d accumulator for sum of column outer products plus the warm
// eigenvector carried between evaluations.
struct GramScratch {
  explicit GramScratch(const GramFactor& f) : factor(&f), m(f.d, f.d) {}

  const GramFactor* factor;
  Matrix m;
  std::optional<Vector> warm;

  void add(std::size_t col, double sign = 1.0) {
    const Vector& c = factor->columns[col];
    const std::size_t d = factor->d;
    for (std::size_t a = 0; a < d; ++a) {
      if (c[a] == 0.0) continue;
      const double ca = sign * c[a];
      for (std::size_t b = 0; b < d; ++b) m(a, b) += ca * c[b];
    }
  }

  void remove(std::size_t col) { add(col, -1.0); }

  // lambda_max of the current accumulator, refreshing the warm vector.
  double refresh(double tol) {
    const EigenPair p = power_iteration(m, warm ? &*warm : nullptr, tol);
    warm = p.vector;
    return p.value;
  }

  // lambda_max of (m + delta-in − delta-out) without mutating the accumulator.
  double eval_with(const std::vector<std::size_t>& in,
                   const std::vector<std::size_t>& out, double tol) const {
    Matrix trial = m;
    const std::size_t d = factor->d;
    auto apply = [&](std::size_t col, double sign) {
      const Vector& c = factor->columns[col];
      for (std::size_t a = 0; a < d; ++a) {
        if (c[a] == 0.0) continue;
        const double ca = sign * c[a];
        for (std::size_t b = 0; b < d; ++b) trial(a, b) += ca * c[b];
      }
    };
    for (std::size_t col : out) apply(col, -1.0);
    for (std::size_t col : in) apply(col, 1.0);
    return power_iteration(trial, warm ? &*warm : nullptr, tol).value;
  }
};

// Sequential smallest-index-wins acceptance over precomputed values: the
// winner is the first candidate not beaten by more than tie_tol later on.
inline std::size_t arg_best(const Vector& values, double tie_tol) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j)
    if (values[j] > values[best] + tie_tol) best = j;
  return best;
}

// Greedy completion of `init` inside `pool` (both index sets over the factor's
// columns) up to size k. Returns the selected indices (sorted).
inline std::vector<std::size_t> greedy_completion(const GramFactor& f,
                                                  std::vector<std::size_t> init,
                                                  const std::vector<std::size_t>& pool,
                                                  std::size_t k, const HeuristicOpts& opts) {
  const unsigned threads = resolve_threads(opts.threads);
  GramScratch scratch(f);
  std::vector<bool> selected(f.n, false);
  for (std::size_t i : init) {
    scratch.add(i);
    selected[i] = true;
  }
  if (init.size() > 1) scratch.refresh(opts.eig_tol);

  while (init.size() < k) {
    std::vector<std::size_t> cands;
    for (std::size_t j : pool)
      if (!selected[j]) cands.push_back(j);
    if (cands.empty()) throw ValidationError("greedy completion ran out of candidates");
    Vector values(cands.size());
    if (init.empty()) {
      // First pick: lambda_max(c_j c_j^T) = ||c_j||^2, no eigen solve needed.
      for (std::size_t t = 0; t < cands.size(); ++t) values[t] = f.col_norms_sq[cands[t]];
    } else {
      parallel_for(cands.size(), threads, [&](std::size_t t) {
        values[t] = scratch.eval_with({cands[t]}, {}, opts.eig_tol);
      });
    }
    const std::size_t pick = cands[arg_best(values, opts.tie_tol)];
    scratch.add(pick);
    scratch.refresh(opts.eig_tol);
    selected[pick] = true;
    init.push_back(pick);
  }
  std::sort(init.begin(), init.end());
  return init;
}

// First-improvement 1-swap local search restricted to `pool`; returns the
// final support and the number of accepted swaps.
inline std::pair<std::vector<std::size_t>, std::uint64_t> local_search_pool(
    const GramFactor& f, std::vector<std::size_t> support,
    const std::vector<std::size_t>& pool, const HeuristicOpts& opts) {
  const unsigned threads = resolve_threads(opts.threads);
  GramScratch scratch(f);
  std::vector<bool> selected(f.n, false);
  for (std::size_t i : support) {
    scratch.add(i);
    selected[i] = true;
  }
  double current = scratch.refresh(opts.eig_tol);
  std::sort(support.begin(), support.end());

  std::uint64_t accepted = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t oi = 0; oi < support.size() && !improved; ++oi) {
      const std::size_t i = support[oi];
      std::vector<std::size_t> cands;
      for (std::size_t j : pool)
        if (!selected[j]) cands.push_back(j);
      if (cands.empty()) break;
      Vector values(cands.size());
      parallel_for(cands.size(), threads, [&](std::size_t t) {
        values[t] = scratch.eval_with({cands[t]}, {i}, opts.eig_tol);
      });
      for (std::size_t t = 0; t < cands.size(); ++t) {
        if (values[t] > current + opts.strict_tol) {
          const std::size_t j = cands[t];
          scratch.remove(i);
          scratch.add(j);
          current = scratch.refresh(opts.eig_tol);
          selected[i] = false;
          selected[j] = true;
          support.erase(support.begin() + static_cast<std::ptrdiff_t>(oi));
          support.insert(std::lower_bound(support.begin(), support.end(), j), j);
          ++accepted;
          improved = true;  // restart the sweep
          break;
        }
      }
    }
  }
  return {std::move(support), accepted};
}

// Lexicographic combination enumeration: advances `combo` (indices into a
// pool of size pool_size) to the next combination; false when exhausted.
inline bool next_combination(std::vector<std::size_t>& combo, std::size_t pool_size) {
  const std::size_t t = combo.size();
  for (std::size_t pos = t; pos-- > 0;) {
    if (combo[pos] + (t - pos) < pool_size) {
      ++combo[pos];
      for (std::size_t q = pos + 1; q < t; ++q) combo[q] = combo[q - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Algorithm: k augmentation rounds, each adding the index maximizing the Gram
// objective; ties go to the smallest index.
inline SolveReport greedy(const SpcaInstance& inst, const HeuristicOpts& opts = {}) {
  Stopwatch sw;
  std::vector<std::size_t> pool(inst.n());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  auto support = detail::greedy_completion(inst.factor(), {}, pool, inst.k(), opts);
  return make_report(inst, Selection(std::move(support)), Method::greedy, inst.k(),
                     sw.seconds());
}

// 1-swap local search with first-improvement sweeps (i ascending over S,
// j ascending over the complement; restart after every accepted swap).
// Default initialization is the greedy output.
inline SolveReport local_search(const SpcaInstance& inst,
                                const std::optional<Selection>& init = std::nullopt,
                                const HeuristicOpts& opts = {}) {
  Stopwatch sw;
  std::vector<std::size_t> start;
  if (init) {
    init->validate_for(inst.n());
    if (init->k() != inst.k())
      throw ValidationError("local_search init must have exactly k indices");
    start = init->support;
  } else {
    std::vector<std::size_t> pool(inst.n());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    start = detail::greedy_completion(inst.factor(), {}, pool, inst.k(), opts);
  }
  std::vector<std::size_t> pool(inst.n());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  auto [support, accepted] =
      detail::local_search_pool(inst.factor(), std::move(start), pool, opts);
  return make_report(inst, Selection(std::move(support)), Method::local_search, accepted,
                     sw.seconds());
}

// s-swap local search: first-improvement over swap sizes t = 1..s, with both
// the outgoing and incoming subsets enumerated in lexicographic order; the
// sweep restarts from t = 1 after every accepted move.
inline SolveReport s_swap_local_search(const SpcaInstance& inst, std::size_t s,
                                       const std::optional<Selection>& init = std::nullopt,
                                       const HeuristicOpts& opts = {},
                                       std::uint64_t budget = 1000000) {
  if (s < 1 || s > inst.k())
    throw ValidationError("s-swap requires 1 <= s <= k");
  const std::size_t n = inst.n(), k = inst.k();
  if (binomial(k, s) > budget || binomial(n - k, s) > budget ||
      binomial(k, s) * binomial(n - k, s) > budget)
    throw GuardError("s-swap neighborhood C(k,s)*C(n-k,s) exceeds budget " +
                     std::to_string(budget));
  Stopwatch sw;
  const GramFactor& f = inst.factor();
  const unsigned threads = resolve_threads(opts.threads);

  std::vector<std::size_t> support;
  if (init) {
    init->validate_for(n);
    if (init->k() != k) throw ValidationError("s-swap init must have exactly k indices");
    support = init->support;
  } else {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    support = detail::greedy_completion(f, {}, pool, k, opts);
  }

  detail::GramScratch scratch(f);
  std::vector<bool> selected(n, false);
  for (std::size_t i : support) {
    scratch.add(i);
    selected[i] = true;
  }
  double current = scratch.refresh(opts.eig_tol);

  std::uint64_t accepted = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    std::sort(support.begin(), support.end());
    std::vector<std::size_t> complement;
    for (std::size_t j = 0; j < n; ++j)
      if (!selected[j]) complement.push_back(j);

    for (std::size_t t = 1; t <= s && !improved; ++t) {
      if (t > support.size() || t > complement.size()) break;
      std::vector<std::size_t> out_pos(t);
      for (std::size_t q = 0; q < t; ++q) out_pos[q] = q;
      do {
        std::vector<std::size_t> out(t);
        for (std::size_t q = 0; q < t; ++q) out[q] = support[out_pos[q]];
        // Materialize all incoming combinations for a deterministic parallel scan.
        std::vector<std::vector<std::size_t>> ins;
        std::vector<std::size_t> in_pos(t);
        for (std::size_t q = 0; q < t; ++q) in_pos[q] = q;
        do {
          std::vector<std::size_t> in(t);
          for (std::size_t q = 0; q < t; ++q) in[q] = complement[in_pos[q]];
          ins.push_back(std::move(in));
        } while (detail::next_combination(in_pos, complement.size()));

        Vector values(ins.size());
        parallel_for(ins.size(), threads, [&](std::size_t c) {
          values[c] = scratch.eval_with(ins[c], out, opts.eig_tol);
        });
        for (std::size_t c = 0; c < ins.size(); ++c) {
          if (values[c] > current + opts.strict_tol) {
            for (std::size_t col : out) {
              scratch.remove(col);
              selected[col] = false;
            }
            for (std::size_t col : ins[c]) {
              scratch.add(col);
              selected[col] = true;
            }
            current = scratch.refresh(opts.eig_tol);
            support.clear();
            for (std::size_t j = 0; j < n; ++j)
              if (selected[j]) support.push_back(j);
            ++accepted;
            improved = true;
            break;
          }
        }
        if (improved) break;
      } while (detail::next_combination(out_pos, support.size()));
    }
  }
  SolveReport r = make_report(inst, Selection(std::move(support)), Method::s_swap, accepted,
                              sw.seconds());
  return r;
}

}  // namespace sparse_spectra
