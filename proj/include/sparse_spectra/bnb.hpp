#pragma once

// Exact sparse PCA solver: best-bound-first branch and bound over support
// indicators. Node relaxations come from the saddle-point bound (warm-started
// from the parent's best dual point, which makes child bounds monotone),
// incumbents from greedy completion plus 1-swap local search restricted to
// the node's admissible indices, and leaves from the closed-form restricted
// eigenvalue. No external MIP solver is involved.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "sparse_spectra/bounds.hpp"
#include "sparse_spectra/heuristics.hpp"
#include "sparse_spectra/problem.hpp"

namespace sparse_spectra {

struct BnbNode {
  std::vector<std::size_t> fixed_one;   // indices forced into the support
  std::vector<std::size_t> fixed_zero;  // indices forced out
  double bound = std::numeric_limits<double>::infinity();
  Vector parent_mu;  // dual warm start inherited from the parent
  std::size_t depth = 0;
  // Solver bookkeeping beyond the core fields:
  Vector best_mu;    // dual point attaining this node's bound
  Vector eigvec;     // relaxation top eigenvector (branching scores)
  std::uint64_t id = 0;
};

struct BnbOpts {
  double abs_tol = 1e-6;
  double rel_tol = 1e-4;
  std::optional<double> time_limit_sec;
  std::optional<std::uint64_t> node_limit;
  std::uint64_t root_iters = 200;  // subgradient budget at the root
  std::uint64_t node_iters = 50;   // subgradient budget at depth >= 1
  double eig_tol = kDefaultEigTol;
  unsigned threads = 1;
};

// Optional instrumentation filled by solve_exact when a pointer is supplied.
struct BnbTrace {
  std::uint64_t nodes_processed = 0;
  std::vector<BnbNode> pruned;            // nodes discarded against the incumbent
  std::vector<double> global_bound_history;  // global upper bound at each pop
  std::vector<double> incumbent_history;     // incumbent value at each pop
};

namespace detail {

inline std::pair<double, SaddleState> node_bound_state(const BnbNode& node,
                                                       const GramFactor& f,
                                                       std::size_t k,
                                                       std::uint64_t budget,
                                                       double eig_tol = kDefaultEigTol) {
  SaddleOpts so;
  so.max_iters = budget;
  so.eig_tol = eig_tol;
  if (!node.parent_mu.empty()) so.warm_mu = node.parent_mu;
  Fixing fix{node.fixed_one, node.fixed_zero};
  return saddle_upper_bound(f, k, so, fix);
}

}  // namespace detail

// Valid upper bound on the best completion of `node` (budget = subgradient
// iterations; warm start taken from node.parent_mu when present).
inline double node_bound(const BnbNode& node, const GramFactor& f, std::size_t k,
                         std::uint64_t budget, double eig_tol = kDefaultEigTol) {
  return detail::node_bound_state(node, f, k, budget, eig_tol).first;
}

// Free index with the largest score (c_i^T v)^2 against the relaxation's top
// eigenvector; ties (within 1e-12) and an all-zero eigenvector fall back to
// the smallest index / largest column norm.
inline std::size_t branch_select(const BnbNode& node, const Vector& eigvec,
                                 const GramFactor& f) {
  std::vector<char> blocked(f.n, 0);
  for (std::size_t i : node.fixed_one) blocked[i] = 1;
  for (std::size_t i : node.fixed_zero) blocked[i] = 1;
  std::optional<std::size_t> best;
  double best_score = -1.0;
  const bool have_vec = !eigvec.empty();
  for (std::size_t i = 0; i < f.n; ++i) {
    if (blocked[i]) continue;
    double score = 0.0;
    if (have_vec) {
      const double proj = dot(f.columns[i], eigvec);
      score = proj * proj;
    }
    if (!best || score > best_score + 1e-12) {
      best = i;
      best_score = score;
    }
  }
  if (!best) throw ValidationError("branch_select called with no free index");
  if (best_score <= 1e-12) {
    // Degenerate eigenvector: prefer the heaviest free column instead.
    std::optional<std::size_t> heavy;
    double heavy_norm = -1.0;
    for (std::size_t i = 0; i < f.n; ++i) {
      if (blocked[i]) continue;
      if (!heavy || f.col_norms_sq[i] > heavy_norm + 1e-12) {
        heavy = i;
        heavy_norm = f.col_norms_sq[i];
      }
    }
    return *heavy;
  }
  return *best;
}

inline std::size_t branch_select(const BnbNode& node, const SaddleState& state,
                                 const GramFactor& f) {
  return branch_select(node, state.best_eigvec, f);
}

inline SolveReport solve_exact(const SpcaInstance& inst, const BnbOpts& opts = {},
                               BnbTrace* trace = nullptr) {
  Stopwatch sw;
  const GramFactor& f = inst.factor();
  const std::size_t n = inst.n();
  const std::size_t k = inst.k();

  HeuristicOpts hopts;
  hopts.threads = opts.threads;
  hopts.eig_tol = opts.eig_tol;

  const auto termination_slack = [&](double incumbent) {
    return std::max(opts.abs_tol, opts.rel_tol * std::abs(incumbent));
  };

  // Root incumbent: plain greedy + 1-swap local search over all indices.
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<std::size_t> best_support =
      detail::local_search_pool(f, detail::greedy_completion(f, {}, all, k, hopts), all,
                                hopts)
          .first;
  double incumbent = objective(inst, Selection(best_support), opts.eig_tol).first;

  // Root node and bound.
  std::uint64_t next_id = 0;
  BnbNode root;
  root.id = next_id++;
  {
    auto [bound, state] = detail::node_bound_state(root, f, k, opts.root_iters,
                                                   opts.eig_tol);
    root.bound = bound;
    root.best_mu = state.mu;
    root.eigvec = state.best_eigvec;
  }

  // Best-bound-first with FIFO (smallest id) tie-break.
  const auto later = [](const BnbNode& a, const BnbNode& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  };
  std::priority_queue<BnbNode, std::vector<BnbNode>, decltype(later)> open(later);
  open.push(std::move(root));

  std::uint64_t nodes = 0;
  SolveStatus status = SolveStatus::complete;
  bool stopped_on_gap = false;
  double final_ub = incumbent;

  const auto record = [&](double global_ub) {
    if (trace) {
      trace->global_bound_history.push_back(global_ub);
      trace->incumbent_history.push_back(incumbent);
    }
  };

  const auto consider_support = [&](std::vector<std::size_t> support) {
    const double val = objective(inst, Selection(support), opts.eig_tol).first;
    if (val > incumbent) {
      incumbent = val;
      best_support = std::move(support);
    }
  };

  while (!open.empty()) {
    if (opts.time_limit_sec && sw.seconds() > *opts.time_limit_sec) {
      status = SolveStatus::time_limit;
      final_ub = std::max(incumbent, open.top().bound);
      break;
    }
    if (opts.node_limit && nodes >= *opts.node_limit) {
      status = SolveStatus::node_limit;
      final_ub = std::max(incumbent, open.top().bound);
      break;
    }

    BnbNode node = open.top();
    open.pop();
    ++nodes;
    record(std::max(incumbent, node.bound));

    if (node.bound <= incumbent + termination_slack(incumbent)) {
      // Best-first order: every remaining node is bounded by this one.
      stopped_on_gap = true;
      final_ub = std::max(incumbent, node.bound);
      if (trace) {
        trace->pruned.push_back(node);
        while (!open.empty()) {
          trace->pruned.push_back(open.top());
          open.pop();
        }
      }
      break;
    }

    const std::size_t ones = node.fixed_one.size();
    const std::size_t zeros = node.fixed_zero.size();
    if (ones == k || n - zeros == k) {
      // Leaf: the support is fully determined.
      std::vector<std::size_t> support;
      if (ones == k) {
        support = node.fixed_one;
      } else {
        std::vector<char> out(n, 0);
        for (std::size_t i : node.fixed_zero) out[i] = 1;
        for (std::size_t i = 0; i < n; ++i)
          if (!out[i]) support.push_back(i);
      }
      consider_support(std::move(support));
      final_ub = std::max(incumbent, open.empty() ? incumbent : open.top().bound);
      continue;
    }

    // Node incumbent: greedy completion of the fixed-one set inside the
    // admissible pool, then restricted 1-swap local search.
    std::vector<char> banned(n, 0);
    for (std::size_t i : node.fixed_zero) banned[i] = 1;
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < n; ++i)
      if (!banned[i]) pool.push_back(i);
    consider_support(detail::local_search_pool(
                         f, detail::greedy_completion(f, node.fixed_one, pool, k, hopts),
                         pool, hopts)
                         .first);

    const std::size_t pick = branch_select(node, node.eigvec, f);
    for (int side = 0; side < 2; ++side) {
      BnbNode child;
      child.fixed_one = node.fixed_one;
      child.fixed_zero = node.fixed_zero;
      if (side == 0) {
        child.fixed_one.insert(
            std::lower_bound(child.fixed_one.begin(), child.fixed_one.end(), pick), pick);
      } else {
        child.fixed_zero.insert(
            std::lower_bound(child.fixed_zero.begin(), child.fixed_zero.end(), pick),
            pick);
      }
      child.depth = node.depth + 1;
      child.parent_mu = node.best_mu;
      child.id = next_id++;

      const std::size_t c_ones = child.fixed_one.size();
      const std::size_t c_free = n - c_ones - child.fixed_zero.size();
      if (c_ones == k || c_ones + c_free == k) {
        // Completion is forced; fold it into the incumbent instead of pushing.
        std::vector<std::size_t> support = child.fixed_one;
        if (c_ones < k) {
          std::vector<char> out(n, 0);
          for (std::size_t i : child.fixed_zero) out[i] = 1;
          for (std::size_t i : child.fixed_one) out[i] = 1;
          for (std::size_t i = 0; i < n && support.size() < k; ++i)
            if (!out[i]) support.push_back(i);
          std::sort(support.begin(), support.end());
        }
        consider_support(std::move(support));
        continue;
      }

      auto [bound, state] = detail::node_bound_state(child, f, k, opts.node_iters,
                                                     opts.eig_tol);
      child.bound = bound;
      child.best_mu = state.mu;
      child.eigvec = state.best_eigvec;
      if (bound <= incumbent + termination_slack(incumbent)) {
        if (trace) trace->pruned.push_back(std::move(child));
        continue;
      }
      open.push(std::move(child));
    }
    final_ub = std::max(incumbent, open.empty() ? incumbent : open.top().bound);
  }

  if (status == SolveStatus::complete && !stopped_on_gap && open.empty())
    final_ub = incumbent;
  if (trace) trace->nodes_processed = nodes;

  SolveReport report = make_report(inst, Selection(best_support), Method::exact, nodes,
                                   sw.seconds());
  report.status = status;
  report.set_bound(std::max(final_ub, report.value));
  return report;
}

}  // namespace sparse_spectra
