#pragma once

// Exhaustive enumeration oracles. Deliberately simple: every subset is
// evaluated from scratch, a size guard keeps the cost bounded, and winners
// are reproducible — the lexicographically smallest support whose value lies
// within 1e-9 of the maximum. Determinism is independent of the worker count
// because the scan runs in two passes: an order-independent max reduction,
// then an order-independent lexicographic-minimum filter.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sparse_spectra/heuristics.hpp"
#include "sparse_spectra/parallel.hpp"
#include "sparse_spectra/problem.hpp"
#include "sparse_spectra/ssvd.hpp"

namespace sparse_spectra {

namespace detail {

constexpr double kBruteTieTol = 1e-9;

// Lexicographic combination at `rank` among all k-subsets of {0..n-1}.
inline std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k,
                                                   std::uint64_t rank) {
  std::vector<std::size_t> combo(k);
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    for (std::size_t v = next;; ++v) {
      const std::uint64_t block = binomial(n - 1 - v, k - 1 - pos);
      if (rank < block) {
        combo[pos] = v;
        next = v + 1;
        break;
      }
      rank -= block;
    }
  }
  return combo;
}

inline double submatrix_lambda_max(const SymMatrix& a,
                                   const std::vector<std::size_t>& s, double tol) {
  Matrix sub(s.size(), s.size());
  for (std::size_t p = 0; p < s.size(); ++p)
    for (std::size_t q = 0; q < s.size(); ++q) sub(p, q) = a(s[p], s[q]);
  return power_iteration(sub, nullptr, tol).value;
}

inline std::uint64_t guard_limit(std::size_t size_guard) {
  return binomial(size_guard, size_guard / 2);
}

}  // namespace detail

inline SolveReport brute_force(const SpcaInstance& inst, std::size_t size_guard = 25,
                               unsigned threads = 1, double eig_tol = kDefaultEigTol) {
  Stopwatch sw;
  const std::size_t n = inst.n(), k = inst.k();
  const std::uint64_t total = binomial(n, k);
  const std::uint64_t limit = detail::guard_limit(size_guard);
  if (total > limit)
    throw GuardError("brute force would enumerate " + std::to_string(total) +
                     " supports (guard " + std::to_string(limit) +
                     "); use the exact branch-and-bound solver instead");
  const unsigned workers = resolve_threads(threads);
  const SymMatrix& a = inst.matrix();

  // Pass 1: maximum value (order independent).
  std::vector<double> worker_max(workers, -std::numeric_limits<double>::infinity());
  {
    const std::uint64_t chunk = (total + workers - 1) / workers;
    parallel_for(workers, workers, [&](std::size_t w) {
      const std::uint64_t lo = w * chunk;
      const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
      if (lo >= hi) return;
      std::vector<std::size_t> combo = detail::unrank_combination(n, k, lo);
      for (std::uint64_t r = lo; r < hi; ++r) {
        const double val = detail::submatrix_lambda_max(a, combo, eig_tol);
        if (val > worker_max[w]) worker_max[w] = val;
        if (r + 1 < hi) detail::next_combination(combo, n);
      }
    });
  }
  const double best = *std::max_element(worker_max.begin(), worker_max.end());

  // Pass 2: lexicographically smallest support within the tie window.
  std::vector<std::optional<std::vector<std::size_t>>> worker_win(workers);
  {
    const std::uint64_t chunk = (total + workers - 1) / workers;
    parallel_for(workers, workers, [&](std::size_t w) {
      const std::uint64_t lo = w * chunk;
      const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
      if (lo >= hi) return;
      std::vector<std::size_t> combo = detail::unrank_combination(n, k, lo);
      for (std::uint64_t r = lo; r < hi; ++r) {
        if (!worker_win[w] &&
            detail::submatrix_lambda_max(a, combo, eig_tol) >= best - detail::kBruteTieTol)
          worker_win[w] = combo;  // first hit in a lex-ordered scan is the stripe min
        if (r + 1 < hi) detail::next_combination(combo, n);
      }
    });
  }
  std::optional<std::vector<std::size_t>> winner;
  for (const auto& cand : worker_win)
    if (cand && (!winner || *cand < *winner)) winner = cand;
  if (!winner) throw ValidationError("brute force found no candidate support");

  SolveReport report = make_report(inst, Selection(*winner), Method::brute_force, total,
                                   sw.seconds());
  report.set_bound(report.value);
  return report;
}

inline SsvdReport brute_force_ssvd(const Matrix& a, std::size_t k1, std::size_t k2,
                                   std::size_t size_guard = 25, unsigned threads = 1,
                                   double eig_tol = kDefaultEigTol) {
  Stopwatch sw;
  const SsvdInstance inst(a, k1, k2);
  const std::size_t m = a.rows(), n = a.cols();
  const std::uint64_t rows_total = binomial(m, k1);
  const std::uint64_t cols_total = binomial(n, k2);
  const std::uint64_t limit = detail::guard_limit(size_guard);
  if (rows_total > limit / std::max<std::uint64_t>(cols_total, 1) ||
      rows_total * cols_total > limit)
    throw GuardError("ssvd brute force would enumerate " +
                     std::to_string(rows_total) + " x " + std::to_string(cols_total) +
                     " support pairs (guard " + std::to_string(limit) + ")");
  const std::uint64_t total = rows_total * cols_total;
  const unsigned workers = resolve_threads(threads);

  const auto value_at = [&](const std::vector<std::size_t>& rs,
                            const std::vector<std::size_t>& cs) {
    Matrix sub(k1, k2);
    for (std::size_t p = 0; p < k1; ++p)
      for (std::size_t q = 0; q < k2; ++q) sub(p, q) = a(rs[p], cs[q]);
    return largest_singular_triplet(sub, eig_tol).sigma;
  };
  const auto pair_at = [&](std::uint64_t rank) {
    return std::make_pair(detail::unrank_combination(m, k1, rank / cols_total),
                          detail::unrank_combination(n, k2, rank % cols_total));
  };

  std::vector<double> worker_max(workers, -std::numeric_limits<double>::infinity());
  const std::uint64_t chunk = (total + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
    for (std::uint64_t r = lo; r < hi; ++r) {
      const auto [rs, cs] = pair_at(r);
      const double val = value_at(rs, cs);
      if (val > worker_max[w]) worker_max[w] = val;
    }
  });
  const double best = *std::max_element(worker_max.begin(), worker_max.end());

  // The scan order of `rank` is lexicographic in (S1, S2), so the first hit
  // per stripe is that stripe's lexicographic minimum.
  std::vector<std::optional<std::uint64_t>> worker_win(workers);
  parallel_for(workers, workers, [&](std::size_t w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
    for (std::uint64_t r = lo; r < hi && !worker_win[w]; ++r) {
      const auto [rs, cs] = pair_at(r);
      if (value_at(rs, cs) >= best - detail::kBruteTieTol) worker_win[w] = r;
    }
  });
  std::optional<std::uint64_t> winner;
  for (const auto& cand : worker_win)
    if (cand && (!winner || *cand < *winner)) winner = cand;
  if (!winner) throw ValidationError("ssvd brute force found no candidate");

  const auto [rs, cs] = pair_at(*winner);
  SsvdReport rep = detail::make_ssvd_report(inst, Selection(rs), Selection(cs),
                                            Method::brute_force, total, sw.seconds(),
                                            eig_tol);
  return rep;
}

}  // namespace sparse_spectra
