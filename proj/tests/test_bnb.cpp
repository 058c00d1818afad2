#include <catch2/catch_amalgamated.hpp>

#include "sparse_spectra/bnb.hpp"
#include "sparse_spectra/bruteforce.hpp"
#include "sparse_spectra/heuristics.hpp"
#include "sparse_spectra/io.hpp"
#include "support/rng.hpp"

using namespace sparse_spectra;

namespace {

// Largest objective over every completion of the node's fixings; exhaustive.
double best_completion(const SpcaInstance& inst, const BnbNode& node) {
  const std::size_t n = inst.n(), k = inst.k();
  std::vector<char> one(n, 0), zero(n, 0);
  for (std::size_t i : node.fixed_one) one[i] = 1;
  for (std::size_t i : node.fixed_zero) zero[i] = 1;
  std::vector<std::size_t> base, free_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (one[i]) base.push_back(i);
    else if (!zero[i]) free_idx.push_back(i);
  }
  if (base.size() > k) return -std::numeric_limits<double>::infinity();
  const std::size_t need = k - base.size();
  if (need > free_idx.size()) return -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> combo(need);
  for (std::size_t i = 0; i < need; ++i) combo[i] = i;
  while (true) {
    std::vector<std::size_t> s = base;
    for (std::size_t pos : combo) s.push_back(free_idx[pos]);
    best = std::max(best, gram_objective(inst.factor(), Selection(std::move(s))));
    if (need == 0) break;
    std::size_t pos = need;
    bool moved = false;
    while (pos-- > 0) {
      if (combo[pos] + (need - pos) < free_idx.size()) {
        ++combo[pos];
        for (std::size_t q = pos + 1; q < need; ++q) combo[q] = combo[q - 1] + 1;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return best;
}

}  // namespace

TEST_CASE("exact solver reproduces the published sweep") {
  SymMatrix pit = pitprops().sym();
  const double expected[] = {2.9375, 3.4062, 3.7710, 3.9962, 4.0686, 4.1386, 4.1726};
  BnbOpts opts;
  opts.rel_tol = 0.0;
  for (std::size_t k = 4; k <= 10; ++k) {
    SolveReport r = solve_exact(SpcaInstance(pit, k), opts);
    CHECK(r.value == Catch::Approx(expected[k - 4]).margin(1e-4));
    CHECK(r.status == SolveStatus::complete);
    REQUIRE(r.upper_bound.has_value());
    CHECK(*r.upper_bound >= r.value - 1e-12);
    CHECK(*r.upper_bound - r.value <= 1e-6 + 1e-12);
  }
}

TEST_CASE("k = 1 on a diagonal matrix closes at the root") {
  BnbTrace trace;
  SolveReport r = solve_exact(SpcaInstance(SymMatrix::diagonal({1.0, 4.0, 2.0}), 1), {},
                              &trace);
  CHECK(r.value == Catch::Approx(4.0).margin(1e-10));
  CHECK(r.selection.support == std::vector<std::size_t>({1}));
  CHECK(trace.nodes_processed == 1);
}

TEST_CASE("exact solver agrees with brute force on random instances") {
  testsupport::Rng rng(157);
  BnbOpts opts;
  opts.rel_tol = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    SymMatrix a = testsupport::random_psd(rng, 10, 1 + rng.index(10));
    SpcaInstance inst(a, 4);
    const double star = brute_force(inst).value;
    SolveReport r = solve_exact(inst, opts);
    CHECK(r.value == Catch::Approx(star).margin(1e-6));
    CHECK(r.status == SolveStatus::complete);
  }
}

TEST_CASE("node_bound endpoints") {
  SymMatrix pit = pitprops().sym();
  GramFactor f = pivoted_cholesky(pit);

  BnbNode root;
  CHECK(node_bound(root, f, 13, 200) ==
        Catch::Approx(largest_eigenpair(pit).value).margin(1e-6));

  // Fully fixed support: the bound collapses to the restricted eigenvalue.
  Selection opt5({0, 1, 6, 8, 9});
  BnbNode fixed;
  fixed.fixed_one = opt5.support;
  CHECK(node_bound(fixed, f, 5, 10) ==
        Catch::Approx(gram_objective(f, opt5)).margin(1e-8));

  CHECK(node_bound(root, f, 5, 200) <= gap_certificate(13, 5) * 3.4062 + 1e-6);
}

TEST_CASE("branch_select scores against the relaxation eigenvector") {
  GramFactor f = pivoted_cholesky(SymMatrix::diagonal({3.0, 2.0, 1.0}));
  BnbNode root;
  Vector e0{1.0, 0.0, 0.0};
  CHECK(branch_select(root, e0, f) == 0);

  BnbNode blocked;
  blocked.fixed_zero = {0, 1};
  CHECK(branch_select(blocked, e0, f) == 2);  // only free index left

  // Degenerate scores fall back to the heaviest free column.
  CHECK(branch_select(root, Vector(3, 0.0), f) == 0);

  BnbNode all_fixed;
  all_fixed.fixed_one = {0, 2};
  all_fixed.fixed_zero = {1};
  CHECK_THROWS_AS(branch_select(all_fixed, e0, f), ValidationError);
}

TEST_CASE("child bounds never exceed the parent bound") {
  testsupport::Rng rng(163);
  for (int rep = 0; rep < 8; ++rep) {
    const std::size_t n = 8, k = 3;
    GramFactor f = pivoted_cholesky(testsupport::random_psd(rng, n));
    SaddleOpts so;
    so.max_iters = 200;
    auto [parent_bound, state] = saddle_upper_bound(f, k, so);
    const std::size_t i = branch_select(BnbNode{}, state.best_eigvec, f);
    for (bool to_one : {true, false}) {
      BnbNode child;
      (to_one ? child.fixed_one : child.fixed_zero).push_back(i);
      child.parent_mu = state.mu;
      CHECK(node_bound(child, f, k, 50) <= parent_bound + 1e-9);
    }
  }
}

TEST_CASE("trace histories are monotone and mutually consistent") {
  SymMatrix pit = pitprops().sym();
  BnbTrace trace;
  BnbOpts opts;
  opts.rel_tol = 0.0;
  SolveReport r = solve_exact(SpcaInstance(pit, 6), opts, &trace);
  REQUIRE(trace.global_bound_history.size() == trace.incumbent_history.size());
  REQUIRE(!trace.global_bound_history.empty());
  for (std::size_t t = 0; t < trace.global_bound_history.size(); ++t) {
    if (t > 0) {
      CHECK(trace.global_bound_history[t] <= trace.global_bound_history[t - 1] + 1e-9);
      CHECK(trace.incumbent_history[t] >= trace.incumbent_history[t - 1] - 1e-12);
    }
    CHECK(trace.incumbent_history[t] <= trace.global_bound_history[t] + 1e-8);
  }
  CHECK(trace.nodes_processed == r.iterations);
}

TEST_CASE("pruned nodes cannot hide a better solution") {
  testsupport::Rng rng(167);
  for (int rep = 0; rep < 5; ++rep) {
    SymMatrix a = testsupport::random_psd(rng, 10);
    SpcaInstance inst(a, 3);
    BnbTrace trace;
    BnbOpts opts;
    opts.rel_tol = 0.0;
    SolveReport r = solve_exact(inst, opts, &trace);
    for (const BnbNode& node : trace.pruned)
      CHECK(best_completion(inst, node) <= node.bound + 1e-8);
    // And no pruned subtree beats the returned optimum.
    for (const BnbNode& node : trace.pruned)
      CHECK(best_completion(inst, node) <= r.value + 1e-6 + 1e-9);
  }
}

TEST_CASE("resource limits surface as statuses with valid bounds") {
  SymMatrix pit = pitprops().sym();
  SpcaInstance inst(pit, 6);

  BnbOpts nodes;
  nodes.node_limit = 1;
  SolveReport limited = solve_exact(inst, nodes);
  CHECK(limited.status == SolveStatus::node_limit);
  REQUIRE(limited.upper_bound.has_value());
  CHECK(*limited.upper_bound >= limited.value - 1e-12);
  CHECK(limited.value >= greedy(inst).value - 1e-9);  // incumbent from the root

  BnbOpts timed;
  timed.time_limit_sec = 0.0;
  SolveReport expired = solve_exact(inst, timed);
  CHECK(expired.status == SolveStatus::time_limit);
  REQUIRE(expired.upper_bound.has_value());
  CHECK(*expired.upper_bound >= expired.value - 1e-12);
}

TEST_CASE("exact solver is deterministic across thread counts") {
  testsupport::Rng rng(173);
  SymMatrix a = testsupport::random_psd(rng, 11);
  SpcaInstance inst(a, 4);
  BnbOpts one, four;
  one.threads = 1;
  four.threads = 4;
  SolveReport r1 = solve_exact(inst, one), r4 = solve_exact(inst, four);
  CHECK(r1.value == r4.value);
  CHECK(r1.selection.support == r4.selection.support);
  CHECK(r1.iterations == r4.iterations);
}
