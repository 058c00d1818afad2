#include <catch2/catch_amalgamated.hpp>

#include "sparse_spectra/bruteforce.hpp"
#include "sparse_spectra/heuristics.hpp"
#include "sparse_spectra/io.hpp"
#include "sparse_spectra/problem.hpp"
#include "support/rng.hpp"

using namespace sparse_spectra;

TEST_CASE("objective on identity and the bundled correlation matrix") {
  SpcaInstance id(SymMatrix::identity(5), 3);
  auto [v, x] = objective(id, Selection({0, 2, 4}));
  CHECK(v == Catch::Approx(1.0).margin(1e-10));
  CHECK(norm2(x) == Catch::Approx(1.0).margin(1e-10));

  SpcaInstance pit(pitprops().sym(), 4);
  auto [pv, px] = objective(pit, Selection({0, 1, 8, 9}));
  CHECK(pv == Catch::Approx(2.9375).margin(1e-4));
  CHECK(px.size() == 13);
}

TEST_CASE("objective leading vector is unit, supported, sign-canonical") {
  testsupport::Rng rng(61);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 3 + rng.index(8);
    const std::size_t k = 1 + rng.index(n);
    SpcaInstance inst(testsupport::random_psd(rng, n), k);
    Selection sel = testsupport::random_selection(rng, n, k);
    auto [v, x] = objective(inst, sel);
    CHECK(norm2(x) == Catch::Approx(1.0).margin(1e-9));
    std::vector<bool> in(n, false);
    for (std::size_t i : sel.support) in[i] = true;
    double first_nonzero = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in[i]) CHECK(x[i] == 0.0);
      if (first_nonzero == 0.0 && std::abs(x[i]) > 0.0) first_nonzero = x[i];
    }
    CHECK(first_nonzero >= 0.0);
    CHECK(v >= -1e-12);
  }
}

TEST_CASE("objective of best pair matches an inline 2x2 oracle") {
  testsupport::Rng rng(67);
  SymMatrix a = testsupport::random_psd(rng, 6);
  double best_closed = -1.0, best_eig = -1.0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j) {
      // Closed-form top eigenvalue of [[aii, aij], [aij, ajj]].
      const double tr = a(i, i) + a(j, j);
      const double det = a(i, i) * a(j, j) - a(i, j) * a(i, j);
      const double lam = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
      best_closed = std::max(best_closed, lam);
      SpcaInstance inst(a, 2);
      best_eig = std::max(best_eig, objective(inst, Selection({i, j})).first);
    }
  CHECK(best_eig == Catch::Approx(best_closed).margin(1e-9));
}

TEST_CASE("gram_objective agrees with the submatrix route") {
  GramFactor basis = GramFactor::from_columns(
      {Vector{1.0, 0.0}, Vector{0.0, 1.0}});
  CHECK(gram_objective(basis, Selection({0})) == Catch::Approx(1.0).margin(1e-10));
  CHECK(gram_objective(basis, Selection({0, 1})) == Catch::Approx(1.0).margin(1e-10));

  SpcaInstance tight = gen_greedy_tight(3);
  CHECK(gram_objective(tight.factor(), Selection({3, 4, 5})) ==
        Catch::Approx(3.0).margin(1e-9));

  SpcaInstance pit(pitprops().sym(), 7);
  CHECK(gram_objective(pit.factor(), Selection({0, 1, 5, 6, 7, 8, 9})) ==
        Catch::Approx(3.9962).margin(1e-4));

  testsupport::Rng rng(71);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.index(9);
    const std::size_t k = 1 + rng.index(n);
    SpcaInstance inst(testsupport::random_psd(rng, n, 1 + rng.index(n)), k);
    Selection sel = testsupport::random_selection(rng, n, k);
    const double via_sub = objective(inst, sel).first;
    const double via_gram = gram_objective(inst.factor(), sel);
    CHECK(std::abs(via_sub - via_gram) <= 1e-8 * (1.0 + std::abs(via_sub)));
  }
}

TEST_CASE("objective is monotone under support growth") {
  testsupport::Rng rng(73);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rng.index(8);
    SpcaInstance inst(testsupport::random_psd(rng, n), 1);
    Selection small = testsupport::random_selection(rng, n, 1 + rng.index(n - 1));
    std::vector<std::size_t> grown = small.support;
    std::size_t extra = rng.index(n);
    while (std::find(grown.begin(), grown.end(), extra) != grown.end())
      extra = (extra + 1) % n;
    grown.push_back(extra);
    CHECK(objective(inst, Selection(grown)).first >=
          objective(inst, small).first - 1e-9);
  }
}

TEST_CASE("gen_greedy_tight shape and optima") {
  SpcaInstance two = gen_greedy_tight(2);
  CHECK(two.n() == 4);
  CHECK(two.factor().d == 3);
  CHECK(brute_force(two).value == Catch::Approx(2.0).margin(1e-9));

  for (std::size_t k = 2; k <= 6; ++k) {
    SpcaInstance inst = gen_greedy_tight(k);
    CHECK(inst.n() == 2 * k);
    CHECK(brute_force(inst).value == Catch::Approx(double(k)).margin(1e-9));
    CHECK(greedy(inst).value == Catch::Approx(1.0).margin(1e-9));
  }
  CHECK_THROWS_AS(gen_greedy_tight(1), ValidationError);
}

TEST_CASE("gen_sswap_tight shape, optima, and prescribed start") {
  SpcaInstance small = gen_sswap_tight(3, 1);
  CHECK(small.n() == 6);

  SpcaInstance inst = gen_sswap_tight(4, 2);
  CHECK(brute_force(inst).value == Catch::Approx(4.0).margin(1e-9));
  Selection start = sswap_tight_start(4, 2);
  CHECK(start.k() == 4);
  auto swapped = s_swap_local_search(inst, 2, start);
  CHECK(swapped.value == Catch::Approx(2.0).margin(1e-9));

  // s = k: the prescribed start is already globally optimal.
  SpcaInstance full = gen_sswap_tight(3, 3);
  auto at_full = s_swap_local_search(full, 3, sswap_tight_start(3, 3));
  CHECK(at_full.value == Catch::Approx(3.0).margin(1e-9));

  CHECK_THROWS_AS(gen_sswap_tight(3, 0), ValidationError);
  CHECK_THROWS_AS(gen_sswap_tight(3, 4), ValidationError);
  CHECK_THROWS_AS(sswap_tight_start(3, 4), ValidationError);
}

TEST_CASE("instance validation") {
  SymMatrix id = SymMatrix::identity(3);
  CHECK_THROWS_AS(SpcaInstance(id, 0), ValidationError);
  CHECK_THROWS_AS(SpcaInstance(id, 4), ValidationError);
  CHECK_NOTHROW(SpcaInstance(id, 3).with_k(1));
  CHECK_THROWS_AS(SpcaInstance(id, 3).with_k(5), ValidationError);

  SpcaInstance indef(SymMatrix(Matrix::from_rows({{1.0, 2.0}, {2.0, 1.0}})), 1);
  CHECK_THROWS_AS(indef.factor(), NotPsdError);

  SpcaInstance ok(id, 2);
  CHECK_THROWS_AS(objective(ok, Selection({0, 5})), ValidationError);
  CHECK_THROWS_AS(objective(ok, Selection(std::vector<std::size_t>{})), ValidationError);
}

TEST_CASE("make_report carries the exact submatrix value") {
  SpcaInstance pit(pitprops().sym(), 4);
  SolveReport r = make_report(pit, Selection({0, 1, 8, 9}), Method::greedy, 7, 0.25);
  CHECK(r.value == Catch::Approx(2.9375).margin(1e-4));
  CHECK(r.selection.support == std::vector<std::size_t>({0, 1, 8, 9}));
  CHECK(r.method == Method::greedy);
  CHECK(r.iterations == 7);
  CHECK(std::string(to_string(r.method)) == "greedy");
  CHECK(std::string(to_string(r.status)) == "complete");
}
