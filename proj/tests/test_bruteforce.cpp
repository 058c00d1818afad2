#include <catch2/catch_amalgamated.hpp>

#include "sparse_spectra/bruteforce.hpp"
#include "sparse_spectra/heuristics.hpp"
#include "sparse_spectra/io.hpp"
#include "sparse_spectra/spectral.hpp"
#include "support/rng.hpp"

using namespace sparse_spectra;

TEST_CASE("brute force recovers published optima") {
  SpcaInstance pit(pitprops().sym(), 5);
  SolveReport r = brute_force(pit);
  CHECK(r.value == Catch::Approx(3.4062).margin(1e-4));
  CHECK(r.selection.support == std::vector<std::size_t>({0, 1, 6, 8, 9}));
  CHECK(r.iterations == binomial(13, 5));
  REQUIRE(r.upper_bound.has_value());
  CHECK(*r.upper_bound == r.value);
}

TEST_CASE("ties resolve to the lexicographically smallest support") {
  SpcaInstance diag(SymMatrix::diagonal({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}), 2);
  SolveReport r = brute_force(diag);
  CHECK(r.value == Catch::Approx(6.0).margin(1e-10));
  CHECK(r.selection.support == std::vector<std::size_t>({0, 5}));
}

TEST_CASE("brute force finds the planted block") {
  SolveReport r = brute_force(gen_greedy_tight(4));
  CHECK(r.value == Catch::Approx(4.0).margin(1e-9));
  CHECK(r.selection.support == std::vector<std::size_t>({4, 5, 6, 7}));
}

TEST_CASE("brute force endpoints k = 1 and k = n") {
  testsupport::Rng rng(179);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rng.index(7);
    SymMatrix a = testsupport::random_psd(rng, n);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
    CHECK(brute_force(SpcaInstance(a, 1)).value == Catch::Approx(max_diag).margin(1e-12));
    CHECK(brute_force(SpcaInstance(a, n)).value ==
          Catch::Approx(largest_eigenpair(a).value).margin(1e-8));
  }
}

TEST_CASE("brute force dominates every heuristic") {
  testsupport::Rng rng(181);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 3 + rng.index(7);
    const std::size_t k = 1 + rng.index(n);
    SpcaInstance inst(testsupport::random_psd(rng, n), k);
    const double star = brute_force(inst).value;
    CHECK(star >= greedy(inst).value - 1e-9);
    CHECK(star >= local_search(inst).value - 1e-9);
  }
}

TEST_CASE("enumeration guard points to the exact solver") {
  SpcaInstance big(SymMatrix::identity(26), 13);
  try {
    brute_force(big);
    FAIL("expected GuardError");
  } catch (const GuardError& e) {
    CHECK(std::string(e.what()).find("exact") != std::string::npos);
  }
  SpcaInstance pit(pitprops().sym(), 5);
  CHECK_THROWS_AS(brute_force(pit, 4), GuardError);
  CHECK_NOTHROW(brute_force(pit, 13));
}

TEST_CASE("rectangular brute force on small instances") {
  Matrix diag = Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 3.0, 0.0}, {0.0, 0.0, 2.0}});
  SsvdReport r = brute_force_ssvd(diag, 1, 1);
  CHECK(r.value == Catch::Approx(3.0).margin(1e-10));
  CHECK(r.rows.support == std::vector<std::size_t>({1}));
  CHECK(r.cols.support == std::vector<std::size_t>({1}));
  CHECK(norm2(r.u) == Catch::Approx(1.0).margin(1e-9));
  CHECK(norm2(r.v) == Catch::Approx(1.0).margin(1e-9));

  SsvdInstance tight = gen_ssvd_tight(2, 2);
  SsvdReport t = brute_force_ssvd(tight.a, 2, 2);
  CHECK(t.value == Catch::Approx(2.0).margin(1e-9));
  CHECK(t.rows.support == std::vector<std::size_t>({2, 3}));
  CHECK(t.cols.support == std::vector<std::size_t>({2, 3}));
}

TEST_CASE("rectangular brute force matches an inline enumeration oracle") {
  testsupport::Rng rng(191);
  Matrix b = testsupport::random_rect(rng, 5, 6);
  const std::size_t k1 = 2, k2 = 2;
  double best = -1.0;
  for (std::size_t r0 = 0; r0 < 5; ++r0)
    for (std::size_t r1 = r0 + 1; r1 < 5; ++r1)
      for (std::size_t c0 = 0; c0 < 6; ++c0)
        for (std::size_t c1 = c0 + 1; c1 < 6; ++c1) {
          const std::size_t rs[] = {r0, r1}, cs[] = {c0, c1};
          Matrix gram(k2, k2);
          for (std::size_t p = 0; p < k2; ++p)
            for (std::size_t q = 0; q < k2; ++q) {
              double s = 0.0;
              for (std::size_t t = 0; t < k1; ++t) s += b(rs[t], cs[p]) * b(rs[t], cs[q]);
              gram(p, q) = s;
            }
          const double lam = reference_spectrum(SymMatrix(std::move(gram)))[0].value;
          best = std::max(best, std::sqrt(std::max(0.0, lam)));
        }
  SsvdReport r = brute_force_ssvd(b, k1, k2);
  CHECK(r.value == Catch::Approx(best).margin(1e-8));

  // u^T A v attains the reported value on the reported supports.
  double bilinear = 0.0;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 6; ++j) bilinear += r.u[i] * b(i, j) * r.v[j];
  CHECK(std::abs(bilinear) == Catch::Approx(r.value).margin(1e-7));
}

TEST_CASE("brute force is deterministic across thread counts") {
  testsupport::Rng rng(193);
  SymMatrix a = testsupport::random_psd(rng, 9);
  SpcaInstance inst(a, 3);
  SolveReport r1 = brute_force(inst, 25, 1);
  SolveReport r3 = brute_force(inst, 25, 3);
  SolveReport r7 = brute_force(inst, 25, 7);
  CHECK(r1.value == r3.value);
  CHECK(r1.value == r7.value);
  CHECK(r1.selection.support == r3.selection.support);
  CHECK(r1.selection.support == r7.selection.support);

  Matrix b = testsupport::random_rect(rng, 6, 5);
  SsvdReport s1 = brute_force_ssvd(b, 2, 2, 25, 1);
  SsvdReport s5 = brute_force_ssvd(b, 2, 2, 25, 5);
  CHECK(s1.value == s5.value);
  CHECK(s1.rows.support == s5.rows.support);
  CHECK(s1.cols.support == s5.cols.support);
}

TEST_CASE("rectangular guard rejects oversized enumerations") {
  Matrix wide(30, 30, 0.5);
  CHECK_THROWS_AS(brute_force_ssvd(wide, 3, 3), GuardError);
  CHECK_THROWS_AS(brute_force_ssvd(wide, 0, 1), ValidationError);
  CHECK_THROWS_AS(brute_force_ssvd(wide, 1, 31), ValidationError);
}
