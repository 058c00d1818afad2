#include <catch2/catch_amalgamated.hpp>

#include "sparse_spectra/bounds.hpp"
#include "sparse_spectra/bruteforce.hpp"
#include "sparse_spectra/io.hpp"
#include "sparse_spectra/spectral.hpp"
#include "support/rng.hpp"

using namespace sparse_spectra;

namespace {

Vector indicator(std::size_t n, const Selection& sel) {
  Vector z(n, 0.0);
  for (std::size_t i : sel.support) z[i] = 1.0;
  return z;
}

}  // namespace

TEST_CASE("h1_binary closed form on small cases") {
  GramFactor id2 = pivoted_cholesky(SymMatrix::identity(2));
  auto [v0, cut0] = h1_binary(id2, Selection({0}));
  CHECK(v0 == Catch::Approx(2.0).margin(1e-9));
  CHECK(cut0.nu == Catch::Approx(1.0).margin(1e-9));

  SymMatrix pit = pitprops().sym();
  GramFactor f = pivoted_cholesky(pit);
  Selection all({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  auto [vall, cutall] = h1_binary(f, all);
  const double lmax = largest_eigenpair(pit).value;
  CHECK(vall == Catch::Approx(lmax).margin(1e-8));
  CHECK(cutall.nu == Catch::Approx(lmax).margin(1e-8));

  Selection opt7({0, 1, 5, 6, 7, 8, 9});
  auto [v7, cut7] = h1_binary(f, opt7);
  CHECK(cut7.nu == Catch::Approx(3.9962).margin(1e-4));
  // Correlation caps are all 1, six indices sit outside the support.
  CHECK(v7 == Catch::Approx(cut7.nu + 6.0).margin(1e-6));
}

TEST_CASE("h1_binary cuts dominate every feasible support") {
  testsupport::Rng rng(113);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 3 + rng.index(7);
    const std::size_t k = 1 + rng.index(n);
    GramFactor f = pivoted_cholesky(testsupport::random_psd(rng, n));
    auto [value, cut] = h1_binary(f, testsupport::random_selection(rng, n, k));
    for (int probe = 0; probe < 10; ++probe) {
      Selection other = testsupport::random_selection(rng, n, 1 + rng.index(n));
      const double w = gram_objective(f, other);
      CHECK(w <= evaluate(cut, indicator(n, other)) + 1e-8);
    }
  }
}

TEST_CASE("h1_bar endpoints") {
  testsupport::Rng rng(127);
  const std::size_t n = 7;
  SymMatrix a = testsupport::random_psd(rng, n);
  GramFactor f = pivoted_cholesky(a);
  const double lmax = largest_eigenpair(a).value;

  Vector z(n, 0.0);
  for (auto& v : z) v = rng.unit();
  Vector zero(n, 0.0);
  auto at_zero = h1_bar_value_and_subgradients(f, z, zero);
  CHECK(at_zero.value == Catch::Approx(lmax).margin(1e-8));

  auto at_caps = h1_bar_value_and_subgradients(f, z, f.col_norms_sq);
  CHECK(at_caps.value == Catch::Approx(dot(f.col_norms_sq, z)).margin(1e-8));
  CHECK(at_caps.grad_z == f.col_norms_sq);

  // Binary z with the complementary-caps dual recovers the restricted value.
  for (int rep = 0; rep < 10; ++rep) {
    Selection sel = testsupport::random_selection(rng, n, 1 + rng.index(n));
    Vector zi = indicator(n, sel);
    Vector mu = f.col_norms_sq;
    for (std::size_t i : sel.support) mu[i] = 0.0;
    auto r = h1_bar_value_and_subgradients(f, zi, mu);
    CHECK(r.value == Catch::Approx(gram_objective(f, sel)).margin(1e-8));
  }

  CHECK_THROWS_AS(h1_bar_value_and_subgradients(f, Vector(n, 2.0), zero), ValidationError);
  Vector bad_mu(n, 0.0);
  bad_mu[0] = f.col_norms_sq[0] + 1.0;
  CHECK_THROWS_AS(h1_bar_value_and_subgradients(f, z, bad_mu), ValidationError);
}

TEST_CASE("h1_bar dual subgradient matches central differences") {
  testsupport::Rng rng(131);
  int checked = 0;
  for (int rep = 0; rep < 12 && checked < 6; ++rep) {
    const std::size_t n = 4 + rng.index(4);
    GramFactor f = pivoted_cholesky(testsupport::random_psd(rng, n));
    Vector z(n), mu(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = rng.unit();
      mu[i] = f.col_norms_sq[i] * rng.uniform(0.3, 0.7);
    }
    // Skip near-degenerate top eigenvalues where the map is nonsmooth.
    Matrix m(f.d, f.d);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 1.0 - mu[i] / f.col_norms_sq[i];
      for (std::size_t a = 0; a < f.d; ++a)
        for (std::size_t b = 0; b < f.d; ++b)
          m(a, b) += w * f.columns[i][a] * f.columns[i][b];
    }
    auto spec = reference_spectrum(SymMatrix(std::move(m)));
    if (spec.size() >= 2 && spec[0].value - spec[1].value < 1e-3) continue;
    ++checked;

    auto r = h1_bar_value_and_subgradients(f, z, mu);
    const double h = 1e-5;
    for (std::size_t i = 0; i < n; ++i) {
      if (f.col_norms_sq[i] < 1e-2) continue;  // keep mu +/- h inside the box
      Vector up = mu, dn = mu;
      up[i] += h;
      dn[i] -= h;
      const double fup = h1_bar_value_and_subgradients(f, z, up).value;
      const double fdn = h1_bar_value_and_subgradients(f, z, dn).value;
      CHECK(std::abs((fup - fdn) / (2.0 * h) - r.grad_mu[i]) <= 1e-4);
    }
  }
  CHECK(checked >= 3);
}

TEST_CASE("capped simplex projection") {
  Vector spread{10.0, 0.0, -10.0};
  Vector one = project_capped_simplex(spread, 1);
  CHECK(one[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(one[1] == Catch::Approx(0.0).margin(1e-9));
  CHECK(one[2] == Catch::Approx(0.0).margin(1e-9));
  Vector two = project_capped_simplex(spread, 2);
  CHECK(two[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(two[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(two[2] == Catch::Approx(0.0).margin(1e-9));
  CHECK(project_capped_simplex(spread, 0) == Vector(3, 0.0));
  CHECK(project_capped_simplex(spread, 3) == Vector(3, 1.0));
  CHECK_THROWS_AS(project_capped_simplex(spread, 4), ValidationError);

  testsupport::Rng rng(137);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.index(10);
    const std::size_t budget = 1 + rng.index(n);
    Vector v(n);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    Vector p = project_capped_simplex(v, budget);
    double sum = 0.0;
    for (double x : p) {
      CHECK(x >= -1e-9);
      CHECK(x <= 1.0 + 1e-9);
      sum += x;
    }
    CHECK(sum == Catch::Approx(double(budget)).margin(1e-8));
    // No feasible point lies closer to v (projection optimality).
    double pd = 0.0;
    for (std::size_t i = 0; i < n; ++i) pd += (p[i] - v[i]) * (p[i] - v[i]);
    for (int probe = 0; probe < 10; ++probe) {
      Vector q(n);
      for (auto& x : q) x = rng.unit();
      Vector qf = project_capped_simplex(q, budget);  // feasible competitor
      double qd = 0.0;
      for (std::size_t i = 0; i < n; ++i) qd += (qf[i] - v[i]) * (qf[i] - v[i]);
      CHECK(pd <= qd + 1e-7);
    }
  }
}

TEST_CASE("saddle bound brackets the optimum on the bundled matrix") {
  SymMatrix pit = pitprops().sym();
  GramFactor f = pivoted_cholesky(pit);
  auto [bound, state] = saddle_upper_bound(f, 5);
  CHECK(bound >= 3.4062 - 1e-6);
  CHECK(bound <= gap_certificate(13, 5) * 3.4062 + 1e-6);
  CHECK(bound >= 3.4868 - 1e-3);

  double zsum = 0.0;
  for (double zi : state.z) {
    CHECK(zi >= -1e-9);
    CHECK(zi <= 1.0 + 1e-9);
    zsum += zi;
  }
  CHECK(zsum == Catch::Approx(5.0).margin(1e-8));

  // k = n collapses to the plain top eigenvalue.
  auto [full, fs] = saddle_upper_bound(f, 13);
  CHECK(full == Catch::Approx(largest_eigenpair(pit).value).margin(1e-4));
}

TEST_CASE("saddle bound sandwiches brute force on random instances") {
  testsupport::Rng rng(139);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 8;
    const std::size_t k = 3;
    SymMatrix a = testsupport::random_psd(rng, n);
    GramFactor f = pivoted_cholesky(a);
    const double star = brute_force(SpcaInstance(a, k)).value;
    auto [bound, state] = saddle_upper_bound(f, k);
    CHECK(bound >= star - 1e-8);
    CHECK(bound <= gap_certificate(n, k) * star + 1e-6);
  }
}

TEST_CASE("saddle bound is non-increasing in the iteration budget") {
  testsupport::Rng rng(149);
  GramFactor f = pivoted_cholesky(testsupport::random_psd(rng, 9));
  double prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t iters : {1ull, 5ull, 50ull, 500ull, 2000ull}) {
    SaddleOpts opts;
    opts.max_iters = iters;
    auto [bound, state] = saddle_upper_bound(f, 3, opts);
    CHECK(bound <= prev + 1e-12);
    prev = bound;
  }
}

TEST_CASE("fixing indices never loosens a warm-started bound") {
  testsupport::Rng rng(151);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 7, k = 3;
    GramFactor f = pivoted_cholesky(testsupport::random_psd(rng, n));
    auto [parent, pstate] = saddle_upper_bound(f, k);
    SaddleOpts warm;
    warm.warm_mu = pstate.mu;
    Fixing fix;
    if (rep % 2 == 0)
      fix.ones.push_back(rng.index(n));
    else
      fix.zeros.push_back(rng.index(n));
    auto [child, cstate] = saddle_upper_bound(f, k, warm, fix);
    CHECK(child <= parent + 1e-9);
  }
}

TEST_CASE("saddle fixing validation and degenerate columns") {
  GramFactor f = pivoted_cholesky(SymMatrix::identity(5));
  Fixing toomany;
  toomany.ones = {0, 1, 2, 3};
  CHECK_THROWS_AS(saddle_upper_bound(f, 3, {}, toomany), ValidationError);
  Fixing overlap;
  overlap.ones = {1};
  overlap.zeros = {1};
  CHECK_THROWS_AS(saddle_upper_bound(f, 3, {}, overlap), ValidationError);
  CHECK_THROWS_AS(saddle_upper_bound(f, 0), ValidationError);
  CHECK_THROWS_AS(saddle_upper_bound(f, 6), ValidationError);

  // A zero column must not poison the bound with NaNs.
  std::vector<Vector> cols = {Vector{1.0, 0.0}, Vector{0.0, 0.0}, Vector{0.0, 2.0}};
  GramFactor zf = GramFactor::from_columns(std::move(cols));
  auto [bound, state] = saddle_upper_bound(zf, 2);
  CHECK(std::isfinite(bound));
  CHECK(bound >= 4.0 - 1e-8);  // columns 0 and 2 give diag(1, 4)
}

TEST_CASE("gap certificate values") {
  CHECK(gap_certificate(13, 5) == Catch::Approx(2.6).margin(1e-12));
  CHECK(gap_certificate(13, 1) == Catch::Approx(1.0).margin(1e-12));
  CHECK(gap_certificate(13, 13) == Catch::Approx(1.0).margin(1e-12));
  CHECK(gap_certificate(4, 2) == Catch::Approx(2.0).margin(1e-12));
  CHECK_THROWS_AS(gap_certificate(4, 5), ValidationError);
  CHECK_THROWS_AS(gap_certificate(4, 0), ValidationError);
}
