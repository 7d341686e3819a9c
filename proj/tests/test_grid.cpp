#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lasalt/ops.hpp"

using namespace lasalt;
using testutil::fd_deriv;
using testutil::random_bandlimited;

namespace {

ScalarField sin_x(const GridPtr& g) {
  ScalarField f(g);
  for (int j = 0; j < g->n(); ++j)
    for (int i = 0; i < g->n(); ++i) f.at(i, j) = std::sin(g->x(i));
  return f;
}

ScalarField cos_x(const GridPtr& g) {
  ScalarField f(g);
  for (int j = 0; j < g->n(); ++j)
    for (int i = 0; i < g->n(); ++i) f.at(i, j) = std::cos(g->x(i));
  return f;
}

}  // namespace

TEST_CASE("real-spectral round trip is the identity") {
  auto grid = make_grid(32);
  ScalarField f = random_bandlimited(grid, 15, 11);
  ScalarField g(grid);
  g.v = grid->to_real(grid->to_spectral(f.v));
  CHECK(rel_l2_error(g, f) < 1e-12);
}

TEST_CASE("Parseval: grid-sum norm equals spectral norm") {
  auto grid = make_grid(48);
  ScalarField f = random_bandlimited(grid, 20, 7);
  const double a = l2_norm(f);
  const double b = sobolev_norm(f, 0);  // order 0: pure coefficient sum
  CHECK(std::abs(a - b) < 1e-12 * a);
}

TEST_CASE("gradient of sin x") {
  auto grid = make_grid(32);
  OneFormField g = gradient(sin_x(grid));
  ScalarField gx(grid);
  gx.v = g.c[0];
  CHECK(rel_l2_error(gx, cos_x(grid)) < 1e-12);
  double my = 0.0;
  for (double e : g.c[1]) my = std::max(my, std::abs(e));
  CHECK(my < 1e-12);
}

TEST_CASE("gradient of a constant is zero") {
  auto grid = make_grid(16);
  ScalarField f(grid);
  f.fill(3.25);
  OneFormField g = gradient(f);
  CHECK(linf_norm(g) < 1e-13);
}

TEST_CASE("spectral derivative matches 4th-order finite differences") {
  auto grid = make_grid(128);
  ScalarField f = random_bandlimited(grid, 8, 3);
  for (int axis : {0, 1}) {
    ScalarField ds = deriv(f, axis);
    ScalarField dfd = fd_deriv(f, axis);
    // the stencil truncation floor for kmax=8 on n=128 is (kh)^4/30 ~ 8e-4
    CHECK(rel_l2_error(dfd, ds) < 2e-3);
  }
}

TEST_CASE("divergence of a grad-perp field vanishes") {
  auto grid = make_grid(32);
  VectorField v = testutil::random_divfree(grid, 8, 5);
  CHECK(linf_norm(divergence(v)) < 1e-10);
}

TEST_CASE("divergence of (cos x, 0)") {
  auto grid = make_grid(32);
  VectorField v(grid);
  v.c[0] = cos_x(grid).v;
  ScalarField d = divergence(v);
  ScalarField ref = sin_x(grid);
  ref.scale(-1.0);
  CHECK(rel_l2_error(d, ref) < 1e-12);
}

TEST_CASE("curl of (-sin y, 0) is cos y") {
  auto grid = make_grid(32);
  VectorField v(grid);
  ScalarField ref(grid);
  for (int j = 0; j < grid->n(); ++j)
    for (int i = 0; i < grid->n(); ++i) {
      v.c[0][std::size_t(j) * grid->n() + i] = -std::sin(grid->y(j));
      ref.at(i, j) = std::cos(grid->y(j));
    }
  CHECK(rel_l2_error(curl2d(v), ref) < 1e-12);
}

TEST_CASE("curl of a pure gradient vanishes") {
  auto grid = make_grid(32);
  OneFormField g = gradient(random_bandlimited(grid, 10, 17));
  CHECK(linf_norm(curl2d(as_vector(g))) < 1e-12);
}

TEST_CASE("biot_savart of sin x") {
  auto grid = make_grid(32);
  VectorField v = biot_savart(sin_x(grid));
  double mx = 0.0;
  for (double e : v.c[0]) mx = std::max(mx, std::abs(e));
  CHECK(mx < 1e-12);
  ScalarField v2(grid);
  v2.v = v.c[1];
  ScalarField ref = cos_x(grid);
  ref.scale(-1.0);
  CHECK(rel_l2_error(v2, ref) < 1e-12);
}

TEST_CASE("biot_savart of zero is zero") {
  auto grid = make_grid(16);
  CHECK(linf_norm(biot_savart(ScalarField(grid))) == 0.0);
}

TEST_CASE("curl2d after biot_savart is the identity") {
  auto grid = make_grid(48);
  for (std::uint64_t s : {1, 2, 3}) {
    ScalarField w = random_bandlimited(grid, 12, s);
    CHECK(rel_l2_error(curl2d(biot_savart(w)), w) < 1e-12);
  }
}

TEST_CASE("biot_savart output is divergence-free") {
  auto grid = make_grid(48);
  ScalarField w = random_bandlimited(grid, 12, 9);
  CHECK(linf_norm(divergence(biot_savart(w))) < 1e-12);
}

TEST_CASE("biot_savart rejects non-mean-free vorticity") {
  auto grid = make_grid(16);
  ScalarField w(grid);
  w.fill(1.0);
  CHECK_THROWS_AS(biot_savart(w), NonZeroMean);
}

TEST_CASE("Biot-Savart gain: H^{k+1} of V bounded by H^k of omega") {
  auto grid = make_grid(32);
  for (int k : {0, 1}) {
    double worst = 0.0;
    for (std::uint64_t s = 1; s <= 100; ++s) {
      ScalarField w = random_bandlimited(grid, 10, 1000 + s);
      VectorField v = biot_savart(w);
      const double ratio = sobolev_norm(v, k + 1) / sobolev_norm(w, k);
      worst = std::max(worst, ratio);
    }
    // C_k for the torus: the |k|=1 modes dominate, giving sqrt(2) at k=0.
    CHECK(worst < 3.0);
  }
}

TEST_CASE("poisson_solve eigenfunction and round trip") {
  auto grid = make_grid(32);
  ScalarField src = sin_x(grid);
  ScalarField p = poisson_solve(src);
  CHECK(rel_l2_error(p, src) < 1e-12);  // -Lap sin x = sin x

  CHECK(linf_norm(poisson_solve(ScalarField(grid))) == 0.0);

  ScalarField s2 = random_bandlimited(grid, 9, 21);
  ScalarField p2 = poisson_solve(s2);
  // apply -Laplace spectrally and compare
  ScalarField lap(grid);
  lap.v = deriv(deriv(p2, 0), 0).v;
  lap.axpy(1.0, deriv(deriv(p2, 1), 1));
  lap.scale(-1.0);
  CHECK(rel_l2_error(lap, s2) < 1e-12);

  ScalarField bad(grid);
  bad.fill(0.5);
  CHECK_THROWS_AS(poisson_solve(bad), NonZeroMean);
}

TEST_CASE("dealias_product of sin x with itself") {
  auto grid = make_grid(32);
  ScalarField p = dealias_product(sin_x(grid), sin_x(grid));
  ScalarField ref(grid);
  for (int j = 0; j < grid->n(); ++j)
    for (int i = 0; i < grid->n(); ++i)
      ref.at(i, j) = 0.5 - 0.5 * std::cos(2.0 * grid->x(i));
  CHECK(rel_l2_error(p, ref) < 1e-12);
}

TEST_CASE("dealias_product is exact for well-separated bands") {
  auto grid = make_grid(48);  // n/6 = 8
  ScalarField f = random_bandlimited(grid, 4, 31);
  ScalarField g = random_bandlimited(grid, 4, 32);
  ScalarField p = dealias_product(f, g);
  ScalarField exact(grid);
  for (std::size_t k = 0; k < exact.v.size(); ++k) exact.v[k] = f.v[k] * g.v[k];
  CHECK(rel_l2_error(p, exact) < 1e-12);
}

TEST_CASE("dealiased high-mode square has no spurious low-k energy") {
  const int n = 32;
  auto grid = make_grid(n);
  auto fine = make_grid(2 * n);
  const int m = 9;  // inside the cut, but 2m is not
  ScalarField f(grid), ff(fine);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) f.at(i, j) = std::sin(m * grid->x(i));
  for (int j = 0; j < 2 * n; ++j)
    for (int i = 0; i < 2 * n; ++i) ff.at(i, j) = std::sin(m * fine->x(i));

  ScalarField p = dealias_product(f, f);
  // reference: exact product on the fine grid, truncated to the coarse band
  ScalarField pf(fine);
  for (std::size_t k = 0; k < pf.v.size(); ++k) pf.v[k] = ff.v[k] * ff.v[k];
  auto cf = fine->to_spectral(pf.v);
  auto cp = grid->to_spectral(p.v);
  const int cut = grid->dealias_cut();
  double err = 0.0, tot = 0.0;
  for (int jy = 0; jy < n; ++jy) {
    const int my = grid->wavenumber(jy);
    for (int ix = 0; ix <= n / 2; ++ix) {
      if (std::abs(my) > cut || ix > cut) continue;
      const int fy = my >= 0 ? my : my + 2 * n;
      const auto ref = cf[std::size_t(fy) * (n + 1) + ix] / 4.0;  // n^2 scale
      const auto got = cp[std::size_t(jy) * (n / 2 + 1) + ix];
      err += std::norm(got - ref);
      tot += std::norm(ref) + 1.0;
    }
  }
  CHECK(std::sqrt(err / tot) < 1e-10);

  // and the naive product does alias into low modes; the dealiased one not
  ScalarField naive(grid);
  for (std::size_t k = 0; k < naive.v.size(); ++k) naive.v[k] = f.v[k] * f.v[k];
  auto cn = grid->to_spectral(naive.v);
  // cos(2m x) on the coarse grid folds onto |2m - n| = 14
  const std::size_t lowmode = std::size_t(0) * (n / 2 + 1) + 14;
  CHECK(std::abs(cn[lowmode]) > 1.0);   // aliased energy present
  CHECK(std::abs(cp[lowmode]) < 1e-10);  // removed by the mask
}
