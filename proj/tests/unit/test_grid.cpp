#include <doctest.h>

#include <cmath>
#include <random>

#include "chanlab/basis.hpp"
#include "chanlab/derivatives.hpp"
#include "chanlab/elliptic.hpp"
#include "chanlab/interpolate.hpp"
#include "chanlab/stencils.hpp"

using namespace chanlab;

namespace {

double max_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }

ScalarField mode(const ChannelGrid& g, int k, int l) {
  const double L = g.height;
  return ScalarField::sample(g, [=](double x, double y) { return std::sin(k * x) * std::sin(l * kPi * y / L); });
}

double rate(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace

TEST_CASE("make_grid spacings and preconditions") {
  const ChannelGrid g = make_grid(64, 65, 8.0);
  CHECK(g.dx == doctest::Approx(kTwoPi / 64).epsilon(1e-15));
  CHECK(g.dy == 0.125);
  CHECK(make_grid(4, 4, 1.0).dy == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(make_grid(63, 65, 8.0), PreconditionError);
  CHECK_THROWS_AS(make_grid(64, 3, 8.0), PreconditionError);
  CHECK_THROWS_AS(make_grid(64, 65, 0.0), PreconditionError);
  CHECK_THROWS_AS(make_grid(64, 65, -1.0), PreconditionError);
}

TEST_CASE("stream functions validate their wall rows") {
  const ChannelGrid g = make_grid(16, 17, 4.0);
  ScalarField f = mode(g, 1, 1);
  CHECK(StreamFunction::dirichlet(f).is_dirichlet());
  f(3, 0) = 0.1;
  CHECK_THROWS_AS(StreamFunction::dirichlet(f), PreconditionError);
  ScalarField flux(g, 0.0);
  for (int i = 0; i < g.nx; ++i) flux(i, g.ny - 1) = -0.5;
  CHECK(StreamFunction::from_field(flux).flux() == -0.5);
  CHECK_THROWS_AS(StreamFunction::dirichlet(flux), PreconditionError);
}

TEST_CASE("partial_derivative: spectral in x, high order in y") {
  const ChannelGrid g = make_grid(32, 65, 8.0);
  const double L = g.height;
  const ScalarField f = ScalarField::sample(g, [=](double x, double y) { return std::sin(x) * y * (L - y); });
  const ScalarField fx = ScalarField::sample(g, [=](double x, double y) { return std::cos(x) * y * (L - y); });
  CHECK(max_diff(partial_derivative(f, 1, 0), fx) <= 1e-10);
  CHECK(max_diff(partial_derivative(f, 0, 0), f) == 0.0);
  CHECK_THROWS_AS(partial_derivative(f, 4, 3), PreconditionError);
  CHECK_THROWS_AS(partial_derivative(f, -1, 0), PreconditionError);

  // (0,2) of sin(2x) sin(pi y / L) against -(pi/L)^2 f, at least 4th order in dy.
  std::vector<double> err;
  for (int ny : {33, 65, 129}) {
    const ChannelGrid h = make_grid(16, ny, 8.0);
    const ScalarField m = mode(h, 2, 1);
    err.push_back(max_diff(partial_derivative(m, 0, 2), -std::pow(kPi / 8.0, 2) * m));
  }
  CAPTURE(err[0]);
  CAPTURE(err[1]);
  CAPTURE(err[2]);
  CHECK(rate(err[0], err[1]) >= 3.8);
  CHECK(rate(err[1], err[2]) >= 3.8);
}

TEST_CASE("Dirichlet inverse Laplacian") {
  const ChannelGrid g = make_grid(32, 65, 8.0);
  const double L = g.height;
  const ScalarField f = mode(g, 1, 1);
  const ScalarField rhs = -(1.0 + std::pow(kPi / L, 2)) * f;
  CHECK(max_diff(dirichlet_inverse_laplacian(rhs).field(), f) <= 1e-7);
  CHECK(dirichlet_inverse_laplacian(ScalarField(g, 0.0)).field().max_abs() == 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  ScalarField r(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 1; j < g.ny - 1; ++j) r(i, j) = n(rng) * std::exp(-g.y(j));
  const StreamFunction back = dirichlet_inverse_laplacian(laplacian(r));
  CHECK(max_diff(back.field(), r) <= 1e-8 * r.max_abs());

  // Residual on interior rows.
  const ScalarField sol = dirichlet_inverse_laplacian(r).field();
  const ScalarField lap = laplacian(sol);
  double res = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 1; j < g.ny - 1; ++j) res = std::max(res, std::abs(lap(i, j) - r(i, j)));
  CHECK(res <= 1e-8 * r.max_abs());
}

TEST_CASE("Dirichlet inverse is self-adjoint up to discretization error") {
  // Pointwise closures are not summation-by-parts, so <D^-1 f, g> = <f, D^-1 g>
  // holds to truncation error; check the size at 128x129 and the decay rate.
  auto defect = [](int n) {
    const ChannelGrid g = make_grid(n, n + 1, 8.0);
    std::mt19937_64 rng(4);
    const ScalarField f = random_stream(g, rng).field();
    const ScalarField h = random_stream(g, rng).field();
    const double a = inner_product_L2(dirichlet_inverse_laplacian(f).field(), h);
    const double b = inner_product_L2(f, dirichlet_inverse_laplacian(h).field());
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
  };
  const double d32 = defect(32), d64 = defect(64), d128 = defect(128);
  CAPTURE(d32);
  CAPTURE(d64);
  CAPTURE(d128);
  CHECK(d128 <= 1e-6);
  CHECK(rate(d32, d64) >= 3.0);
  CHECK(rate(d64, d128) >= 3.0);
}

TEST_CASE("inner products and boundary integrals") {
  const ChannelGrid g = make_grid(32, 65, 8.0);
  const ScalarField f = mode(g, 1, 1);
  CHECK(inner_product_L2(f, f) == doctest::Approx(kPi * 8.0 / 2.0).epsilon(1e-6));
  CHECK(inner_product_L2(ScalarField(g, 0.0), ScalarField(g, 0.0)) == 0.0);
  CHECK(boundary_integral_x(f) == 0.0);
  const ScalarField c = ScalarField::sample(g, [](double x, double) { return 2.0 + std::cos(x); });
  CHECK(boundary_integral_x(c) == doctest::Approx(2.0 * kTwoPi).epsilon(1e-14));
  CHECK_THROWS_AS(inner_product_L2(f, ScalarField(make_grid(16, 65, 8.0))), PreconditionError);

  // x integration by parts is exact: no x-boundary.
  const ScalarField a = ScalarField::sample(g, [](double x, double y) { return std::sin(3 * x + y) * std::exp(-y); });
  const ScalarField b = ScalarField::sample(g, [](double x, double y) { return std::cos(x) * y * std::exp(-y); });
  CHECK(std::abs(inner_product_L2(ddx(a), b) + inner_product_L2(a, ddx(b))) <= 1e-12);
}

TEST_CASE("SBP norm weights integrate cubics exactly") {
  for (int ny : {9, 17, 65}) {
    const double dy = 2.0 / (ny - 1);
    const auto w = sbp_norm_weights(ny, dy);
    double s = 0.0;
    for (int j = 0; j < ny; ++j) s += w[j] * std::pow(j * dy, 3);
    CHECK(s == doctest::Approx(4.0).epsilon(1e-13));
  }
}

TEST_CASE("interpolation") {
  const ChannelGrid g = make_grid(16, 33, 8.0);
  const ScalarField s = ScalarField::sample(g, [](double x, double y) { return std::sin(x) + 0.1 * y * y * y - y; });
  std::vector<Point> nodes;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) nodes.push_back({g.x(i), g.y(j)});
  const auto at_nodes = interpolate(s, nodes);
  double d = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) d = std::max(d, std::abs(at_nodes[k] - s.values()[k]));
  CHECK(d <= 1e-12);

  // Cubic in y plus resolvable x-modes is reproduced off-grid.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-3.0, 10.0), uy(0.0, 8.0);
  std::vector<Point> pts(500);
  for (auto& p : pts) p = {ux(rng), uy(rng)};
  const auto v = interpolate(s, pts);
  double e = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k)
    e = std::max(e, std::abs(v[k] - (std::sin(pts[k].x) + 0.1 * std::pow(pts[k].y, 3) - pts[k].y)));
  CHECK(e <= 1e-8);

  const auto c = interpolate(ScalarField(g, 2.5), pts);
  for (double x : c) CHECK(x == doctest::Approx(2.5).epsilon(1e-13));

  InterpolationStats st;
  const std::vector<Point> outside = {{0.0, -0.1}, {1.0, 8.2}, {1.0, 4.0}};
  interpolate(s, outside, &st);
  CHECK(st.clamped == 2);
}

TEST_CASE("interpolation converges at >= 4th order") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(0.0, kTwoPi), uy(0.0, 8.0);
  std::vector<Point> pts(1000);
  for (auto& p : pts) p = {ux(rng), uy(rng)};
  std::vector<double> err;
  for (int ny : {33, 65, 129}) {
    const ChannelGrid g = make_grid(16, ny, 8.0);
    const auto v = interpolate(mode(g, 1, 1), pts);
    double e = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k)
      e = std::max(e, std::abs(v[k] - std::sin(pts[k].x) * std::sin(kPi * pts[k].y / 8.0)));
    err.push_back(e);
  }
  CHECK(rate(err[0], err[1]) >= 4.0);
  CHECK(rate(err[1], err[2]) >= 4.0);
}

TEST_CASE("wall-trace inequality on fields vanishing at the far wall") {
  const ChannelGrid g = make_grid(32, 65, 8.0);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    const double a = n(rng), b = n(rng), c = n(rng);
    const int k = 1 + trial % 4;
    const ScalarField f = ScalarField::sample(g, [=](double x, double y) {
      return (a * std::cos(k * x) + b) * std::exp(-y) * std::cos(kPi * y / 16.0);
    });
    const ScalarField h = ScalarField::sample(g, [=](double x, double y) {
      return c * std::sin(k * x + 0.4) * std::exp(-0.5 * y) * (8.0 - y);
    });
    const double lhs = std::abs(boundary_integral_x(hadamard(f, ddx(h))));
    const double rhs = std::sqrt(dirichlet_pairing(f, f) * dirichlet_pairing(h, h));
    CHECK(lhs <= rhs);
  }
}
