#include <doctest.h>

#include <cmath>
#include <random>

#include "chanlab/basis.hpp"
#include "chanlab/error.hpp"
#include "chanlab/sobolev.hpp"

using namespace chanlab;

namespace {

double phi(double y) { return std::exp(-y); }

WeightedNormSpec spec_with(std::vector<double> B) {
  WeightedNormSpec w;
  w.s = static_cast<int>(B.size()) - 1;
  w.B = std::move(B);
  return w;
}

}  // namespace

TEST_CASE("weights: worked examples") {
  // 2Q/K = 1
  CHECK(weights_recurrence(2.0, 1.0, 4) == std::vector<double>{1, 1, 2, 4, 1});
  // 2Q/K = 2
  CHECK(weights_recurrence(1.0, 1.0, 3) == std::vector<double>{1, 2, 6, 1});
  CHECK(weights_recurrence(0.3, 7.0, 1) == std::vector<double>{1, 1});
  CHECK_THROWS_AS(weights_recurrence(0.0, 1.0, 3), PreconditionError);
  CHECK_THROWS_AS(weights_recurrence(-1.0, 1.0, 3), PreconditionError);
}

TEST_CASE("weights: recurrence matches closed form, monotone for 2Q/K >= 1") {
  for (double r : {0.1, 1.0, 10.0})
    for (int s = 1; s <= 8; ++s) {
      const auto a = weights_recurrence(2.0, r, s), b = weights_closed_form(2.0, r, s);
      REQUIRE(a.size() == std::size_t(s + 1));
      CHECK(a.front() == 1.0);
      CHECK(a.back() == 1.0);
      for (int k = 0; k <= s; ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-13 * b[k]);
      if (r >= 1.0)
        for (int k = 2; k <= s - 1; ++k) CHECK(a[k] > a[k - 1]);
    }
}

TEST_CASE("homogeneous norm") {
  const ChannelGrid g = make_grid(64, 65, 8.0);
  CHECK(homogeneous_norm(ScalarField(g), 2).value == 0.0);
  CHECK_THROWS_AS(homogeneous_norm(ScalarField(g), kMaxSobolevS + 1), PreconditionError);

  const double L = g.height, k = kPi / L;
  const ScalarField f = ScalarField::sample(g, [=](double x, double y) { return std::sin(x) * std::sin(k * y); });
  const double base = std::sqrt(kPi * L / 2 * (1 + k * k));
  const NormReport r0 = homogeneous_norm(f, 0);
  REQUIRE(r0.per_term.size() == 1);
  CHECK(r0.value == doctest::Approx(base).epsilon(1e-7));
  CHECK(r0.value == gradient_norm(f, 0, 0));
  // terms (0,0), (0,1), (1,0)
  const NormReport r1 = homogeneous_norm(f, 1);
  REQUIRE(r1.per_term.size() == 3);
  CHECK(r1.value == doctest::Approx(base * (2 + k)).epsilon(1e-7));
  CHECK(homogeneous_norm(f, 2).per_term.size() == 6);
}

TEST_CASE("weighted pairing") {
  const ChannelGrid g = make_grid(64, 65, 8.0);
  const double L = g.height, k = kPi / L;
  const ScalarField f = ScalarField::sample(g, [=](double x, double y) { return std::sin(x) * std::sin(k * y); });

  // Three-term expansion at s = 2 on the test mode: B0 |grad f_yy|^2 + B1 |grad f_xy|^2 + B2 |grad f_xx|^2.
  WeightedNormSpec w = spec_with({1.0, 3.5, 1.0});
  const double unit = kPi * L / 2 * (1 + k * k);
  const double expect = unit * (std::pow(k, 4) + 3.5 * k * k + 1.0);
  CHECK(weighted_inner_product(f, f, w) == doctest::Approx(expect).epsilon(1e-7));
  const NormReport n = weighted_norm(f, w);
  CHECK(n.kind == NormKind::Weighted);
  CHECK(n.value * n.value == doctest::Approx(weighted_inner_product(f, f, w)).epsilon(1e-12));
  CHECK(n.per_term[1] == doctest::Approx(unit * k * k).epsilon(1e-7));

  std::mt19937_64 rng(5);
  const WeightedNormSpec ones = spec_with({1.0, 1.0, 1.0});
  for (int trial = 0; trial < 5; ++trial) {
    const ScalarField a = random_stream(g, rng).field(), b = random_stream(g, rng).field();
    // symmetric, bilinear, positive
    CHECK(weighted_inner_product(a, b, w) == doctest::Approx(weighted_inner_product(b, a, w)).epsilon(1e-13));
    CHECK(weighted_inner_product(2.0 * a + b, b, w) ==
          doctest::Approx(2 * weighted_inner_product(a, b, w) + weighted_inner_product(b, b, w)).epsilon(1e-12));
    CHECK(weighted_inner_product(a, a, w) > 0.0);
    // unit weights: the plain top-order homogeneous pairing
    double top = 0.0;
    for (int j = 0; j <= 2; ++j) top += std::pow(gradient_norm(a, j, 2 - j), 2);
    CHECK(weighted_inner_product(a, a, ones) == doctest::Approx(top).epsilon(1e-12));

    // Norm equivalence. The weighted norm only sees order s + 1, so the lower
    // bound is against the top-order part of the homogeneous sum.
    const double wn = weighted_norm(a, w).value;
    const NormReport h = homogeneous_norm(a, 2);
    const double top_sum = h.per_term[3] + h.per_term[4] + h.per_term[5];
    CHECK(wn <= std::sqrt(3.5) * h.value);
    CHECK(wn >= 1.0 / 3.0 * top_sum);
  }
  CHECK(weighted_inner_product(ScalarField(g), ScalarField(g), w) == 0.0);
}

TEST_CASE("spec validation") {
  WeightedNormSpec w;
  w.s = 3;
  w.K_eps = 1.0;
  w.Q_eps = 1.0;
  w.B = {1, 2, 6, 1};
  CHECK_NOTHROW(validate(w));
  w.B = {1, 2, 5, 1};
  CHECK_THROWS_AS(validate(w), PreconditionError);
  w.B = {2, 2, 6, 1};
  CHECK_THROWS_AS(validate(w), PreconditionError);
  w.B = {1, 2, 6};
  CHECK_THROWS_AS(validate(w), PreconditionError);
}

TEST_CASE("constants on the identity trajectory") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const GeodesicTrajectory z = identity_trajectory(g, 1.0, 10);
  CHECK(eta_c_norm(AreaDiffeo::identity(g), 1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(eta_c_norm(AreaDiffeo::identity(g), 4) == doctest::Approx(1.0).epsilon(1e-13));
  for (int s : {1, 2, 3}) {
    const TrajectoryConstants c = constants_from_trajectory(z, 1.0, s, 0.0);
    CHECK(c.K_eta_inf == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.C_t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.c1 == doctest::Approx(1.0).epsilon(1e-12));
    if (s == 1) {
      CHECK(std::isinf(c.eps_max));
      CHECK(c.K_eps == doctest::Approx(1.0));
    } else {
      CHECK(c.eps_max == doctest::Approx(1.0 / (s - 1)).epsilon(1e-12));
      CHECK(c.eps == doctest::Approx(0.5 * c.eps_max));
      CHECK(c.K_eps == doctest::Approx(1.0 - 0.5 * (s - 1) * c.eps).epsilon(1e-12));
      CHECK(c.Q_eps == doctest::Approx(1.0 / c.eps).epsilon(1e-12));
      CHECK_THROWS_AS(constants_from_trajectory(z, 1.0, s, 1.01 * c.eps_max), PreconditionError);
      CHECK(constants_from_trajectory(z, 1.0, s, 0.99 * c.eps_max).K_eps > 0.0);
    }
  }
  CHECK_THROWS_AS(constants_from_trajectory(z, 1.0, 0, 0.0), PreconditionError);
  CHECK_THROWS_AS(constants_from_trajectory(z, 1.5, 2, 0.0), PreconditionError);
}

TEST_CASE("constants on the shear trajectory") {
  const ChannelGrid g = make_grid(64, 65, 8.0);
  const GeodesicTrajectory s = shear_trajectory(phi, 1.0, 10, g);
  const TrajectoryConstants c = constants_from_trajectory(s, 1.0, 2, 0.0);
  // Dη = [[1, -t e^{-y}], [0, 1]] is worst at y = 0, t = 1: |Dη| is the golden ratio.
  const double gold = 0.5 * (1 + std::sqrt(5.0));
  CHECK(c.K_eta_inf == doctest::Approx(1.0 / (gold * gold)).epsilon(1e-6));
  const double sj = sup_jacobian_norm(s.flows.back());
  CHECK(c.K_eta_inf == doctest::Approx(1.0 / (sj * sj)).epsilon(0.01));
  CHECK(c.c1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.cs1 == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(c.eps_max == doctest::Approx(c.K_eta_inf / (c.c1 * c.c1)).epsilon(1e-12));
  CHECK(c.K_eps > 0.0);

  // C_t = int_0^1 |Dη_τ|^{-2} dτ with |Dη_τ| = (τ + sqrt(τ^2 + 4)) / 2; the
  // reported value is a 10-interval trapezoid sum.
  double fine = 0.0;
  const int N = 20000;
  auto w = [](double t) { const double a = 0.5 * (t + std::sqrt(t * t + 4)); return 1.0 / (a * a); };
  for (int i = 0; i < N; ++i) fine += 0.5 / N * (w(double(i) / N) + w(double(i + 1) / N));
  CHECK(c.C_t == doctest::Approx(fine).epsilon(2e-3));

  const WeightedNormSpec spec = make_weighted_spec(c);
  CHECK_NOTHROW(validate(spec));
  CHECK(spec.B[1] == doctest::Approx(2 * c.Q_eps / c.K_eps));
}

TEST_CASE("positivity gap") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const GeodesicTrajectory z = identity_trajectory(g, 1.0, 4);
  const TrajectoryConstants c = constants_from_trajectory(z, 1.0, 2, 0.0);
  const WeightedNormSpec spec = make_weighted_spec(c);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const StreamFunction f = random_stream(g, rng);
    const PositivityGap p = positivity_gap(f, z.flows.back(), spec, c.cs1);
    const double wn = weighted_norm(f.field(), spec).value;
    CHECK(p.lhs == doctest::Approx(wn * wn).epsilon(1e-8));
    CHECK(p.holds);
    CHECK(p.required_c_hat == 0.0);

    // Degree-2 homogeneity: the verdict and required constant are scale free.
    const StreamFunction f3 = StreamFunction::dirichlet(3.0 * f.field());
    const PositivityGap q = positivity_gap(f3, z.flows.back(), spec, c.cs1, 0.0);
    CHECK(q.holds == positivity_gap(f, z.flows.back(), spec, c.cs1, 0.0).holds);
    CHECK(q.lhs == doctest::Approx(9 * p.lhs).epsilon(1e-12));
  }
}
