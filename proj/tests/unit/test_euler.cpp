#include <doctest.h>

#include <cmath>
#include <random>

#include "chanlab/basis.hpp"
#include "chanlab/derivatives.hpp"
#include "chanlab/euler.hpp"

using namespace chanlab;

namespace {

double phi(double y) { return std::exp(-y); }

StreamFunction small_random_stream(const ChannelGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomStreamSpec spec;
  spec.max_k = 3;
  spec.max_l = 3;
  spec.decay = 0.5;
  StreamFunction f = random_stream(g, rng, spec);
  f *= 0.3;
  return f;
}

}  // namespace

TEST_CASE("shear data is a steady Euler solution and its flow is x + t phi(y)") {
  const ChannelGrid g = make_grid(64, 65, 8.0);
  const StreamFunction f0 = shear_flow(phi, 0.0, g).second;
  GeodesicTrajectory tr = solve_euler(f0, 1.0, 1e-2, {10, true});
  flow_map(tr);
  inverse_flow_map(tr);
  const ScalarField u0 = ddy(f0.field());
  for (std::size_t n = 0; n < tr.size(); ++n) {
    CAPTURE(tr.times[n]);
    CHECK(norm_L2(ddy(tr.streams[n].field()) - u0) <= 1e-6 * norm_L2(u0));
    const AreaDiffeo exact = shear_flow(phi, tr.times[n], g).first;
    CHECK((tr.flows[n].displacement() - exact.displacement()).max_abs() <= 1e-6);
    CHECK((tr.flows[n].Y() - exact.Y()).max_abs() <= 1e-6);
  }
}

TEST_CASE("zero initial velocity leaves every flow at the identity") {
  const ChannelGrid g = make_grid(16, 17, 4.0);
  GeodesicTrajectory tr = solve_euler(StreamFunction(g), 0.5, 0.05, {2, true});
  flow_map(tr);
  inverse_flow_map(tr);
  const AreaDiffeo id = AreaDiffeo::identity(g);
  for (const AreaDiffeo& e : tr.flows) {
    CHECK(e.displacement().max_abs() == 0.0);
    CHECK((e.Y() - id.Y()).max_abs() == 0.0);
  }
  CHECK(tr.flows.front().displacement().max_abs() == 0.0);
}

TEST_CASE("energy and enstrophy are conserved on a random flow") {
  const ChannelGrid g = make_grid(64, 65, 8.0);
  const GeodesicTrajectory tr = solve_euler(small_random_stream(g, 5), 1.0, 1e-3, {100, true});
  for (std::size_t n = 0; n < tr.size(); ++n) {
    CHECK(std::abs(tr.energy[n] / tr.energy[0] - 1.0) <= 1e-3);
    CHECK(std::abs(tr.enstrophy[n] / tr.enstrophy[0] - 1.0) <= 1e-2);
  }
  // Against a run with half the step: both resolve the same trajectory.
  const GeodesicTrajectory fine = solve_euler(small_random_stream(g, 5), 1.0, 5e-4, {200, true});
  CHECK(std::abs(fine.energy.back() - tr.energy.back()) <= 1e-3 * tr.energy[0]);
}

TEST_CASE("random flow maps are area preserving and invert each other") {
  const ChannelGrid g = make_grid(64, 65, 8.0);
  GeodesicTrajectory tr = solve_euler(small_random_stream(g, 9), 0.5, 1e-2, {5, true});
  flow_map(tr);
  inverse_flow_map(tr);
  for (std::size_t n = 0; n < tr.size(); ++n) {
    CHECK(jacobian_defect(tr.flows[n]).value <= kJacobianTol);
    CHECK(composition_defect(tr.flows[n], tr.inverse_flows[n]) <= 10 * kJacobianTol * std::max(g.dx, g.dy));
    const ScalarField detG = [&] {
      const MetricTensorField G = metric_tensor(tr.flows[n]);
      return hadamard(G.g11, G.g22) - hadamard(G.g12, G.g12);
    }();
    CHECK((detG - ScalarField(g, 1.0)).max_abs() <= 1e-3);
  }
  CHECK(tr.clamped == 0);
}

TEST_CASE("solver preconditions") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const StreamFunction f0 = shear_flow(phi, 0.0, g).second;
  CHECK_THROWS_AS(solve_euler(f0, 1.0, 0.5), PreconditionError);   // CFL
  CHECK_THROWS_AS(solve_euler(f0, 1.0, -0.1), PreconditionError);
  CHECK_THROWS_AS(solve_euler(f0, 1.0, 0.03), PreconditionError);  // not a multiple
  GeodesicTrajectory empty;
  CHECK_THROWS_AS(flow_map(empty), PreconditionError);
  CHECK_THROWS_AS(shear_flow([](double) { return 1.0; }, 1.0, g), PreconditionError);
}

TEST_CASE("shear family: Jacobian and metric tensor") {
  const ChannelGrid g = make_grid(32, 65, 8.0);
  const AreaDiffeo id = shear_flow(phi, 0.0, g).first;
  CHECK(id.displacement().max_abs() == 0.0);

  const JacobianField J1 = jacobian(shear_flow(phi, 1.0, g).first);
  CHECK((J1.det() - ScalarField(g, 1.0)).max_abs() <= 1e-12);

  // t = 2: D eta = [[1, -2 e^{-y}], [0, 1]], cross-checked against a central
  // difference of the closed-form map.
  const AreaDiffeo e2 = shear_flow(phi, 2.0, g).first;
  const JacobianField J2 = jacobian(e2);
  const ScalarField xy = ScalarField::sample(g, [](double, double y) { return -2.0 * std::exp(-y); });
  CHECK((J2.xy - xy).max_abs() <= 1e-5);  // 6th-order y-stencils at dy = 1/8
  CHECK((J2.xx - ScalarField(g, 1.0)).max_abs() <= 1e-12);
  CHECK(J2.yx.max_abs() <= 1e-12);
  CHECK((J2.yy - ScalarField(g, 1.0)).max_abs() <= 1e-12);
  const double h = 1e-5, y = 1.3;
  const double fd = ((y + h + 2.0 * phi(y + h)) - (y - h + 2.0 * phi(y - h))) / (2 * h) - 1.0;
  CHECK(fd == doctest::Approx(-2.0 * std::exp(-y)).epsilon(1e-8));

  // G = [[1 + t^2 phi'^2, -t phi'], [-t phi', 1]] (phi' = -e^{-y}).
  for (double t : {1.0, 2.0}) {
    const MetricTensorField G = metric_tensor(shear_flow(phi, t, g).first);
    const ScalarField g11 = ScalarField::sample(g, [t](double, double y) { return 1.0 + t * t * std::exp(-2 * y); });
    const ScalarField g12 = ScalarField::sample(g, [t](double, double y) { return t * std::exp(-y); });
    CHECK((G.g11 - g11).max_abs() <= 1e-5);
    CHECK((G.g12 - g12).max_abs() <= 1e-5);
    CHECK((G.g22 - ScalarField(g, 1.0)).max_abs() <= 1e-12);
  }
  const MetricTensorField I = metric_tensor(AreaDiffeo::identity(g));
  CHECK((I.g11 - ScalarField(g, 1.0)).max_abs() <= 1e-12);
  CHECK(I.g12.max_abs() <= 1e-12);
  CHECK((I.g22 - ScalarField(g, 1.0)).max_abs() <= 1e-12);
}

TEST_CASE("K_eta: min eigenvalue of G equals the inverse square sup norm of D eta") {
  const ChannelGrid g = make_grid(32, 65, 8.0);
  const AreaDiffeo e = shear_flow(phi, 1.0, g).first;
  const double k = min_metric_eigenvalue(metric_tensor(e));
  const double s = sup_jacobian_norm(e);
  CHECK(k == doctest::Approx(1.0 / (s * s)).epsilon(1e-2));
  // Closed form at t = 1: |D eta| peaks at the wall with phi' = -1, norm = golden ratio.
  CHECK(s == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-6));
}

TEST_CASE("shear flows form a one-parameter group") {
  const ChannelGrid g = make_grid(32, 65, 8.0);
  const AreaDiffeo a = shear_flow(phi, 0.4, g).first, b = shear_flow(phi, 0.7, g).first;
  const AreaDiffeo ab = a.compose(b), exact = shear_flow(phi, 1.1, g).first;
  CHECK((ab.displacement() - exact.displacement()).max_abs() <= 1e-6);
  CHECK((ab.Y() - exact.Y()).max_abs() <= 1e-12);
}

TEST_CASE("analytic trajectories") {
  const ChannelGrid g = make_grid(16, 33, 8.0);
  const GeodesicTrajectory s = shear_trajectory(phi, 2.0, 4, g);
  REQUIRE(s.size() == 5);
  CHECK(s.times[2] == doctest::Approx(1.0));
  CHECK(composition_defect(s.flows[4], s.inverse_flows[4]) <= 1e-6);
  const GeodesicTrajectory z = identity_trajectory(g, 1.0, 2);
  CHECK(z.size() == 3);
  CHECK(z.flows[2].displacement().max_abs() == 0.0);
  CHECK_THROWS_AS(shear_trajectory(phi, 1.0, 0, g), PreconditionError);
}
