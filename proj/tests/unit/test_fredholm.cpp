#include <doctest.h>

#include <cmath>

#include "chanlab/error.hpp"
#include "chanlab/fredholm.hpp"

using namespace chanlab;

namespace {

double phi(double y) { return std::exp(-y); }

double max_abs(const Eigen::MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("operator names") {
  for (OperatorName op : {OperatorName::Lambda, OperatorName::LambdaInverse, OperatorName::OmegaHat, OperatorName::Gamma,
                          OperatorName::Phi, OperatorName::K})
    CHECK(operator_from_string(to_string(op)) == op);
  CHECK_THROWS_AS(operator_from_string("omega"), ConfigError);
  CHECK_THROWS_AS(operator_from_string(""), ConfigError);
}

TEST_CASE("basis and Galerkin space") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const StreamBasis b(g, 4, 6);
  CHECK(b.dim() == 9 * 6);
  CHECK_THROWS_AS(StreamBasis(g, 11, 6), PreconditionError);
  CHECK_THROWS_AS(StreamBasis(g, 2, 0), PreconditionError);
  const GalerkinSpace sp(b);
  // Unit-normalized; orthogonal up to the quadrature error of the y-stencils.
  CHECK(max_abs(sp.gram().diagonal() - Eigen::VectorXd::Ones(b.dim())) <= 1e-12);
  CHECK(max_abs(sp.gram() - Eigen::MatrixXd::Identity(b.dim(), b.dim())) <= 1e-3);
  CHECK(max_abs(sp.gram() - sp.gram().transpose()) <= 1e-14);
  std::vector<double> c(b.dim(), 0.0);
  c[3] = 2.0;
  c[7] = -1.0;
  const Eigen::VectorXd p = sp.project(b.combine(c));
  for (int j = 0; j < b.dim(); ++j) CHECK(p[j] == doctest::Approx(c[j]).epsilon(1e-8).scale(1.0));
}

TEST_CASE("identity trajectory: exact matrices") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const GeodesicTrajectory z = identity_trajectory(g, 1.0, 4);
  const GalerkinSpace sp(StreamBasis(g, 4, 6));
  const OperatorContext ctx(z, 1.0, 5);
  const int n = sp.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  CHECK(max_abs(assemble(OperatorName::Lambda, ctx, sp).entries - I) <= 1e-8);
  CHECK(max_abs(assemble(OperatorName::LambdaInverse, ctx, sp).entries - I) <= 1e-8);
  const OperatorMatrix om = assemble(OperatorName::OmegaHat, ctx, sp);
  CHECK(max_abs(om.entries - I) <= 1e-8);
  CHECK(max_abs(assemble(OperatorName::Gamma, ctx, sp).entries) <= 1e-12);
  CHECK(max_abs(assemble(OperatorName::K, ctx, sp).entries) <= 1e-12);
  CHECK(max_abs(sp.k_matrix(VectorField{ScalarField(g), ScalarField(g)})) == 0.0);

  const SpectralReport r = spectral_report(om, sp);
  CHECK(r.sigma_min == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.sigma_max == doctest::Approx(1.0).epsilon(1e-8));
  REQUIRE(r.symmetric_lambda_min.has_value());
  CHECK(*r.symmetric_lambda_min == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(lemma1_constant(ctx) == doctest::Approx(1.0).epsilon(1e-12));

  const SpectralReport rp = spectral_report(assemble(OperatorName::Phi, ctx, sp), sp);
  CHECK(rp.sigma_min == doctest::Approx(1.0).epsilon(1e-8));

  for (const ConjugateScanPoint& p : conjugate_scan(z, 1.0, sp)) {
    CHECK(p.sigma_min_over_t == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.multiplicity == 0);
    CHECK_FALSE(p.flagged);
  }

  const InvertibilityCertificate cert = invertibility_certificate(z, 1.0, 5, 2, 4);
  CHECK(cert.lemma1_floor);
  CHECK(cert.stable_under_enlargement);
  CHECK(cert.enlargement_change <= 1e-8);
}

TEST_CASE("decay exponent") {
  std::vector<double> s;
  for (int k = 1; k <= 50; ++k) s.push_back(3.0 * std::pow(k, -2.0));
  CHECK(decay_exponent(s) == doctest::Approx(2.0).epsilon(1e-12));
  s.push_back(0.0);
  s.push_back(1e-20);
  CHECK(decay_exponent(s) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(decay_exponent(std::vector<double>(10, 1.0)) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("shear: Omega-hat symmetry and quadrature consistency") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const GeodesicTrajectory s = shear_trajectory(phi, 1.0, 4, g);
  const GalerkinSpace sp(StreamBasis(g, 4, 6));
  const OperatorContext ctx(s, 1.0, 5);
  const OperatorAssembler as(ctx, sp);

  const Eigen::MatrixXd om = sp.orthonormal(as.omega_hat(ctx.nodes() - 1));
  CHECK((om - om.transpose()).norm() <= 1e-6 * om.norm());

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(sp.dim(), sp.dim());
  for (int m = 0; m < ctx.nodes(); ++m) sum += ctx.weight(m) * as.lambda_inverse(m);
  CHECK(max_abs(sum - assemble(OperatorName::OmegaHat, ctx, sp).entries) <= 1e-12 * max_abs(sum));

  const Eigen::MatrixXd lam = sp.orthonormal(as.lambda(4));
  CHECK((lam - lam.transpose()).norm() <= 1e-10 * lam.norm());
  // Lambda Lambda^{-1} = I on the span.
  const Eigen::MatrixXd prod = as.lambda(4) * as.lambda_inverse(4);
  CHECK(max_abs(prod - Eigen::MatrixXd::Identity(sp.dim(), sp.dim())) <= 1e-10);

  const SpectralReport r = spectral_report(assemble(OperatorName::OmegaHat, ctx, sp), sp);
  CHECK(*r.symmetric_lambda_min >= 0.9 * lemma1_constant(ctx));
}

TEST_CASE("shear: small-t limit, Gamma and index signature") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const GalerkinSpace sp(StreamBasis(g, 3, 5));
  std::vector<double> gap;
  for (double t : {0.2, 0.1}) {
    const GeodesicTrajectory s = shear_trajectory(phi, t, 2, g);
    const OperatorContext ctx(s, t, 3);
    const SpectralReport r = spectral_report(assemble(OperatorName::Phi, ctx, sp), sp);
    gap.push_back(std::abs(r.sigma_min / t - 1.0));
    // Gamma_t = O(t^2) against Omega-hat_t = O(t).
    const double gam = spectral_report(assemble(OperatorName::Gamma, ctx, sp), sp).sigma_max;
    CHECK(gam <= 0.2 * t);
  }
  CHECK(gap[1] < gap[0]);
  CHECK(gap[1] <= 0.1);

  // Finite multiplicity: no near-zero directions on the basis or its enlargement.
  const GeodesicTrajectory s = shear_trajectory(phi, 1.0, 4, g);
  const GalerkinSpace big(StreamBasis(g, 4, 7));
  for (const GalerkinSpace* p : {&sp, &big})
    for (const ConjugateScanPoint& q : conjugate_scan(s, 1.0, *p)) CHECK(q.multiplicity == 0);
}

TEST_CASE("K_v spectrum decays") {
  const ChannelGrid g = make_grid(64, 65, 8.0);
  const GeodesicTrajectory s = shear_trajectory(phi, 1.0, 2, g);
  const GalerkinSpace sp(StreamBasis(g, 10, 14));
  CHECK(sp.dim() == 294);
  const OperatorContext ctx(s, 1.0, 3);
  const CompactnessSignature c = compactness_signature(assemble(OperatorName::K, ctx, sp), sp);
  CAPTURE(c.spectrum.decay_fit_alpha);
  CAPTURE(c.tail_ratio);
  CHECK(c.spectrum.decay_fit_alpha > 0.0);
  CHECK(c.tail_ratio < 1.0);
}
