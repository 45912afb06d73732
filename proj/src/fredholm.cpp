#include "chanlab/fredholm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "chanlab/derivatives.hpp"
#include "chanlab/error.hpp"
#include "chanlab/parallel.hpp"
#include "chanlab/stencils.hpp"

namespace chanlab {

std::string to_string(OperatorName op) {
  switch (op) {
    case OperatorName::Lambda: return "lambda";
    case OperatorName::LambdaInverse: return "lambda_inverse";
    case OperatorName::OmegaHat: return "omega_hat";
    case OperatorName::Gamma: return "gamma";
    case OperatorName::Phi: return "phi";
    case OperatorName::K: return "k";
  }
  return "unknown";
}

OperatorName operator_from_string(const std::string& name) {
  for (OperatorName op : {OperatorName::Lambda, OperatorName::LambdaInverse, OperatorName::OmegaHat,
                          OperatorName::Gamma, OperatorName::Phi, OperatorName::K})
    if (to_string(op) == name) return op;
  throw ConfigError("operators", "unknown operator '" + name + "'");
}

// ------------------------------------------------------------ space

GalerkinSpace::GalerkinSpace(const StreamBasis& basis) : basis_(basis) {
  const ChannelGrid& g = basis_.grid();
  const auto wy = y_weights(g);
  weights_.resize(g.size());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) weights_[g.index(i, j)] = g.dx * wy[j];
  std::vector<ScalarField> fields;
  for (int j = 0; j < basis_.dim(); ++j) fields.push_back(basis_.function(j).field());
  grad_ = gradients(fields);
  gram_ = grad_.transpose() * grad_;
  gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
  llt_.compute(gram_);
  if (llt_.info() != Eigen::Success) throw NumericalError("GalerkinSpace: Gram matrix is not positive definite");
}

Eigen::MatrixXd GalerkinSpace::gradients(const std::vector<ScalarField>& h) const {
  const std::size_t N = grid().size();
  Eigen::MatrixXd out(2 * N, h.size());
  parallel_for(h.size(), [&](std::size_t c) {
    const ScalarField fx = ddx(h[c]), fy = ddy(h[c]);
    for (std::size_t p = 0; p < N; ++p) {
      const double s = std::sqrt(weights_[p]);
      out(p, c) = s * fx.data()[p];
      out(N + p, c) = s * fy.data()[p];
    }
  });
  return out;
}

Eigen::MatrixXd GalerkinSpace::form_with(const std::vector<ScalarField>& h) const {
  return grad_.transpose() * gradients(h);
}

Eigen::MatrixXd GalerkinSpace::metric_form(const MetricTensorField& G) const {
  const Eigen::Index N = static_cast<Eigen::Index>(grid().size());
  using Vec = Eigen::Map<const Eigen::VectorXd>;
  const Vec g11(G.g11.data(), N), g12(G.g12.data(), N), g22(G.g22.data(), N);
  const auto X = grad_.topRows(N);
  const auto Y = grad_.bottomRows(N);
  const Eigen::MatrixXd top = g11.asDiagonal() * X + g12.asDiagonal() * Y;
  const Eigen::MatrixXd bottom = g12.asDiagonal() * X + g22.asDiagonal() * Y;
  Eigen::MatrixXd S = X.transpose() * top + Y.transpose() * bottom;
  return 0.5 * (S + S.transpose());
}

Eigen::MatrixXd GalerkinSpace::coordinates(const Eigen::MatrixXd& form) const { return llt_.solve(form); }

std::vector<ScalarField> GalerkinSpace::composed_basis(const AreaDiffeo& psi) const {
  const std::vector<Point> pts = psi.images();
  const ChannelGrid& g = grid();
  std::vector<ScalarField> fields(dim());
  parallel_for(fields.size(), [&](std::size_t j) {
    ScalarField f = basis_.evaluate_on(static_cast<int>(j), pts);
    for (int i = 0; i < g.nx; ++i) f(i, 0) = f(i, g.ny - 1) = 0.0;
    fields[j] = std::move(f);
  });
  return fields;
}

Eigen::MatrixXd GalerkinSpace::composition(const AreaDiffeo& psi) const {
  return coordinates(form_with(composed_basis(psi)));
}

Eigen::MatrixXd GalerkinSpace::k_form(const VectorField& v, const std::vector<ScalarField>& h,
                                      const Eigen::MatrixXd& grad_h) const {
  const std::size_t N = grid().size();
  const Eigen::Index d = static_cast<Eigen::Index>(h.size());
  Eigen::MatrixXd Z(2 * N, d);
  parallel_for(h.size(), [&](std::size_t j) {
    const ScalarField bxx = partial_derivative(h[j], 2, 0), bxy = partial_derivative(h[j], 1, 1),
                      byy = partial_derivative(h[j], 0, 2);
    for (std::size_t p = 0; p < N; ++p) {
      const double s = std::sqrt(weights_[p]), vu = v.u.data()[p], vv = v.v.data()[p];
      // (grad v_j)^T v with v_j = (-h_y, h_x)
      Z(p, j) = s * (-bxy.data()[p] * vu + bxx.data()[p] * vv);
      Z(N + p, j) = s * (-byy.data()[p] * vu + bxy.data()[p] * vv);
    }
  });
  Eigen::MatrixXd V(2 * N, d);
  V.topRows(N) = -grad_h.bottomRows(N);
  V.bottomRows(N) = grad_h.topRows(N);
  // T_ij = <v, grad_{v_i} v_j>;  <v, ad_{v_j} v_i> = T_ij - T_ji.
  const Eigen::MatrixXd T = V.transpose() * Z;
  return T - T.transpose();
}

Eigen::MatrixXd GalerkinSpace::k_matrix(const VectorField& v) const {
  std::vector<ScalarField> fields;
  for (int j = 0; j < dim(); ++j) fields.push_back(basis_.function(j).field());
  return coordinates(k_form(v, fields, grad_));
}

Eigen::MatrixXd GalerkinSpace::right_orthonormal(const Eigen::MatrixXd& A) const {
  // A L^{-T} = (L^{-1} A^T)^T
  return llt_.matrixL().solve(A.transpose()).transpose();
}

Eigen::MatrixXd GalerkinSpace::orthonormal(const Eigen::MatrixXd& A) const {
  return right_orthonormal(llt_.matrixU() * A);
}

Eigen::VectorXd GalerkinSpace::project(const StreamFunction& f) const {
  return coordinates(form_with({f.field()})).col(0);
}

// ------------------------------------------------------------ assembler

OperatorAssembler::OperatorAssembler(const OperatorContext& ctx, const GalerkinSpace& space)
    : ctx_(ctx), space_(space) {
  if (!(ctx.grid() == space.grid())) throw PreconditionError("OperatorAssembler: basis and trajectory grids differ");
}

Eigen::MatrixXd OperatorAssembler::lambda(int m) const {
  return space_.coordinates(space_.metric_form(ctx_.metric(m)));
}

Eigen::MatrixXd OperatorAssembler::lambda_inverse(int m) const {
  Eigen::LLT<Eigen::MatrixXd> s(space_.metric_form(ctx_.metric(m)));
  if (s.info() != Eigen::Success) throw NumericalError("lambda_inverse: metric form not positive definite");
  return s.solve(space_.gram());
}

Eigen::MatrixXd OperatorAssembler::k(int m) const { return space_.k_matrix(ctx_.base_velocity(m)); }

void OperatorAssembler::run_volterra() const {
  if (!y_.empty()) return;
  const int Q = ctx_.nodes();
  const int d = space_.dim();
  const double h = ctx_.step();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  omega_.assign(Q, Eigen::MatrixXd::Zero(d, d));
  y_.assign(Q, Eigen::MatrixXd::Zero(d, d));
  pushed_gram_.assign(Q, space_.gram());
  Eigen::MatrixXd history = Eigen::MatrixXd::Zero(d, d);  // sum_{0<m<n} h M_m Y_m
  Eigen::MatrixXd prev_linv = lambda_inverse(0);
  for (int n = 1; n < Q; ++n) {
    const Eigen::MatrixXd linv = lambda_inverse(n);
    omega_[n] = omega_[n - 1] + 0.5 * h * (prev_linv + linv);
    prev_linv = linv;
    // M = Ad_{eta^-1} K_v Ad_eta on streams, f -> (K_v (f o eta^-1)) o eta, assembled
    // by Galerkin in the pushed-forward basis b_j o eta^-1 so no composition is
    // projected back onto the span.
    const std::vector<ScalarField> pushed = space_.composed_basis(ctx_.eta_inv(n));
    const Eigen::MatrixXd grad = space_.gradients(pushed);
    Eigen::MatrixXd A = grad.transpose() * grad;
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("volterra: pushed-forward Gram not positive definite");
    const Eigen::MatrixXd M = llt.solve(space_.k_form(ctx_.base_velocity(n), pushed, grad));
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(I + 0.5 * h * M);
    y_[n] = lu.solve(omega_[n] - history);
    history += h * M * y_[n];
    pushed_gram_[n] = std::move(A);
  }
}

const Eigen::MatrixXd& OperatorAssembler::omega_hat(int n) const { run_volterra(); return omega_[n]; }
const Eigen::MatrixXd& OperatorAssembler::volterra(int n) const { run_volterra(); return y_[n]; }

OperatorMatrix OperatorAssembler::phi(int n) const {
  run_volterra();
  OperatorMatrix out{&space_.basis(), y_[n], OperatorName::Phi, ctx_.time(n), "dirichlet-pushforward",
                     pushed_gram_[n]};
  return out;
}

OperatorMatrix OperatorAssembler::assemble(OperatorName op) const {
  const int last = ctx_.nodes() - 1;
  OperatorMatrix out;
  out.basis = &space_.basis();
  out.op = op;
  out.t = ctx_.t();
  switch (op) {
    case OperatorName::Lambda: out.entries = lambda(last); break;
    case OperatorName::LambdaInverse: out.entries = lambda_inverse(last); break;
    case OperatorName::K: out.entries = k(last); break;
    case OperatorName::OmegaHat: {
      // Quadrature of the node matrices without the Volterra solve.
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(space_.dim(), space_.dim());
      for (int m = 0; m < ctx_.nodes(); ++m) acc += ctx_.weight(m) * lambda_inverse(m);
      out.entries = acc;
      break;
    }
    case OperatorName::Gamma: out.entries = omega_hat(last) - volterra(last); break;
    case OperatorName::Phi: out = phi(last); break;
  }
  return out;
}

OperatorMatrix assemble(OperatorName op, const OperatorContext& ctx, const GalerkinSpace& space) {
  return OperatorAssembler(ctx, space).assemble(op);
}

// ------------------------------------------------------------ spectra

double decay_exponent(const std::vector<double>& sigma) {
  if (sigma.empty() || sigma[0] <= 0.0) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (sigma[k] <= 1e-12 * sigma[0]) break;
    const double x = std::log(double(k + 1)), y = std::log(sigma[k] / sigma[0]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; ++n;
  }
  if (n < 2) return 0.0;
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? -(n * sxy - sx * sy) / den : 0.0;
}

SpectralReport spectral_report(const OperatorMatrix& A, const GalerkinSpace& space) {
  SpectralReport r;
  Eigen::MatrixXd B;
  if (A.output_gram.size() == 0) {
    B = space.orthonormal(A.entries);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);
    r.symmetric_lambda_min = eig.eigenvalues().minCoeff();
  } else {
    Eigen::LLT<Eigen::MatrixXd> out(A.output_gram);
    if (out.info() != Eigen::Success) throw NumericalError("spectral_report: output pairing not positive definite");
    // U_out A L^{-T}
    const Eigen::MatrixXd UA = out.matrixU() * A.entries;
    B = space.right_orthonormal(UA);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
  const Eigen::VectorXd s = svd.singularValues();
  r.singular_values.assign(s.data(), s.data() + s.size());
  r.sigma_max = r.singular_values.empty() ? 0.0 : r.singular_values.front();
  r.sigma_min = r.singular_values.empty() ? 0.0 : r.singular_values.back();
  r.decay_fit_alpha = decay_exponent(r.singular_values);
  return r;
}

CompactnessSignature compactness_signature(const OperatorMatrix& A, const GalerkinSpace& space) {
  CompactnessSignature c;
  c.spectrum = spectral_report(A, space);
  const auto& s = c.spectrum.singular_values;
  const std::size_t start = (2 * s.size() + 2) / 3;
  if (c.spectrum.sigma_max > 0.0 && start < s.size()) c.tail_ratio = s[start] / c.spectrum.sigma_max;
  c.tail_small = c.tail_ratio < 1e-3;
  return c;
}

double lemma1_constant(const OperatorContext& ctx) {
  double c = 0.0;
  for (int m = 0; m < ctx.nodes(); ++m) {
    const double n = sup_jacobian_norm(ctx.eta(m));
    c += ctx.weight(m) / (n * n);
  }
  return c;
}

InvertibilityCertificate invertibility_certificate(const GeodesicTrajectory& traj, double t, int quadrature_nodes,
                                                   int max_k, int max_l) {
  if (!(t > 0.0)) throw PreconditionError("invertibility_certificate: t must be positive");
  const OperatorContext ctx(traj, t, quadrature_nodes);
  InvertibilityCertificate cert;
  const GalerkinSpace space(StreamBasis(traj.grid, max_k, max_l));
  cert.spectrum = spectral_report(assemble(OperatorName::OmegaHat, ctx, space), space);
  cert.C_t = lemma1_constant(ctx);
  cert.lemma1_floor = *cert.spectrum.symmetric_lambda_min >= 0.9 * cert.C_t;
  const GalerkinSpace big(StreamBasis(traj.grid, (3 * max_k + 1) / 2, (3 * max_l + 1) / 2));
  cert.enlarged_sigma_min = spectral_report(assemble(OperatorName::OmegaHat, ctx, big), big).sigma_min;
  cert.enlargement_change = std::abs(cert.enlarged_sigma_min - cert.spectrum.sigma_min) / cert.spectrum.sigma_min;
  cert.stable_under_enlargement = cert.enlargement_change < 0.05;
  return cert;
}

std::vector<ConjugateScanPoint> conjugate_scan(const GeodesicTrajectory& traj, double t_max,
                                               const GalerkinSpace& space) {
  const double tol = 1e-9 * std::max(1.0, t_max);
  int nodes = 0;
  while (nodes < static_cast<int>(traj.size()) && traj.times[nodes] <= t_max + tol) ++nodes;
  if (nodes < 2) throw PreconditionError("conjugate_scan: need at least one record after t = 0");
  const OperatorContext ctx(traj, traj.times[nodes - 1], nodes);
  const OperatorAssembler asmb(ctx, space);
  std::vector<ConjugateScanPoint> out;
  for (int n = 1; n < nodes; ++n) {
    const SpectralReport r = spectral_report(asmb.phi(n), space);
    std::vector<double> s = r.singular_values;
    std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
    const double median = s[s.size() / 2];
    ConjugateScanPoint p;
    p.t = ctx.time(n);
    p.sigma_min_over_t = r.sigma_min / p.t;
    for (double v : r.singular_values) p.multiplicity += v < 1e-3 * median;
    p.flagged = p.multiplicity > 0;
    out.push_back(p);
  }
  return out;
}

}  // namespace chanlab
