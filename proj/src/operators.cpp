#include "chanlab/operators.hpp"

#include <cmath>
#include <string>

#include "chanlab/derivatives.hpp"

namespace chanlab {

VectorField velocity_of_stream(const ScalarField& f) {
  ScalarField u = ddy(f);
  u *= -1.0;
  return {std::move(u), ddx(f)};
}

double divergence_defect(const VectorField& w) {
  const ScalarField ux = ddx(w.u), vy = ddy(w.v);
  const double scale = std::max({ux.max_abs(), vy.max_abs(), ddy(w.u).max_abs(), ddx(w.v).max_abs(), 1e-300});
  return (ux + vy).max_abs() / scale;
}

namespace {

StreamFunction snap_dirichlet(ScalarField f) {
  const ChannelGrid& g = f.grid();
  for (int i = 0; i < g.nx; ++i) f(i, 0) = f(i, g.ny - 1) = 0.0;
  return StreamFunction::from_field(std::move(f));
}

// (grad_a b)_i = a . grad b_i
VectorField directional(const VectorField& a, const VectorField& b) {
  ScalarField u = hadamard(a.u, ddx(b.u));
  u += hadamard(a.v, ddy(b.u));
  ScalarField v = hadamard(a.u, ddx(b.v));
  v += hadamard(a.v, ddy(b.v));
  return {std::move(u), std::move(v)};
}

}  // namespace

StreamFunction leray_stream(const VectorField& X) {
  require_same_grid(X.u.grid(), X.v.grid());
  // Curl kills discrete gradients exactly since D_x and D_y commute.
  return dirichlet_inverse_laplacian(ddx(X.v) - ddy(X.u));
}

StreamFunction stream_of_velocity(const VectorField& w, double tol_div) {
  const double d = divergence_defect(w);
  if (d > tol_div)
    throw PreconditionError("stream_of_velocity: divergence defect " + std::to_string(d) + " exceeds tolerance");
  return leray_stream(w);
}

ScalarField compose(const ScalarField& g, const AreaDiffeo& eta, InterpolationStats* stats) {
  PointSampler s(g.grid(), eta.images());
  if (stats) stats->clamped += s.clamped();
  return s.apply_on_grid(g);
}

StreamFunction lambda_apply(const StreamFunction& f, const AreaDiffeo& eta) {
  if (!f.is_dirichlet()) throw PreconditionError("lambda_apply: stream must vanish on both walls");
  return dirichlet_inverse_laplacian(twisted_laplacian(f.field(), metric_tensor(eta)));
}

StreamFunction lambda_inverse_apply(const StreamFunction& g, const TwistedSolver& solver, SolveStats* stats) {
  if (!g.is_dirichlet()) throw PreconditionError("lambda_inverse_apply: stream must vanish on both walls");
  return solver.solve(laplacian(g.field()), stats);
}

StreamFunction lambda_inverse_apply(const StreamFunction& g, const AreaDiffeo& eta, SolveStats* stats) {
  return lambda_inverse_apply(g, TwistedSolver(metric_tensor(eta)), stats);
}

StreamFunction lambda_composition(const StreamFunction& f, const AreaDiffeo& eta, const AreaDiffeo& eta_inv) {
  const ScalarField h = compose(f.field(), eta_inv);
  return dirichlet_inverse_laplacian(compose(laplacian(h), eta));
}

StreamFunction lambda_inverse_composition(const StreamFunction& g, const AreaDiffeo& eta,
                                          const AreaDiffeo& eta_inv) {
  const ScalarField q = compose(laplacian(g.field()), eta_inv);
  const StreamFunction s = dirichlet_inverse_laplacian(q);
  return snap_dirichlet(compose(s.field(), eta));
}

VectorField Ad_apply(const AreaDiffeo& eta, const AreaDiffeo& eta_inv, const VectorField& w) {
  const JacobianField J = jacobian(eta);
  PointSampler s(eta.grid(), eta_inv.images());
  const ScalarField a = s.apply_on_grid(J.xx), b = s.apply_on_grid(J.xy);
  const ScalarField c = s.apply_on_grid(J.yx), d = s.apply_on_grid(J.yy);
  const ScalarField wu = s.apply_on_grid(w.u), wv = s.apply_on_grid(w.v);
  ScalarField u = hadamard(a, wu);
  u += hadamard(b, wv);
  ScalarField v = hadamard(c, wu);
  v += hadamard(d, wv);
  return leray_project({std::move(u), std::move(v)});
}

VectorField Ad_star_apply(const AreaDiffeo& eta, const VectorField& v) {
  const JacobianField J = jacobian(eta);
  PointSampler s(eta.grid(), eta.images());
  const ScalarField vu = s.apply_on_grid(v.u), vv = s.apply_on_grid(v.v);
  ScalarField x = hadamard(J.xx, vu);
  x += hadamard(J.yx, vv);
  ScalarField y = hadamard(J.xy, vu);
  y += hadamard(J.yy, vv);
  return leray_project({std::move(x), std::move(y)});
}

VectorField ad_apply(const VectorField& v, const VectorField& w) {
  VectorField r = directional(w, v);
  r.axpy(-1.0, directional(v, w));
  return r;
}

namespace {

VectorField k_raw(const VectorField& v, const VectorField& w) {
  VectorField X = directional(w, v);
  const ScalarField w1x = ddx(w.u), w2x = ddx(w.v), w1y = ddy(w.u), w2y = ddy(w.v);
  X.u += hadamard(w1x, v.u);
  X.u += hadamard(w2x, v.v);
  X.v += hadamard(w1y, v.u);
  X.v += hadamard(w2y, v.v);
  return X;
}

}  // namespace

VectorField K_apply(const VectorField& v, const VectorField& w) { return leray_project(k_raw(v, w)); }

StreamFunction K_stream(const VectorField& v, const ScalarField& g) {
  return leray_stream(k_raw(v, velocity_of_stream(g)));
}

// ----------------------------------------------------------- context

OperatorContext::OperatorContext(const GeodesicTrajectory& traj, double t, int quadrature_nodes)
    : traj_(&traj), t_(t) {
  if (quadrature_nodes < 2) throw PreconditionError("OperatorContext: need at least 2 quadrature nodes");
  if (traj.times.empty() || traj.flows.size() != traj.size() || traj.inverse_flows.size() != traj.size())
    throw PreconditionError("OperatorContext: trajectory lacks flows or inverse flows");
  const double tol = 1e-9 * std::max(1.0, t);
  if (t < -tol || t > traj.horizon() + tol) throw PreconditionError("OperatorContext: t outside trajectory");
  std::size_t last = 0;
  while (last + 1 < traj.size() && traj.times[last + 1] <= t + tol) ++last;
  if (std::abs(traj.times[last] - t) > tol)
    throw PreconditionError("OperatorContext: t is not a stored record time");
  const std::size_t intervals = static_cast<std::size_t>(quadrature_nodes - 1);
  if (last == 0 && t == 0.0) {
    index_.assign(quadrature_nodes, 0);
  } else {
    if (last % intervals != 0)
      throw PreconditionError("OperatorContext: " + std::to_string(quadrature_nodes) +
                              " nodes do not align with the " + std::to_string(last + 1) + " records in [0, t]");
    const std::size_t stride = last / intervals;
    for (std::size_t m = 0; m <= intervals; ++m) index_.push_back(m * stride);
  }
  solvers_.resize(index_.size());
  velocities_.resize(index_.size());
  for (std::size_t m = 0; m < index_.size(); ++m) {
    solvers_[m] = std::make_unique<TwistedSolver>(metric_tensor(eta(static_cast<int>(m))));
    velocities_[m] = std::make_unique<VectorField>(velocity_of_stream(base_stream(static_cast<int>(m))));
  }
}

double OperatorContext::weight(int m) const {
  const double h = step();
  return (m == 0 || m == nodes() - 1) ? 0.5 * h : h;
}

const TwistedSolver& OperatorContext::solver(int m) const { return *solvers_[m]; }
const VectorField& OperatorContext::base_velocity(int m) const { return *velocities_[m]; }

StreamFunction omega_hat_apply(const OperatorContext& ctx, const StreamFunction& f) {
  StreamFunction acc(ctx.grid());
  for (int m = 0; m < ctx.nodes(); ++m) acc.axpy(ctx.weight(m), lambda_inverse_apply(f, ctx.solver(m)));
  return acc;
}

namespace {

// Ad_{eta^-1} K_v Ad_eta in stream form.
StreamFunction volterra_kernel(const OperatorContext& ctx, int m, const StreamFunction& y) {
  const ScalarField pushed = compose(y.field(), ctx.eta_inv(m));
  const StreamFunction k = K_stream(ctx.base_velocity(m), pushed);
  return snap_dirichlet(compose(k.field(), ctx.eta(m)));
}

double rel_diff(const StreamFunction& a, const StreamFunction& b) {
  const double s = std::max(a.field().max_abs(), 1e-300);
  return (a.field() - b.field()).max_abs() / s;
}

}  // namespace

PhiResult phi_solve(const OperatorContext& ctx, const VectorField& w0) {
  const ChannelGrid& g = ctx.grid();
  const StreamFunction f0 = stream_of_velocity(w0, 1e-8);
  const int Q = ctx.nodes();
  const double h = ctx.step();
  PhiResult res;
  StreamFunction omega(g);               // Omega-hat at the current node
  StreamFunction history(g);             // sum_{m<n} c_m M_m y_m with c_0 = h/2
  StreamFunction prev_linv = lambda_inverse_apply(f0, ctx.solver(0));
  StreamFunction y(g), my0(g);
  for (int n = 1; n < Q; ++n) {
    const StreamFunction linv = lambda_inverse_apply(f0, ctx.solver(n));
    omega.axpy(0.5 * h, prev_linv);
    omega.axpy(0.5 * h, linv);
    prev_linv = linv;
    if (n == 1) history = StreamFunction(g);  // y_0 = 0 contributes nothing
    StreamFunction rhs = omega;
    rhs.axpy(-1.0, history);
    StreamFunction guess = y;
    StreamFunction next = rhs;
    for (int it = 0; it < 100; ++it) {
      next = rhs;
      next.axpy(-0.5 * h, volterra_kernel(ctx, n, guess));
      ++res.fixed_point_iterations;
      const double d = rel_diff(next, guess);
      guess = next;
      if (d < 1e-13) break;
      if (it == 99) throw NumericalError("phi_apply: Volterra fixed point did not converge");
    }
    y = next;
    history.axpy(h, volterra_kernel(ctx, n, y));
  }
  res.y = y;
  res.omega = omega;
  const VectorField Y = velocity_of_stream(y);
  const JacobianField J = jacobian(ctx.eta(Q - 1));
  ScalarField pu = hadamard(J.xx, Y.u);
  pu += hadamard(J.xy, Y.v);
  ScalarField pv = hadamard(J.yx, Y.u);
  pv += hadamard(J.yy, Y.v);
  res.phi = {std::move(pu), std::move(pv)};
  return res;
}

VectorField dexp_fd_oracle(const StreamFunction& f0, const StreamFunction& g0, double t, double eps,
                           const OracleOptions& opts) {
  if (!(eps > 0.0)) throw PreconditionError("dexp_fd_oracle: eps must be positive");
  EulerOptions eo;
  eo.record_every = opts.record_every;
  auto endpoint = [&](double sign) {
    StreamFunction f = f0;
    f.axpy(sign * eps, g0);
    GeodesicTrajectory tr = solve_euler(f, t, opts.dt, eo);
    flow_map(tr);
    return tr.flows.back();
  };
  const AreaDiffeo plus = endpoint(1.0), minus = endpoint(-1.0);
  VectorField J{plus.displacement() - minus.displacement(), plus.Y() - minus.Y()};
  J.u *= 0.5 / eps;
  J.v *= 0.5 / eps;
  return J;
}

}  // namespace chanlab
