#pragma once
// Pointwise operator layer on grid fields: velocity/stream conversion, the
// Leray-type projection, Ad and its L2 adjoint, K_v, the conjugated
// Laplacian and its inverse, and the d exp operator with a finite-difference
// oracle.

#include <memory>
#include <vector>

#include "chanlab/elliptic.hpp"
#include "chanlab/euler.hpp"
#include "chanlab/grid.hpp"

namespace chanlab {

VectorField velocity_of_stream(const ScalarField& f);
inline VectorField velocity_of_stream(const StreamFunction& f) { return velocity_of_stream(f.field()); }

// max |div w| relative to the size of grad w.
double divergence_defect(const VectorField& w);

inline constexpr double kDivergenceTol = 1e-10;

// Stream of the divergence-free part of X: Lap_0^{-1} curl X with both walls
// held at zero.
StreamFunction leray_stream(const VectorField& X);
inline VectorField leray_project(const VectorField& X) { return velocity_of_stream(leray_stream(X)); }

// As leray_stream, but rejects inputs that are not divergence free.
StreamFunction stream_of_velocity(const VectorField& w, double tol_div = kDivergenceTol);

// g o eta, sampled at the grid nodes.
ScalarField compose(const ScalarField& g, const AreaDiffeo& eta, InterpolationStats* stats = nullptr);

// Lap_0^{-1} div(G grad f).
StreamFunction lambda_apply(const StreamFunction& f, const AreaDiffeo& eta);
StreamFunction lambda_inverse_apply(const StreamFunction& g, const AreaDiffeo& eta, SolveStats* stats = nullptr);
StreamFunction lambda_inverse_apply(const StreamFunction& g, const TwistedSolver& solver,
                                    SolveStats* stats = nullptr);

// Composition forms Lap_0^{-1} R_eta Lap R_{eta^-1} and its inverse, used as oracles.
StreamFunction lambda_composition(const StreamFunction& f, const AreaDiffeo& eta, const AreaDiffeo& eta_inv);
StreamFunction lambda_inverse_composition(const StreamFunction& g, const AreaDiffeo& eta,
                                          const AreaDiffeo& eta_inv);

// Ad_eta w = (D eta o eta^-1)(w o eta^-1), projected onto tangent fields.
VectorField Ad_apply(const AreaDiffeo& eta, const AreaDiffeo& eta_inv, const VectorField& w);
// Ad*_eta v = P(D eta^T (v o eta)).
VectorField Ad_star_apply(const AreaDiffeo& eta, const VectorField& v);

// ad_v w = -[v, w] = grad_w v - grad_v w (unprojected).
VectorField ad_apply(const VectorField& v, const VectorField& w);
// K_v w = ad*_w v = P(grad_w v + (grad w)^T v).
VectorField K_apply(const VectorField& v, const VectorField& w);
StreamFunction K_stream(const VectorField& v, const ScalarField& g);

// Quadrature nodes along a trajectory with the per-node data the operators need.
class OperatorContext {
 public:
  OperatorContext(const GeodesicTrajectory& traj, double t, int quadrature_nodes);

  const GeodesicTrajectory& trajectory() const { return *traj_; }
  const ChannelGrid& grid() const { return traj_->grid; }
  double t() const { return t_; }
  int nodes() const { return static_cast<int>(index_.size()); }
  double time(int m) const { return traj_->times[index_[m]]; }
  // Trapezoid weight of node m for the integral over [0, t].
  double weight(int m) const;
  double step() const { return nodes() > 1 ? t_ / (nodes() - 1) : 0.0; }

  const AreaDiffeo& eta(int m) const { return traj_->flows[index_[m]]; }
  const AreaDiffeo& eta_inv(int m) const { return traj_->inverse_flows[index_[m]]; }
  const StreamFunction& base_stream(int m) const { return traj_->streams[index_[m]]; }
  const MetricTensorField& metric(int m) const { return solver(m).metric(); }
  const TwistedSolver& solver(int m) const;
  const VectorField& base_velocity(int m) const;

 private:
  const GeodesicTrajectory* traj_;
  double t_;
  std::vector<std::size_t> index_;
  mutable std::vector<std::unique_ptr<TwistedSolver>> solvers_;
  mutable std::vector<std::unique_ptr<VectorField>> velocities_;
};

// Integral of Lambda_tau^{-1} f over [0, t] by the trapezoid rule on the nodes.
StreamFunction omega_hat_apply(const OperatorContext& ctx, const StreamFunction& f);

struct PhiResult {
  VectorField phi;          // Phi_t w0 as a field along eta(t), indexed by label
  StreamFunction y;         // Y_t = (Omega_t - Gamma_t) w0 in stream form
  StreamFunction omega;     // Omega_t w0 in stream form
  int fixed_point_iterations = 0;
};

// Volterra time stepping of Phi_t = D eta(t) (Omega_t - Gamma_t).
PhiResult phi_solve(const OperatorContext& ctx, const VectorField& w0);
inline VectorField phi_apply(const OperatorContext& ctx, const VectorField& w0) { return phi_solve(ctx, w0).phi; }

struct OracleOptions {
  double dt = 1e-2;
  int record_every = 1;
};

// Central difference of exp_e(t (v0 +- eps w0)) read off at each label.
VectorField dexp_fd_oracle(const StreamFunction& f0, const StreamFunction& g0, double t, double eps,
                           const OracleOptions& opts = {});

}  // namespace chanlab
