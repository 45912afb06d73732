#pragma once
// Incompressible Euler in vorticity form on the channel, Lagrangian flow maps,
// and the analytic shear family.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "chanlab/elliptic.hpp"
#include "chanlab/grid.hpp"
#include "chanlab/interpolate.hpp"

namespace chanlab {

// Area-preserving map sampled at the grid nodes, stored as the periodic
// displacement X - x together with Y.
class AreaDiffeo {
 public:
  AreaDiffeo() = default;
  AreaDiffeo(ScalarField dX, ScalarField Y);
  static AreaDiffeo identity(const ChannelGrid& g);

  const ChannelGrid& grid() const { return dX_.grid(); }
  const ScalarField& displacement() const { return dX_; }
  const ScalarField& Y() const { return Y_; }
  ScalarField X() const;

  // Images of the grid nodes.
  std::vector<Point> images() const;
  // eta(p) for arbitrary points.
  std::vector<Point> evaluate(std::span<const Point> pts, InterpolationStats* stats = nullptr) const;
  // (this o inner)
  AreaDiffeo compose(const AreaDiffeo& inner, InterpolationStats* stats = nullptr) const;

 private:
  ScalarField dX_, Y_;
};

struct JacobianField {
  ScalarField xx, xy, yx, yy;  // dX/dx, dX/dy, dY/dx, dY/dy
  ScalarField det() const;
};

JacobianField jacobian(const AreaDiffeo& eta);
MetricTensorField metric_tensor(const AreaDiffeo& eta);

// Smallest eigenvalue of G over the grid.
double min_metric_eigenvalue(const MetricTensorField& G);
// max over the grid of the spectral norm of D eta.
double sup_jacobian_norm(const AreaDiffeo& eta);

struct WorstPoint {
  double value = 0.0;
  int i = 0, j = 0;
};
// Largest |det D eta - 1| over interior nodes.
WorstPoint jacobian_defect(const AreaDiffeo& eta);
// max |eta o eta_inv - id| over grid nodes (x wrapped).
double composition_defect(const AreaDiffeo& eta, const AreaDiffeo& eta_inv);

inline constexpr double kJacobianTol = 1e-3;

struct EulerOptions {
  int record_every = 10;
  bool dealias = true;
};

struct GeodesicTrajectory {
  ChannelGrid grid;
  std::vector<double> times;
  std::vector<StreamFunction> streams;
  std::vector<AreaDiffeo> flows;
  std::vector<AreaDiffeo> inverse_flows;
  std::vector<double> energy;
  std::vector<double> enstrophy;
  std::size_t clamped = 0;

  std::size_t size() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

// Stream with -d_y f = u(y): f(y) = -int_0^y u.
StreamFunction velocity_profile_stream(const std::function<double(double)>& u, const ChannelGrid& g);

GeodesicTrajectory solve_euler(const StreamFunction& f0, double horizon, double dt,
                               const EulerOptions& opts = {});

// Forward particle flow of every grid node; checks area preservation.
void flow_map(GeodesicTrajectory& traj);
// Chained backward flows; checks the composition defect.
void inverse_flow_map(GeodesicTrajectory& traj);

std::pair<AreaDiffeo, StreamFunction> shear_flow(const std::function<double(double)>& phi, double t,
                                                 const ChannelGrid& g);

// Exact trajectory of the steady shear with records at k * horizon / intervals.
GeodesicTrajectory shear_trajectory(const std::function<double(double)>& phi, double horizon,
                                    int intervals, const ChannelGrid& g);

// Zero-velocity trajectory.
GeodesicTrajectory identity_trajectory(const ChannelGrid& g, double horizon, int intervals);

// Time-t flow of a steady stream psi and its inverse (flow of -v).
std::pair<AreaDiffeo, AreaDiffeo> steady_flow(const StreamFunction& psi, double t, int steps);

}  // namespace chanlab
