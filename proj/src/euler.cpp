#include "chanlab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "chanlab/derivatives.hpp"
#include "chanlab/spectral_x.hpp"

namespace chanlab {

// ---------------------------------------------------------------- AreaDiffeo

AreaDiffeo::AreaDiffeo(ScalarField dX, ScalarField Y) : dX_(std::move(dX)), Y_(std::move(Y)) {
  require_same_grid(dX_.grid(), Y_.grid());
  const ChannelGrid& g = dX_.grid();
  const double tol = 1e-9 * g.height;
  for (int i = 0; i < g.nx; ++i) {
    if (std::abs(Y_(i, 0)) > tol) throw PreconditionError("AreaDiffeo: boundary row leaves the wall");
    Y_(i, 0) = 0.0;
    for (int j = 0; j < g.ny; ++j)
      if (Y_(i, j) < -tol || Y_(i, j) > g.height + tol)
        throw PreconditionError("AreaDiffeo: Y outside [0, L]");
  }
  if (!dX_.all_finite() || !Y_.all_finite()) throw NumericalError("AreaDiffeo: non-finite samples");
}

AreaDiffeo AreaDiffeo::identity(const ChannelGrid& g) {
  return AreaDiffeo(ScalarField(g), ScalarField::sample(g, [](double, double y) { return y; }));
}

ScalarField AreaDiffeo::X() const {
  ScalarField x = dX_;
  const ChannelGrid& g = grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) x(i, j) += g.x(i);
  return x;
}

std::vector<Point> AreaDiffeo::images() const {
  const ChannelGrid& g = grid();
  std::vector<Point> p(g.size());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) p[g.index(i, j)] = {g.x(i) + dX_(i, j), Y_(i, j)};
  return p;
}

std::vector<Point> AreaDiffeo::evaluate(std::span<const Point> pts, InterpolationStats* stats) const {
  PointSampler s(grid(), pts);
  if (stats) stats->clamped += s.clamped();
  const auto dx = s.apply(dX_);
  const auto y = s.apply(Y_);
  std::vector<Point> out(pts.size());
  for (std::size_t p = 0; p < pts.size(); ++p) out[p] = {pts[p].x + dx[p], y[p]};
  return out;
}

AreaDiffeo AreaDiffeo::compose(const AreaDiffeo& inner, InterpolationStats* stats) const {
  const ChannelGrid& g = grid();
  const auto img = evaluate(inner.images(), stats);
  ScalarField dX(g), Y(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const Point& p = img[g.index(i, j)];
      dX(i, j) = p.x - g.x(i);
      Y(i, j) = std::clamp(p.y, 0.0, g.height);
    }
  for (int i = 0; i < g.nx; ++i) Y(i, 0) = 0.0;
  return AreaDiffeo(std::move(dX), std::move(Y));
}

ScalarField JacobianField::det() const {
  ScalarField d = hadamard(xx, yy);
  d -= hadamard(xy, yx);
  return d;
}

JacobianField jacobian(const AreaDiffeo& eta) {
  JacobianField J{ddx(eta.displacement()), ddy(eta.displacement()), ddx(eta.Y()), ddy(eta.Y())};
  for (double& v : J.xx.values()) v += 1.0;
  return J;
}

MetricTensorField metric_tensor(const AreaDiffeo& eta) {
  const JacobianField J = jacobian(eta);
  const ChannelGrid& g = eta.grid();
  MetricTensorField G{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double a = J.xx.data()[p], b = J.xy.data()[p], c = J.yx.data()[p], d = J.yy.data()[p];
    const double g11 = b * b + d * d, g12 = -(a * b + c * d), g22 = a * a + c * c;
    if (!(g11 > 0.0) || !(g11 * g22 - g12 * g12 > 0.0))
      throw NumericalError("metric_tensor: lost positive definiteness");
    G.g11.data()[p] = g11;
    G.g12.data()[p] = g12;
    G.g22.data()[p] = g22;
  }
  return G;
}

double min_metric_eigenvalue(const MetricTensorField& G) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < G.g11.size(); ++p) {
    const double a = G.g11.data()[p], b = G.g12.data()[p], c = G.g22.data()[p];
    const double tr = 0.5 * (a + c), dd = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    m = std::min(m, tr - dd);
  }
  return m;
}

double sup_jacobian_norm(const AreaDiffeo& eta) {
  const JacobianField J = jacobian(eta);
  double m = 0.0;
  for (std::size_t p = 0; p < J.xx.size(); ++p) {
    const double a = J.xx.data()[p], b = J.xy.data()[p], c = J.yx.data()[p], d = J.yy.data()[p];
    // largest singular value of [[a, b], [c, d]]
    const double s = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double smax2 = 0.5 * (s + std::sqrt(std::max(0.0, s * s - 4.0 * det * det)));
    m = std::max(m, std::sqrt(smax2));
  }
  return m;
}

WorstPoint jacobian_defect(const AreaDiffeo& eta) {
  const ScalarField d = jacobian(eta).det();
  const ChannelGrid& g = eta.grid();
  WorstPoint w;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 1; j < g.ny - 1; ++j) {
      const double e = std::abs(d(i, j) - 1.0);
      if (e > w.value) w = {e, i, j};
    }
  return w;
}

double composition_defect(const AreaDiffeo& eta, const AreaDiffeo& eta_inv) {
  const ChannelGrid& g = eta.grid();
  const auto img = eta.evaluate(eta_inv.images());
  double m = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const Point& p = img[g.index(i, j)];
      double ex = std::remainder(p.x - g.x(i), kTwoPi);
      m = std::max({m, std::abs(ex), std::abs(p.y - g.y(j))});
    }
  return m;
}

// ------------------------------------------------------------ Euler solver

namespace {

struct Velocity {
  ScalarField u, v;
};

Velocity velocity(const ScalarField& f) {
  ScalarField u = ddy(f);
  u *= -1.0;
  return {std::move(u), ddx(f)};
}

double max_speed(const Velocity& w) { return std::max(w.u.max_abs(), w.v.max_abs()); }

// Gauss-Legendre, 8 nodes on [-1, 1].
constexpr double kGLx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                            0.9602898564975363};
constexpr double kGLw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                            0.1012285362903763};

double integrate(const std::function<double(double)>& fn, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += kGLw[k] * (fn(c - h * kGLx[k]) + fn(c + h * kGLx[k]));
  return s * h;
}

}  // namespace

StreamFunction velocity_profile_stream(const std::function<double(double)>& u, const ChannelGrid& g) {
  std::vector<double> prof(g.ny, 0.0);
  for (int j = 1; j < g.ny; ++j) prof[j] = prof[j - 1] - integrate(u, g.y(j - 1), g.y(j));
  ScalarField f(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) f(i, j) = prof[j];
  return StreamFunction::from_field(std::move(f));
}

GeodesicTrajectory solve_euler(const StreamFunction& f0, double horizon, double dt,
                               const EulerOptions& opts) {
  const ChannelGrid& g = f0.grid();
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw PreconditionError("solve_euler: need dt > 0, horizon >= 0");
  if (opts.record_every < 1) throw PreconditionError("solve_euler: record_every must be positive");
  const long steps = std::max(0L, std::lround(horizon / dt));
  if (std::abs(steps * dt - horizon) > 1e-9 * std::max(1.0, horizon))
    throw PreconditionError("solve_euler: horizon is not a multiple of dt");
  const double flux = f0.flux();
  const double hmin = std::min(g.dx, g.dy);
  const SpectralX& sx = spectral_x(g.nx);

  GeodesicTrajectory traj;
  traj.grid = g;

  auto record = [&](double t, const StreamFunction& f, const ScalarField& omega) {
    const Velocity w = velocity(f.field());
    traj.times.push_back(t);
    traj.streams.push_back(f);
    traj.energy.push_back(inner_product_L2(w.u, w.u) + inner_product_L2(w.v, w.v));
    traj.enstrophy.push_back(inner_product_L2(omega, omega));
  };
  auto check_cfl = [&](const Velocity& w, double t) {
    const double vmax = max_speed(w);
    if (dt * vmax > 0.5 * hmin) {
      std::ostringstream os;
      os << "solve_euler: CFL violated at t = " << t << " (dt * |v|max = " << dt * vmax
         << " > " << 0.5 * hmin << ")";
      throw PreconditionError(os.str());
    }
  };
  auto rhs = [&](const ScalarField& omega, double t, bool cfl) {
    const StreamFunction f = dirichlet_inverse_laplacian(omega, flux);
    const Velocity w = velocity(f.field());
    if (cfl) check_cfl(w, t);
    ScalarField r = hadamard(w.u, ddx(omega));
    r += hadamard(w.v, ddy(omega));
    r *= -1.0;
    if (opts.dealias) r = sx.filter.apply(r);
    return r;
  };

  ScalarField omega = laplacian(f0.field());
  record(0.0, f0, omega);
  for (long n = 0; n < steps; ++n) {
    const double t = n * dt;
    const ScalarField k1 = rhs(omega, t, true);
    ScalarField s = omega;
    s.axpy(0.5 * dt, k1);
    const ScalarField k2 = rhs(s, t + 0.5 * dt, false);
    s = omega;
    s.axpy(0.5 * dt, k2);
    const ScalarField k3 = rhs(s, t + 0.5 * dt, false);
    s = omega;
    s.axpy(dt, k3);
    const ScalarField k4 = rhs(s, t + dt, false);
    omega.axpy(dt / 6.0, k1);
    omega.axpy(dt / 3.0, k2);
    omega.axpy(dt / 3.0, k3);
    omega.axpy(dt / 6.0, k4);
    if (!omega.all_finite()) {
      std::ostringstream os;
      os << "solve_euler: non-finite vorticity after step " << n + 1 << " (t = " << t + dt << ")";
      throw NumericalError(os.str());
    }
    if ((n + 1) % opts.record_every == 0 || n + 1 == steps)
      record((n + 1) * dt, dirichlet_inverse_laplacian(omega, flux), omega);
  }
  return traj;
}

// ------------------------------------------------------------- flow maps

namespace {

class VelocityHistory {
 public:
  explicit VelocityHistory(const GeodesicTrajectory& traj) : times_(traj.times) {
    for (const auto& f : traj.streams) vel_.push_back(velocity(f.field()));
  }

  // Cubic Lagrange in time through the nearest records.
  Velocity at(double t) const {
    const int n = static_cast<int>(times_.size());
    if (n == 1) return vel_[0];
    int a = static_cast<int>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin()) - 1;
    a = std::clamp(a, 0, n - 2);
    const int width = std::min(4, n);
    const int s = std::clamp(a - 1, 0, n - width);
    Velocity w{ScalarField(vel_[0].u.grid()), ScalarField(vel_[0].u.grid())};
    for (int p = 0; p < width; ++p) {
      double l = 1.0;
      for (int q = 0; q < width; ++q)
        if (q != p) l *= (t - times_[s + q]) / (times_[s + p] - times_[s + q]);
      if (l == 0.0) continue;
      w.u.axpy(l, vel_[s + p].u);
      w.v.axpy(l, vel_[s + p].v);
    }
    return w;
  }

 private:
  std::vector<double> times_;
  std::vector<Velocity> vel_;
};

struct Advector {
  const ChannelGrid& g;
  std::size_t clamped = 0;

  void stage(const Velocity& w, const std::vector<Point>& p, std::vector<double>& ku,
             std::vector<double>& kv) {
    PointSampler s(g, p);
    clamped += s.clamped();
    ku = s.apply(w.u);
    kv = s.apply(w.v);
  }

  // RK4 for dx/dt = sign * w(t, x), t from t0 to t1 (t1 may be below t0).
  template <class Field>
  void advance(std::vector<Point>& p, double t0, double t1, int nsub, Field field) {
    const double h = (t1 - t0) / nsub;
    std::vector<double> k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    std::vector<Point> q(p.size());
    for (int s = 0; s < nsub; ++s) {
      const double t = t0 + s * h;
      stage(field(t), p, k1u, k1v);
      for (std::size_t i = 0; i < p.size(); ++i) q[i] = {p[i].x + 0.5 * h * k1u[i], p[i].y + 0.5 * h * k1v[i]};
      const Velocity mid = field(t + 0.5 * h);
      stage(mid, q, k2u, k2v);
      for (std::size_t i = 0; i < p.size(); ++i) q[i] = {p[i].x + 0.5 * h * k2u[i], p[i].y + 0.5 * h * k2v[i]};
      stage(mid, q, k3u, k3v);
      for (std::size_t i = 0; i < p.size(); ++i) q[i] = {p[i].x + h * k3u[i], p[i].y + h * k3v[i]};
      stage(field(t + h), q, k4u, k4v);
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i].x += h / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
        p[i].y += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
      }
    }
  }
};

std::vector<Point> grid_points(const ChannelGrid& g) { return AreaDiffeo::identity(g).images(); }

AreaDiffeo from_points(const ChannelGrid& g, const std::vector<Point>& p) {
  ScalarField dX(g), Y(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const Point& q = p[g.index(i, j)];
      dX(i, j) = q.x - g.x(i);
      Y(i, j) = std::clamp(q.y, 0.0, g.height);
    }
  for (int i = 0; i < g.nx; ++i) Y(i, 0) = 0.0;
  return AreaDiffeo(std::move(dX), std::move(Y));
}

void check_area(const AreaDiffeo& eta, double t, const char* what) {
  const WorstPoint w = jacobian_defect(eta);
  if (w.value > kJacobianTol) {
    std::ostringstream os;
    os << what << ": |det D eta - 1| = " << w.value << " at node (" << w.i << ", " << w.j
       << "), t = " << t;
    throw NumericalError(os.str());
  }
}

}  // namespace

void flow_map(GeodesicTrajectory& traj) {
  if (traj.streams.empty()) throw PreconditionError("flow_map: trajectory has no streams");
  const ChannelGrid& g = traj.grid;
  VelocityHistory hist(traj);
  Advector adv{g};
  std::vector<Point> p = grid_points(g);
  traj.flows.clear();
  traj.flows.push_back(AreaDiffeo::identity(g));
  for (std::size_t n = 0; n + 1 < traj.size(); ++n) {
    adv.advance(p, traj.times[n], traj.times[n + 1], 1, [&](double t) { return hist.at(t); });
    traj.flows.push_back(from_points(g, p));
    check_area(traj.flows.back(), traj.times[n + 1], "flow_map");
  }
  traj.clamped += adv.clamped;
}

void inverse_flow_map(GeodesicTrajectory& traj) {
  if (traj.streams.empty()) throw PreconditionError("inverse_flow_map: trajectory has no streams");
  const ChannelGrid& g = traj.grid;
  VelocityHistory hist(traj);
  Advector adv{g};
  InterpolationStats stats;
  traj.inverse_flows.clear();
  traj.inverse_flows.push_back(AreaDiffeo::identity(g));
  for (std::size_t n = 0; n + 1 < traj.size(); ++n) {
    std::vector<Point> p = grid_points(g);
    adv.advance(p, traj.times[n + 1], traj.times[n], 1, [&](double t) { return hist.at(t); });
    const auto img = traj.inverse_flows.back().evaluate(p, &stats);
    traj.inverse_flows.push_back(from_points(g, img));
  }
  traj.clamped += adv.clamped + stats.clamped;
  if (traj.flows.size() == traj.inverse_flows.size()) {
    const double bound = 10.0 * kJacobianTol * std::max(g.dx, g.dy);
    for (std::size_t n = 0; n < traj.size(); ++n) {
      const double d = composition_defect(traj.flows[n], traj.inverse_flows[n]);
      if (d > bound) {
        std::ostringstream os;
        os << "inverse_flow_map: |eta o eta^-1 - id| = " << d << " exceeds " << bound << " at t = "
           << traj.times[n];
        throw NumericalError(os.str());
      }
    }
  }
}

// ---------------------------------------------------------- shear family

namespace {

void check_decay(const std::function<double(double)>& phi, const ChannelGrid& g) {
  double peak = 0.0;
  for (int j = 0; j < g.ny; ++j) peak = std::max(peak, std::abs(phi(g.y(j))));
  if (std::abs(phi(g.height)) >= 1e-3 * peak)
    throw PreconditionError("shear_flow: profile does not decay toward the far wall");
}

AreaDiffeo shear_map(const std::function<double(double)>& phi, double t, const ChannelGrid& g) {
  ScalarField dX(g), Y(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      dX(i, j) = t * phi(g.y(j));
      Y(i, j) = g.y(j);
    }
  return AreaDiffeo(std::move(dX), std::move(Y));
}

}  // namespace

std::pair<AreaDiffeo, StreamFunction> shear_flow(const std::function<double(double)>& phi, double t,
                                                 const ChannelGrid& g) {
  check_decay(phi, g);
  return {shear_map(phi, t, g), velocity_profile_stream(phi, g)};
}

GeodesicTrajectory shear_trajectory(const std::function<double(double)>& phi, double horizon,
                                    int intervals, const ChannelGrid& g) {
  check_decay(phi, g);
  if (intervals < 1) throw PreconditionError("shear_trajectory: need at least one interval");
  GeodesicTrajectory traj;
  traj.grid = g;
  const StreamFunction f = velocity_profile_stream(phi, g);
  const Velocity w = velocity(f.field());
  const double e = inner_product_L2(w.u, w.u);
  const ScalarField omega = laplacian(f.field());
  const double z = inner_product_L2(omega, omega);
  for (int k = 0; k <= intervals; ++k) {
    const double t = horizon * k / intervals;
    traj.times.push_back(t);
    traj.streams.push_back(f);
    traj.flows.push_back(shear_map(phi, t, g));
    traj.inverse_flows.push_back(shear_map(phi, -t, g));
    traj.energy.push_back(e);
    traj.enstrophy.push_back(z);
  }
  return traj;
}

GeodesicTrajectory identity_trajectory(const ChannelGrid& g, double horizon, int intervals) {
  if (intervals < 1) throw PreconditionError("identity_trajectory: need at least one interval");
  GeodesicTrajectory traj;
  traj.grid = g;
  for (int k = 0; k <= intervals; ++k) {
    traj.times.push_back(horizon * k / intervals);
    traj.streams.emplace_back(g);
    traj.flows.push_back(AreaDiffeo::identity(g));
    traj.inverse_flows.push_back(AreaDiffeo::identity(g));
    traj.energy.push_back(0.0);
    traj.enstrophy.push_back(0.0);
  }
  return traj;
}

std::pair<AreaDiffeo, AreaDiffeo> steady_flow(const StreamFunction& psi, double t, int steps) {
  const ChannelGrid& g = psi.grid();
  Velocity w = velocity(psi.field());
  Velocity back{(-1.0) * w.u, (-1.0) * w.v};
  Advector adv{g};
  std::vector<Point> p = grid_points(g), q = grid_points(g);
  adv.advance(p, 0.0, t, steps, [&](double) { return w; });
  adv.advance(q, 0.0, t, steps, [&](double) { return back; });
  return {from_points(g, p), from_points(g, q)};
}

}  // namespace chanlab
