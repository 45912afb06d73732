#include "chanlab/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chanlab/derivatives.hpp"
#include "chanlab/error.hpp"
#include "chanlab/operators.hpp"

namespace chanlab {

double gradient_norm(const ScalarField& f, int m, int n) {
  const ScalarField fx = partial_derivative(f, m + 1, n), fy = partial_derivative(f, m, n + 1);
  return std::sqrt(inner_product_L2(fx, fx) + inner_product_L2(fy, fy));
}

NormReport homogeneous_norm(const ScalarField& f, int s) {
  if (s > kMaxSobolevS) throw PreconditionError("homogeneous_norm: order " + std::to_string(s + 1) + " not supported");
  NormReport r;
  r.kind = NormKind::HomogeneousSobolev;
  for (int order = 0; order <= s; ++order)
    for (int i = 0; i <= order; ++i) {
      r.per_term.push_back(gradient_norm(f, i, order - i));
      r.value += r.per_term.back();
    }
  return r;
}

double eta_c_norm(const AreaDiffeo& eta, int k) {
  if (k < 1 || k > 6) throw PreconditionError("eta_c_norm: order must be in [1, 6]");
  double m = 0.0;
  for (int order = 1; order <= k; ++order)
    for (int i = 0; i <= order; ++i) {
      ScalarField dX = partial_derivative(eta.displacement(), i, order - i);
      if (order == 1 && i == 1) dX += ScalarField(eta.grid(), 1.0);  // X = x + displacement
      m = std::max({m, dX.max_abs(), partial_derivative(eta.Y(), i, order - i).max_abs()});
    }
  return m;
}

namespace {

std::size_t records_up_to(const GeodesicTrajectory& traj, double t) {
  if (traj.flows.size() != traj.size() || traj.size() == 0)
    throw PreconditionError("constants: trajectory has no flow maps");
  const double tol = 1e-9 * std::max(1.0, t);
  if (t < -tol || t > traj.horizon() + tol) throw PreconditionError("constants: t outside the trajectory");
  std::size_t n = 0;
  while (n < traj.size() && traj.times[n] <= t + tol) ++n;
  return n;
}

struct FlowSup {
  double K_inf = std::numeric_limits<double>::infinity();
  double c1 = 0.0, cs1 = 0.0, C_t = 0.0;
};

FlowSup flow_sup(const GeodesicTrajectory& traj, double t, int s) {
  const std::size_t n = records_up_to(traj, t);
  FlowSup r;
  for (std::size_t i = 0; i < n; ++i) {
    const AreaDiffeo& eta = traj.flows[i];
    r.K_inf = std::min(r.K_inf, min_metric_eigenvalue(metric_tensor(eta)));
    r.c1 = std::max(r.c1, eta_c_norm(eta, 1));
    r.cs1 = std::max(r.cs1, eta_c_norm(eta, s + 1));
    if (i > 0) {
      const double a = sup_jacobian_norm(traj.flows[i - 1]), b = sup_jacobian_norm(eta);
      r.C_t += 0.5 * (traj.times[i] - traj.times[i - 1]) * (1.0 / (a * a) + 1.0 / (b * b));
    }
  }
  return r;
}

double eps_bound(const FlowSup& f, int s) {
  return s <= 1 ? std::numeric_limits<double>::infinity() : f.K_inf / ((s - 1) * f.c1 * f.c1);
}

void check_s(int s) {
  if (s < 1 || s > kMaxSobolevS)
    throw PreconditionError("s must be in [1, " + std::to_string(kMaxSobolevS) + "]");
}

}  // namespace

double eps_max(const GeodesicTrajectory& traj, double t, int s) {
  check_s(s);
  return eps_bound(flow_sup(traj, t, s), s);
}

TrajectoryConstants constants_from_trajectory(const GeodesicTrajectory& traj, double t, int s, double eps) {
  check_s(s);
  const FlowSup f = flow_sup(traj, t, s);
  TrajectoryConstants c;
  c.s = s;
  c.t = t;
  c.eps_max = eps_bound(f, s);
  if (eps <= 0.0) eps = std::isfinite(c.eps_max) ? 0.5 * c.eps_max : 1.0;
  if (!(eps < c.eps_max))
    throw PreconditionError("eps = " + std::to_string(eps) + " is not below the admissible bound " +
                            std::to_string(c.eps_max));
  c.eps = eps;
  c.K_eta_inf = f.K_inf;
  c.c1 = f.c1;
  c.cs1 = f.cs1;
  c.K_eps = f.K_inf - 0.5 * (s - 1) * eps * f.cs1 * f.cs1;
  c.Q_eps = f.c1 * f.c1 / eps;
  c.C_eta = f.cs1 * f.cs1;
  c.C_t = f.C_t;
  return c;
}

std::vector<double> weights_recurrence(double K_eps, double Q_eps, int s) {
  if (!(K_eps > 0.0)) throw PreconditionError("weights_recurrence: K_eps must be positive (eps inadmissible)");
  if (s < 1) throw PreconditionError("weights_recurrence: s must be >= 1");
  std::vector<double> B(s + 1, 1.0);
  double partial = 1.0;  // sum_{j<k} B_j
  const double r = 2.0 * Q_eps / K_eps;
  for (int k = 1; k <= s - 1; ++k) {
    B[k] = r * partial;
    partial += B[k];
  }
  return B;
}

std::vector<double> weights_closed_form(double K_eps, double Q_eps, int s) {
  if (!(K_eps > 0.0)) throw PreconditionError("weights_closed_form: K_eps must be positive");
  std::vector<double> B(s + 1, 1.0);
  const double r = 2.0 * Q_eps / K_eps;
  for (int k = 1; k <= s - 1; ++k) B[k] = r * std::pow(1.0 + r, k - 1);
  return B;
}

WeightedNormSpec make_weighted_spec(const TrajectoryConstants& c) {
  WeightedNormSpec w;
  w.s = c.s;
  w.eps = c.eps;
  w.K_eps = c.K_eps;
  w.Q_eps = c.Q_eps;
  w.C_eta = c.C_eta;
  w.B = weights_recurrence(c.K_eps, c.Q_eps, c.s);
  return w;
}

void validate(const WeightedNormSpec& spec) {
  check_s(spec.s);
  if (static_cast<int>(spec.B.size()) != spec.s + 1) throw PreconditionError("weighted spec: B must have s + 1 entries");
  if (spec.B.front() != 1.0 || spec.B.back() != 1.0) throw PreconditionError("weighted spec: B_0 and B_s must be 1");
  for (double b : spec.B)
    if (!(b > 0.0)) throw PreconditionError("weighted spec: weights must be positive");
  const std::vector<double> ref = weights_recurrence(spec.K_eps, spec.Q_eps, spec.s);
  for (int k = 1; k < spec.s; ++k)
    if (std::abs(ref[k] - spec.B[k]) > 1e-12 * std::abs(ref[k]))
      throw PreconditionError("weighted spec: B does not satisfy the recurrence");
}

double weighted_inner_product(const ScalarField& f, const ScalarField& g, const WeightedNormSpec& spec) {
  check_s(spec.s);
  double acc = 0.0;
  for (int j = 0; j <= spec.s; ++j) {
    const int n = spec.s - j;
    acc += spec.B[j] * (inner_product_L2(partial_derivative(f, j + 1, n), partial_derivative(g, j + 1, n)) +
                        inner_product_L2(partial_derivative(f, j, n + 1), partial_derivative(g, j, n + 1)));
  }
  return acc;
}

NormReport weighted_norm(const ScalarField& f, const WeightedNormSpec& spec) {
  check_s(spec.s);
  NormReport r;
  r.kind = NormKind::Weighted;
  double sq = 0.0;
  for (int j = 0; j <= spec.s; ++j) {
    const double gj = gradient_norm(f, j, spec.s - j);
    r.per_term.push_back(gj * gj);
    sq += spec.B[j] * gj * gj;
  }
  r.value = std::sqrt(sq);
  return r;
}

PositivityGap positivity_gap(const StreamFunction& f, const AreaDiffeo& eta, const WeightedNormSpec& spec,
                             double cs1, double c_hat) {
  const StreamFunction g = lambda_apply(f, eta);
  PositivityGap p;
  p.lhs = weighted_inner_product(f.field(), g.field(), spec);
  const double wn = weighted_norm(f.field(), spec).value;
  const double hs = homogeneous_norm(f.field(), spec.s - 1).value;
  const double maxb = *std::max_element(spec.B.begin(), spec.B.end());
  const double base = cs1 * cs1 * std::sqrt(spec.s + 1.0) * std::sqrt(maxb) * wn * hs;
  p.rhs_main = 0.5 * spec.K_eps * wn * wn;
  p.rhs_lower = c_hat * base;
  p.holds = p.lhs >= p.rhs_main - p.rhs_lower;
  p.required_c_hat = base > 0.0 ? std::max(0.0, (p.rhs_main - p.lhs) / base) : 0.0;
  return p;
}

}  // namespace chanlab
