#pragma once
// Homogeneous and weighted Sobolev pairings on stream functions, C^k norms of
// flows, and the constants that drive the positivity estimate.

#include <vector>

#include "chanlab/euler.hpp"
#include "chanlab/grid.hpp"

namespace chanlab {

enum class NormKind { L2, HomogeneousSobolev, Weighted };

struct NormReport {
  double value = 0.0;
  std::vector<double> per_term;
  NormKind kind = NormKind::L2;
};

// Highest supported s for derivatives of order s + 1.
inline constexpr int kMaxSobolevS = 5;

// sum_{0 <= i+j <= s} |grad d_x^i d_y^j f|, per_term ordered by (i+j, i).
// s = -1 gives the empty sum.
NormReport homogeneous_norm(const ScalarField& f, int s);

// |grad d_x^m d_y^n f|_{L2}.
double gradient_norm(const ScalarField& f, int m, int n);

// Max over grid nodes of every derivative of orders 1..k of both components.
double eta_c_norm(const AreaDiffeo& eta, int k);

struct TrajectoryConstants {
  int s = 1;
  double t = 0.0;
  double eps = 0.0;
  double eps_max = 0.0;     // admissibility bound on eps (infinite for s = 1)
  double K_eta_inf = 0.0;   // inf over records in [0, t] of min eigenvalue of G
  double c1 = 0.0;          // sup_tau |eta|_{C^1}
  double cs1 = 0.0;         // sup_tau |eta|_{C^{s+1}}
  double K_eps = 0.0;
  double Q_eps = 0.0;
  double C_eta = 0.0;       // with the unnamed constant set to 1
  double C_t = 0.0;         // trapezoid sum of |D eta|_inf^{-2}
};

double eps_max(const GeodesicTrajectory& traj, double t, int s);
// eps <= 0 selects eps_max / 2 (1 when eps_max is infinite).
TrajectoryConstants constants_from_trajectory(const GeodesicTrajectory& traj, double t, int s, double eps);

// B_0 = B_s = 1, B_k = (2Q/K) sum_{j<k} B_j for 1 <= k <= s-1.
std::vector<double> weights_recurrence(double K_eps, double Q_eps, int s);
// B_k = (2Q/K)(1 + 2Q/K)^{k-1}.
std::vector<double> weights_closed_form(double K_eps, double Q_eps, int s);

struct WeightedNormSpec {
  int s = 1;
  double eps = 0.0;
  std::vector<double> B;
  double K_eps = 1.0;
  double Q_eps = 0.0;
  double C_eta = 0.0;
};

WeightedNormSpec make_weighted_spec(const TrajectoryConstants& c);
// Checks B_0 = B_s = 1, positivity and the recurrence; throws PreconditionError.
void validate(const WeightedNormSpec& spec);

// sum_j B_j <grad f_{j,s-j}, grad g_{j,s-j}>.
double weighted_inner_product(const ScalarField& f, const ScalarField& g, const WeightedNormSpec& spec);
NormReport weighted_norm(const ScalarField& f, const WeightedNormSpec& spec);

struct PositivityGap {
  double lhs = 0.0;        // <<f, Lambda_t f>>_{s+1}
  double rhs_main = 0.0;   // K |f|_{s+1}^2 with K = K_eps / 2
  double rhs_lower = 0.0;  // C |f|_{s+1} |f|_{H^s}, C = C_hat cs1^2 sqrt(s+1) max sqrt(B_j)
  bool holds = false;
  // Smallest C_hat for which the inequality holds on this sample (0 if any does).
  double required_c_hat = 0.0;
};

// eta is the flow at time t; cs1 the sup C^{s+1} norm over [0, t].
PositivityGap positivity_gap(const StreamFunction& f, const AreaDiffeo& eta, const WeightedNormSpec& spec,
                             double cs1, double c_hat = 1.0);

}  // namespace chanlab
