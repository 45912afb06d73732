#include "chanlab/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "chanlab/derivatives.hpp"
#include "chanlab/error.hpp"
#include "chanlab/operators.hpp"
#include "chanlab/sobolev.hpp"

namespace chanlab {

namespace {

struct TagInfo {
  HarnessTag tag;
  const char* name;
  bool calibrated;
  Sense sense;
  int m, n;  // defaults
};

constexpr std::array<TagInfo, 11> kTags{{
    {HarnessTag::Lemma1, "lemma1", false, Sense::AtLeast, 0, 0},
    {HarnessTag::Lemma3, "lemma3", false, Sense::AtMost, 0, 0},
    {HarnessTag::Prop3, "prop3", true, Sense::AtLeast, 1, 1},
    {HarnessTag::PdeBoundary, "pde_boundary", false, Sense::AtMost, 0, 0},
    {HarnessTag::Prop4Fg, "prop4_fg", false, Sense::AtMost, 0, 2},
    {HarnessTag::Prop4Ffx, "prop4_ffx", true, Sense::AtMost, 0, 2},
    {HarnessTag::Prop4Ffy, "prop4_ffy", true, Sense::AtMost, 0, 2},
    {HarnessTag::Lemma4G, "lemma4_g", true, Sense::AtMost, 1, 2},
    {HarnessTag::Lemma4Gx, "lemma4_gx", true, Sense::AtMost, 1, 1},
    {HarnessTag::Prop5, "prop5", true, Sense::AtMost, 1, 2},
    {HarnessTag::Prop6, "prop6", true, Sense::AtLeast, 0, 0},
}};

const TagInfo& info(HarnessTag t) {
  for (const TagInfo& i : kTags)
    if (i.tag == t) return i;
  throw PreconditionError("unknown harness tag");
}

ScalarField D(const ScalarField& f, int i, int j) { return partial_derivative(f, i, j); }

// max(|a|, |b|) guarded away from zero, for relative slack.
double scale_of(double a, double b) { return std::max({std::abs(a), std::abs(b), 1e-300}); }

struct Sample {
  double lhs = 0.0, rhs_main = 0.0, rhs_lower = 0.0;
};

std::size_t record_at(const GeodesicTrajectory& traj, double t) {
  for (std::size_t k = 0; k < traj.size(); ++k)
    if (std::abs(traj.times[k] - t) <= 1e-9 * std::max(1.0, t)) return k;
  throw PreconditionError("inequality_harness: t is not a record time of the trajectory");
}

// Per-tag evaluator: one random draw in, one (lhs, rhs_main, rhs_lower) out.
class Evaluator {
 public:
  Evaluator(HarnessTag tag, const HarnessContext& c, int m, int n) : tag_(tag), ctx_(c), m_(m), n_(n) {
    const GeodesicTrajectory& traj = *c.trajectory;
    eta_ = &traj.flows[record_at(traj, c.t)];
    const JacobianField J = jacobian(*eta_);
    gyy_ = hadamard(J.xy, J.xy) + hadamard(J.yy, J.yy);  // |d_y eta|^2
    gxx_ = hadamard(J.xx, J.xx) + hadamard(J.yx, J.yx);  // |d_x eta|^2
    gxy_ = hadamard(J.xx, J.xy) + hadamard(J.yx, J.yy);  // <d_x eta, d_y eta>
    c1sq_ = std::pow(eta_c_norm(*eta_, 1), 2);
    if (tag != HarnessTag::Lemma1 && tag != HarnessTag::Lemma3 && tag != HarnessTag::PdeBoundary &&
        tag != HarnessTag::Prop6)
      cksq_ = std::pow(eta_c_norm(*eta_, m + n + 1), 2);
    K_eta_ = std::pow(sup_jacobian_norm(*eta_), -2.0);
    if (tag == HarnessTag::Lemma1) {
      op_ = std::make_unique<OperatorContext>(traj, c.t, c.quadrature_nodes);
      C_t_ = 0.0;
      for (int k = 0; k < op_->nodes(); ++k) C_t_ += op_->weight(k) * std::pow(sup_jacobian_norm(op_->eta(k)), -2.0);
    }
    if (tag == HarnessTag::Prop6) {
      consts_ = constants_from_trajectory(traj, c.t, c.s, c.eps);
      spec_ = make_weighted_spec(consts_);
    }
  }

  Sample operator()(std::mt19937_64& rng) const {
    const ChannelGrid& g = ctx_.trajectory->grid;
    if (tag_ == HarnessTag::Lemma3) {
      const ScalarField f = random_wall_field(g, rng, ctx_.fields);
      const ScalarField h = random_wall_field(g, rng, ctx_.fields);
      return {std::abs(boundary_integral_x(hadamard(f, ddx(h)))), gradient_norm(f, 0, 0) * gradient_norm(h, 0, 0), 0.0};
    }
    const StreamFunction sf = random_stream(g, rng, ctx_.fields);
    const ScalarField& f = sf.field();
    switch (tag_) {
      case HarnessTag::Lemma1: {
        const double ff = dirichlet_pairing(f, f);
        return {dirichlet_pairing(f, omega_hat_apply(*op_, sf).field()), C_t_ * ff, 0.0};
      }
      case HarnessTag::Prop6: {
        const PositivityGap p = positivity_gap(sf, *eta_, spec_, consts_.cs1, 1.0);
        return {p.lhs, p.rhs_main, p.rhs_lower};
      }
      case HarnessTag::PdeBoundary: return pde_boundary(f, lambda_apply(sf, *eta_).field());
      default: break;
    }
    const ScalarField gf = lambda_apply(sf, *eta_).field();
    const int m = m_, n = n_;
    const double hs = homogeneous_norm(f, m + n - 1).value;
    const double gf_mn = gradient_norm(f, m, n);
    switch (tag_) {
      case HarnessTag::Prop3: {
        double bterm = 0.0;
        if (n >= 1) {
          const ScalarField inner = ddx(gf) - hadamard(gyy_, ddx(f)) + hadamard(gxy_, ddy(f));
          bterm = boundary_integral_x(hadamard(D(f, m + 1, n), D(inner, m, n - 1)));
        }
        return {dirichlet_pairing(D(f, m, n), D(gf, m, n)), K_eta_ * gf_mn * gf_mn - bterm, cksq_ * gf_mn * hs};
      }
      case HarnessTag::Prop4Fg:
        return {std::abs(boundary_integral_x(hadamard(D(f, m + 1, n), D(gf, m + 1, n - 1)))),
                gf_mn * gradient_norm(gf, m + 1, n - 1), 0.0};
      case HarnessTag::Prop4Ffx:
        return {std::abs(boundary_integral_x(hadamard(D(f, m + 1, n), D(hadamard(gyy_, ddx(f)), m, n - 1)))),
                c1sq_ * gf_mn * gradient_norm(f, m + 1, n - 1), cksq_ * gf_mn * hs};
      case HarnessTag::Prop4Ffy:
        return {std::abs(boundary_integral_x(hadamard(D(f, m + 1, n), D(hadamard(gxy_, ddy(f)), m, n - 1)))), 0.0,
                cksq_ * gf_mn * hs};
      case HarnessTag::Lemma4G:
        return {gradient_norm(gf, m, n),
                gradient_norm(gf, m + 1, n - 1) + c1sq_ * (gradient_norm(f, m + 1, n - 1) + gf_mn), cksq_ * hs};
      case HarnessTag::Lemma4Gx: return {gradient_norm(gf, m, n), c1sq_ * gf_mn, cksq_ * hs};
      case HarnessTag::Prop5: {
        double sum = 0.0;
        for (int k = 1; k <= n - 1; ++k) sum += gradient_norm(f, m + n - k, k);
        return {gradient_norm(gf, m, n), c1sq_ * (gf_mn + 2.0 * sum), cksq_ * hs};
      }
      default: break;
    }
    throw PreconditionError("inequality_harness: unhandled tag");
  }

 private:
  // Both sides of the divergence identity that turns the normal boundary
  // term into an x-derivative, compared over interior rows.
  Sample pde_boundary(const ScalarField& f, const ScalarField& gf) const {
    const ScalarField fx = ddx(f), fy = ddy(f);
    const ScalarField left = ddy(hadamard(gxx_, fy) - hadamard(gxy_, fx) - ddy(gf));
    const ScalarField right = ddx(ddx(gf) - hadamard(gyy_, fx) + hadamard(gxy_, fy));
    const ChannelGrid& g = f.grid();
    double diff = 0.0, ref = 0.0;
    for (int i = 0; i < g.nx; ++i)
      for (int j = 1; j < g.ny - 1; ++j) {
        diff += std::pow(left(i, j) - right(i, j), 2);
        ref += std::max(left(i, j) * left(i, j), right(i, j) * right(i, j));
      }
    return {ref > 0.0 ? std::sqrt(diff / ref) : 0.0, ctx_.equation_tolerance, 0.0};
  }

  HarnessTag tag_;
  const HarnessContext& ctx_;
  int m_, n_;
  const AreaDiffeo* eta_ = nullptr;
  ScalarField gyy_, gxx_, gxy_;
  double c1sq_ = 0.0, cksq_ = 0.0, K_eta_ = 0.0, C_t_ = 0.0;
  std::unique_ptr<OperatorContext> op_;
  TrajectoryConstants consts_;
  WeightedNormSpec spec_;
};

// Constant needed for this sample to hold; 0 when it holds without the lower-order term.
double required_constant(const Sample& s, Sense sense) {
  const double deficit = sense == Sense::AtMost ? s.lhs - s.rhs_main : s.rhs_main - s.lhs;
  if (deficit <= 0.0) return 0.0;
  return s.rhs_lower > 0.0 ? deficit / s.rhs_lower : std::numeric_limits<double>::infinity();
}

LedgerRow judge(const std::string& tag, const char* phase, int k, const Sample& s, double C, Sense sense) {
  LedgerRow r{tag, phase, k, s.lhs, s.rhs_main, s.rhs_lower, C, 0.0, false};
  const double margin = sense == Sense::AtMost ? s.rhs_main + C * s.rhs_lower - s.lhs
                                               : s.lhs - (s.rhs_main - C * s.rhs_lower);
  r.slack = margin / scale_of(s.lhs, s.rhs_main);
  r.pass = ledger_holds(sense, s.lhs, s.rhs_main, s.rhs_lower, C);
  return r;
}

}  // namespace

bool ledger_holds(Sense sense, double lhs, double rhs_main, double rhs_lower, double constant) {
  const double margin = sense == Sense::AtMost ? rhs_main + constant * rhs_lower - lhs
                                               : lhs - (rhs_main - constant * rhs_lower);
  return margin >= -kLedgerRoundoff * scale_of(lhs, rhs_main);
}

std::string to_string(HarnessTag tag) { return info(tag).name; }

HarnessTag harness_tag_from_string(const std::string& name) {
  for (const TagInfo& i : kTags)
    if (name == i.name) return i.tag;
  throw ConfigError("inequalities", "unknown inequality tag '" + name + "'");
}

std::vector<HarnessTag> all_harness_tags() {
  std::vector<HarnessTag> v;
  for (const TagInfo& i : kTags) v.push_back(i.tag);
  return v;
}

bool is_calibrated(HarnessTag tag) { return info(tag).calibrated; }

int HarnessLedger::verified() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const LedgerRow& r) { return r.phase == "verify"; }));
}

int HarnessLedger::passed() const {
  return static_cast<int>(
      std::count_if(rows.begin(), rows.end(), [](const LedgerRow& r) { return r.phase == "verify" && r.pass; }));
}

double HarnessLedger::min_slack() const {
  double s = std::numeric_limits<double>::infinity();
  for (const LedgerRow& r : rows)
    if (r.phase == "verify") s = std::min(s, r.slack);
  return s;
}

HarnessLedger inequality_harness(HarnessTag which, const HarnessContext& ctx, int samples) {
  if (!ctx.trajectory) throw PreconditionError("inequality_harness: no trajectory");
  if (samples < 1) throw PreconditionError("inequality_harness: samples must be positive");
  const TagInfo& ti = info(which);
  HarnessLedger led;
  led.tag = which;
  led.sense = ti.sense;
  led.calibrated = ti.calibrated;
  led.m = ctx.m >= 0 ? ctx.m : ti.m;
  led.n = ctx.n >= 0 ? ctx.n : ti.n;
  led.s = ctx.s;
  switch (which) {
    case HarnessTag::Prop4Fg:
    case HarnessTag::Lemma4G:
      if (led.n < 2) throw PreconditionError(to_string(which) + ": needs n > 1");
      if (which == HarnessTag::Lemma4G && led.m < 1) throw PreconditionError("lemma4_g: needs m >= 1");
      break;
    case HarnessTag::Prop4Ffx:
    case HarnessTag::Prop4Ffy:
      if (led.n < 1) throw PreconditionError(to_string(which) + ": needs n >= 1");
      break;
    case HarnessTag::Lemma4Gx:
      if (led.m < 1 || led.n > 1) throw PreconditionError("lemma4_gx: needs m >= 1 and n <= 1");
      break;
    case HarnessTag::Prop5:
      if (led.m < 1) throw PreconditionError("prop5: needs m >= 1");
      break;
    default: break;
  }
  if (led.m + led.n + 2 > 6) throw PreconditionError(to_string(which) + ": m + n too large for the derivative stack");

  const Evaluator eval(which, ctx, led.m, led.n);
  const std::string name = ti.name;
  const auto tag_index = static_cast<std::uint64_t>(which);
  if (ti.calibrated) {
    std::seed_seq seq{ctx.seed, tag_index, std::uint64_t{0}};
    std::mt19937_64 rng(seq);
    for (int k = 0; k < ctx.calibration_samples; ++k) {
      const Sample s = eval(rng);
      const double need = required_constant(s, ti.sense);
      led.calibrated_max = std::max(led.calibrated_max, need);
      led.rows.push_back(judge(name, "calibrate", k, s, need, ti.sense));
    }
    led.constant = ctx.safety * led.calibrated_max;
  }
  std::seed_seq seq{ctx.seed, tag_index, std::uint64_t{1}};
  std::mt19937_64 rng(seq);
  for (int k = 0; k < samples; ++k) led.rows.push_back(judge(name, "verify", k, eval(rng), led.constant, ti.sense));
  return led;
}

}  // namespace chanlab
