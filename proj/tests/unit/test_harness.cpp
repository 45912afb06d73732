#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "chanlab/error.hpp"
#include "chanlab/harness.hpp"

using namespace chanlab;

namespace {

double phi(double y) { return std::exp(-y); }

}  // namespace

TEST_CASE("harness tags") {
  const auto tags = all_harness_tags();
  CHECK(tags.size() == 11);
  for (HarnessTag t : tags) CHECK(harness_tag_from_string(to_string(t)) == t);
  CHECK(to_string(HarnessTag::PdeBoundary) == "pde_boundary");
  CHECK_FALSE(is_calibrated(HarnessTag::Lemma1));
  CHECK_FALSE(is_calibrated(HarnessTag::Lemma3));
  CHECK(is_calibrated(HarnessTag::Prop6));
  try {
    harness_tag_from_string("lemma2");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "inequalities");
  }
}

TEST_CASE("ledger_holds") {
  CHECK(ledger_holds(Sense::AtMost, 1.0, 1.0, 0.0, 0.0));
  CHECK(ledger_holds(Sense::AtMost, 1.0 + 1e-15, 1.0, 0.0, 0.0));
  CHECK_FALSE(ledger_holds(Sense::AtMost, 1.001, 1.0, 0.0, 0.0));
  CHECK(ledger_holds(Sense::AtMost, 1.5, 1.0, 1.0, 0.5));
  CHECK(ledger_holds(Sense::AtLeast, 0.5, 1.0, 1.0, 0.5));
  CHECK_FALSE(ledger_holds(Sense::AtLeast, 0.4, 1.0, 1.0, 0.5));
}

TEST_CASE("explicit-constant tags on the identity") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const GeodesicTrajectory z = identity_trajectory(g, 1.0, 10);
  HarnessContext ctx;
  ctx.trajectory = &z;
  for (HarnessTag tag : {HarnessTag::Lemma1, HarnessTag::Lemma3, HarnessTag::Prop6}) {
    const HarnessLedger led = inequality_harness(tag, ctx, 20);
    CAPTURE(to_string(tag));
    CHECK(led.verified() == 20);
    CHECK(led.all_pass());
    CHECK(led.min_slack() >= -kLedgerRoundoff);
  }
  // The Omega-hat floor is an equality on the identity (C_t = t, Omega-hat = t id).
  for (const LedgerRow& r : inequality_harness(HarnessTag::Lemma1, ctx, 5).rows)
    CHECK(r.lhs == doctest::Approx(r.rhs_main).epsilon(1e-8));
}

TEST_CASE("calibration protocol on shear") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const GeodesicTrajectory s = shear_trajectory(phi, 1.0, 10, g);
  HarnessContext ctx;
  ctx.trajectory = &s;
  ctx.calibration_samples = 20;
  ctx.seed = 7;
  const HarnessLedger a = inequality_harness(HarnessTag::Lemma4Gx, ctx, 10);
  CHECK(a.calibrated);
  CHECK(a.m == 1);
  CHECK(a.n == 1);
  CHECK(a.constant == doctest::Approx(1.5 * a.calibrated_max).epsilon(1e-15));
  const auto cal = std::count_if(a.rows.begin(), a.rows.end(), [](const LedgerRow& r) { return r.phase == "calibrate"; });
  CHECK(cal == 20);
  CHECK(a.verified() == 10);
  double worst = 0.0;
  for (const LedgerRow& r : a.rows)
    if (r.phase == "calibrate") worst = std::max(worst, r.constant);
  CHECK(worst == a.calibrated_max);

  // Deterministic in the seed, different across seeds.
  const HarnessLedger b = inequality_harness(HarnessTag::Lemma4Gx, ctx, 10);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].lhs == b.rows[i].lhs);
  ctx.seed = 8;
  CHECK(inequality_harness(HarnessTag::Lemma4Gx, ctx, 10).rows[0].lhs != a.rows[0].lhs);
}

TEST_CASE("harness preconditions") {
  const ChannelGrid g = make_grid(32, 33, 8.0);
  const GeodesicTrajectory s = shear_trajectory(phi, 1.0, 10, g);
  HarnessContext ctx;
  CHECK_THROWS_AS(inequality_harness(HarnessTag::Lemma3, ctx, 5), PreconditionError);
  ctx.trajectory = &s;
  CHECK_THROWS_AS(inequality_harness(HarnessTag::Lemma3, ctx, 0), PreconditionError);
  ctx.t = 0.55;
  CHECK_THROWS_AS(inequality_harness(HarnessTag::Lemma1, ctx, 5), PreconditionError);
  ctx.t = 1.0;
  ctx.m = 0;
  ctx.n = 1;
  CHECK_THROWS_AS(inequality_harness(HarnessTag::Prop4Fg, ctx, 5), PreconditionError);
  CHECK_THROWS_AS(inequality_harness(HarnessTag::Prop5, ctx, 5), PreconditionError);
  ctx.m = 3;
  ctx.n = 2;
  CHECK_THROWS_AS(inequality_harness(HarnessTag::Prop3, ctx, 5), PreconditionError);
}
