#pragma once
// Monte-Carlo verification of the a priori estimates behind the Fredholm
// argument. Each tag is an inequality lhs <= rhs_main + C rhs_lower (or >=
// with -C rhs_lower). Explicit-constant tags are checked directly; for the
// rest C is calibrated on a disjoint sample, frozen with a safety factor and
// then checked out of sample.

#include <cstdint>
#include <string>
#include <vector>

#include "chanlab/basis.hpp"
#include "chanlab/euler.hpp"

namespace chanlab {

enum class HarnessTag { Lemma1, Lemma3, Prop3, PdeBoundary, Prop4Fg, Prop4Ffx, Prop4Ffy, Lemma4G, Lemma4Gx, Prop5, Prop6 };

std::string to_string(HarnessTag tag);
HarnessTag harness_tag_from_string(const std::string& name);
std::vector<HarnessTag> all_harness_tags();
// Whether the tag has an unnamed constant to calibrate.
bool is_calibrated(HarnessTag tag);

struct HarnessContext {
  const GeodesicTrajectory* trajectory = nullptr;  // needs flow maps
  double t = 1.0;
  int m = -1, n = -1;  // derivative indices; -1 picks the tag default
  int s = 2;           // Sobolev level for prop6
  double eps = 0.0;    // <= 0: eps_max / 2
  int quadrature_nodes = 11;
  RandomStreamSpec fields;
  std::uint64_t seed = 1;
  int calibration_samples = 200;
  double safety = 1.5;
  double equation_tolerance = 1e-4;
};

enum class Sense { AtMost, AtLeast };

// Relative round-off allowance: equality cases (identity map) must not fail
// on the last bit.
inline constexpr double kLedgerRoundoff = 1e-12;

// lhs <= main + C lower (AtMost) or lhs >= main - C lower (AtLeast), up to round-off.
bool ledger_holds(Sense sense, double lhs, double rhs_main, double rhs_lower, double constant);

struct LedgerRow {
  std::string tag;
  std::string phase;  // "calibrate" or "verify"
  int sample = 0;
  double lhs = 0.0, rhs_main = 0.0, rhs_lower = 0.0, constant = 0.0;
  double slack = 0.0;  // relative margin, negative on failure
  bool pass = false;
};

struct HarnessLedger {
  HarnessTag tag = HarnessTag::Lemma1;
  Sense sense = Sense::AtMost;
  int m = 0, n = 0, s = 0;
  bool calibrated = false;
  double calibrated_max = 0.0;  // largest constant the calibration set required
  double constant = 0.0;        // frozen constant used for verification
  std::vector<LedgerRow> rows;

  int verified() const;
  int passed() const;
  double min_slack() const;
  bool all_pass() const { return passed() == verified(); }
};

HarnessLedger inequality_harness(HarnessTag which, const HarnessContext& ctx, int samples);

}  // namespace chanlab
