#pragma once
// Truncated stream-function basis: Fourier modes in x times wall sines in y,
// plus seeded random decaying streams for Monte-Carlo checks.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "chanlab/grid.hpp"
#include "chanlab/interpolate.hpp"

namespace chanlab {

struct BasisMode {
  int k = 0;         // x wavenumber
  int l = 1;         // number of half waves in y
  bool sine = false; // sin(kx) instead of cos(kx); k = 0 is always cosine
};

class StreamBasis {
 public:
  StreamBasis(const ChannelGrid& grid, int max_k, int max_l);

  const ChannelGrid& grid() const { return grid_; }
  int max_k() const { return max_k_; }
  int max_l() const { return max_l_; }
  int dim() const { return static_cast<int>(modes_.size()); }
  const BasisMode& mode(int j) const { return modes_[j]; }
  const std::vector<BasisMode>& modes() const { return modes_; }
  // Elements are scaled to unit Dirichlet-pairing norm on the grid.
  const StreamFunction& function(int j) const { return functions_[j]; }
  double scale(int j) const { return scale_[j]; }

  // Exact evaluation of element j at arbitrary points (used for compositions).
  void evaluate(int j, std::span<const Point> pts, double* out) const;
  ScalarField evaluate_on(int j, std::span<const Point> pts) const;

  // Linear combination sum_j c_j b_j.
  StreamFunction combine(std::span<const double> coeffs) const;

 private:
  ChannelGrid grid_;
  int max_k_, max_l_;
  std::vector<BasisMode> modes_;
  std::vector<double> scale_;
  std::vector<StreamFunction> functions_;
};

struct RandomStreamSpec {
  int max_k = 4;
  int max_l = 6;
  double decay = 1.0;  // envelope exp(-decay * y)
};

// e^{-decay y} sum c_{kl} trig(kx) sin(l pi y / L), c ~ N(0,1) / (1 + k^2 + l^2).
StreamFunction random_stream(const ChannelGrid& g, std::mt19937_64& rng, const RandomStreamSpec& spec = {});

// As random_stream but with cos((l - 1/2) pi y / L) in y: nonzero on the wall
// y = 0, zero on the far wall.
ScalarField random_wall_field(const ChannelGrid& g, std::mt19937_64& rng, const RandomStreamSpec& spec = {});

}  // namespace chanlab
