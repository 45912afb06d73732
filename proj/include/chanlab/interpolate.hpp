#pragma once
// Off-grid evaluation: trigonometric interpolation in x, six-point Lagrange
// in y. Points with y outside [0, L] are clamped onto the walls and counted.

#include <array>
#include <span>
#include <vector>

#include "chanlab/grid.hpp"

namespace chanlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Sampling weights for a fixed point set, reusable across fields.
class PointSampler {
 public:
  PointSampler() = default;
  PointSampler(const ChannelGrid& grid, std::span<const Point> points);

  const ChannelGrid& grid() const { return grid_; }
  std::size_t size() const { return ystart_.size(); }
  std::size_t clamped() const { return clamped_; }

  std::vector<double> apply(const ScalarField& f) const;
  // Only valid when the point set has one point per grid node, in grid order.
  ScalarField apply_on_grid(const ScalarField& f) const;

 private:
  void apply_into(const ScalarField& f, double* out) const;

  ChannelGrid grid_{};
  int ywidth_ = 0;
  std::vector<int> ystart_;
  std::vector<double> wy_;  // ywidth_ per point
  std::vector<double> wx_;  // nx per point
  std::size_t clamped_ = 0;
};

struct InterpolationStats {
  std::size_t clamped = 0;
};

std::vector<double> interpolate(const ScalarField& f, std::span<const Point> points,
                                InterpolationStats* stats = nullptr);

}  // namespace chanlab
