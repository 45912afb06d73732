#pragma once
// Truncated periodic channel S^1 x [0, L] and the grid functions living on it.
//
// Storage is x-major with y contiguous: value (i, j) sits at i * ny + j, so
// wall-normal stencils run over contiguous memory and x-transforms combine
// whole rows.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "chanlab/error.hpp"

namespace chanlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383280;

struct ChannelGrid {
  int nx = 0;
  int ny = 0;
  double height = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  double x(int i) const { return i * dx; }
  double y(int j) const { return j * dy; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }

  friend bool operator==(const ChannelGrid& a, const ChannelGrid& b) {
    return a.nx == b.nx && a.ny == b.ny && a.height == b.height;
  }
};

// Throws PreconditionError unless nx is a power of two, ny >= 4 and height > 0.
ChannelGrid make_grid(int nx, int ny, double height);

void require_same_grid(const ChannelGrid& a, const ChannelGrid& b);

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const ChannelGrid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}
  ScalarField(const ChannelGrid& grid, std::vector<double> values);

  static ScalarField sample(const ChannelGrid& grid,
                            const std::function<double(double, double)>& fn);

  const ChannelGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double* row(int i) { return values_.data() + grid_.index(i, 0); }
  const double* row(int i) const { return values_.data() + grid_.index(i, 0); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  // this += a * o
  ScalarField& axpy(double a, const ScalarField& o);

  double max_abs() const;
  bool all_finite() const;

 private:
  ChannelGrid grid_{};
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

// Stream function: zero on the boundary row j = 0 and constant on the far
// wall j = ny - 1. The far-wall constant is the volume flux through the
// channel; perturbation spaces require it to be zero (is_dirichlet()).
class StreamFunction {
 public:
  StreamFunction() = default;
  explicit StreamFunction(const ChannelGrid& grid) : field_(grid) {}

  // Validates wall rows to within tol * max|f| and snaps them exactly.
  static StreamFunction from_field(ScalarField f, double tol = 1e-10);
  // Same, but additionally requires zero flux.
  static StreamFunction dirichlet(ScalarField f, double tol = 1e-10);

  const ChannelGrid& grid() const { return field_.grid(); }
  const ScalarField& field() const { return field_; }
  double flux() const { return field_(0, grid().ny - 1); }
  bool is_dirichlet() const { return flux() == 0.0; }

  double operator()(int i, int j) const { return field_(i, j); }

  StreamFunction& operator+=(const StreamFunction& o);
  StreamFunction& operator*=(double s);
  StreamFunction& axpy(double a, const StreamFunction& o);

 private:
  ScalarField field_;
};

StreamFunction operator+(StreamFunction a, const StreamFunction& b);
StreamFunction operator-(StreamFunction a, const StreamFunction& b);
StreamFunction operator*(double s, StreamFunction a);

struct VectorField {
  ScalarField u;  // x-component
  ScalarField v;  // y-component

  const ChannelGrid& grid() const { return u.grid(); }
  VectorField& axpy(double a, const VectorField& o) {
    u.axpy(a, o.u);
    v.axpy(a, o.v);
    return *this;
  }
};

}  // namespace chanlab
