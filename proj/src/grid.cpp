#include "chanlab/grid.hpp"

#include <algorithm>
#include <string>

#include "chanlab/simd/kernels.hpp"

namespace chanlab {

ChannelGrid make_grid(int nx, int ny, double height) {
  if (nx < 2 || (nx & (nx - 1)) != 0)
    throw PreconditionError("make_grid: nx = " + std::to_string(nx) + " is not a power of two");
  if (ny < 4) throw PreconditionError("make_grid: ny = " + std::to_string(ny) + " < 4");
  if (!(height > 0.0) || !std::isfinite(height))
    throw PreconditionError("make_grid: height must be positive and finite");
  ChannelGrid g;
  g.nx = nx;
  g.ny = ny;
  g.height = height;
  g.dx = kTwoPi / nx;
  g.dy = height / (ny - 1);
  return g;
}

void require_same_grid(const ChannelGrid& a, const ChannelGrid& b) {
  if (!(a == b)) throw PreconditionError("grid mismatch");
}

ScalarField::ScalarField(const ChannelGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw PreconditionError("ScalarField: size does not match grid");
}

ScalarField ScalarField::sample(const ChannelGrid& grid,
                                const std::function<double(double, double)>& fn) {
  ScalarField f(grid);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) f(i, j) = fn(grid.x(i), grid.y(j));
  return f;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) { return axpy(1.0, o); }
ScalarField& ScalarField::operator-=(const ScalarField& o) { return axpy(-1.0, o); }

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  simd::kernels().axpy(a, o.values_.data(), values_.data(), values_.size());
  return *this;
}

double ScalarField::max_abs() const { return simd::kernels().max_abs(values_.data(), values_.size()); }

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  simd::kernels().mul(a.data(), b.data(), out.data(), a.size());
  return out;
}

StreamFunction StreamFunction::from_field(ScalarField f, double tol) {
  const ChannelGrid& g = f.grid();
  const double scale = std::max(f.max_abs(), 1e-300);
  const double top = f(0, g.ny - 1);
  for (int i = 0; i < g.nx; ++i) {
    if (std::abs(f(i, 0)) > tol * scale)
      throw PreconditionError("StreamFunction: nonzero value on the boundary row");
    if (std::abs(f(i, g.ny - 1) - top) > tol * scale)
      throw PreconditionError("StreamFunction: far-wall row is not constant");
  }
  for (int i = 0; i < g.nx; ++i) {
    f(i, 0) = 0.0;
    f(i, g.ny - 1) = top;
  }
  StreamFunction s;
  s.field_ = std::move(f);
  return s;
}

StreamFunction StreamFunction::dirichlet(ScalarField f, double tol) {
  const ChannelGrid& g = f.grid();
  const double scale = std::max(f.max_abs(), 1e-300);
  if (std::abs(f(0, g.ny - 1)) > tol * scale)
    throw PreconditionError("StreamFunction: nonzero value on the far wall");
  for (int i = 0; i < g.nx; ++i) f(i, g.ny - 1) = 0.0;
  return from_field(std::move(f), tol);
}

StreamFunction& StreamFunction::operator+=(const StreamFunction& o) { return axpy(1.0, o); }
StreamFunction& StreamFunction::operator*=(double s) {
  field_ *= s;
  return *this;
}
StreamFunction& StreamFunction::axpy(double a, const StreamFunction& o) {
  field_.axpy(a, o.field_);
  return *this;
}

StreamFunction operator+(StreamFunction a, const StreamFunction& b) { return a += b; }
StreamFunction operator-(StreamFunction a, const StreamFunction& b) { return a.axpy(-1.0, b); }
StreamFunction operator*(double s, StreamFunction a) { return a *= s; }

}  // namespace chanlab
