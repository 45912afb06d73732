#include "chanlab/interpolate.hpp"

#include <algorithm>
#include <cmath>

#include "chanlab/simd/kernels.hpp"

namespace chanlab {

namespace {

// Weights of the real trigonometric interpolant (Nyquist kept as a cosine):
// w_i = (sin((N - 1/2) t_i) / sin(t_i / 2) + cos(N t_i)) / nx, t_i = x - x_i,
// evaluated with angle-addition tables so each point costs four trig calls.
void trig_weights(double x, int nx, const double* ci, const double* si, double* w) {
  const int half = nx / 2;
  const double dx = kTwoPi / nx;
  const double u = x / dx;
  const double r = std::round(u);
  if (std::abs(u - r) < 1e-12) {
    std::fill(w, w + nx, 0.0);
    int i = static_cast<int>(std::fmod(r, double(nx)));
    if (i < 0) i += nx;
    w[i] = 1.0;
    return;
  }
  const double sh = std::sin(0.5 * x), ch = std::cos(0.5 * x);
  const double a = (half - 0.5) * x;
  const double sa = std::sin(a), ca = std::cos(a);
  const double cn = std::cos(half * x);
  for (int i = 0; i < nx; ++i) {
    const double sign = (i & 1) ? -1.0 : 1.0;
    const double den = sh * ci[i] - ch * si[i];
    const double num = sign * (sa * ci[i] + ca * si[i]);
    w[i] = (num / den + sign * cn) / nx;
  }
  // The nearest node has a tiny denominator; the angle-addition form loses
  // relative accuracy there, so evaluate it directly.
  int i = static_cast<int>(std::fmod(r, double(nx)));
  if (i < 0) i += nx;
  const double t = x - r * dx;
  w[i] = (std::sin((half - 0.5) * t) / std::sin(0.5 * t) + std::cos(half * t)) / nx;
}

}  // namespace

PointSampler::PointSampler(const ChannelGrid& grid, std::span<const Point> points) : grid_(grid) {
  const int nx = grid.nx, ny = grid.ny;
  ywidth_ = std::min(6, ny);
  const std::size_t np = points.size();
  ystart_.resize(np);
  wy_.resize(np * ywidth_);
  wx_.resize(np * nx);
  std::vector<double> ci(nx), si(nx);
  for (int i = 0; i < nx; ++i) {
    ci[i] = std::cos(0.5 * i * grid.dx);
    si[i] = std::sin(0.5 * i * grid.dx);
  }
  for (std::size_t p = 0; p < np; ++p) {
    double y = points[p].y;
    if (!std::isfinite(y) || !std::isfinite(points[p].x))
      throw PreconditionError("interpolate: non-finite point");
    if (y < 0.0 || y > grid.height) {
      ++clamped_;
      y = std::clamp(y, 0.0, grid.height);
    }
    const double u = y / grid.dy;
    const int s = std::clamp(static_cast<int>(std::floor(u)) - (ywidth_ / 2 - 1), 0, ny - ywidth_);
    ystart_[p] = s;
    double* wy = &wy_[p * ywidth_];
    for (int a = 0; a < ywidth_; ++a) {
      double l = 1.0;
      for (int b = 0; b < ywidth_; ++b)
        if (b != a) l *= (u - (s + b)) / double(a - b);
      wy[a] = l;
    }
    trig_weights(points[p].x, nx, ci.data(), si.data(), &wx_[p * nx]);
  }
}

void PointSampler::apply_into(const ScalarField& f, double* out) const {
  require_same_grid(f.grid(), grid_);
  const int nx = grid_.nx, ny = grid_.ny;
  std::vector<double> ft(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) ft[static_cast<std::size_t>(j) * nx + i] = f(i, j);
  const auto& k = simd::kernels();
  for (std::size_t p = 0; p < ystart_.size(); ++p) {
    const double* wx = &wx_[p * nx];
    const double* wy = &wy_[p * ywidth_];
    double acc = 0.0;
    for (int a = 0; a < ywidth_; ++a)
      acc += wy[a] * k.dot(wx, &ft[static_cast<std::size_t>(ystart_[p] + a) * nx], nx);
    out[p] = acc;
  }
}

std::vector<double> PointSampler::apply(const ScalarField& f) const {
  std::vector<double> out(size());
  apply_into(f, out.data());
  return out;
}

ScalarField PointSampler::apply_on_grid(const ScalarField& f) const {
  if (size() != grid_.size()) throw PreconditionError("PointSampler: point set is not grid-shaped");
  ScalarField out(grid_);
  apply_into(f, out.data());
  return out;
}

std::vector<double> interpolate(const ScalarField& f, std::span<const Point> points,
                                InterpolationStats* stats) {
  PointSampler s(f.grid(), points);
  if (stats) stats->clamped += s.clamped();
  return s.apply(f);
}

}  // namespace chanlab
