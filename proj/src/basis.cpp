#include "chanlab/basis.hpp"

#include <cmath>

#include "chanlab/derivatives.hpp"
#include "chanlab/error.hpp"

namespace chanlab {

namespace {

double mode_value(const BasisMode& m, double L, double x, double y) {
  const double tx = m.sine ? std::sin(m.k * x) : std::cos(m.k * x);
  return tx * std::sin(m.l * kPi * y / L);
}

}  // namespace

StreamBasis::StreamBasis(const ChannelGrid& grid, int max_k, int max_l)
    : grid_(grid), max_k_(max_k), max_l_(max_l) {
  if (max_k < 0 || max_l < 1) throw PreconditionError("StreamBasis: need max_k >= 0 and max_l >= 1");
  if (3 * max_k >= grid.nx) throw PreconditionError("StreamBasis: max_k not resolved by the dealiased grid");
  if (max_l >= grid.ny - 1) throw PreconditionError("StreamBasis: max_l exceeds the wall-normal resolution");
  for (int k = 0; k <= max_k; ++k)
    for (int l = 1; l <= max_l; ++l) {
      modes_.push_back({k, l, false});
      if (k > 0) modes_.push_back({k, l, true});
    }
  const double L = grid.height;
  for (const BasisMode& m : modes_) {
    ScalarField f = ScalarField::sample(grid, [&](double x, double y) { return mode_value(m, L, x, y); });
    for (int i = 0; i < grid.nx; ++i) f(i, 0) = f(i, grid.ny - 1) = 0.0;
    const double s = 1.0 / std::sqrt(dirichlet_pairing(f, f));
    f *= s;
    scale_.push_back(s);
    functions_.push_back(StreamFunction::dirichlet(std::move(f)));
  }
}

void StreamBasis::evaluate(int j, std::span<const Point> pts, double* out) const {
  const BasisMode& m = modes_[j];
  for (std::size_t p = 0; p < pts.size(); ++p) out[p] = scale_[j] * mode_value(m, grid_.height, pts[p].x, pts[p].y);
}

ScalarField StreamBasis::evaluate_on(int j, std::span<const Point> pts) const {
  if (pts.size() != grid_.size()) throw PreconditionError("StreamBasis::evaluate_on: one point per grid node required");
  ScalarField f(grid_);
  evaluate(j, pts, f.data());
  return f;
}

StreamFunction StreamBasis::combine(std::span<const double> coeffs) const {
  if (coeffs.size() != modes_.size()) throw PreconditionError("StreamBasis::combine: coefficient count mismatch");
  ScalarField f(grid_);
  for (std::size_t j = 0; j < coeffs.size(); ++j) f.axpy(coeffs[j], functions_[j].field());
  return StreamFunction::dirichlet(std::move(f));
}

namespace {

ScalarField random_series(const ChannelGrid& g, std::mt19937_64& rng, const RandomStreamSpec& spec, double shift) {
  std::normal_distribution<double> normal;
  struct Term { int k, l; double a, b; };
  std::vector<Term> terms;
  for (int k = 0; k <= spec.max_k; ++k)
    for (int l = 1; l <= spec.max_l; ++l) {
      const double s = 1.0 / (1.0 + k * k + l * l);
      const double a = normal(rng) * s, b = normal(rng) * s;
      terms.push_back({k, l, a, k > 0 ? b : 0.0});
    }
  const double L = g.height;
  return ScalarField::sample(g, [&](double x, double y) {
    double s = 0.0;
    for (const Term& t : terms) {
      const double wy = shift == 0.0 ? std::sin(t.l * kPi * y / L) : std::cos((t.l - shift) * kPi * y / L);
      s += (t.a * std::cos(t.k * x) + t.b * std::sin(t.k * x)) * wy;
    }
    return s * std::exp(-spec.decay * y);
  });
}

}  // namespace

StreamFunction random_stream(const ChannelGrid& g, std::mt19937_64& rng, const RandomStreamSpec& spec) {
  ScalarField f = random_series(g, rng, spec, 0.0);
  for (int i = 0; i < g.nx; ++i) f(i, 0) = f(i, g.ny - 1) = 0.0;
  return StreamFunction::dirichlet(std::move(f));
}

ScalarField random_wall_field(const ChannelGrid& g, std::mt19937_64& rng, const RandomStreamSpec& spec) {
  ScalarField f = random_series(g, rng, spec, 0.5);
  for (int i = 0; i < g.nx; ++i) f(i, g.ny - 1) = 0.0;
  return f;
}

}  // namespace chanlab
