#include "chanlab/derivatives.hpp"

#include <string>

#include "chanlab/simd/kernels.hpp"
#include "chanlab/spectral_x.hpp"
#include "chanlab/stencils.hpp"

namespace chanlab {

ScalarField partial_derivative(const ScalarField& f, int m, int n) {
  if (m < 0 || n < 0 || m + n > 6)
    throw PreconditionError("partial_derivative: unsupported order (" + std::to_string(m) + "," +
                            std::to_string(n) + ")");
  const ChannelGrid& g = f.grid();
  if (m == 0 && n == 0) return f;
  ScalarField out = n == 0 ? f : y_derivative(g.ny, g.dy, n).apply(f);
  if (m > 0) out = spectral_x(g.nx).dx_power[m].apply(out);
  return out;
}

double inner_product_L2(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  const ChannelGrid& gr = f.grid();
  const auto w = y_weights(gr);
  const auto& k = simd::kernels();
  double s = 0.0;
  for (int i = 0; i < gr.nx; ++i) s += k.wdot(w.data(), f.row(i), g.row(i), gr.ny);
  return s * gr.dx;
}

double inner_product_L2(const VectorField& a, const VectorField& b) {
  return inner_product_L2(a.u, b.u) + inner_product_L2(a.v, b.v);
}

double boundary_integral_x(const ScalarField& f) {
  const ChannelGrid& g = f.grid();
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i) s += f(i, 0);
  return s * g.dx;
}

double dirichlet_pairing(const ScalarField& f, const ScalarField& g) {
  return inner_product_L2(ddx(f), ddx(g)) + inner_product_L2(ddy(f), ddy(g));
}

}  // namespace chanlab
