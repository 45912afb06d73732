#pragma once

#include "chanlab/grid.hpp"

namespace chanlab {

// d^m/dx^m d^n/dy^n: spectral in x, finite differences in y. m + n <= 6.
ScalarField partial_derivative(const ScalarField& f, int m, int n);
inline ScalarField ddx(const ScalarField& f) { return partial_derivative(f, 1, 0); }
inline ScalarField ddy(const ScalarField& f) { return partial_derivative(f, 0, 1); }

// Spectrally exact in x, SBP-norm quadrature in y.
double inner_product_L2(const ScalarField& f, const ScalarField& g);
inline double norm_L2(const ScalarField& f) { return std::sqrt(inner_product_L2(f, f)); }
double inner_product_L2(const VectorField& a, const VectorField& b);

// Integral of f over the boundary row j = 0.
double boundary_integral_x(const ScalarField& f);

// Dirichlet pairing <grad f, grad g>.
double dirichlet_pairing(const ScalarField& f, const ScalarField& g);

}  // namespace chanlab
