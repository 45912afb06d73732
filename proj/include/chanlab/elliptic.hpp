#pragma once
// Laplacian, its two-wall Dirichlet inverse, and the twisted Laplacian
// div(G grad f) with a preconditioned Krylov solver.

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "chanlab/grid.hpp"
#include "chanlab/stencils.hpp"

namespace chanlab {

// Symmetric 2x2 tensor per grid point.
struct MetricTensorField {
  ScalarField g11, g12, g22;

  const ChannelGrid& grid() const { return g11.grid(); }
  static MetricTensorField identity(const ChannelGrid& g) {
    return {ScalarField(g, 1.0), ScalarField(g, 0.0), ScalarField(g, 1.0)};
  }
};

const YOperator& laplacian_y(int ny, double dy);

ScalarField laplacian(const ScalarField& f);

// Solves Lap f = g on interior rows with f = 0 on the boundary row and
// f = flux on the far wall.
StreamFunction dirichlet_inverse_laplacian(const ScalarField& g, double flux = 0.0);

// div(G grad f) = Lap f + div((G - I) grad f), so G = I reproduces the
// Laplacian exactly.
ScalarField twisted_laplacian(const ScalarField& f, const MetricTensorField& G);

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

// Dirichlet solves of div(G grad u) = rhs. Preconditioned by the exact
// inverse of the x-averaged operator, which is already exact for metrics
// that do not depend on x.
class TwistedSolver {
 public:
  explicit TwistedSolver(MetricTensorField G, double tol = 1e-10, int max_iter = 300);

  StreamFunction solve(const ScalarField& rhs, SolveStats* stats = nullptr) const;
  const MetricTensorField& metric() const { return G_; }

  // Exact inverse of the x-averaged operator (used as preconditioner).
  ScalarField precondition(const ScalarField& r) const;

 private:
  MetricTensorField G_;
  double tol_;
  int max_iter_;
  bool x_uniform_ = false;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> blocks_;  // per wavenumber
};

}  // namespace chanlab
