#pragma once
// Wall-normal finite-difference machinery: Fornberg weights, banded operators
// with explicit wall closures, and the y-quadrature weights.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "chanlab/grid.hpp"

namespace chanlab {

// Weights c[k] with sum_k c[k] g(nodes[k]) ~ g^(order)(x0).
std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int order);

// Linear map on a y-line of length ny. Rows [interior_begin, interior_end)
// share one stencil: out[j] = sum_s c[s] in[j + offset + s]; all other rows
// carry their own window.
class YOperator {
 public:
  struct Row {
    int start = 0;
    std::vector<double> c;
  };

  YOperator() = default;
  YOperator(int ny, std::vector<Row> rows, int interior_begin, int interior_end, int offset,
            std::vector<double> interior);

  static YOperator from_dense(const Eigen::MatrixXd& m, double drop_tol = 0.0);

  int ny() const { return ny_; }
  void apply_line(const double* in, double* out) const;
  ScalarField apply(const ScalarField& f) const;
  Eigen::MatrixXd dense() const;
  YOperator transpose() const { return from_dense(dense().transpose()); }

 private:
  int ny_ = 0;
  std::vector<Row> rows_;  // indexed by j; entries inside the interior block unused
  int ib_ = 0, ie_ = 0, offset_ = 0;
  std::vector<double> interior_;
};

inline constexpr int kYAccuracy = 6;

// d^order/dy^order with centered interior stencils and one-sided wall closures,
// all of accuracy kYAccuracy (reduced automatically on very short lines).
const YOperator& y_derivative(int ny, double dy, int order);

// Diagonal norm of the 4th-order summation-by-parts operators: trapezoid
// with corrected end weights, exact for cubics.
std::span<const double> sbp_norm_weights(int ny, double dy);

// Quadrature weights in y (including dy).
inline std::span<const double> y_weights(const ChannelGrid& g) { return sbp_norm_weights(g.ny, g.dy); }

}  // namespace chanlab
