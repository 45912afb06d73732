#pragma once
// Periodic x-direction: real DFT, spectral derivatives and the 2/3 filter,
// all as dense nx-by-nx matrices acting on whole y-lines.
//
// Coefficient layout of the real transform: row 0 is the mean, rows 2k-1 and
// 2k hold the cos(kx) and sin(kx) amplitudes for 0 < k < nx/2, row nx-1 the
// Nyquist cosine.

#include <Eigen/Dense>
#include <vector>

#include "chanlab/grid.hpp"

namespace chanlab {

class XOperator {
 public:
  XOperator() = default;
  explicit XOperator(Eigen::MatrixXd m) : m_(std::move(m)) {}

  const Eigen::MatrixXd& matrix() const { return m_; }
  // out[r, :] = sum_i M(r, i) in[i, :], lines of length ny.
  void apply(const double* in, double* out, int ny) const;
  ScalarField apply(const ScalarField& f) const;

 private:
  Eigen::MatrixXd m_;
};

struct SpectralX {
  int nx = 0;
  XOperator forward;
  XOperator inverse;
  XOperator filter;                 // 2/3-rule dealiasing
  std::vector<XOperator> dx_power;  // dx_power[m] = D_x^m, m = 0..6

  // Wavenumber carried by coefficient row r.
  int wavenumber(int r) const { return r == 0 ? 0 : (r == nx - 1 ? nx / 2 : (r + 1) / 2); }
};

const SpectralX& spectral_x(int nx);

}  // namespace chanlab
