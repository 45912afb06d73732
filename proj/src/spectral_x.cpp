#include "chanlab/spectral_x.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "chanlab/simd/kernels.hpp"

namespace chanlab {

void XOperator::apply(const double* in, double* out, int ny) const {
  const auto& k = simd::kernels();
  const int n = static_cast<int>(m_.rows());
  for (int r = 0; r < n; ++r) {
    double* o = out + static_cast<std::size_t>(r) * ny;
    std::fill(o, o + ny, 0.0);
    for (int i = 0; i < n; ++i) {
      const double a = m_(r, i);
      if (a != 0.0) k.axpy(a, in + static_cast<std::size_t>(i) * ny, o, ny);
    }
  }
}

ScalarField XOperator::apply(const ScalarField& f) const {
  const ChannelGrid& g = f.grid();
  if (g.nx != m_.cols()) throw PreconditionError("XOperator: size mismatch");
  ScalarField out(g);
  apply(f.data(), out.data(), g.ny);
  return out;
}

namespace {

SpectralX build(int nx) {
  SpectralX s;
  s.nx = nx;
  const int half = nx / 2;
  Eigen::MatrixXd fwd = Eigen::MatrixXd::Zero(nx, nx);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(nx, nx);
  for (int i = 0; i < nx; ++i) {
    const double x = kTwoPi * i / nx;
    fwd(0, i) = 1.0 / nx;
    inv(i, 0) = 1.0;
    for (int k = 1; k < half; ++k) {
      const double c = std::cos(k * x), sn = std::sin(k * x);
      fwd(2 * k - 1, i) = 2.0 * c / nx;
      fwd(2 * k, i) = 2.0 * sn / nx;
      inv(i, 2 * k - 1) = c;
      inv(i, 2 * k) = sn;
    }
    if (nx > 1) {
      const double alt = (i % 2 == 0) ? 1.0 : -1.0;
      fwd(nx - 1, i) = alt / nx;
      inv(i, nx - 1) = alt;
    }
  }
  // Derivative in coefficient space: (a, b) -> (k b, -k a); Nyquist dropped.
  Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(nx, nx);
  Eigen::MatrixXd keep = Eigen::MatrixXd::Zero(nx, nx);
  keep(0, 0) = 1.0;
  for (int k = 1; k < half; ++k) {
    dk(2 * k - 1, 2 * k) = k;
    dk(2 * k, 2 * k - 1) = -k;
    if (3 * k < nx) keep(2 * k - 1, 2 * k - 1) = keep(2 * k, 2 * k) = 1.0;
  }
  Eigen::MatrixXd d = inv * dk * fwd;
  s.forward = XOperator(fwd);
  s.inverse = XOperator(inv);
  s.filter = XOperator(inv * keep * fwd);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(nx, nx);
  s.dx_power.emplace_back(p);
  for (int m = 1; m <= 6; ++m) {
    p = d * p;
    s.dx_power.emplace_back(p);
  }
  return s;
}

}  // namespace

const SpectralX& spectral_x(int nx) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<SpectralX>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(nx);
  if (it == cache.end()) it = cache.emplace(nx, std::make_unique<SpectralX>(build(nx))).first;
  return *it->second;
}

}  // namespace chanlab
