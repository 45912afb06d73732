#include "chanlab/elliptic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "chanlab/derivatives.hpp"
#include "chanlab/simd/kernels.hpp"
#include "chanlab/spectral_x.hpp"

namespace chanlab {

namespace {

struct PoissonFactors {
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;  // index = wavenumber
};

PoissonFactors build_poisson(const ChannelGrid& g) {
  const int n = g.ny - 2;
  const Eigen::MatrixXd l2 = laplacian_y(g.ny, g.dy).dense().block(1, 1, n, n);
  PoissonFactors pf;
  for (int k = 0; k <= g.nx / 2; ++k) {
    const double k2 = (k == g.nx / 2) ? 0.0 : double(k) * k;
    Eigen::MatrixXd a = l2 - k2 * Eigen::MatrixXd::Identity(n, n);
    pf.lu.emplace_back(a);
  }
  return pf;
}

const PoissonFactors& poisson(const ChannelGrid& g) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, double>, std::unique_ptr<PoissonFactors>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(g.nx, g.ny, g.height);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<PoissonFactors>(build_poisson(g))).first;
  return *it->second;
}

void zero_walls(ScalarField& f) {
  const ChannelGrid& g = f.grid();
  for (int i = 0; i < g.nx; ++i) f(i, 0) = f(i, g.ny - 1) = 0.0;
}

double norm2(const ScalarField& f) {
  return std::sqrt(simd::kernels().dot(f.data(), f.data(), f.size()));
}

}  // namespace

const YOperator& laplacian_y(int ny, double dy) { return y_derivative(ny, dy, 2); }

ScalarField laplacian(const ScalarField& f) {
  const ChannelGrid& g = f.grid();
  ScalarField out = spectral_x(g.nx).dx_power[2].apply(f);
  out += laplacian_y(g.ny, g.dy).apply(f);
  return out;
}

StreamFunction dirichlet_inverse_laplacian(const ScalarField& g, double flux) {
  const ChannelGrid& gr = g.grid();
  if (!g.all_finite()) throw PreconditionError("dirichlet_inverse_laplacian: non-finite input");
  const SpectralX& sx = spectral_x(gr.nx);
  const PoissonFactors& pf = poisson(gr);
  ScalarField c = sx.forward.apply(g);
  const int n = gr.ny - 2;
  for (int r = 0; r < gr.nx; ++r) {
    Eigen::Map<Eigen::VectorXd> line(c.row(r) + 1, n);
    Eigen::VectorXd sol = pf.lu[sx.wavenumber(r)].solve(Eigen::VectorXd(line));
    line = sol;
    c(r, 0) = c(r, gr.ny - 1) = 0.0;
  }
  ScalarField f = sx.inverse.apply(c);
  zero_walls(f);
  if (flux != 0.0)
    for (int i = 0; i < gr.nx; ++i)
      for (int j = 0; j < gr.ny; ++j) f(i, j) += flux * gr.y(j) / gr.height;
  if (!f.all_finite()) throw NumericalError("dirichlet_inverse_laplacian: singular mode system");
  return StreamFunction::from_field(std::move(f));
}

ScalarField twisted_laplacian(const ScalarField& f, const MetricTensorField& G) {
  const ChannelGrid& g = f.grid();
  require_same_grid(g, G.grid());
  const ScalarField fx = ddx(f);
  const ScalarField fy = ddy(f);
  ScalarField a(g), b(g);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double e11 = G.g11.data()[p] - 1.0, e12 = G.g12.data()[p], e22 = G.g22.data()[p] - 1.0;
    a.data()[p] = e11 * fx.data()[p] + e12 * fy.data()[p];
    b.data()[p] = e12 * fx.data()[p] + e22 * fy.data()[p];
  }
  ScalarField out = laplacian(f);
  out += ddx(a);
  out += ddy(b);
  return out;
}

TwistedSolver::TwistedSolver(MetricTensorField G, double tol, int max_iter)
    : G_(std::move(G)), tol_(tol), max_iter_(max_iter) {
  const ChannelGrid& g = G_.grid();
  const int ny = g.ny, n = ny - 2;
  Eigen::VectorXd e11 = Eigen::VectorXd::Zero(ny), e12 = e11, e22 = e11;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < ny; ++j) {
      e11[j] += G_.g11(i, j) - 1.0;
      e12[j] += G_.g12(i, j);
      e22[j] += G_.g22(i, j) - 1.0;
    }
  e11 /= g.nx;
  e12 /= g.nx;
  e22 /= g.nx;
  double dev = 0.0, scale = 1.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < ny; ++j) {
      dev = std::max({dev, std::abs(G_.g11(i, j) - 1.0 - e11[j]), std::abs(G_.g12(i, j) - e12[j]),
                      std::abs(G_.g22(i, j) - 1.0 - e22[j])});
      scale = std::max({scale, std::abs(G_.g11(i, j)), std::abs(G_.g22(i, j))});
    }
  x_uniform_ = dev <= 1e-14 * scale;

  const Eigen::MatrixXd l2 = laplacian_y(ny, g.dy).dense().block(1, 1, n, n);
  const Eigen::MatrixXd d1 = y_derivative(ny, g.dy, 1).dense();
  const Eigen::MatrixXd d1ii = d1.block(1, 1, n, n);
  const Eigen::MatrixXd base = l2 + d1.middleRows(1, n) * e22.asDiagonal() * d1.middleCols(1, n);
  const Eigen::VectorXd e11i = e11.segment(1, n), e12i = e12.segment(1, n);
  const Eigen::MatrixXd bmat = e12i.asDiagonal() * d1ii + d1ii * e12i.asDiagonal();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  blocks_.reserve(g.nx / 2);
  blocks_.emplace_back(base);
  for (int k = 1; k < g.nx / 2; ++k) {
    const double k2 = double(k) * k;
    Eigen::MatrixXd a0 = base - k2 * eye - k2 * Eigen::MatrixXd(e11i.asDiagonal());
    Eigen::MatrixXd blk(2 * n, 2 * n);
    blk << a0, k * bmat, -k * bmat, a0;
    blocks_.emplace_back(blk);
  }
}

ScalarField TwistedSolver::precondition(const ScalarField& r) const {
  const ChannelGrid& g = r.grid();
  const SpectralX& sx = spectral_x(g.nx);
  ScalarField c = sx.forward.apply(r);
  const int n = g.ny - 2;
  auto solve1 = [&](int row) {
    Eigen::Map<Eigen::VectorXd> line(c.row(row) + 1, n);
    Eigen::VectorXd s = blocks_[0].solve(Eigen::VectorXd(line));
    line = s;
  };
  solve1(0);
  solve1(g.nx - 1);
  for (int k = 1; k < g.nx / 2; ++k) {
    Eigen::VectorXd rhs(2 * n);
    rhs << Eigen::Map<Eigen::VectorXd>(c.row(2 * k - 1) + 1, n), Eigen::Map<Eigen::VectorXd>(c.row(2 * k) + 1, n);
    Eigen::VectorXd s = blocks_[k].solve(rhs);
    Eigen::Map<Eigen::VectorXd>(c.row(2 * k - 1) + 1, n) = s.head(n);
    Eigen::Map<Eigen::VectorXd>(c.row(2 * k) + 1, n) = s.tail(n);
  }
  for (int r2 = 0; r2 < g.nx; ++r2) c(r2, 0) = c(r2, g.ny - 1) = 0.0;
  ScalarField out = sx.inverse.apply(c);
  zero_walls(out);
  return out;
}

StreamFunction TwistedSolver::solve(const ScalarField& rhs, SolveStats* stats) const {
  const ChannelGrid& g = rhs.grid();
  require_same_grid(g, G_.grid());
  ScalarField b = rhs;
  zero_walls(b);
  const double bnorm = norm2(b);
  SolveStats st;
  if (bnorm == 0.0) {
    if (stats) *stats = st;
    return StreamFunction(g);
  }
  auto apply_T = [&](const ScalarField& u) {
    ScalarField t = twisted_laplacian(u, G_);
    zero_walls(t);
    return t;
  };

  ScalarField x = precondition(b);
  ScalarField r = b - apply_T(x);
  double rel = norm2(r) / bnorm;
  st.iterations = 1;
  const int m = 40;
  while (rel > tol_) {
    if (st.iterations >= max_iter_)
      throw NumericalError("twisted solve did not converge: relative residual " + std::to_string(rel) +
                           " after " + std::to_string(st.iterations) + " iterations");
    const double beta = norm2(r);
    std::vector<ScalarField> V, Z;
    V.push_back((1.0 / beta) * r);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), gv = Eigen::VectorXd::Zero(m + 1);
    gv[0] = beta;
    int used = 0;
    for (int j = 0; j < m && st.iterations < max_iter_; ++j) {
      Z.push_back(precondition(V[j]));
      ScalarField w = apply_T(Z[j]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = simd::kernels().dot(w.data(), V[i].data(), w.size());
        w.axpy(-H(i, j), V[i]);
      }
      H(j + 1, j) = norm2(w);
      if (H(j + 1, j) > 0.0) V.push_back((1.0 / H(j + 1, j)) * w);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double den = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = H(j, j) / den;
      sn[j] = H(j + 1, j) / den;
      H(j, j) = den;
      H(j + 1, j) = 0.0;
      gv[j + 1] = -sn[j] * gv[j];
      gv[j] = cs[j] * gv[j];
      ++st.iterations;
      used = j + 1;
      if (std::abs(gv[j + 1]) / bnorm <= 0.1 * tol_ || static_cast<int>(V.size()) <= j + 1) break;
    }
    Eigen::VectorXd y = H.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(gv.head(used));
    for (int i = 0; i < used; ++i) x.axpy(y[i], Z[i]);
    r = b - apply_T(x);
    rel = norm2(r) / bnorm;
  }
  st.relative_residual = rel;
  if (stats) *stats = st;
  zero_walls(x);
  return StreamFunction::from_field(std::move(x));
}

}  // namespace chanlab
