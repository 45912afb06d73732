#include "chanlab/stencils.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "chanlab/simd/kernels.hpp"

namespace chanlab {

std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int order) {
  const int n = static_cast<int>(nodes.size());
  if (order < 0 || order >= n) throw PreconditionError("fornberg_weights: need more nodes than the order");
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

YOperator::YOperator(int ny, std::vector<Row> rows, int interior_begin, int interior_end, int offset,
                     std::vector<double> interior)
    : ny_(ny),
      rows_(std::move(rows)),
      ib_(interior_begin),
      ie_(interior_end),
      offset_(offset),
      interior_(std::move(interior)) {
  if (static_cast<int>(rows_.size()) != ny_) throw PreconditionError("YOperator: row count mismatch");
  if (ie_ < ib_) ie_ = ib_;
}

YOperator YOperator::from_dense(const Eigen::MatrixXd& m, double drop_tol) {
  const int ny = static_cast<int>(m.rows());
  std::vector<Row> rows(ny);
  for (int j = 0; j < ny; ++j) {
    int lo = -1, hi = -1;
    for (int k = 0; k < m.cols(); ++k)
      if (std::abs(m(j, k)) > drop_tol) {
        if (lo < 0) lo = k;
        hi = k;
      }
    if (lo < 0) continue;
    rows[j].start = lo;
    rows[j].c.resize(hi - lo + 1);
    for (int k = lo; k <= hi; ++k) rows[j].c[k - lo] = m(j, k);
  }
  // Longest run of rows around the middle sharing a translated stencil.
  auto same = [&](int a, int b) {
    return rows[a].c == rows[b].c && rows[a].start - a == rows[b].start - b;
  };
  const int mid = ny / 2;
  int ib = mid, ie = mid + 1;
  while (ib > 0 && same(ib - 1, mid)) --ib;
  while (ie < ny && same(ie, mid)) ++ie;
  if (rows[mid].c.empty()) return YOperator(ny, std::move(rows), 0, 0, 0, {});
  const int offset = rows[mid].start - mid;
  std::vector<double> interior = rows[mid].c;
  return YOperator(ny, std::move(rows), ib, ie, offset, std::move(interior));
}

void YOperator::apply_line(const double* in, double* out) const {
  const auto& k = simd::kernels();
  for (int j = 0; j < ib_; ++j) {
    const Row& r = rows_[j];
    out[j] = r.c.empty() ? 0.0 : k.dot(r.c.data(), in + r.start, r.c.size());
  }
  if (ie_ > ib_)
    k.stencil(interior_.data(), interior_.size(), in + ib_ + offset_, out + ib_,
              static_cast<std::size_t>(ie_ - ib_));
  for (int j = ie_; j < ny_; ++j) {
    const Row& r = rows_[j];
    out[j] = r.c.empty() ? 0.0 : k.dot(r.c.data(), in + r.start, r.c.size());
  }
}

ScalarField YOperator::apply(const ScalarField& f) const {
  const ChannelGrid& g = f.grid();
  if (g.ny != ny_) throw PreconditionError("YOperator: line length mismatch");
  ScalarField out(g);
  for (int i = 0; i < g.nx; ++i) apply_line(f.row(i), out.row(i));
  return out;
}

Eigen::MatrixXd YOperator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ny_, ny_);
  for (int j = 0; j < ny_; ++j) {
    if (j >= ib_ && j < ie_) {
      for (std::size_t s = 0; s < interior_.size(); ++s) m(j, j + offset_ + s) = interior_[s];
    } else {
      const Row& r = rows_[j];
      for (std::size_t s = 0; s < r.c.size(); ++s) m(j, r.start + s) = r.c[s];
    }
  }
  return m;
}

namespace {

YOperator build_derivative(int ny, double dy, int order) {
  if (order < 0 || order > 6) throw PreconditionError("y_derivative: unsupported order");
  if (ny <= order) throw PreconditionError("y_derivative: grid too short for this order");
  if (order == 0) {
    std::vector<YOperator::Row> rows(ny);
    for (int j = 0; j < ny; ++j) rows[j] = {j, {1.0}};
    return YOperator(ny, std::move(rows), 0, ny, 0, {1.0});
  }
  const int p = kYAccuracy;
  int r = p / 2 - 1 + (order + 1) / 2;
  r = std::min(r, (ny - 1) / 2);
  const int width = std::min(std::max(2 * r + 1, order + p), ny);
  const double scale = std::pow(dy, -order);

  auto weights = [&](int j, int start, int w) {
    std::vector<double> nodes(w);
    for (int s = 0; s < w; ++s) nodes[s] = start + s;
    auto c = fornberg_weights(static_cast<double>(j), nodes, order);
    for (double& v : c) v *= scale;
    return c;
  };

  std::vector<YOperator::Row> rows(ny);
  int ib = ny, ie = ny;
  for (int j = 0; j < ny; ++j) {
    if (j - r >= 0 && j + r <= ny - 1 && 2 * r + 1 > order) {
      if (ib == ny) ib = j;
      ie = j + 1;
      rows[j] = {j - r, weights(j, j - r, 2 * r + 1)};
    } else {
      const int start = std::clamp(j - width / 2, 0, ny - width);
      rows[j] = {start, weights(j, start, width)};
    }
  }
  if (ib == ny) return YOperator(ny, std::move(rows), 0, 0, 0, {});
  std::vector<double> interior = rows[ib].c;
  return YOperator(ny, std::move(rows), ib, ie, -r, std::move(interior));
}

constexpr double kH[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};

bool use_sbp(int ny) { return ny >= 9; }

std::vector<double> build_norm(int ny, double dy) {
  std::vector<double> w(ny, dy);
  if (use_sbp(ny)) {
    for (int j = 0; j < 4; ++j) {
      w[j] = kH[j] * dy;
      w[ny - 1 - j] = kH[j] * dy;
    }
  } else {
    w.front() = w.back() = 0.5 * dy;
  }
  return w;
}

template <class T>
class Cache {
 public:
  template <class Key, class Make>
  const T& get(const Key& key, Make make) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    if (it == map_.end()) it = map_.emplace(key, std::make_unique<T>(make())).first;
    return *it->second;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, double, int>, std::unique_ptr<T>> map_;
};

}  // namespace

const YOperator& y_derivative(int ny, double dy, int order) {
  static Cache<YOperator> cache;
  return cache.get(std::make_tuple(ny, dy, order), [&] { return build_derivative(ny, dy, order); });
}

std::span<const double> sbp_norm_weights(int ny, double dy) {
  static Cache<std::vector<double>> cache;
  const auto& w = cache.get(std::make_tuple(ny, dy, 0), [&] { return build_norm(ny, dy); });
  return w;
}

}  // namespace chanlab
