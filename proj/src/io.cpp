#include "chanlab/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "chanlab/error.hpp"

namespace chanlab {

static_assert(std::endian::native == std::endian::little, "container format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'C', 'H', 'L', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos, const std::filesystem::path& p) {
  if (pos + sizeof(T) > in.size()) throw ConfigError(p.string(), "truncated container");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError(path.string(), "cannot write file");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_container(const std::filesystem::path& path, const Container& c) {
  if (c.data.size() != c.rows * c.cols) throw PreconditionError("write_container: data size does not match shape");
  std::string out(kMagic, 4);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(c.kind));
  put(out, c.nx);
  put(out, c.ny);
  put(out, c.height);
  put(out, c.rows);
  put(out, c.cols);
  out.append(reinterpret_cast<const char*>(c.data.data()), c.data.size() * sizeof(double));
  write_text(path, out);
}

Container read_container(const std::filesystem::path& path) {
  const std::string in = read_text(path);
  if (in.size() < 4 || std::memcmp(in.data(), kMagic, 4) != 0) throw ConfigError(path.string(), "not a container");
  std::size_t pos = 4;
  if (take<std::uint32_t>(in, pos, path) != kVersion) throw ConfigError(path.string(), "unsupported container version");
  Container c;
  const auto kind = take<std::uint32_t>(in, pos, path);
  if (kind > static_cast<std::uint32_t>(ContainerKind::Matrix)) throw ConfigError(path.string(), "unknown kind tag");
  c.kind = static_cast<ContainerKind>(kind);
  c.nx = take<std::uint32_t>(in, pos, path);
  c.ny = take<std::uint32_t>(in, pos, path);
  c.height = take<double>(in, pos, path);
  c.rows = take<std::uint64_t>(in, pos, path);
  c.cols = take<std::uint64_t>(in, pos, path);
  if (in.size() - pos != c.rows * c.cols * sizeof(double)) throw ConfigError(path.string(), "payload size mismatch");
  c.data.resize(c.rows * c.cols);
  std::memcpy(c.data.data(), in.data() + pos, c.data.size() * sizeof(double));
  return c;
}

void write_field(const std::filesystem::path& path, const ScalarField& f, ContainerKind kind) {
  const ChannelGrid& g = f.grid();
  Container c{kind, static_cast<std::uint32_t>(g.nx), static_cast<std::uint32_t>(g.ny), g.height,
              static_cast<std::uint64_t>(g.nx), static_cast<std::uint64_t>(g.ny),
              std::vector<double>(f.values().begin(), f.values().end())};
  write_container(path, c);
}

ScalarField read_field(const std::filesystem::path& path, ContainerKind* kind) {
  Container c = read_container(path);
  if (c.kind == ContainerKind::Matrix) throw ConfigError(path.string(), "container holds a matrix, not a field");
  if (c.rows != c.nx || c.cols != c.ny) throw ConfigError(path.string(), "field shape does not match grid");
  if (kind) *kind = c.kind;
  return ScalarField(make_grid(static_cast<int>(c.nx), static_cast<int>(c.ny), c.height), std::move(c.data));
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, const ChannelGrid& g) {
  Container c{ContainerKind::Matrix, static_cast<std::uint32_t>(g.nx), static_cast<std::uint32_t>(g.ny), g.height,
              static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols()), {}};
  c.data.resize(m.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(c.data.data(), m.rows(), m.cols()) = m;
  write_container(path, c);
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  Container c = read_container(path);
  if (c.kind != ContainerKind::Matrix) throw ConfigError(path.string(), "container holds a field, not a matrix");
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      c.data.data(), static_cast<Eigen::Index>(c.rows), static_cast<Eigen::Index>(c.cols));
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  const ChannelGrid& g = f.grid();
  std::string out = "i,j,x,y,value\n";
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      out += std::to_string(i) + ',' + std::to_string(j) + ',' + format_real(g.x(i)) + ',' + format_real(g.y(j)) + ',' +
             format_real(f(i, j)) + '\n';
  write_text(path, out);
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  for (unsigned int k = 0; k < len; ++k) {
    s += hex[md[k] >> 4];
    s += hex[md[k] & 15];
  }
  return s;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

}  // namespace chanlab
