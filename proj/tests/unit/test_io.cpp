#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <unistd.h>

#include "chanlab/error.hpp"
#include "chanlab/io.hpp"

using namespace chanlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("chanlab_io_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("field and matrix containers round trip bit for bit") {
  TempDir d;
  const ChannelGrid g = make_grid(16, 9, 3.5);
  const ScalarField f = ScalarField::sample(g, [](double x, double y) { return std::sin(3 * x) / (1 + y) + 1e-300; });
  write_field(d.path / "f.bin", f, ContainerKind::Stream);
  ContainerKind kind{};
  const ScalarField h = read_field(d.path / "f.bin", &kind);
  CHECK(kind == ContainerKind::Stream);
  CHECK(h.grid().nx == 16);
  CHECK(h.grid().ny == 9);
  CHECK(h.grid().height == 3.5);
  CHECK(std::ranges::equal(h.values(), f.values()));
  CHECK(fs::file_size(d.path / "f.bin") == 4 + 4 * 4 + 8 + 16 + 8 * 16 * 9);

  Eigen::MatrixXd m(3, 2);
  m << 1, -2, 1.0 / 3.0, std::numeric_limits<double>::denorm_min(), -0.0, 1e300;
  write_matrix(d.path / "m.bin", m, g);
  CHECK(read_matrix(d.path / "m.bin") == m);
  CHECK_THROWS_AS(read_field(d.path / "m.bin"), ConfigError);
}

TEST_CASE("corrupt containers are rejected") {
  TempDir d;
  const ChannelGrid g = make_grid(8, 5, 1.0);
  write_field(d.path / "f.bin", ScalarField(g, 1.0));
  std::string bytes = read_text(d.path / "f.bin");

  std::string bad = bytes;
  bad[0] = 'X';
  write_text(d.path / "magic.bin", bad);
  CHECK_THROWS_AS(read_container(d.path / "magic.bin"), ConfigError);

  bad = bytes;
  bad[4] = 9;  // version
  write_text(d.path / "version.bin", bad);
  CHECK_THROWS_AS(read_container(d.path / "version.bin"), ConfigError);

  write_text(d.path / "short.bin", bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(read_container(d.path / "short.bin"), ConfigError);
  CHECK_THROWS_AS(read_container(d.path / "missing.bin"), ConfigError);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  TempDir d;
  write_text(d.path / "a.txt", "abc");
  CHECK(sha256_file(d.path / "a.txt") == sha256_hex("abc"));
}

TEST_CASE("format_real round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-310, 6.02214076e23, 1.0})
    CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
  CHECK(format_real(1.0) == "1");
}

TEST_CASE("field csv") {
  TempDir d;
  const ChannelGrid g = make_grid(4, 5, 2.0);
  write_field_csv(d.path / "f.csv", ScalarField(g, 2.0));
  const std::string t = read_text(d.path / "f.csv");
  CHECK(t.rfind("i,j,x,y,value\n", 0) == 0);
  CHECK(std::count(t.begin(), t.end(), '\n') == 1 + 20);
}
