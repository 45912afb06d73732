#pragma once
// Binary field/matrix container, CSV dumps and content hashes.
//
// Container layout (little-endian): "CHLB", u32 version, u32 kind, u32 nx,
// u32 ny, f64 height, u64 rows, u64 cols, then rows*cols f64 row-major.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chanlab/grid.hpp"

namespace chanlab {

enum class ContainerKind : std::uint32_t { Scalar = 0, Stream = 1, Displacement = 2, Matrix = 3 };

struct Container {
  ContainerKind kind = ContainerKind::Scalar;
  std::uint32_t nx = 0, ny = 0;
  double height = 0.0;
  std::uint64_t rows = 0, cols = 0;
  std::vector<double> data;
};

void write_container(const std::filesystem::path& path, const Container& c);
Container read_container(const std::filesystem::path& path);

// Fields are stored as nx rows by ny columns.
void write_field(const std::filesystem::path& path, const ScalarField& f, ContainerKind kind = ContainerKind::Scalar);
ScalarField read_field(const std::filesystem::path& path, ContainerKind* kind = nullptr);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, const ChannelGrid& g);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

// i,j,x,y,value with round-trip precision.
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);
// Formats a double so that it reads back bit-identical.
std::string format_real(double v);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes text atomically enough for our purposes (truncate + write + check).
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace chanlab
