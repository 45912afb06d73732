#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "chanlab/io.hpp"
#include "chanlab/pipeline.hpp"

using namespace chanlab;
namespace fs = std::filesystem;

namespace {

struct TempRoot {
  fs::path path;
  TempRoot() : path(fs::temp_directory_path() / ("chanlab_pipe_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
    ::setenv("CHANNEL_LAB_OUTPUT_ROOT", path.c_str(), 1);
  }
  ~TempRoot() {
    ::unsetenv("CHANNEL_LAB_OUTPUT_ROOT");
    fs::remove_all(path);
  }
};

}  // namespace

TEST_CASE("identity smoke run, report and verify") {
  TempRoot root;
  std::ostringstream out, err;
  const fs::path cfg = fs::path(CHANLAB_SOURCE_DIR) / "configs" / "identity-smoke.cfg";
  REQUIRE(run_command(cfg, out, err) == kExitOk);
  const fs::path dir = root.path / "identity-smoke";
  for (const char* f : {"manifest.json", "summary.json", "constants.json", "certificate.json", "scan.csv",
                        "ledger.csv", "harness.json", "trajectory.csv"})
    CHECK(fs::exists(dir / f));
  const auto manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
  CHECK(manifest["status"] == "ok");

  std::ostringstream rep;
  CHECK(report_command(dir, rep, err) == kExitOk);
  CHECK(rep.str().find("FAIL") == std::string::npos);
  CHECK(rep.str().find("PASS") != std::string::npos);

  std::ostringstream ver;
  CHECK(verify_command(dir, ver, err) == kExitOk);

  // Any edit to a hashed artifact is caught.
  write_text(dir / "scan.csv", read_text(dir / "scan.csv") + "0,0,0,0\n");
  std::ostringstream ver2, err2;
  CHECK(verify_command(dir, ver2, err2) != kExitOk);
}

TEST_CASE("solver runs from random and file initial data") {
  TempRoot root;
  std::ostringstream out, err;
  REQUIRE(run_command(fs::path(CHANLAB_SOURCE_DIR) / "configs" / "random-solver.cfg", out, err) == kExitOk);
  const fs::path dir = root.path / "random-solver";
  std::ostringstream ver;
  CHECK(verify_command(dir, ver, err) == kExitOk);

  // Re-run from the stored t = 0 stream: same trajectory, same ledger.
  const std::string cfg = read_text(fs::path(CHANLAB_SOURCE_DIR) / "configs" / "random-solver.cfg");
  std::string file_cfg;
  std::istringstream in(cfg);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("initial", 0) == 0) continue;
    if (line.rfind("name", 0) == 0) line = "name = from-file";
    file_cfg += line + "\n";
  }
  file_cfg += "initial = file\ninitial.path = " + (dir / "fields" / "stream_000.bin").string() + "\n";
  write_text(root.path / "file.cfg", file_cfg);
  REQUIRE(run_command(root.path / "file.cfg", out, err) == kExitOk);
  CHECK(sha256_file(root.path / "from-file" / "ledger.csv") == sha256_file(dir / "ledger.csv"));
  CHECK(sha256_file(root.path / "from-file" / "trajectory.csv") == sha256_file(dir / "trajectory.csv"));
}

TEST_CASE("pipeline error paths") {
  TempRoot root;
  std::ostringstream out, err;
  write_text(root.path / "bad.cfg", "grid.nx = 33\n");
  CHECK(run_command(root.path / "bad.cfg", out, err) == kExitSchema);
  CHECK(err.str().find("grid.nx") != std::string::npos);
  CHECK(run_command(root.path / "missing.cfg", out, err) == kExitSchema);
  fs::create_directories(root.path / "empty");
  CHECK(report_command(root.path / "empty", out, err) != kExitOk);
  CHECK(verify_command(root.path / "empty", out, err) == kExitSchema);
}
