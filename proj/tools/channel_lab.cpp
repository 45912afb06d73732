// channel-lab: run / report / verify experiments.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chanlab/parallel.hpp"
#include "chanlab/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Operator laboratory for the L2 exponential map on the periodic channel"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: CHANNEL_LAB_THREADS or hardware)");

  std::string config, dir;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config, "Config file")->required();
  auto* report = app.add_subcommand("report", "Summarize an artifact directory");
  report->add_option("dir", dir, "Artifact directory")->required();
  auto* verify = app.add_subcommand("verify", "Re-check hashes and ledger assertions");
  verify->add_option("dir", dir, "Artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : chanlab::kExitSchema;
  }
  if (threads > 0) chanlab::set_thread_count(threads);

  try {
    if (*run) return chanlab::run_command(config, std::cout, std::cerr);
    if (*report) return chanlab::report_command(dir, std::cout, std::cerr);
    return chanlab::verify_command(dir, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return chanlab::kExitNumerical;
  }
}
