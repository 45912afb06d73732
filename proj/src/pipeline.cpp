#include "chanlab/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "chanlab/error.hpp"
#include "chanlab/io.hpp"
#include "chanlab/sobolev.hpp"

namespace chanlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kLedgerHeader = "tag,phase,sample,m,n,sense,lhs,rhs_main,rhs_lower,constant,slack,pass\n";

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  const fs::path& dir() const { return dir_; }

  void text(const std::string& rel, const std::string& content) {
    prepare(rel);
    write_text(dir_ / rel, content);
    index(rel);
  }
  void json_file(const std::string& rel, const json& j) { text(rel, j.dump(2) + "\n"); }
  void matrix(const std::string& rel, const Eigen::MatrixXd& m, const ChannelGrid& g) {
    prepare(rel);
    write_matrix(dir_ / rel, m, g);
    index(rel);
  }
  void field(const std::string& rel, const ScalarField& f, ContainerKind kind) {
    prepare(rel);
    write_field(dir_ / rel, f, kind);
    index(rel);
  }
  json files() const { return files_; }

 private:
  void prepare(const std::string& rel) { fs::create_directories((dir_ / rel).parent_path()); }
  void index(const std::string& rel) {
    const fs::path p = dir_ / rel;
    files_[rel] = {{"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}};
  }

  fs::path dir_;
  json files_ = json::object();
};

struct Check {
  std::string name;
  double value;
  std::string relation;  // "<=" or ">="
  double threshold;
};

bool holds(double value, const std::string& relation, double threshold) {
  if (std::isnan(value)) return false;
  return relation == "<=" ? value <= threshold : value >= threshold;
}

json check_json(const Check& c) {
  return {{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"threshold", c.threshold},
          {"pass", holds(c.value, c.relation, c.threshold)}};
}

GeodesicTrajectory build_trajectory(const ExperimentConfig& c) {
  const ChannelGrid g = make_grid(c.nx, c.ny, c.height);
  const double a = c.amplitude, d = c.decay;
  auto phi = [a, d](double y) { return a * std::exp(-d * y); };
  if (c.source == TrajectorySource::Analytic) {
    if (c.initial == InitialData::Identity) return identity_trajectory(g, c.horizon, c.intervals);
    return shear_trajectory(phi, c.horizon, c.intervals, g);
  }
  StreamFunction f0(g);
  if (c.initial == InitialData::Shear) {
    f0 = velocity_profile_stream(phi, g);
  } else if (c.initial == InitialData::Random) {
    // Own stream of the seed so harness samples stay independent of it.
    std::seed_seq seq{c.seed, std::uint64_t{0x1d}};
    std::mt19937_64 rng(seq);
    f0 = StreamFunction::from_field(
        c.amplitude * random_stream(g, rng, RandomStreamSpec{c.initial_max_k, c.initial_max_l, c.decay}).field());
  } else if (c.initial == InitialData::File) {
    const ScalarField f = read_field(c.initial_path);
    const ChannelGrid& h = f.grid();
    if (h.nx != g.nx || h.ny != g.ny || h.height != g.height)
      throw ConfigError("initial.path", "stored grid does not match grid.*");
    try {
      f0 = StreamFunction::from_field(f);
    } catch (const PreconditionError& e) {
      throw ConfigError("initial.path", e.what());
    }
  }
  GeodesicTrajectory traj = solve_euler(f0, c.horizon, c.dt, EulerOptions{c.record_every, true});
  flow_map(traj);
  inverse_flow_map(traj);
  return traj;
}

std::string ledger_csv(const HarnessLedger& led) {
  std::string out;
  for (const LedgerRow& r : led.rows) {
    out += r.tag + ',' + r.phase + ',' + std::to_string(r.sample) + ',' + std::to_string(led.m) + ',' +
           std::to_string(led.n) + ',' + (led.sense == Sense::AtMost ? "le" : "ge") + ',' + format_real(r.lhs) + ',' +
           format_real(r.rhs_main) + ',' + format_real(r.rhs_lower) + ',' + format_real(r.constant) + ',' +
           format_real(r.slack) + ',' + (r.pass ? "1" : "0") + '\n';
  }
  return out;
}

double relative_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& E) {
  return (A - E).norm() / std::max(E.norm(), 1.0);
}

json spectrum_json(const SpectralReport& r) {
  json j = {{"sigma_min", r.sigma_min}, {"sigma_max", r.sigma_max}, {"decay_fit_alpha", r.decay_fit_alpha}};
  if (r.symmetric_lambda_min) j["symmetric_lambda_min"] = *r.symmetric_lambda_min;
  return j;
}

std::string spectrum_csv(const std::vector<double>& s) {
  std::string out = "index,sigma\n";
  for (std::size_t k = 0; k < s.size(); ++k) out += std::to_string(k) + ',' + format_real(s[k]) + '\n';
  return out;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json config_json(const ExperimentConfig& c) {
  json ops = json::array(), tags = json::array(), per_tag = json::object();
  for (OperatorName op : c.operators) ops.push_back(to_string(op));
  for (HarnessTag t : c.inequalities) tags.push_back(to_string(t));
  for (const auto& [t, n] : c.samples_per_tag) per_tag[to_string(t)] = n;
  return {{"name", c.name},
          {"grid", {{"nx", c.nx}, {"ny", c.ny}, {"height", c.height}}},
          {"initial", {{"kind", to_string(c.initial)}, {"amplitude", c.amplitude}, {"decay", c.decay},
                       {"max_k", c.initial_max_k}, {"max_l", c.initial_max_l}, {"path", c.initial_path.string()}}},
          {"trajectory", to_string(c.source)},
          {"time", {{"horizon", c.horizon}, {"dt", c.dt}, {"intervals", c.intervals}, {"record_every", c.record_every}}},
          {"operators", {{"list", ops}, {"t", c.t}, {"nodes", c.quadrature_nodes}}},
          {"basis", {{"max_k", c.max_k}, {"max_l", c.max_l}}},
          {"certificate", c.certificate},
          {"scan", {{"enabled", c.scan}, {"t_max", c.scan_t_max}}},
          {"harness", {{"tags", tags}, {"samples", c.samples}, {"calibration", c.calibration_samples},
                       {"samples_per_tag", per_tag}, {"m", c.harness_m}, {"n", c.harness_n}}},
          {"sobolev", {{"s", c.s}, {"eps", c.eps}}},
          {"seed", c.seed}};
}

}  // namespace

fs::path output_directory(const ExperimentConfig& config) {
  const char* root = std::getenv("CHANNEL_LAB_OUTPUT_ROOT");
  const fs::path base = root && *root ? fs::path(root) : fs::path(config.output);
  return base / config.name;
}

RunResult run_experiment(const ExperimentConfig& c, std::ostream& log) {
  RunResult result;
  result.directory = output_directory(c);
  ArtifactWriter out(result.directory);
  json manifest = {{"format", "channel-lab-run"}, {"version", 1}, {"config", config_json(c)}};
  json timings = json::object();
  std::vector<Check> checks;
  json summary = json::object();
  const auto stage = [&](const char* name) { log << "[" << c.name << "] " << name << "\n" << std::flush; };

  try {
    auto t0 = std::chrono::steady_clock::now();
    stage("trajectory");
    const GeodesicTrajectory traj = build_trajectory(c);
    {
      std::string csv = "t,energy,enstrophy,sup_jacobian\n";
      for (std::size_t k = 0; k < traj.size(); ++k)
        csv += format_real(traj.times[k]) + ',' + format_real(k < traj.energy.size() ? traj.energy[k] : 0.0) + ',' +
               format_real(k < traj.enstrophy.size() ? traj.enstrophy[k] : 0.0) + ',' +
               format_real(sup_jacobian_norm(traj.flows[k])) + '\n';
      out.text("trajectory.csv", csv);
      json index = json::array();
      for (std::size_t k = 0; k < traj.size(); ++k) {
        char tag[16];
        std::snprintf(tag, sizeof tag, "%03zu", k);
        const std::string sf = std::string("fields/stream_") + tag + ".bin";
        const std::string df = std::string("fields/displacement_") + tag + ".bin";
        out.field(sf, traj.streams[k].field(), ContainerKind::Stream);
        out.field(df, traj.flows[k].displacement(), ContainerKind::Displacement);
        index.push_back({{"record", k}, {"t", traj.times[k]}, {"stream", sf}, {"displacement", df}});
      }
      out.json_file("fields/index.json", index);
      summary["interpolation_clamped"] = traj.clamped;
    }
    timings["trajectory"] = elapsed(t0);

    t0 = std::chrono::steady_clock::now();
    stage("constants");
    const TrajectoryConstants k = constants_from_trajectory(traj, c.t, c.s, c.eps);
    const WeightedNormSpec spec = make_weighted_spec(k);
    {
      json j = {{"s", k.s}, {"t", k.t}, {"eps", k.eps}, {"eps_max", k.eps_max}, {"K_eta_inf", k.K_eta_inf},
                {"c1", k.c1}, {"cs1", k.cs1}, {"K_eps", k.K_eps}, {"Q_eps", k.Q_eps}, {"C_eta", k.C_eta},
                {"C_t", k.C_t}, {"B", spec.B}};
      out.json_file("constants.json", j);
      summary["constants"] = j;
    }
    timings["constants"] = elapsed(t0);

    if (!c.operators.empty()) {
      t0 = std::chrono::steady_clock::now();
      stage("operators");
      const OperatorContext ctx(traj, c.t, c.quadrature_nodes);
      const GalerkinSpace space(StreamBasis(traj.grid, c.max_k, c.max_l));
      const OperatorAssembler asmb(ctx, space);
      json ops = json::object();
      for (OperatorName op : c.operators) {
        const std::string name = to_string(op);
        const OperatorMatrix A = asmb.assemble(op);
        out.matrix("matrices/" + name + ".bin", A.entries, traj.grid);
        json meta = {{"operator", name}, {"t", A.t}, {"pairing", A.pairing},
                     {"basis", {{"kind", "fourier-x-sine-y"}, {"max_k", c.max_k}, {"max_l", c.max_l}, {"dim", space.dim()}}},
                     {"grid", {{"nx", traj.grid.nx}, {"ny", traj.grid.ny}, {"height", traj.grid.height}}},
                     {"rows", A.entries.rows()}, {"cols", A.entries.cols()}};
        if (A.output_gram.size() > 0) {
          out.matrix("matrices/" + name + "_output_gram.bin", A.output_gram, traj.grid);
          meta["output_gram"] = "matrices/" + name + "_output_gram.bin";
        }
        out.json_file("matrices/" + name + ".json", meta);
        const CompactnessSignature sig = compactness_signature(A, space);
        out.text("spectra/" + name + ".csv", spectrum_csv(sig.spectrum.singular_values));
        json sj = spectrum_json(sig.spectrum);
        sj["tail_ratio"] = sig.tail_ratio;
        ops[name] = sj;

        if (c.initial == InitialData::Identity) {
          const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(space.dim(), space.dim());
          const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(space.dim(), space.dim());
          const Eigen::MatrixXd expected = op == OperatorName::Lambda || op == OperatorName::LambdaInverse ? I
                                           : op == OperatorName::OmegaHat || op == OperatorName::Phi  ? c.t * I
                                                                                                      : Z;
          checks.push_back({"identity_" + name, relative_error(A.entries, expected), "<=", 1e-8});
        } else if (op == OperatorName::Gamma || op == OperatorName::K) {
          checks.push_back({"compact_tail_" + name, sig.tail_ratio, "<=", 1e-3});
        } else if (op == OperatorName::OmegaHat) {
          checks.push_back({"omega_hat_bounded_below", sig.spectrum.sigma_min / sig.spectrum.sigma_max, ">=", 1e-2});
        }
      }
      summary["operators"] = ops;
      timings["operators"] = elapsed(t0);
    }

    if (c.certificate) {
      t0 = std::chrono::steady_clock::now();
      stage("certificate");
      const InvertibilityCertificate cert = invertibility_certificate(traj, c.t, c.quadrature_nodes, c.max_k, c.max_l);
      json j = {{"t", c.t}, {"spectrum", spectrum_json(cert.spectrum)}, {"C_t", cert.C_t},
                {"lemma1_floor", cert.lemma1_floor}, {"enlarged_sigma_min", cert.enlarged_sigma_min},
                {"enlargement_change", cert.enlargement_change},
                {"stable_under_enlargement", cert.stable_under_enlargement}};
      out.json_file("certificate.json", j);
      summary["certificate"] = j;
      checks.push_back({"lemma1_floor", *cert.spectrum.symmetric_lambda_min / cert.C_t, ">=", 0.9});
      checks.push_back({"closed_range_enlargement", cert.enlargement_change, "<=", 0.05});
      timings["certificate"] = elapsed(t0);
    }

    if (c.scan) {
      t0 = std::chrono::steady_clock::now();
      stage("conjugate scan");
      const GalerkinSpace space(StreamBasis(traj.grid, c.max_k, c.max_l));
      const auto pts = conjugate_scan(traj, c.scan_t_max > 0.0 ? c.scan_t_max : c.horizon, space);
      std::string csv = "t,sigma_min_over_t,multiplicity,flagged\n";
      int flagged = 0;
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& p : pts) {
        csv += format_real(p.t) + ',' + format_real(p.sigma_min_over_t) + ',' + std::to_string(p.multiplicity) + ',' +
               (p.flagged ? "1" : "0") + '\n';
        flagged += p.flagged;
        lo = std::min(lo, p.sigma_min_over_t);
        hi = std::max(hi, p.sigma_min_over_t);
      }
      out.text("scan.csv", csv);
      summary["scan"] = {{"points", pts.size()}, {"flagged", flagged}, {"min_sigma_over_t", lo}, {"max_sigma_over_t", hi}};
      checks.push_back({"no_conjugate_points", static_cast<double>(flagged), "<=", 0.0});
      if (c.initial == InitialData::Identity) {
        checks.push_back({"scan_identity_low", lo, ">=", 0.999});
        checks.push_back({"scan_identity_high", hi, "<=", 1.001});
      }
      timings["scan"] = elapsed(t0);
    }

    if (!c.inequalities.empty()) {
      t0 = std::chrono::steady_clock::now();
      std::string csv = kLedgerHeader;
      json tags = json::array();
      for (HarnessTag tag : c.inequalities) {
        stage(("harness " + to_string(tag)).c_str());
        HarnessContext hc;
        hc.trajectory = &traj;
        hc.t = c.t;
        hc.m = c.harness_m;
        hc.n = c.harness_n;
        hc.s = c.s;
        hc.eps = c.eps;
        hc.quadrature_nodes = c.quadrature_nodes;
        hc.seed = c.seed;
        hc.calibration_samples = c.calibration_samples;
        const HarnessLedger led = inequality_harness(tag, hc, c.samples_for(tag));
        csv += ledger_csv(led);
        tags.push_back({{"tag", to_string(tag)}, {"m", led.m}, {"n", led.n}, {"s", led.s},
                        {"calibrated", led.calibrated}, {"calibrated_max", led.calibrated_max},
                        {"constant", led.constant}, {"verified", led.verified()}, {"passed", led.passed()},
                        {"min_slack", led.min_slack()}});
        checks.push_back({"harness_" + to_string(tag), static_cast<double>(led.verified() - led.passed()), "<=", 0.0});
      }
      out.text("ledger.csv", csv);
      out.json_file("harness.json", {{"tags", tags}});
      summary["harness"] = tags;
      timings["harness"] = elapsed(t0);
    }
    manifest["status"] = "ok";
  } catch (const NumericalError& e) {
    manifest["status"] = "numerical_error";
    manifest["diagnostics"] = e.what();
    result.exit_code = kExitNumerical;
  }

  json cj = json::array();
  for (const Check& ch : checks) {
    cj.push_back(check_json(ch));
    result.checks_failed += !holds(ch.value, ch.relation, ch.threshold);
  }
  summary["checks"] = cj;
  out.json_file("summary.json", summary);
  manifest["timings_seconds"] = timings;
  manifest["files"] = out.files();
  write_text(result.directory / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

int run_command(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  try {
    c = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitSchema;
  }
  try {
    const RunResult r = run_experiment(c, err);
    out << r.directory.string() << "\n";
    if (r.exit_code == kExitNumerical) err << "numerical failure; see " << (r.directory / "manifest.json").string() << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << "\n";
  }
  return kExitSchema;
}

namespace {

json load_manifest(const fs::path& dir) {
  const fs::path p = dir / "manifest.json";
  if (!fs::exists(p)) throw ConfigError(p.string(), "no manifest");
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    throw ConfigError(p.string(), std::string("malformed manifest: ") + e.what());
  }
}

// JSON has no inf/nan; they are written as null.
double num(const json& j) { return j.is_number() ? j.get<double>() : NAN; }

std::string fmt(const json& j, int prec = 4) {
  const double v = num(j);
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

}  // namespace

int report_command(const fs::path& dir, std::ostream& out, std::ostream& err) {
  json m, s;
  try {
    m = load_manifest(dir);
    s = json::parse(read_text(dir / "summary.json"));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSchema;
  }
  out << "run " << m["config"]["name"].get<std::string>() << " (" << m["config"]["initial"]["kind"].get<std::string>()
      << ", status " << m.value("status", "?") << ")\n";
  if (m.contains("diagnostics")) out << "diagnostics: " << m["diagnostics"].get<std::string>() << "\n";
  if (s.contains("constants")) {
    const json& k = s["constants"];
    out << "constants: K_eta=" << fmt(k["K_eta_inf"]) << " C_t=" << fmt(k["C_t"]) << " eps=" << fmt(k["eps"])
        << " K_eps=" << fmt(k["K_eps"]) << " Q_eps=" << fmt(k["Q_eps"]) << " B=(";
    for (std::size_t i = 0; i < k["B"].size(); ++i) out << (i ? ", " : "") << fmt(k["B"][i]);
    out << ")\n";
  }
  if (s.contains("operators"))
    for (const auto& [name, r] : s["operators"].items())
      out << "operator " << name << ": sigma_min=" << fmt(r["sigma_min"]) << " sigma_max=" << fmt(r["sigma_max"])
          << " tail=" << fmt(r["tail_ratio"]) << "  (spectra/" << name << ".csv)\n";
  if (s.contains("certificate")) {
    const json& c = s["certificate"];
    out << "certificate: lambda_min=" << fmt(c["spectrum"]["symmetric_lambda_min"]) << " C_t=" << fmt(c["C_t"])
        << " enlargement change=" << fmt(c["enlargement_change"]) << "\n";
  }
  if (s.contains("scan")) {
    const json& c = s["scan"];
    if (c["flagged"].get<int>() == 0)
      out << "no conjugate points, sigma_min/t = " << fmt(c["min_sigma_over_t"], 4) << " (scan.csv)\n";
    else
      out << c["flagged"].get<int>() << " candidate conjugate times flagged (scan.csv)\n";
  }
  if (s.contains("harness"))
    for (const json& h : s["harness"])
      out << "inequality " << h["tag"].get<std::string>() << ": " << h["passed"].get<int>() << "/"
          << h["verified"].get<int>() << " pass, C=" << fmt(h["constant"]) << ", min slack " << fmt(h["min_slack"])
          << "\n";
  int failed = 0;
  for (const json& c : s["checks"]) {
    const bool pass = c["pass"].get<bool>();
    failed += !pass;
    out << (pass ? "PASS " : "FAIL ") << c["name"].get<std::string>() << " (" << fmt(c["value"]) << " "
        << c["relation"].get<std::string>() << " " << fmt(c["threshold"]) << ")\n";
  }
  out << failed << " of " << s["checks"].size() << " checks failed\n";
  return kExitOk;
}

int verify_command(const fs::path& dir, std::ostream& out, std::ostream& err) {
  json m;
  try {
    m = load_manifest(dir);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSchema;
  }
  int problems = 0;
  for (const auto& [rel, entry] : m["files"].items()) {
    const fs::path p = dir / rel;
    if (!fs::exists(p)) {
      out << "MISSING " << rel << "\n";
      ++problems;
    } else if (sha256_file(p) != entry["sha256"].get<std::string>()) {
      out << "HASH MISMATCH " << rel << "\n";
      ++problems;
    }
  }
  if (problems == 0 && m["files"].contains("ledger.csv")) {
    std::istringstream in(read_text(dir / "ledger.csv"));
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::pair<int, int>> counts;  // verified, passed
    int row = 1;
    while (std::getline(in, line)) {
      ++row;
      std::vector<std::string> f;
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
      if (f.size() != 12) {
        out << "MALFORMED ledger row " << row << "\n";
        ++problems;
        continue;
      }
      const double lhs = std::stod(f[6]), main = std::stod(f[7]), lower = std::stod(f[8]), C = std::stod(f[9]);
      const bool pass = ledger_holds(f[5] == "le" ? Sense::AtMost : Sense::AtLeast, lhs, main, lower, C);
      if (pass != (f[11] == "1")) {
        out << "ASSERTION MISMATCH ledger row " << row << "\n";
        ++problems;
      }
      if (f[1] == "verify") {
        ++counts[f[0]].first;
        counts[f[0]].second += pass;
      }
    }
    const json h = json::parse(read_text(dir / "harness.json"));
    for (const json& t : h["tags"]) {
      const auto c = counts[t["tag"].get<std::string>()];
      if (c.first != t["verified"].get<int>() || c.second != t["passed"].get<int>()) {
        out << "COUNT MISMATCH " << t["tag"].get<std::string>() << "\n";
        ++problems;
      }
    }
  }
  if (problems == 0 && m["files"].contains("summary.json")) {
    const json s = json::parse(read_text(dir / "summary.json"));
    for (const json& c : s["checks"])
      if (holds(num(c["value"]), c["relation"], num(c["threshold"])) != c["pass"].get<bool>()) {
        out << "CHECK MISMATCH " << c["name"].get<std::string>() << "\n";
        ++problems;
      }
  }
  out << (problems == 0 ? "verified " : "FAILED ") << m["files"].size() << " artifacts, " << problems << " problems\n";
  return problems == 0 ? kExitOk : kExitNumerical;
}

}  // namespace chanlab
