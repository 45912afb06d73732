#include "chanlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>

#include "chanlab/error.hpp"
#include "chanlab/io.hpp"

namespace chanlab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& key, const std::string& v) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto c = v.find(',', pos);
    std::string item = trim(std::string_view(v).substr(pos, c == std::string::npos ? std::string::npos : c - pos));
    if (item.empty() && !(out.empty() && c == std::string::npos)) throw ConfigError(key, "empty list item");
    if (!item.empty()) out.push_back(std::move(item));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& v, int lo) {
  const int x = parse_number<int>(key, v);
  if (x < lo) throw ConfigError(key, "must be >= " + std::to_string(lo));
  return x;
}

double parse_positive(const std::string& key, const std::string& v) {
  const double x = parse_number<double>(key, v);
  if (!(x > 0.0)) throw ConfigError(key, "must be positive");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& v)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](auto& c, auto& k, auto& v) {
         if (v.empty() || v.find_first_of("/\\") != std::string::npos) throw ConfigError(k, "invalid name");
         c.name = v;
       }},
      {"grid.nx", [](auto& c, auto& k, auto& v) { c.nx = parse_int(k, v, 4); }},
      {"grid.ny", [](auto& c, auto& k, auto& v) { c.ny = parse_int(k, v, 9); }},
      {"grid.height", [](auto& c, auto& k, auto& v) { c.height = parse_positive(k, v); }},
      {"initial", [](auto& c, auto& k, auto& v) {
         if (v == "identity") c.initial = InitialData::Identity;
         else if (v == "shear") c.initial = InitialData::Shear;
         else if (v == "random") c.initial = InitialData::Random;
         else if (v == "file") c.initial = InitialData::File;
         else throw ConfigError(k, "expected identity, shear, random or file");
       }},
      {"initial.max_k", [](auto& c, auto& k, auto& v) { c.initial_max_k = parse_int(k, v, 0); }},
      {"initial.max_l", [](auto& c, auto& k, auto& v) { c.initial_max_l = parse_int(k, v, 1); }},
      {"initial.path", [](auto& c, auto& k, auto& v) {
         if (v.empty()) throw ConfigError(k, "empty path");
         c.initial_path = v;
       }},
      {"initial.amplitude", [](auto& c, auto& k, auto& v) { c.amplitude = parse_number<double>(k, v); }},
      {"initial.decay", [](auto& c, auto& k, auto& v) { c.decay = parse_positive(k, v); }},
      {"trajectory", [](auto& c, auto& k, auto& v) {
         if (v == "analytic") c.source = TrajectorySource::Analytic;
         else if (v == "solver") c.source = TrajectorySource::Solver;
         else throw ConfigError(k, "expected analytic or solver");
       }},
      {"time.horizon", [](auto& c, auto& k, auto& v) { c.horizon = parse_positive(k, v); }},
      {"time.dt", [](auto& c, auto& k, auto& v) { c.dt = parse_positive(k, v); }},
      {"time.intervals", [](auto& c, auto& k, auto& v) { c.intervals = parse_int(k, v, 1); }},
      {"time.record_every", [](auto& c, auto& k, auto& v) { c.record_every = parse_int(k, v, 1); }},
      {"operators", [](auto& c, auto& k, auto& v) {
         c.operators.clear();
         for (const auto& item : split_list(k, v)) {
           try {
             c.operators.push_back(operator_from_string(item));
           } catch (const ConfigError& e) {
             throw ConfigError(k, e.what());
           }
         }
       }},
      {"operators.t", [](auto& c, auto& k, auto& v) { c.t = parse_positive(k, v); }},
      {"operators.nodes", [](auto& c, auto& k, auto& v) { c.quadrature_nodes = parse_int(k, v, 2); }},
      {"basis.max_k", [](auto& c, auto& k, auto& v) { c.max_k = parse_int(k, v, 0); }},
      {"basis.max_l", [](auto& c, auto& k, auto& v) { c.max_l = parse_int(k, v, 1); }},
      {"certificate", [](auto& c, auto& k, auto& v) { c.certificate = parse_bool(k, v); }},
      {"scan", [](auto& c, auto& k, auto& v) { c.scan = parse_bool(k, v); }},
      {"scan.t_max", [](auto& c, auto& k, auto& v) { c.scan_t_max = parse_positive(k, v); }},
      {"inequalities", [](auto& c, auto& k, auto& v) {
         c.inequalities.clear();
         for (const auto& item : split_list(k, v)) {
           try {
             c.inequalities.push_back(harness_tag_from_string(item));
           } catch (const ConfigError&) {
             throw ConfigError(k, "unknown inequality tag '" + item + "'");
           }
         }
       }},
      {"harness.samples", [](auto& c, auto& k, auto& v) { c.samples = parse_int(k, v, 1); }},
      {"harness.calibration", [](auto& c, auto& k, auto& v) { c.calibration_samples = parse_int(k, v, 1); }},
      {"harness.m", [](auto& c, auto& k, auto& v) { c.harness_m = parse_int(k, v, 0); }},
      {"harness.n", [](auto& c, auto& k, auto& v) { c.harness_n = parse_int(k, v, 0); }},
      {"sobolev.s", [](auto& c, auto& k, auto& v) { c.s = parse_int(k, v, 1); }},
      {"sobolev.eps", [](auto& c, auto& k, auto& v) { c.eps = v == "auto" ? 0.0 : parse_positive(k, v); }},
      {"output", [](auto& c, auto& k, auto& v) {
         if (v.empty()) throw ConfigError(k, "empty output directory");
         c.output = v;
       }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
  };
  return table;
}

}  // namespace

int ExperimentConfig::samples_for(HarnessTag tag) const {
  const auto it = samples_per_tag.find(tag);
  return it == samples_per_tag.end() ? samples : it->second;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "empty key");
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    if (key.rfind("harness.samples.", 0) == 0) {
      HarnessTag tag;
      try {
        tag = harness_tag_from_string(key.substr(16));
      } catch (const ConfigError&) {
        throw ConfigError(key, "unknown inequality tag");
      }
      c.samples_per_tag[tag] = parse_int(key, value, 1);
      continue;
    }
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    it->second(c, key, value);
  }
  for (const auto& [tag, n] : c.samples_per_tag) {
    (void)n;
    if (std::find(c.inequalities.begin(), c.inequalities.end(), tag) == c.inequalities.end())
      throw ConfigError("harness.samples." + to_string(tag), "tag is not listed in inequalities");
  }
  try {
    (void)make_grid(c.nx, c.ny, c.height);
  } catch (const PreconditionError& e) {
    throw ConfigError("grid.nx", e.what());
  }
  if (c.t > c.horizon + 1e-12) throw ConfigError("operators.t", "exceeds time.horizon");
  if (c.scan_t_max > c.horizon + 1e-12) throw ConfigError("scan.t_max", "exceeds time.horizon");
  if (c.s > 5) throw ConfigError("sobolev.s", "must be <= 5");
  const bool general = c.initial == InitialData::Random || c.initial == InitialData::File;
  if (general && c.source == TrajectorySource::Analytic)
    throw ConfigError("trajectory", "analytic trajectories exist only for identity and shear initial data");
  if (c.initial == InitialData::File && c.initial_path.empty()) throw ConfigError("initial.path", "required for file initial data");
  if (c.initial != InitialData::File && !c.initial_path.empty()) throw ConfigError("initial.path", "only used with initial = file");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const ConfigError&) {
    throw ConfigError("", "cannot read config file " + path.string());
  }
  ExperimentConfig c = parse_config(text);
  if (!c.initial_path.empty() && c.initial_path.is_relative()) c.initial_path = path.parent_path() / c.initial_path;
  return c;
}

std::string to_string(InitialData v) {
  switch (v) {
    case InitialData::Identity: return "identity";
    case InitialData::Shear: return "shear";
    case InitialData::Random: return "random";
    case InitialData::File: return "file";
  }
  return "?";
}
std::string to_string(TrajectorySource v) { return v == TrajectorySource::Analytic ? "analytic" : "solver"; }

}  // namespace chanlab
