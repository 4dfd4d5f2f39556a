// Copyright 2026 The optforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// optforge: axiom suites, feature certificates, reconstruction and circuit
// files from the command line.
//
//   optforge check --backend quantum --dims 2,3
//   optforge features --backend quantum --dims 2
//   optforge reconstruct --scramble 3 --seed 7
//   optforge run circuits/teleport.opt
//
// Exit codes: 0 all good, 1 unexpected verdict or failed certificate,
// 2 configuration, parse or type error.

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "optforge/optforge.hpp"

namespace {

using optforge::Json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint64_t seed = 1;
  double tol = optforge::kProbabilityTolerance;
  std::string backend = "quantum";
  std::vector<int> dims = {2};
  std::vector<std::string> axioms;
  int trials = 200;
  int samples = 50;
  std::string out;
  std::string format = "json";
  bool timing = false;
  std::string seed_source = "default";
};

// Flag values as parsed; unset means "not given on the command line".
struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> backend;
  std::optional<std::string> dims;
  std::optional<std::string> axioms;
  std::optional<int> trials;
  std::optional<int> samples;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::string config_file;
  bool timing = false;

  std::optional<int> scramble;
  std::string fixture;
  std::string save_presentation;
  std::string circuit_file;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError("invalid value '" + text + "' for " + key);
  return v;
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(parse_number<int>("dims", item));
  if (out.empty()) throw ConfigError("dims must list at least one dimension");
  return out;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "tol") {
    cfg.tol = parse_number<double>(key, value);
  } else if (key == "backend") {
    cfg.backend = value;
  } else if (key == "dims") {
    cfg.dims = parse_dims(value);
  } else if (key == "axioms") {
    cfg.axioms = split_list(value);
  } else if (key == "trials") {
    cfg.trials = parse_number<int>(key, value);
  } else if (key == "samples") {
    cfg.samples = parse_number<int>(key, value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "format") {
    cfg.format = value;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    apply(cfg, key, trim(line.substr(eq + 1)));
    if (key == "seed") cfg.seed_source = "config";
  }
}

/// defaults < OPT_FORGE_SEED < config file < flags.
RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (const char* env = std::getenv("OPT_FORGE_SEED"); env && *env) {
    cfg.seed = parse_number<std::uint64_t>("OPT_FORGE_SEED", env);
    cfg.seed_source = "env";
  }
  if (!f.config_file.empty()) load_config_file(cfg, f.config_file);
  if (f.seed) {
    cfg.seed = *f.seed;
    cfg.seed_source = "flag";
  }
  if (f.tol) cfg.tol = *f.tol;
  if (f.backend) cfg.backend = *f.backend;
  if (f.dims) cfg.dims = parse_dims(*f.dims);
  if (f.axioms) cfg.axioms = split_list(*f.axioms);
  if (f.trials) cfg.trials = *f.trials;
  if (f.samples) cfg.samples = *f.samples;
  if (f.out) cfg.out = *f.out;
  if (f.format) cfg.format = *f.format;
  cfg.timing = f.timing;

  if (!(cfg.tol > 0)) throw ConfigError("tol must be positive");
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
  if (cfg.format != "json" && cfg.format != "markdown") {
    throw ConfigError("format must be json or markdown, not '" + cfg.format + "'");
  }
  return cfg;
}

const optforge::TheoryBackend& backend_or_throw(const RunConfig& cfg) {
  const optforge::TheoryBackend* b = optforge::find_backend(cfg.backend);
  if (!b) throw ConfigError("unknown backend '" + cfg.backend + "' (expected classical, quantum or realqt)");
  for (int d : cfg.dims) {
    try {
      b->dims(optforge::SystemRef::atomic(b->id(), d));
    } catch (const optforge::Error& e) {
      throw ConfigError(e.what());
    }
  }
  return *b;
}

Json config_json(const std::string& command, const RunConfig& cfg, const Flags& f) {
  Json c;
  if (command != "run" && command != "reconstruct") {
    c["backend"] = cfg.backend;
    c["dims"] = cfg.dims;
  }
  if (command == "check") {
    c["axioms"] = cfg.axioms;
    c["trials"] = cfg.trials;
  }
  if (command == "features") c["samples"] = cfg.samples;
  if (command == "reconstruct") {
    if (f.scramble) c["scramble"] = *f.scramble;
    if (!f.fixture.empty()) c["fixture"] = f.fixture;
  }
  if (command == "run") c["file"] = f.circuit_file;
  c["tol"] = cfg.tol;
  c["format"] = cfg.format;
  c["seed_source"] = cfg.seed_source;
  return c;
}

Json versions() {
  Json v;
  v["optforge"] = OPTFORGE_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  v["cli11"] = CLI11_VERSION;
  return v;
}

// Commands ---------------------------------------------------------------------------

struct Outcome {
  Json results;
  Json summary;
  bool ok = true;
};

Outcome cmd_check(const RunConfig& cfg) {
  const optforge::TheoryBackend& b = backend_or_throw(cfg);
  std::vector<std::string> ids;
  try {
    for (const auto& a : cfg.axioms) ids.push_back(optforge::axiom_id(a));
  } catch (const optforge::Error& e) {
    throw ConfigError(e.what());
  }
  const auto reports = optforge::run_suite(b, cfg.dims, ids, cfg.trials, cfg.seed);
  Outcome o;
  o.results = Json::array();
  int pass = 0, fail = 0, unexpected = 0;
  for (const auto& r : reports) {
    Json j = r.to_json();
    const optforge::Verdict want = optforge::expected_verdict(r.backend, r.axiom);
    j["expected"] = optforge::to_string(want);
    j["as_expected"] = r.verdict == want;
    if (r.verdict == optforge::Verdict::kPass) ++pass;
    if (r.verdict == optforge::Verdict::kFail) ++fail;
    if (r.verdict != want) ++unexpected;
    o.results.push_back(std::move(j));
  }
  o.ok = unexpected == 0;
  o.summary = {{"checks", reports.size()}, {"pass", pass}, {"fail", fail}, {"unexpected", unexpected}, {"ok", o.ok}};
  return o;
}

Outcome cmd_features(const RunConfig& cfg) {
  const optforge::TheoryBackend& b = backend_or_throw(cfg);
  if (!dynamic_cast<const optforge::HilbertBackend*>(&b)) {
    throw ConfigError("features needs a Hilbert-space backend (quantum or realqt), not " + b.id());
  }
  Outcome o;
  o.results = Json::array();
  int passed = 0, unexpected = 0, total = 0;
  for (int d : cfg.dims) {
    const auto certs = optforge::feature_certificates(b, d, cfg.samples,
                                                      optforge::mix_seed(cfg.seed, static_cast<std::uint64_t>(d), 0),
                                                      cfg.tol);
    for (const auto& c : certs) {
      ++total;
      if (c.passed) ++passed;
      if (c.passed != c.expected) ++unexpected;
      o.results.push_back(c.to_json());
    }
  }
  o.ok = unexpected == 0;
  o.summary = {{"certificates", total}, {"passed", passed}, {"unexpected", unexpected}, {"ok", o.ok}};
  return o;
}

Outcome cmd_reconstruct(const RunConfig& cfg, const Flags& f) {
  if (f.scramble.has_value() == !f.fixture.empty()) {
    throw ConfigError("reconstruct needs exactly one of --scramble D or --fixture FILE");
  }
  optforge::AbstractPresentation p;
  try {
    if (f.scramble) {
      p = optforge::scramble_quantum(*f.scramble, cfg.seed);
    } else {
      std::ifstream in(f.fixture);
      if (!in) throw ConfigError("cannot open fixture '" + f.fixture + "'");
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("fixture '" + f.fixture + "' is not valid JSON: " + e.what());
      }
      p = optforge::AbstractPresentation::from_json(j);
    }
  } catch (const optforge::Error& e) {
    throw ConfigError(e.what());
  }
  if (!f.save_presentation.empty()) {
    std::ofstream out(f.save_presentation);
    if (!out) throw ConfigError("cannot write '" + f.save_presentation + "'");
    out << p.to_json().dump(1) << "\n";
  }
  const optforge::Reconstruction rec = optforge::reconstruct_density_rep(p, cfg.seed);
  Outcome o;
  o.results = rec.certificate.to_json();
  o.ok = rec.certificate.passed;
  o.summary = {{"certificates", 1}, {"passed", o.ok ? 1 : 0}, {"ok", o.ok}};
  return o;
}

Outcome cmd_run(const Flags& f) {
  std::ifstream in(f.circuit_file);
  if (!in) throw ConfigError("cannot open '" + f.circuit_file + "'");
  std::stringstream text;
  text << in.rdbuf();
  optforge::dsl::Distribution dist;
  try {
    dist = optforge::dsl::run(text.str());
  } catch (const optforge::dsl::DslError& e) {
    throw ConfigError(f.circuit_file + ":" + e.what());
  } catch (const optforge::Error& e) {
    throw ConfigError(f.circuit_file + ": " + e.what());
  }
  Outcome o;
  o.results["distribution"] = dist.to_json();
  Json slots = Json::array();
  for (const auto& s : dist.slots) slots.push_back({{"test", s.test}, {"position", optforge::dsl::to_string(s.pos)}});
  o.results["slots"] = slots;
  o.summary = {{"outcomes", dist.entries.size()}, {"total_probability", dist.total()}, {"ok", true}};
  return o;
}

// Rendering --------------------------------------------------------------------------

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string markdown(const Json& report) {
  std::ostringstream md;
  md << "# optforge " << report["command"].get<std::string>() << "\n\n";
  md << "| key | value |\n|---|---|\n";
  md << "| seed | " << report["seed"].dump() << " |\n";
  for (const auto& [k, v] : report["config"].items()) md << "| " << k << " | " << cell(v) << " |\n";
  for (const auto& [k, v] : report["versions"].items()) md << "| " << k << " version | " << cell(v) << " |\n";
  md << "\n## Results\n\n";
  const Json& r = report["results"];
  const std::string cmd = report["command"].get<std::string>();
  if (cmd == "check") {
    md << "| axiom | name | systems | trials | verdict | expected |\n|---|---|---|---|---|---|\n";
    for (const auto& x : r) {
      std::string systems;
      for (const auto& s : x["systems"]) systems += (systems.empty() ? "" : ", ") + s.get<std::string>();
      md << "| " << cell(x["axiom"]) << " | " << cell(x["name"]) << " | " << systems << " | " << x["trials"].dump()
         << " | " << cell(x["verdict"]) << " | " << cell(x["expected"]) << " |\n";
    }
  } else if (cmd == "features") {
    md << "| certificate | system | passed | expected |\n|---|---|---|---|\n";
    for (const auto& x : r) {
      md << "| " << cell(x["name"]) << " | " << cell(x["system"]) << " | " << x["passed"].dump() << " | "
         << x["expected"].dump() << " |\n";
    }
  } else if (cmd == "run") {
    md << "| outcome | probability |\n|---|---|\n";
    for (const auto& [k, v] : r["distribution"].items()) md << "| " << k << " | " << v.dump() << " |\n";
  } else {
    md << "| metric | value |\n|---|---|\n";
    for (const auto& [k, v] : r.items()) md << "| " << k << " | " << cell(v) << " |\n";
  }
  md << "\n## Summary\n\n| key | value |\n|---|---|\n";
  for (const auto& [k, v] : report["summary"].items()) md << "| " << k << " | " << cell(v) << " |\n";
  md << "\n## Report\n\n```json\n" << report.dump(2) << "\n```\n";
  return md.str();
}

int emit(const std::string& command, const RunConfig& cfg, const Flags& f, const Outcome& o, double seconds) {
  Json report;
  report["schema"] = "report_v1";
  report["command"] = command;
  report["config"] = config_json(command, cfg, f);
  report["seed"] = cfg.seed;
  report["versions"] = versions();
  report["results"] = o.results;
  report["summary"] = o.summary;
  if (cfg.timing) report["wall_clock"] = {{"seconds", seconds}};
  const std::string text = cfg.format == "markdown" ? markdown(report) : report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out);
    if (!out) throw ConfigError("cannot write '" + cfg.out + "'");
    out << text;
  }
  return o.ok ? 0 : 1;
}

void add_common(CLI::App* sub, Flags& f, bool backend_flags) {
  sub->add_option("--seed", f.seed, "Random seed (default: OPT_FORGE_SEED or 1)");
  sub->add_option("--tol", f.tol, "Numerical tolerance");
  sub->add_option("--out", f.out, "Write the report here instead of stdout");
  sub->add_option("--format", f.format, "json or markdown");
  sub->add_option("--config", f.config_file, "key = value configuration file");
  sub->add_flag("--timing", f.timing, "Include wall-clock time in the report");
  if (backend_flags) {
    sub->add_option("--backend", f.backend, "classical, quantum or realqt");
    sub->add_option("--dims", f.dims, "Comma-separated atomic dimensions");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operational probabilistic theories: axioms, features, reconstruction, circuits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", OPTFORGE_VERSION);
  Flags f;

  CLI::App* check = app.add_subcommand("check", "Run the axiom suite on a backend");
  add_common(check, f, true);
  check->add_option("--axioms", f.axioms, "Comma-separated axiom ids or names (default: all)");
  check->add_option("--trials", f.trials, "Randomized trials per check");

  CLI::App* features = app.add_subcommand("features", "Emit the feature certificates");
  add_common(features, f, true);
  features->add_option("--samples", f.samples, "Random samples per certificate");

  CLI::App* recon = app.add_subcommand("reconstruct", "Recover a density-matrix representation");
  add_common(recon, f, false);
  recon->add_option("--scramble", f.scramble, "Scramble quantum theory of this dimension");
  recon->add_option("--fixture", f.fixture, "Presentation JSON (schema presentation_v1)");
  recon->add_option("--save-presentation", f.save_presentation, "Write the presentation used");

  CLI::App* run = app.add_subcommand("run", "Evaluate a circuit file");
  add_common(run, f, false);
  run->add_option("file", f.circuit_file, "Circuit file (.opt)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = resolve(f);
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    std::string command;
    if (*check) {
      command = "check";
      o = cmd_check(cfg);
    } else if (*features) {
      command = "features";
      o = cmd_features(cfg);
    } else if (*recon) {
      command = "reconstruct";
      o = cmd_reconstruct(cfg, f);
    } else {
      command = "run";
      o = cmd_run(f);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return emit(command, cfg, f, o, seconds);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
