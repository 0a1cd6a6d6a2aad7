/*
 * Copyright 2026 The sptlab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
/**
 * @file cli.hpp
 * @brief The `sptlab` command-line tool: JSON config ingestion, validation
 *        with field paths, dispatch, and artifact emission.
 *
 *   sptlab <frontier|two-stock|vsm|atlas|simulate> --config PATH [--out DIR] [--seed N] [--svg]
 *   sptlab verify <suite> [--out DIR] [--seed N]
 *
 * Exit codes: 0 success, 1 parse or validation error (including an unknown
 * suite or a failed verification), 2 numerical failure during computation.
 */
#pragma once

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sptlab/csv.hpp"
#include "sptlab/error.hpp"
#include "sptlab/frontier.hpp"
#include "sptlab/rank_dynamics.hpp"
#include "sptlab/report_io.hpp"
#include "sptlab/simulator.hpp"
#include "sptlab/special_markets.hpp"
#include "sptlab/svg.hpp"
#include "sptlab/two_stock.hpp"
#include "sptlab/verify.hpp"
#include "sptlab/version.hpp"

namespace sptlab::cli {

using json = nlohmann::json;

/// Raised for configuration problems; always maps to exit code 1.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, const std::string& what) : Error(code, what) {}
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::ConfigInvalid, "SHA-256 digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON access with field paths
// ---------------------------------------------------------------------------

class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  [[nodiscard]] const std::string& path() const { return path_; }
  [[nodiscard]] const json& raw() const { return *j_; }

  [[nodiscard]] bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  [[nodiscard]] Node at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) {
      throw ConfigError(ErrorCode::ConfigInvalid, child_path(key) + ": missing required field");
    }
    return {(*j_)[key], child_path(key)};
  }

  [[nodiscard]] std::optional<Node> find(const std::string& key) const {
    if (!has(key) || (*j_)[key].is_null()) return std::nullopt;
    return Node((*j_)[key], child_path(key));
  }

  [[nodiscard]] Node index(std::size_t i) const {
    return {(*j_)[i], path_ + "[" + std::to_string(i) + "]"};
  }

  [[nodiscard]] std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  [[nodiscard]] double number() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
  }

  [[nodiscard]] std::uint64_t unsigned_integer() const {
    if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<std::int64_t>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return j_->get<std::uint64_t>();
  }

  [[nodiscard]] bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  [[nodiscard]] std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  [[nodiscard]] std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(index(i).number());
    return out;
  }

  [[nodiscard]] Vector vector() const {
    const auto v = numbers();
    return to_vector(v);
  }

  [[nodiscard]] Matrix matrix() const {
    const std::size_t rows = size();
    if (rows == 0) fail("expected a non-empty array of rows");
    const std::size_t cols = index(0).size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      const auto row = index(i).numbers();
      if (row.size() != cols) index(i).fail("row length differs from the first row");
      for (std::size_t k = 0; k < cols; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
    return m;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(ErrorCode::ConfigInvalid, (path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

 private:
  [[nodiscard]] std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* j_;
  std::string path_;
};

/// Runs `build` and reports any library precondition failure against `path`.
template <class F>
auto validated(const std::string& path, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(ErrorCode::ConfigInvalid, path + ": " + e.what());
  }
}

inline MarketParams parse_market(const Node& n) {
  std::optional<Vector> alpha, growth;
  std::optional<Matrix> sigma, loadings;
  if (auto a = n.find("alpha")) alpha = a->vector();
  if (auto g = n.find("growth")) growth = g->vector();
  if (auto s = n.find("sigma")) sigma = s->matrix();
  if (auto l = n.find("loadings")) loadings = l->matrix();
  if (!sigma && !loadings) {
    throw ConfigError(ErrorCode::ConfigInvalid, n.path() + ".sigma: missing required field (or give loadings)");
  }
  if (!alpha && !growth) {
    throw ConfigError(ErrorCode::ConfigInvalid, n.path() + ".alpha: missing required field (or give growth)");
  }
  return validated(n.path(), [&] { return MarketParams::make(alpha, growth, sigma, loadings); });
}

inline std::vector<double> parse_grid(const std::optional<Node>& n) {
  if (!n) return unit_grid(101);
  if (n->has("points")) {
    auto pts = n->at("points").numbers();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!(pts[i] >= 0.0 && pts[i] <= 1.0)) n->at("points").index(i).fail("grid points must lie in [0, 1]");
    }
    return pts;
  }
  const auto count = n->at("count").unsigned_integer();
  if (count < 2) n->at("count").fail("grid needs at least 2 points");
  return unit_grid(static_cast<std::size_t>(count));
}

inline std::vector<double> parse_numbers_or_empty(const Node& root, const std::string& key) {
  if (auto b = root.find(key)) return b->numbers();
  return {};
}

inline MarketWeights parse_weights(const Node& n) {
  return validated(n.path(), [&] { return MarketWeights(n.vector()); });
}

inline AtlasSpec parse_atlas(const Node& n) {
  if (n.has("rank_growth")) {
    const Vector g = n.at("rank_growth").vector();
    const Matrix c = n.at("rank_cov").matrix();
    std::optional<Matrix> xi;
    if (auto l = n.find("loadings")) xi = l->matrix();
    return validated(n.path(), [&] { return AtlasSpec(g, c, xi); });
  }
  const auto count = n.at("n").unsigned_integer();
  const double g = n.at("g").number();
  const double sigma = n.at("sigma").number();
  return validated(n.path(), [&] {
    return AtlasSpec::simple(SimpleAtlasSpec(static_cast<Eigen::Index>(count), g, sigma));
  });
}

/// Portfolio entries: weight arrays or one of the named portfolios.
inline std::vector<Portfolio> parse_portfolios(const std::optional<Node>& n, const MarketParams& params) {
  std::vector<Portfolio> out;
  if (!n) return out;
  for (std::size_t i = 0; i < n->size(); ++i) {
    const Node item = n->index(i);
    if (item.raw().is_string()) {
      const auto name = item.string();
      if (name == "min_volatility") {
        out.push_back(min_volatility_portfolio(params));
      } else if (name == "max_growth") {
        out.push_back(max_growth_portfolio(params));
      } else if (name == "equal") {
        out.push_back(Portfolio::equal(params.n()));
      } else {
        item.fail("unknown portfolio '" + name + "' (min_volatility, max_growth, equal or a weight array)");
      }
    } else {
      Portfolio pf = validated(item.path(), [&] { return Portfolio(item.vector()); });
      validated(item.path(), [&] { require_same_size(params, pf); return 0; });
      out.push_back(std::move(pf));
    }
  }
  return out;
}

inline std::vector<VsmStrategy> parse_strategies(const Node& n, Eigen::Index size) {
  std::vector<VsmStrategy> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node item = n.index(i);
    const std::string kind = item.raw().is_string() ? item.string() : item.at("kind").string();
    if (kind == "market") {
      out.push_back(VsmStrategy::market());
    } else if (kind == "min_volatility") {
      out.push_back(VsmStrategy::min_volatility());
    } else if (kind == "max_growth") {
      out.push_back(VsmStrategy::max_growth());
    } else if (kind == "equal") {
      out.push_back(VsmStrategy::equal());
    } else if (kind == "entropy") {
      const double c = item.raw().is_object() && item.has("c") ? item.at("c").number() : 0.0;
      if (!(c >= 0.0)) item.at("c").fail("entropy offset must be non-negative");
      out.push_back(VsmStrategy::entropy(c));
    } else if (kind == "diversity") {
      const double p = item.at("p").number();
      if (!(p >= 0.0 && p <= 1.0)) item.at("p").fail("diversity exponent must lie in [0, 1]");
      out.push_back(VsmStrategy::diversity(p));
    } else if (kind == "fixed") {
      const Node w = item.at("weights");
      Portfolio pf = validated(w.path(), [&] { return Portfolio(w.vector()); });
      if (pf.size() != size) w.fail("length does not match mu");
      out.push_back(VsmStrategy::fixed(pf));
    } else {
      item.fail("unknown strategy '" + kind + "'");
    }
  }
  return out;
}

inline SimConfig parse_sim(const Node& n, std::optional<std::uint64_t> seed_override) {
  SimConfig cfg;
  if (auto v = n.find("horizon")) cfg.horizon = v->number();
  if (auto v = n.find("dt")) cfg.dt = v->number();
  if (auto v = n.find("n_paths")) cfg.n_paths = static_cast<std::size_t>(v->unsigned_integer());
  if (auto v = n.find("seed")) cfg.seed = v->unsigned_integer();
  if (auto v = n.find("record_stride")) cfg.record_stride = static_cast<std::size_t>(v->unsigned_integer());
  if (auto v = n.find("local_time_epsilon")) cfg.local_time_epsilon = v->number();
  if (auto v = n.find("burn_in")) cfg.burn_in = v->number();
  if (auto v = n.find("workers")) cfg.workers = static_cast<std::size_t>(v->unsigned_integer());
  if (auto v = n.find("initial_weights")) cfg.initial_weights = v->vector();
  if (auto v = n.find("vsm_adaptive")) cfg.vsm_adaptive = v->boolean();
  if (seed_override) cfg.seed = *seed_override;
  validated(n.path(), [&] { cfg.validate(); return 0; });
  return cfg;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct Options {
  std::string command;
  std::string suite;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool svg = false;
};

struct Outcome {
  ArtifactSet artifacts;
  std::optional<std::uint64_t> seed;
  bool passed = true;  ///< verify only
};

/// Parses and validates, then returns a thunk that performs the computation.
inline std::function<Outcome()> plan(const std::string& command, const Node& root,
                                     std::optional<std::uint64_t> seed_override) {
  if (command == "frontier") {
    auto params = parse_market(root.at("market"));
    auto grid = parse_grid(root.find("grid"));
    auto bench = parse_numbers_or_empty(root, "benchmarks");
    return [=] { return Outcome{frontier_artifacts(params, grid, bench), std::nullopt}; };
  }
  if (command == "two-stock") {
    TwoStockInputs in{root.at("g1").number(), root.at("g2").number(), root.at("s11").number(),
                      root.at("s22").number(), 0.0};
    std::vector<double> s12;
    const Node s = root.at("s12");
    if (s.raw().is_array()) {
      s12 = s.numbers();
    } else {
      s12 = {s.number()};
    }
    double lo = -1.0, hi = 2.0;
    if (auto r = root.find("x_range")) {
      const auto v = r->numbers();
      if (v.size() != 2 || !(v[1] > v[0])) r->fail("expected [lo, hi] with hi > lo");
      lo = v[0];
      hi = v[1];
    }
    std::size_t steps = 3000;
    if (auto st = root.find("steps")) steps = static_cast<std::size_t>(st->unsigned_integer());
    if (steps < 1) root.at("steps").fail("steps must be at least 1");
    for (std::size_t i = 0; i < s12.size(); ++i) {
      in.s12 = s12[i];
      validated("s12[" + std::to_string(i) + "]", [&] { return two_stock_curve(in, lo, hi, 1); });
    }
    return [=] { return Outcome{two_stock_artifacts(in, s12, lo, hi, steps), std::nullopt}; };
  }
  if (command == "vsm") {
    auto mu = parse_weights(root.at("mu"));
    auto grid = parse_grid(root.find("grid"));
    auto bench = parse_numbers_or_empty(root, "benchmarks");
    double c = 0.0;
    if (auto v = root.find("entropy_c")) c = v->number();
    if (!(c >= 0.0)) root.at("entropy_c").fail("entropy offset must be non-negative");
    return [=] { return Outcome{vsm_artifacts(mu, grid, bench, c), std::nullopt}; };
  }
  if (command == "atlas") {
    auto spec = parse_atlas(root.at("atlas"));
    auto params = spec.market_params();
    auto ports = parse_portfolios(root.find("portfolios"), params);
    auto grid = parse_grid(root.find("grid"));
    return [=] { return Outcome{atlas_artifacts(spec, ports, grid), std::nullopt}; };
  }
  if (command == "simulate") {
    const std::string model = root.at("model").string();
    const SimConfig cfg = parse_sim(root.at("sim"), seed_override);
    if (model == "fixed") {
      auto params = parse_market(root.at("market"));
      auto ports = parse_portfolios(root.at("portfolios"), params);
      if (ports.empty()) root.at("portfolios").fail("at least one portfolio is required");
      return [=] { return Outcome{simulation_artifacts(simulate_fixed(params, ports, cfg)), cfg.seed}; };
    }
    if (model == "vsm") {
      auto mu = parse_weights(root.at("mu"));
      auto strategies = parse_strategies(root.at("strategies"), mu.n());
      if (strategies.empty()) root.at("strategies").fail("at least one strategy is required");
      if (cfg.initial_weights) root.at("sim").at("initial_weights").fail("not used by the vsm model; set mu");
      return [=] { return Outcome{simulation_artifacts(simulate_vsm(mu, strategies, cfg)), cfg.seed}; };
    }
    if (model == "atlas") {
      auto spec = parse_atlas(root.at("atlas"));
      auto named = parse_portfolios(root.at("portfolios"), spec.market_params());
      if (named.empty()) root.at("portfolios").fail("at least one portfolio is required");
      if (cfg.initial_weights && cfg.initial_weights->size() != spec.n()) {
        root.at("sim").at("initial_weights").fail("length does not match the Atlas size");
      }
      std::vector<RankPortfolio> ports;
      for (const auto& p : named) ports.emplace_back(p);
      return [=] {
        const auto run = simulate_atlas(spec, ports, cfg);
        return Outcome{simulation_artifacts(run, &spec), cfg.seed};
      };
    }
    root.at("model").fail("unknown model '" + model + "' (fixed, vsm, atlas)");
  }
  throw ConfigError(ErrorCode::ConfigInvalid, "unknown command '" + command + "'");
}

inline json read_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(ErrorCode::ConfigParse, "cannot open config file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(ErrorCode::ConfigParse, path + ": " + e.what());
  }
}

inline void write_manifest(const std::filesystem::path& dir, const std::string& command,
                           std::optional<std::uint64_t> seed, const std::string& config_hash,
                           const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "sptlab";
  m["version"] = kVersion;
  m["schema_version"] = kSchemaVersion;
  m["command"] = command;
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["config_sha256"] = config_hash;
  m["outputs"] = outputs;
  std::ofstream f(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  f << m.dump(2) << '\n';
}

inline std::vector<std::string> emit(const ArtifactSet& art, const std::filesystem::path& dir, bool svg) {
  std::vector<std::string> written;
  for (const auto& t : art.tables) {
    t.write(dir);
    written.push_back(t.name());
  }
  if (svg) {
    for (const auto& [name, chart] : art.charts) {
      write_svg(chart, dir / name);
      written.push_back(name);
    }
  }
  return written;
}

inline int exit_code_for(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) != nullptr ? 1 : 2;
}

inline int run_config_command(const Options& opt, std::ostream& out) {
  json cfg = read_config(opt.config_path);
  const Node root(cfg, "");
  if (!cfg.is_object()) root.fail("config must be a JSON object");
  const auto version = root.at("schema_version").unsigned_integer();
  if (version != static_cast<std::uint64_t>(kSchemaVersion)) {
    root.at("schema_version").fail("unsupported schema_version " + std::to_string(version));
  }
  if (auto c = root.find("command"); c && c->string() != opt.command) {
    c->fail("config is for '" + c->string() + "', not '" + opt.command + "'");
  }
  bool svg = opt.svg;
  if (auto s = root.find("emit_svg")) svg = svg || s->boolean();
  std::filesystem::path dir = "sptlab_out";
  if (auto o = root.find("output_dir")) dir = o->string();
  if (opt.out_dir) dir = *opt.out_dir;

  auto compute = plan(opt.command, root, opt.seed);

  json effective = cfg;
  if (opt.seed && effective.contains("sim")) effective["sim"]["seed"] = *opt.seed;
  const std::string hash = sha256_hex(effective.dump());

  Outcome result = compute();
  std::filesystem::create_directories(dir);
  const auto written = emit(result.artifacts, dir, svg);
  write_manifest(dir, opt.command, result.seed, hash, written);
  for (const auto& w : written) out << (dir / w).string() << '\n';
  return 0;
}

inline int run_verify(const Options& opt, std::ostream& out) {
  const auto& names = verify::suite_names();
  if (std::find(names.begin(), names.end(), opt.suite) == names.end()) {
    throw ConfigError(ErrorCode::UnknownSuite,
                      "unknown suite '" + opt.suite + "' (lemmas, frontier, vsm, atlas-asymptotics)");
  }
  const std::uint64_t seed = opt.seed.value_or(verify::kDefaultSeed);
  const auto results = verify::run_suite(opt.suite, seed);
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed();
    out << (r.passed() ? "PASS " : "FAIL ") << r.criterion << "  " << r.title << '\n';
    for (const auto& row : r.rows) {
      out << "     " << (row.pass ? "ok   " : "FAIL ") << row.check << ": " << format_double(row.measured)
          << " (tolerance " << format_double(row.tolerance) << ", stderr " << format_double(row.stderr_) << ")\n";
    }
  }
  std::filesystem::path dir = opt.out_dir.value_or("sptlab_out");
  std::filesystem::create_directories(dir);
  const auto table = verify::results_table("verify_" + opt.suite + ".csv", results);
  table.write(dir);
  json effective{{"suite", opt.suite}, {"seed", seed}};
  write_manifest(dir, "verify", seed, sha256_hex(effective.dump()), {table.name()});
  return ok ? 0 : 1;
}

inline int run(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.command == "verify") return run_verify(opt, out);
    return run_config_command(opt, out);
  } catch (const Error& e) {
    err << "sptlab: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "sptlab: " << e.what() << '\n';
    return 1;
  }
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Stochastic portfolio theory analytics", "sptlab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "master seed override");
  };
  for (const char* name : {"frontier", "two-stock", "vsm", "atlas", "simulate"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", opt.config_path, "JSON config file")->required();
    sub->add_flag("--svg", opt.svg, "also write SVG charts");
    add_common(sub);
  }
  auto* ver = app.add_subcommand("verify", "run an acceptance suite");
  ver->add_option("suite", opt.suite, "lemmas | frontier | vsm | atlas-asymptotics")->required();
  add_common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  opt.command = app.get_subcommands().front()->get_name();
  if (app.get_subcommands().front()->count("--seed") > 0) opt.seed = seed;
  return run(opt, out, err);
}

}  // namespace sptlab::cli
