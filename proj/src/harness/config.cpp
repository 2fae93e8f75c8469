// Copyright 2026 The zrplab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "zrp/harness.hpp"

namespace zrp {

ExperimentKind parse_kind(const std::string& s) {
  if (s == "hydro") return ExperimentKind::hydro;
  if (s == "hydrostatic") return ExperimentKind::hydrostatic;
  if (s == "stationarity") return ExperimentKind::stationarity;
  if (s == "spectral-scan") return ExperimentKind::spectral_scan;
  if (s == "coupling" || s == "couple") return ExperimentKind::coupling;
  if (s == "pde") return ExperimentKind::pde;
  if (s == "thermo-table") return ExperimentKind::thermo_table;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::hydro: return "hydro";
    case ExperimentKind::hydrostatic: return "hydrostatic";
    case ExperimentKind::stationarity: return "stationarity";
    case ExperimentKind::spectral_scan: return "spectral-scan";
    case ExperimentKind::coupling: return "coupling";
    case ExperimentKind::pde: return "pde";
    case ExperimentKind::thermo_table: return "thermo-table";
  }
  return "?";
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto s = boost::trim_copy(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto s = boost::trim_copy(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto s = boost::trim_copy(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  boost::split(parts, v, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F conv) {
  std::vector<T> out;
  for (const auto& p : split_list(v)) out.push_back(static_cast<T>(conv(key, p)));
  return out;
}

int to_int32(const std::string& key, const std::string& v) {
  const auto x = to_int(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(key + ": integer out of range");
  return static_cast<int>(x);
}

}  // namespace

ProfileSpec ProfileSpec::parse(const std::string& s) {
  ProfileSpec out;
  out.text = boost::trim_copy(s);
  std::vector<std::string> parts;
  boost::split(parts, out.text, boost::is_any_of(":"));
  const auto& head = parts[0];
  const auto need = [&](std::size_t n) {
    if (parts.size() != n + 1)
      throw ConfigError("initial profile '" + s + "' needs " + std::to_string(n) + " parameter(s)");
  };
  if (head == "constant") {
    need(1);
    out.kind = Kind::constant;
    out.a = to_double("initial", parts[1]);
  } else if (head == "linear" || head == "sine" || head == "cosine") {
    need(2);
    out.kind = head == "linear" ? Kind::linear : head == "sine" ? Kind::sine : Kind::cosine;
    out.a = to_double("initial", parts[1]);
    out.b = to_double("initial", parts[2]);
  } else if (head == "stationary") {
    need(0);
    out.kind = Kind::stationary;
  } else if (head == "ness") {
    need(0);
    out.kind = Kind::ness;
  } else if (head == "empty") {
    need(0);
    out.kind = Kind::empty;
  } else {
    throw ConfigError("unknown initial profile '" + s + "'");
  }
  return out;
}

std::function<double(double)> ProfileSpec::density(const ModelParams& p, const ThermoTable& thermo) const {
  const double a_ = a;
  const double b_ = b;
  switch (kind) {
    case Kind::constant: return [a_](double) { return a_; };
    case Kind::linear: return [a_, b_](double u) { return a_ + (b_ - a_) * u; };
    case Kind::sine: return [a_, b_](double u) { return a_ + b_ * std::sin(M_PI * u); };
    case Kind::cosine: return [a_, b_](double u) { return a_ + b_ * std::cos(M_PI * u); };
    case Kind::stationary: {
      const auto [slope, icpt] = stationary_flux_line(p);
      return [&thermo, slope, icpt](double u) { return thermo.mean_density(slope * u + icpt); };
    }
    case Kind::ness:
    case Kind::empty: break;
  }
  throw ConfigError("initial profile '" + text + "' has no density form");
}

FugacityProfile ProfileSpec::fugacity(const ModelParams& p, const ThermoTable& thermo) const {
  if (kind == Kind::ness) return ness_fugacity(p);
  if (kind == Kind::empty) return homogeneous_profile(p.n, 0.0);
  return density_profile(p.n, thermo, density(p, thermo), text);
}

double ExperimentConfig::bandwidth_for(int n) const {
  return bandwidth > 0.0 ? bandwidth : 2.0 * std::pow(static_cast<double>(n), -0.25);
}

void ExperimentConfig::validate() const {
  if (!params.rate) throw ConfigError("model.rate is missing");
  const bool simulation = kind == ExperimentKind::hydro || kind == ExperimentKind::hydrostatic ||
                          kind == ExperimentKind::coupling;
  if (simulation && replicas < 2) throw ConfigError("experiment.replicas must be at least 2");
  if (bandwidth != 0.0 && !(bandwidth > 0.0 && bandwidth < 1.0))
    throw ConfigError("experiment.bandwidth must lie in (0, 1)");
  const std::vector<int> sizes = n_list.empty() ? std::vector<int>{params.n} : n_list;
  if (kind != ExperimentKind::spectral_scan && kind != ExperimentKind::thermo_table && kind != ExperimentKind::pde) {
    for (int n : sizes) {
      ModelParams q = params;
      q.n = n;
      try {
        q.validate();
      } catch (const ParamError& e) {
        throw ConfigError(std::string("model: ") + e.what());
      }
    }
  }
  for (double t : checkpoints)
    if (!(t >= 0.0)) throw ConfigError("experiment.checkpoints must be non-negative");
  switch (kind) {
    case ExperimentKind::hydro: {
      if (checkpoints.empty()) throw ConfigError("hydro needs experiment.checkpoints");
      if (!initial.is_density() && initial.kind != ProfileSpec::Kind::ness)
        throw ConfigError("hydro needs a density profile or 'ness' as initial condition");
      if (initial.is_density()) {
        const ThermoTable thermo(params.rate);
        const auto gamma = initial.density(params, thermo);
        const auto [a, b] = stationary_flux_line(params);
        for (int i = 0; i <= 1000; ++i) {
          const double u = i / 1000.0;
          const double bar = thermo.mean_density(a * u + b);
          if (gamma(u) > bar + 1e-12)
            throw ConfigError("initial profile exceeds the stationary density at u = " + std::to_string(u));
        }
      }
      break;
    }
    case ExperimentKind::hydrostatic:
      if (!(averaging_time > 0.0)) throw ConfigError("experiment.averaging_time must be positive");
      if (!(burn_in >= 0.0)) throw ConfigError("experiment.burn_in must be non-negative");
      break;
    case ExperimentKind::stationarity:
      if (samples < 2) throw ConfigError("experiment.samples must be at least 2");
      break;
    case ExperimentKind::coupling:
      if (checkpoints.empty()) throw ConfigError("coupling needs experiment.checkpoints");
      if (block < 1) throw ConfigError("experiment.block must be positive");
      break;
    case ExperimentKind::spectral_scan:
      if (ells.empty() || particles.empty()) throw ConfigError("spectral-scan needs spectral.ells and spectral.js");
      break;
    case ExperimentKind::pde:
      if (cells < 2) throw ConfigError("pde.cells must be at least 2");
      if (!initial.is_density()) throw ConfigError("pde needs a density profile as initial condition");
      break;
    case ExperimentKind::thermo_table:
      if (points < 2 || !(rho_max > 0.0)) throw ConfigError("thermo.points >= 2 and thermo.rho_max > 0 required");
      break;
  }
}

namespace {

// Inline comments start at a '#' or ';' preceded by whitespace.
std::string strip_comment(const std::string& raw) {
  for (std::size_t i = 1; i < raw.size(); ++i)
    if ((raw[i] == '#' || raw[i] == ';') && (raw[i - 1] == ' ' || raw[i - 1] == '\t'))
      return boost::trim_copy(raw.substr(0, i));
  return boost::trim_copy(raw);
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  bool have_kind = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string name = section + "." + key;
      const std::string v = strip_comment(node.data());
      cfg.entries[name] = v;
      if (name == "model.N") cfg.params.n = to_int32(name, v);
      else if (name == "model.theta") cfg.params.theta = to_double(name, v);
      else if (name == "model.kappa") cfg.params.kappa = to_double(name, v);
      else if (name == "model.alpha") cfg.params.alpha = to_double(name, v);
      else if (name == "model.beta") cfg.params.beta = to_double(name, v);
      else if (name == "model.lambda") cfg.params.lambda = to_double(name, v);
      else if (name == "model.delta") cfg.params.delta = to_double(name, v);
      else if (name == "model.rate") cfg.rate_spec = v;
      else if (name == "experiment.kind") {
        cfg.kind = parse_kind(v);
        have_kind = true;
      } else if (name == "experiment.initial") cfg.initial = ProfileSpec::parse(v);
      else if (name == "experiment.N_list") cfg.n_list = parse_list<int>(name, v, to_int32);
      else if (name == "experiment.replicas") cfg.replicas = to_int32(name, v);
      else if (name == "experiment.checkpoints") cfg.checkpoints = parse_list<double>(name, v, to_double);
      else if (name == "experiment.seed") cfg.seed = to_u64(name, v);
      else if (name == "experiment.bandwidth") cfg.bandwidth = to_double(name, v);
      else if (name == "experiment.samples") cfg.samples = to_u64(name, v);
      else if (name == "experiment.kappa_list") cfg.kappa_list = parse_list<double>(name, v, to_double);
      else if (name == "experiment.burn_in") cfg.burn_in = to_double(name, v);
      else if (name == "experiment.averaging_time") cfg.averaging_time = to_double(name, v);
      else if (name == "experiment.block") cfg.block = to_int32(name, v);
      else if (name == "spectral.rates") cfg.spectral_rates = split_list(v);
      else if (name == "spectral.ells") cfg.ells = parse_list<int>(name, v, to_int32);
      else if (name == "spectral.js") cfg.particles = parse_list<int>(name, v, to_int32);
      else if (name == "pde.cells") cfg.cells = to_int32(name, v);
      else if (name == "pde.t_end") cfg.t_end = to_double(name, v);
      else if (name == "thermo.rho_max") cfg.rho_max = to_double(name, v);
      else if (name == "thermo.points") cfg.points = to_int32(name, v);
      else if (name == "output.dir") cfg.out_dir = v;
      else throw ConfigError("config: unknown key '" + name + "'");
    }
  }
  if (!have_kind) cfg.entries["experiment.kind"] = kind_name(cfg.kind);
  try {
    cfg.params.rate = share(JumpRate::parse(cfg.rate_spec));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("model.rate: ") + e.what());
  }
  if (cfg.params.n == 0 && !cfg.n_list.empty()) cfg.params.n = cfg.n_list.front();
  if (cfg.spectral_rates.empty()) cfg.spectral_rates = {cfg.rate_spec};
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto& [k, v] : cfg.entries) {
    feed(k);
    feed(v);
  }
  return h;
}

}  // namespace zrp
