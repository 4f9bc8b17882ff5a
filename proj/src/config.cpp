// SPDX-License-Identifier: Apache-2.0
//
// bdris-meta: learned optimization for BD-RIS assisted uplink RSMA
// Copyright (C) 2026 bdris-meta contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "bdris/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "bdris/error.hpp"

namespace bdris {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Thrown inside the parser and rewrapped with the line context.
struct ValueError {
  std::string message;
};

double to_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw ValueError{"expected a number, got '" + std::string(s) + "'"};
  return v;
}

long long to_integer(std::string_view s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw ValueError{"expected an integer, got '" + std::string(s) + "'"};
  return v;
}

int to_count(std::string_view s) {
  const long long v = to_integer(s);
  if (v < 0) throw ValueError{"count must be non-negative, got " + std::string(s)};
  if (v > 1'000'000'000) throw ValueError{"count too large: " + std::string(s)};
  return static_cast<int>(v);
}

bool to_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValueError{"expected true or false, got '" + std::string(s) + "'"};
}

Point3 to_point(std::string_view s) {
  const auto parts = split_list(s);
  if (parts.size() != 3) throw ValueError{"expected three coordinates"};
  return {to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
}

std::vector<int> to_counts(std::string_view s) {
  std::vector<int> out;
  for (auto p : split_list(s)) out.push_back(to_count(p));
  return out;
}

std::vector<std::uint64_t> to_seeds(std::string_view s) {
  std::vector<std::uint64_t> out;
  for (auto p : split_list(s)) {
    const auto dots = p.find("..");
    if (dots == std::string_view::npos) {
      const long long v = to_integer(p);
      if (v < 0) throw ValueError{"seeds must be non-negative"};
      out.push_back(static_cast<std::uint64_t>(v));
      continue;
    }
    const long long lo = to_integer(trim(p.substr(0, dots)));
    const long long hi = to_integer(trim(p.substr(dots + 2)));
    if (lo < 0 || hi < lo) throw ValueError{"bad seed range '" + std::string(p) + "'"};
    if (hi - lo > 1'000'000) throw ValueError{"seed range too long"};
    for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

Architecture to_architecture(std::string_view s) {
  if (s == "single") return Architecture::SingleConnected;
  if (s == "group") return Architecture::GroupConnected;
  if (s == "fully") return Architecture::FullyConnected;
  throw ValueError{"architecture must be single, group or fully"};
}

std::string_view architecture_name(Architecture a) {
  switch (a) {
    case Architecture::SingleConnected: return "single";
    case Architecture::GroupConnected: return "group";
    case Architecture::FullyConnected: return "fully";
  }
  return "group";
}

MagnitudeMode to_magnitude(std::string_view s) {
  if (s == "unit") return MagnitudeMode::UnitModulus;
  if (s == "scaled") return MagnitudeMode::ScaledModulus;
  throw ValueError{"magnitude_mode must be unit or scaled"};
}

LossMode to_mode(std::string_view s) {
  if (s == "default") return LossMode::Default;
  if (s == "strict-paper") return LossMode::StrictPaper;
  throw ValueError{"mode must be default or strict-paper"};
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"schema_version",
       [](ExperimentConfig&, std::string_view v) {
         if (to_integer(v) != kConfigSchemaVersion) throw ValueError{"unsupported schema_version " + std::string(v)};
       }},
      {"bs_pos", [](ExperimentConfig& c, std::string_view v) { c.geometry.bs_pos = to_point(v); }},
      {"ris_pos", [](ExperimentConfig& c, std::string_view v) { c.geometry.ris_pos = to_point(v); }},
      {"ue1_pos", [](ExperimentConfig& c, std::string_view v) { c.geometry.ue1_pos = to_point(v); }},
      {"ue2_pos", [](ExperimentConfig& c, std::string_view v) { c.geometry.ue2_pos = to_point(v); }},
      {"l0_db", [](ExperimentConfig& c, std::string_view v) { c.fading.l0_db = to_double(v); }},
      {"d0", [](ExperimentConfig& c, std::string_view v) { c.fading.d0 = to_double(v); }},
      {"eta_direct", [](ExperimentConfig& c, std::string_view v) { c.fading.eta_direct = to_double(v); }},
      {"eta_ris", [](ExperimentConfig& c, std::string_view v) { c.fading.eta_ris = to_double(v); }},
      {"rician_k_db", [](ExperimentConfig& c, std::string_view v) { c.fading.rician_k_db = to_double(v); }},
      {"noise_power_dbm", [](ExperimentConfig& c, std::string_view v) { c.fading.noise_power_dbm = to_double(v); }},
      {"antennas", [](ExperimentConfig& c, std::string_view v) { c.n_antennas = to_count(v); }},
      {"elements", [](ExperimentConfig& c, std::string_view v) { c.m_elements = to_count(v); }},
      {"groups", [](ExperimentConfig& c, std::string_view v) { c.groups = to_count(v); }},
      {"architecture", [](ExperimentConfig& c, std::string_view v) { c.architecture = to_architecture(v); }},
      {"group_sizes", [](ExperimentConfig& c, std::string_view v) { c.group_sizes = to_counts(v); }},
      {"magnitude_mode", [](ExperimentConfig& c, std::string_view v) { c.magnitude = to_magnitude(v); }},
      {"p_max1_dbm", [](ExperimentConfig& c, std::string_view v) { c.p_max1_dbm = to_double(v); }},
      {"p_max2_dbm", [](ExperimentConfig& c, std::string_view v) { c.p_max2_dbm = to_double(v); }},
      {"r_th1", [](ExperimentConfig& c, std::string_view v) { c.r_th1 = to_double(v); }},
      {"r_th2", [](ExperimentConfig& c, std::string_view v) { c.r_th2 = to_double(v); }},
      {"inner_iterations", [](ExperimentConfig& c, std::string_view v) { c.meta.inner_iterations = to_count(v); }},
      {"outer_iterations", [](ExperimentConfig& c, std::string_view v) { c.meta.outer_iterations = to_count(v); }},
      {"epochs", [](ExperimentConfig& c, std::string_view v) { c.meta.epochs = to_count(v); }},
      {"lr_w", [](ExperimentConfig& c, std::string_view v) { c.meta.lr_w = to_double(v); }},
      {"lr_p", [](ExperimentConfig& c, std::string_view v) { c.meta.lr_p = to_double(v); }},
      {"lr_phi", [](ExperimentConfig& c, std::string_view v) { c.meta.lr_phi = to_double(v); }},
      {"alpha", [](ExperimentConfig& c, std::string_view v) { c.meta.alpha = to_double(v); }},
      {"smn_update_period", [](ExperimentConfig& c, std::string_view v) { c.meta.smn_update_period = to_count(v); }},
      {"penalty_threshold", [](ExperimentConfig& c, std::string_view v) { c.meta.penalty.threshold = to_double(v); }},
      {"penalty_norm", [](ExperimentConfig& c, std::string_view v) { c.meta.penalty.norm = to_double(v); }},
      {"penalty_ris", [](ExperimentConfig& c, std::string_view v) { c.meta.penalty.ris = to_double(v); }},
      {"penalty_power", [](ExperimentConfig& c, std::string_view v) { c.meta.penalty.power = to_double(v); }},
      {"mode", [](ExperimentConfig& c, std::string_view v) { c.meta.mode = to_mode(v); }},
      {"hidden_units", [](ExperimentConfig& c, std::string_view v) { c.meta.hidden_units = to_count(v); }},
      {"per_group_smn", [](ExperimentConfig& c, std::string_view v) { c.meta.per_group_smn = to_bool(v); }},
      {"schemes",
       [](ExperimentConfig& c, std::string_view v) {
         c.schemes.clear();
         for (auto p : split_list(v)) {
           try {
             c.schemes.push_back(parse_scheme(p));
           } catch (const Error& e) {
             throw ValueError{e.what()};
           }
         }
       }},
      {"seeds", [](ExperimentConfig& c, std::string_view v) { c.seeds = to_seeds(v); }},
      {"output_dir", [](ExperimentConfig& c, std::string_view v) { c.output_dir = std::string(v); }},
      {"random_trials", [](ExperimentConfig& c, std::string_view v) { c.random_trials = to_count(v); }},
      {"oracle_levels", [](ExperimentConfig& c, std::string_view v) { c.oracle_levels = to_count(v); }},
  };
  return table;
}

struct Violation {
  std::string key;
  std::string message;
};

std::optional<Violation> first_violation(const ExperimentConfig& c) {
  if (c.n_antennas < 1) return Violation{"antennas", "antennas must be at least 1"};
  if (c.m_elements < 1) return Violation{"elements", "elements must be at least 1"};
  if (c.groups < 1) return Violation{"groups", "groups must be at least 1"};
  if (c.seeds.empty()) return Violation{"seeds", "seeds must not be empty"};
  if (c.schemes.empty()) return Violation{"schemes", "schemes must not be empty"};
  if (c.random_trials < 1) return Violation{"random_trials", "random_trials must be at least 1"};
  if (c.oracle_levels < 1) return Violation{"oracle_levels", "oracle_levels must be at least 1"};
  if (!c.group_sizes.empty()) {
    const int total = std::accumulate(c.group_sizes.begin(), c.group_sizes.end(), 0);
    if (total != c.m_elements) {
      return Violation{"group_sizes", "group sizes sum to " + std::to_string(total) + " but elements = " +
                                          std::to_string(c.m_elements)};
    }
    for (int s : c.group_sizes) {
      if (s < 1) return Violation{"group_sizes", "group sizes must be positive"};
    }
    if (c.architecture == Architecture::SingleConnected) {
      for (int s : c.group_sizes) {
        if (s != 1) return Violation{"group_sizes", "single-connected surfaces have groups of size 1"};
      }
    }
    if (c.architecture == Architecture::FullyConnected && c.group_sizes.size() != 1) {
      return Violation{"group_sizes", "a fully-connected surface has one group"};
    }
  }
  std::vector<int> sizes;
  try {
    sizes = c.resolved_group_sizes();
  } catch (const Error& e) {
    return Violation{"groups", e.what()};
  }
  if (!c.meta.per_group_smn) {
    for (int s : sizes) {
      if (s != sizes.front()) return Violation{"group_sizes", "unequal group sizes need per_group_smn = true"};
    }
  }
  try {
    c.geometry.validate();
  } catch (const Error& e) {
    return Violation{"bs_pos", e.what()};
  }
  try {
    c.fading.validate();
  } catch (const Error& e) {
    return Violation{"eta_direct", e.what()};
  }
  try {
    c.meta.validate();
  } catch (const Error& e) {
    return Violation{"epochs", e.what()};
  }
  return std::nullopt;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::BDRIS: return "bd-ris";
    case Scheme::DiagonalRIS: return "diagonal-ris";
    case Scheme::RandomPhases: return "random-phases";
    case Scheme::GridOracle: return "grid-oracle";
  }
  return "bd-ris";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::BDRIS, Scheme::DiagonalRIS, Scheme::RandomPhases, Scheme::GridOracle}) {
    if (scheme_name(s) == name) return s;
  }
  throw Error(ErrorCode::Parse, "unknown scheme '" + std::string(name) +
                                    "' (expected bd-ris, diagonal-ris, random-phases or grid-oracle)");
}

SystemParams ExperimentConfig::system_params() const {
  SystemParams p;
  p.noise_power = dbm_to_watts(fading.noise_power_dbm);
  p.p_max1 = dbm_to_watts(p_max1_dbm);
  p.p_max2 = dbm_to_watts(p_max2_dbm);
  p.r_th1 = r_th1;
  p.r_th2 = r_th2;
  return p;
}

std::vector<int> ExperimentConfig::resolved_group_sizes() const {
  if (!group_sizes.empty()) return group_sizes;
  return group_layout(architecture, m_elements, groups);
}

SurfaceLayout ExperimentConfig::layout() const {
  SurfaceLayout l;
  l.architecture = architecture;
  l.group_sizes = resolved_group_sizes();
  l.magnitude = magnitude;
  return l;
}

void ExperimentConfig::validate() const {
  if (auto v = first_violation(*this)) throw Error(ErrorCode::Parse, v->key + ": " + v->message);
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  ExperimentConfig config;
  std::map<std::string, int, std::less<>> key_lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::Parse, where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorCode::Parse, where + "unknown key '" + std::string(key) + "'");
    if (key_lines.count(key)) throw Error(ErrorCode::Parse, where + "duplicate key '" + std::string(key) + "'");
    key_lines.emplace(std::string(key), line_no);
    try {
      it->second(config, value);
    } catch (const ValueError& e) {
      throw Error(ErrorCode::Parse, where + std::string(key) + ": " + e.message);
    }
  }
  if (auto v = first_violation(config)) {
    const auto it = key_lines.find(v->key);
    const std::string where =
        it == key_lines.end() ? source + ": " : source + ":" + std::to_string(it->second) + ": ";
    throw Error(ErrorCode::Parse, where + v->key + ": " + v->message);
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const auto it = setters().find(trim(key));
  if (it == setters().end()) throw Error(ErrorCode::Parse, "unknown key '" + std::string(key) + "'");
  try {
    it->second(config, trim(value));
  } catch (const ValueError& e) {
    throw Error(ErrorCode::Parse, std::string(trim(key)) + ": " + e.message);
  }
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_config(const ExperimentConfig& c, const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& line : comments) out << "# " << line << '\n';
  const auto point = [](const Point3& p) {
    return format_number(p[0]) + ", " + format_number(p[1]) + ", " + format_number(p[2]);
  };
  const auto kv = [&out](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
  const auto num = [](double v) { return format_number(v); };
  const auto join = [](const auto& items, auto&& fmt) {
    std::string s;
    for (const auto& item : items) {
      if (!s.empty()) s += ", ";
      s += fmt(item);
    }
    return s;
  };
  kv("schema_version", std::to_string(kConfigSchemaVersion));
  out << "\n# geometry, meters\n";
  kv("bs_pos", point(c.geometry.bs_pos));
  kv("ris_pos", point(c.geometry.ris_pos));
  kv("ue1_pos", point(c.geometry.ue1_pos));
  kv("ue2_pos", point(c.geometry.ue2_pos));
  out << "\n# fading\n";
  kv("l0_db", num(c.fading.l0_db));
  kv("d0", num(c.fading.d0));
  kv("eta_direct", num(c.fading.eta_direct));
  kv("eta_ris", num(c.fading.eta_ris));
  kv("rician_k_db", num(c.fading.rician_k_db));
  kv("noise_power_dbm", num(c.fading.noise_power_dbm));
  out << "\n# system\n";
  kv("antennas", std::to_string(c.n_antennas));
  kv("elements", std::to_string(c.m_elements));
  kv("groups", std::to_string(c.groups));
  kv("architecture", std::string(architecture_name(c.architecture)));
  if (!c.group_sizes.empty()) kv("group_sizes", join(c.group_sizes, [](int v) { return std::to_string(v); }));
  kv("magnitude_mode", c.magnitude == MagnitudeMode::ScaledModulus ? "scaled" : "unit");
  kv("p_max1_dbm", num(c.p_max1_dbm));
  kv("p_max2_dbm", num(c.p_max2_dbm));
  kv("r_th1", num(c.r_th1));
  kv("r_th2", num(c.r_th2));
  out << "\n# meta-learner\n";
  kv("inner_iterations", std::to_string(c.meta.inner_iterations));
  kv("outer_iterations", std::to_string(c.meta.outer_iterations));
  kv("epochs", std::to_string(c.meta.epochs));
  kv("lr_w", num(c.meta.lr_w));
  kv("lr_p", num(c.meta.lr_p));
  kv("lr_phi", num(c.meta.lr_phi));
  kv("alpha", num(c.meta.alpha));
  kv("smn_update_period", std::to_string(c.meta.smn_update_period));
  kv("penalty_threshold", num(c.meta.penalty.threshold));
  kv("penalty_norm", num(c.meta.penalty.norm));
  kv("penalty_ris", num(c.meta.penalty.ris));
  kv("penalty_power", num(c.meta.penalty.power));
  kv("mode", c.meta.mode == LossMode::Default ? "default" : "strict-paper");
  kv("hidden_units", std::to_string(c.meta.hidden_units));
  kv("per_group_smn", c.meta.per_group_smn ? "true" : "false");
  out << "\n# experiment\n";
  kv("schemes", join(c.schemes, [](Scheme s) { return std::string(scheme_name(s)); }));
  kv("seeds", join(c.seeds, [](std::uint64_t s) { return std::to_string(s); }));
  kv("output_dir", c.output_dir);
  kv("random_trials", std::to_string(c.random_trials));
  kv("oracle_levels", std::to_string(c.oracle_levels));
  return out.str();
}

}  // namespace bdris
