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

#ifndef BDRIS_CONFIG_HPP
#define BDRIS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/meta_opt.hpp"
#include "bdris/sysmodel.hpp"

namespace bdris {

inline constexpr int kConfigSchemaVersion = 1;

enum class Scheme { BDRIS, DiagonalRIS, RandomPhases, GridOracle };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);

struct ExperimentConfig {
  NodeGeometry geometry;
  FadingParams fading;
  int n_antennas = 4;
  int m_elements = 8;
  int groups = 2;
  Architecture architecture = Architecture::GroupConnected;
  // Empty means an even split of m_elements into `groups`.
  std::vector<int> group_sizes;
  MagnitudeMode magnitude = MagnitudeMode::ScaledModulus;
  double p_max1_dbm = 23.0;
  double p_max2_dbm = 23.0;
  double r_th1 = 1.0;
  double r_th2 = 1.0;
  MetaConfig meta;
  std::vector<Scheme> schemes{Scheme::BDRIS, Scheme::DiagonalRIS};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string output_dir = "results";
  int random_trials = 100;
  int oracle_levels = 16;

  SystemParams system_params() const;
  SurfaceLayout layout() const;
  std::vector<int> resolved_group_sizes() const;
  // Throws Error(Parse) describing the first violated invariant.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

// Format: one `key = value` per line, `#` starts a comment, lists are
// comma separated, vectors of coordinates are `x, y, z`. Unknown keys,
// malformed values and invalid combinations raise Error(Parse) with the
// source name and line number.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies one `key = value` assignment without cross-field validation.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

// Every key written explicitly, numbers with 17 significant digits;
// `comments` become leading `#` lines.
std::string format_config(const ExperimentConfig& config, const std::vector<std::string>& comments = {});

// Shortest-exact style formatting used by every emitted file.
std::string format_number(double value);

}  // namespace bdris

#endif  // BDRIS_CONFIG_HPP
