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

#include "bdris/bdris.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "bdris/baselines.hpp"
#include "bdris/config.hpp"
#include "bdris/error.hpp"
#include "bdris/experiment.hpp"

struct bdris_config {
  bdris::ExperimentConfig config;
};

struct bdris_results {
  bdris::ExperimentConfig config;
  bdris::SweepAxis axis = bdris::SweepAxis::None;
  std::vector<int> values;
  std::vector<bdris::ResultRow> rows;
  std::vector<std::string> scheme_names;
};

namespace {

thread_local std::string last_error;

bdris_status to_status(bdris::ErrorCode code) {
  using bdris::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return BDRIS_ERR_INVALID_ARGUMENT;
    case ErrorCode::Dimension: return BDRIS_ERR_DIMENSION;
    case ErrorCode::Disconnected: return BDRIS_ERR_DISCONNECTED;
    case ErrorCode::Diverged: return BDRIS_ERR_DIVERGED;
    case ErrorCode::DegenerateProjection: return BDRIS_ERR_DEGENERATE_PROJECTION;
    case ErrorCode::OracleTooLarge: return BDRIS_ERR_ORACLE_TOO_LARGE;
    case ErrorCode::Parse: return BDRIS_ERR_PARSE;
    case ErrorCode::Io: return BDRIS_ERR_IO;
  }
  return BDRIS_ERR_INTERNAL;
}

bdris_status fail(bdris_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
bdris_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return BDRIS_OK;
  } catch (const bdris::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BDRIS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BDRIS_ERR_INTERNAL, e.what());
  }
}

bdris_status null_argument(const char* name) { return fail(BDRIS_ERR_INVALID_ARGUMENT, std::string(name) + " is NULL"); }

}  // namespace

extern "C" {

const char* bdris_version(void) { return BDRIS_VERSION_STRING; }

const char* bdris_last_error(void) { return last_error.c_str(); }

const char* bdris_status_string(bdris_status status) {
  switch (status) {
    case BDRIS_OK: return "ok";
    case BDRIS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BDRIS_ERR_DIMENSION: return "dimension mismatch";
    case BDRIS_ERR_DISCONNECTED: return "disconnected variable";
    case BDRIS_ERR_DIVERGED: return "diverged";
    case BDRIS_ERR_DEGENERATE_PROJECTION: return "degenerate projection";
    case BDRIS_ERR_ORACLE_TOO_LARGE: return "oracle too large";
    case BDRIS_ERR_PARSE: return "parse error";
    case BDRIS_ERR_IO: return "i/o error";
    case BDRIS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

bdris_status bdris_config_default(bdris_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new bdris_config{}; });
}

bdris_status bdris_config_parse(const char* text, bdris_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new bdris_config{bdris::parse_config(text)}; });
}

bdris_status bdris_config_load(const char* path, bdris_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new bdris_config{bdris::load_config(path)}; });
}

bdris_status bdris_config_set(bdris_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  return guarded([&] { bdris::apply_setting(config->config, key, value); });
}

bdris_status bdris_config_validate(const bdris_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { config->config.validate(); });
}

bdris_status bdris_config_to_string(const bdris_config* config, char** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    const std::string text = bdris::format_config(config->config);
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *out = buffer;
  });
}

void bdris_config_free(bdris_config* config) { delete config; }

void bdris_string_free(char* text) { delete[] text; }

bdris_status bdris_sweep(const bdris_config* config, bdris_axis axis, const int* values, size_t n_values,
                         int max_workers, bdris_results** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  if (n_values > 0 && !values) return null_argument("values");
  if (axis != BDRIS_AXIS_NONE && n_values == 0) return fail(BDRIS_ERR_INVALID_ARGUMENT, "sweep needs values");
  return guarded([&] {
    auto results = std::make_unique<bdris_results>();
    results->config = config->config;
    results->axis = axis == BDRIS_AXIS_M   ? bdris::SweepAxis::Elements
                    : axis == BDRIS_AXIS_N ? bdris::SweepAxis::Antennas
                                           : bdris::SweepAxis::None;
    if (results->axis != bdris::SweepAxis::None) results->values.assign(values, values + n_values);
    results->config.validate();
    results->rows = bdris::run_sweep(results->config, results->axis, results->values, max_workers);
    for (const auto& r : results->rows) results->scheme_names.emplace_back(bdris::scheme_name(r.scheme));
    *out = results.release();
  });
}

bdris_status bdris_run(const bdris_config* config, int max_workers, bdris_results** out) {
  return bdris_sweep(config, BDRIS_AXIS_NONE, nullptr, 0, max_workers, out);
}

bdris_status bdris_oracle(const bdris_config* config, uint64_t seed, double* sum_rate, long* evaluations) {
  if (!config) return null_argument("config");
  if (!sum_rate) return null_argument("sum_rate");
  return guarded([&] {
    const auto& c = config->config;
    c.validate();
    const auto ch = bdris::generate_channel_set(c.geometry, c.fading, c.n_antennas, c.m_elements, seed);
    const auto result = bdris::grid_oracle_tiny(ch, c.system_params(), c.oracle_levels);
    *sum_rate = result.sum_rate;
    if (evaluations) *evaluations = result.evaluations;
  });
}

bdris_status bdris_results_count(const bdris_results* results, size_t* count) {
  if (!results) return null_argument("results");
  if (!count) return null_argument("count");
  *count = results->rows.size();
  return BDRIS_OK;
}

bdris_status bdris_results_row(const bdris_results* results, size_t index, bdris_row* row) {
  if (!results) return null_argument("results");
  if (!row) return null_argument("row");
  if (index >= results->rows.size()) return fail(BDRIS_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& r = results->rows[index];
  row->scheme = results->scheme_names[index].c_str();
  row->seed = r.seed;
  row->n_antennas = r.n_antennas;
  row->m_elements = r.m_elements;
  row->groups = r.groups;
  row->best_sum_rate = r.best_sum_rate;
  row->r1 = r.r1;
  row->r2 = r.r2;
  row->initial_sum_rate = r.initial_sum_rate;
  row->norm_deviation = r.norm_deviation;
  row->unitarity_deviation = r.unitarity_deviation;
  row->symmetry_deviation = r.symmetry_deviation;
  row->power_slack1 = r.power_slack1;
  row->power_slack2 = r.power_slack2;
  row->wall_time_seconds = r.wall_time_seconds;
  row->epochs_run = r.epochs_run;
  row->status = bdris::status_name(r.status).data();
  return BDRIS_OK;
}

bdris_status bdris_results_history(const bdris_results* results, size_t index, double* values, size_t capacity,
                                   size_t* length) {
  if (!results) return null_argument("results");
  if (!length) return null_argument("length");
  if (index >= results->rows.size()) return fail(BDRIS_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& history = results->rows[index].history;
  *length = history.size();
  if (values) {
    for (size_t i = 0; i < history.size() && i < capacity; ++i) values[i] = history[i].best_objective;
  }
  return BDRIS_OK;
}

bdris_status bdris_results_write(const bdris_results* results, const char* directory) {
  if (!results) return null_argument("results");
  if (!directory) return null_argument("directory");
  return guarded([&] { bdris::emit_results(results->rows, results->config, results->axis, results->values, directory); });
}

void bdris_results_free(bdris_results* results) { delete results; }

}  // extern "C"
