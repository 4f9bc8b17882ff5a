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

/* C interface to the bdris-meta simulator. All objects are opaque handles
 * owned by the caller and released with the matching *_free function.
 * Functions return BDRIS_OK or an error status; bdris_last_error() gives
 * the message of the most recent failure on the calling thread. */

#ifndef BDRIS_BDRIS_H
#define BDRIS_BDRIS_H

#include <stddef.h>
#include <stdint.h>

#if defined(BDRIS_BUILDING_LIBRARY)
#define BDRIS_API __attribute__((visibility("default")))
#else
#define BDRIS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bdris_status {
  BDRIS_OK = 0,
  BDRIS_ERR_INVALID_ARGUMENT = 1,
  BDRIS_ERR_DIMENSION = 2,
  BDRIS_ERR_DISCONNECTED = 3,
  BDRIS_ERR_DIVERGED = 4,
  BDRIS_ERR_DEGENERATE_PROJECTION = 5,
  BDRIS_ERR_ORACLE_TOO_LARGE = 6,
  BDRIS_ERR_PARSE = 7,
  BDRIS_ERR_IO = 8,
  BDRIS_ERR_INTERNAL = 9
} bdris_status;

typedef enum bdris_axis { BDRIS_AXIS_NONE = 0, BDRIS_AXIS_M = 1, BDRIS_AXIS_N = 2 } bdris_axis;

typedef struct bdris_config bdris_config;
typedef struct bdris_results bdris_results;

/* One result row. `scheme` and `status` point into the owning results
 * object and stay valid until it is freed. */
typedef struct bdris_row {
  const char* scheme;
  uint64_t seed;
  int n_antennas;
  int m_elements;
  int groups;
  double best_sum_rate;
  double r1;
  double r2;
  double initial_sum_rate;
  double norm_deviation;
  double unitarity_deviation;
  double symmetry_deviation;
  double power_slack1;
  double power_slack2;
  double wall_time_seconds;
  int epochs_run;
  const char* status;
} bdris_row;

BDRIS_API const char* bdris_version(void);
BDRIS_API const char* bdris_last_error(void);
BDRIS_API const char* bdris_status_string(bdris_status status);

BDRIS_API bdris_status bdris_config_default(bdris_config** out);
BDRIS_API bdris_status bdris_config_parse(const char* text, bdris_config** out);
BDRIS_API bdris_status bdris_config_load(const char* path, bdris_config** out);
/* Overrides one key with the config-file syntax; checked when the config
 * is run. */
BDRIS_API bdris_status bdris_config_set(bdris_config* config, const char* key, const char* value);
BDRIS_API bdris_status bdris_config_validate(const bdris_config* config);
/* Serialized config; release with bdris_string_free. */
BDRIS_API bdris_status bdris_config_to_string(const bdris_config* config, char** out);
BDRIS_API void bdris_config_free(bdris_config* config);
BDRIS_API void bdris_string_free(char* text);

/* Every scheme x seed of the config, or of each swept value when `axis` is
 * not BDRIS_AXIS_NONE. max_workers <= 0 uses BDRIS_MAX_WORKERS or the core
 * count. */
BDRIS_API bdris_status bdris_sweep(const bdris_config* config, bdris_axis axis, const int* values, size_t n_values,
                                   int max_workers, bdris_results** out);
BDRIS_API bdris_status bdris_run(const bdris_config* config, int max_workers, bdris_results** out);

/* Grid oracle on the config's scenario for one seed. */
BDRIS_API bdris_status bdris_oracle(const bdris_config* config, uint64_t seed, double* sum_rate, long* evaluations);

BDRIS_API bdris_status bdris_results_count(const bdris_results* results, size_t* count);
BDRIS_API bdris_status bdris_results_row(const bdris_results* results, size_t index, bdris_row* row);
/* Per-epoch best objective of a learned run; `values` may be NULL to query
 * the length. */
BDRIS_API bdris_status bdris_results_history(const bdris_results* results, size_t index, double* values,
                                             size_t capacity, size_t* length);
BDRIS_API bdris_status bdris_results_write(const bdris_results* results, const char* directory);
BDRIS_API void bdris_results_free(bdris_results* results);

#ifdef __cplusplus
}
#endif

#endif /* BDRIS_BDRIS_H */
