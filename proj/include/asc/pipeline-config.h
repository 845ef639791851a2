// include/asc/pipeline-config.h

// Copyright 2026  The asc Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ASC_PIPELINE_CONFIG_H_
#define ASC_PIPELINE_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "asc/backend.h"
#include "asc/features.h"
#include "asc/gmm.h"
#include "asc/ivector.h"
#include "asc/manifest.h"
#include "asc/noise-floor.h"

namespace asc {

// Every hyperparameter of the system. Defaults are the operating point of
// the reference system: 40 ms / 50 % frames, 40 mel bands, 21 cepstra,
// SDC 2-2-11-3, 256 UBM components, rank 150, alpha 0.7.
struct PipelineConfig {
  FeatureConfig features;
  bool use_noise_floor = false;
  NoiseFloorConfig noise_floor;

  int ubm_components = 256;
  int ubm_iters = 25;
  double ubm_var_floor = 1e-3;
  std::size_t ubm_max_frames = 0;  // 0: train on every frame

  int tv_rank = 150;
  int tv_iters = 5;
  double tv_count_floor = 1e-2;
  DegeneratePolicy tv_degenerate = DegeneratePolicy::kRandomFallback;

  double backend_alpha = 0.7;
  ScoringMode backend_mode = ScoringMode::kClassDependent;

  std::vector<SbrCondition> mct_conditions{std::nullopt};

  uint64_t seed = 1;  // root of every random stream
  int num_threads = 1;

  // Per-stage seeds derived from the root seed.
  uint64_t UbmSeed() const;
  uint64_t TvSeed() const;
  uint64_t MctSeed() const;

  UbmTrainOptions UbmOptions() const;
  TvTrainOptions TvOptions() const;

  // Applies one "key = value" setting; throws on unknown keys or bad values.
  void Set(const std::string &key, const std::string &value);
  void Check() const;
};

// Plain-text format: one "key = value" per line, '#' starts a comment.
// Serialization writes every key in a fixed order, so
// parse(serialize(c)) serializes to the same bytes.
PipelineConfig ParseConfig(const std::string &text);
std::string SerializeConfig(const PipelineConfig &cfg);
PipelineConfig ReadConfig(const std::string &path);

// Documented key list with defaults, used for `asc config --defaults`.
std::string ConfigReference();

uint64_t DeriveSeed(uint64_t root, const std::string &stream);

}  // namespace asc

#endif  // ASC_PIPELINE_CONFIG_H_
