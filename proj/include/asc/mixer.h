// include/asc/mixer.h

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

#ifndef ASC_MIXER_H_
#define ASC_MIXER_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "asc/audio-io.h"
#include "asc/manifest.h"

namespace asc {

enum class LevelMethod { kRms, kActiveSpeech };

struct LevelMeasurement {
  double level_db = 0.0;  // dB re full scale
  LevelMethod method = LevelMethod::kRms;
};

// Threshold-based active level: 10 ms frames of a 16 ms moving-average energy
// envelope are active when within margin_db of the loudest frame; the level
// is the RMS over the samples of active frames.
struct ActiveLevelConfig {
  double frame_ms = 10.0;
  double smooth_ms = 16.0;
  double margin_db = 40.0;
};

LevelMeasurement RmsLevel(const AudioBuffer &buf);
LevelMeasurement ActiveSpeechLevel(const AudioBuffer &buf,
                                   const ActiveLevelConfig &cfg = {});

struct MixSpec {
  std::string background_id;
  std::string speech_id;
  double target_sbr_db = 0.0;
  double speech_gain = 1.0;    // applied to the placed speech
  double headroom_gain = 1.0;  // joint attenuation, 1 when no clipping risk
  std::size_t speech_offset = 0;
  uint64_t rng_seed = 0;
};

struct MixResult {
  AudioBuffer audio;
  MixSpec spec;
};

// Speech laid out over `length` samples starting at `offset`: looped when
// shorter than `length`, truncated when longer.
AudioBuffer PlaceSpeech(const AudioBuffer &speech, std::size_t length,
                        std::size_t offset);

// The start offset mix_at_sbr draws for a given seed.
std::size_t DrawSpeechOffset(std::size_t speech_len, std::size_t length,
                             uint64_t seed);

// background + g * speech with g chosen so that active speech level minus
// background RMS equals target_sbr_db. If the sum would exceed full scale
// both parts are attenuated by the same factor.
MixResult MixAtSbr(const AudioBuffer &background, const AudioBuffer &speech,
                   double target_sbr_db, uint64_t rng_seed);

// Loads both recordings (mono, `sample_rate`) and renders the mix.
MixResult RenderMix(const MixRecipe &recipe, int sample_rate);

// One output entry per (background, condition) in that order. The no-speech
// condition passes the background entry through unchanged; numeric
// conditions get a seeded speech clip from `speech_pool` whose speaker is
// not in `excluded_speakers`.
CorpusManifest BuildMulticonditionCorpus(
    const CorpusManifest &backgrounds, const std::vector<SbrCondition> &conditions,
    const CorpusManifest &speech_pool, uint64_t seed,
    const std::set<std::string> &excluded_speakers = {});

// Path a mixed entry is written to: <dir>/<stem>.<tag>.wav next to the
// background.
std::string MixedPath(const std::string &background, const std::string &tag);

// Renders every mixed entry to its path and records the applied gains.
CorpusManifest MaterializeCorpus(const CorpusManifest &manifest,
                                 int sample_rate);

}  // namespace asc

#endif  // ASC_MIXER_H_
