// include/asc/synthetic.h

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

#ifndef ASC_SYNTHETIC_H_
#define ASC_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "asc/audio-io.h"
#include "asc/manifest.h"

namespace asc {

// Four colored-noise "scenes": band (resonance near 1 kHz), hiss
// (high-passed), hum (low-passed) and pink. Each clip draws its own cutoff,
// tilt and level and carries a slow amplitude modulation, so clips of one
// class are similar but not identical.
std::vector<std::string> SyntheticSceneLabels();
AudioBuffer SynthesizeScene(const std::string &label, double seconds,
                            int sample_rate, uint64_t seed);

// Voiced speech surrogate: a harmonic source with drifting f0, shaped by
// three formant resonances that move every syllable, syllable-rate
// envelope and pauses between phrases.
struct Voice {
  double f0_hz = 120.0;
  double formant_scale = 1.0;
};
Voice MakeVoice(uint64_t seed);
AudioBuffer SynthesizeSpeech(const Voice &voice, double seconds,
                             int sample_rate, uint64_t seed);

struct SyntheticCorpusOptions {
  int train_per_class = 30;
  int test_per_class = 20;
  double clip_seconds = 10.0;
  int speakers_per_split = 6;
  int clips_per_speaker = 4;
  double speech_seconds = 6.0;
  int sample_rate = 16000;
  uint64_t seed = 1;
};

struct SyntheticCorpus {
  CorpusManifest train;
  CorpusManifest test;
  CorpusManifest speech_train;  // speakers disjoint from speech_test
  CorpusManifest speech_test;
};

// Writes WAVs plus train.jsonl, test.jsonl, speech-train.jsonl and
// speech-test.jsonl into `dir`. Manifest files hold paths relative to `dir`;
// the returned manifests hold full paths.
SyntheticCorpus WriteSyntheticCorpus(const std::string &dir,
                                     const SyntheticCorpusOptions &opts);

}  // namespace asc

#endif  // ASC_SYNTHETIC_H_
