// include/asc/manifest.h

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

#ifndef ASC_MANIFEST_H_
#define ASC_MANIFEST_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace asc {

// How a multi-condition entry is synthesized from a background recording
// and a speech clip.
struct MixRecipe {
  std::string background;
  std::string speech;
  double sbr_db = 0.0;
  uint64_t seed = 0;
  // Filled in once the mix has been rendered.
  std::optional<double> speech_gain;
  std::optional<double> headroom_gain;

  bool operator==(const MixRecipe &) const = default;
};

struct CorpusEntry {
  std::string path;  // unique; doubles as the recording id
  std::string label;
  std::string speaker;    // empty when not applicable
  std::string condition;  // e.g. "nospeech", "sbr-5"
  int fold = -1;          // -1: not assigned
  std::optional<MixRecipe> mix;

  bool operator==(const CorpusEntry &) const = default;
};

// JSON-lines, one object per entry:
//   {"path": "...", "label": "...", "speaker": "...", "condition": "...",
//    "fold": 0, "mix": {"background": "...", "speech": "...", "sbr_db": -5,
//                       "seed": 123, "speech_gain": 0.56, "headroom_gain": 1}}
// "speaker", "condition", "fold" and "mix" are optional.
struct CorpusManifest {
  std::vector<CorpusEntry> entries;

  // Sorted, deduplicated.
  std::vector<std::string> Labels() const;
  std::vector<std::string> Conditions() const;
  // Unique paths and non-empty labels; throws otherwise.
  void Validate() const;
  // Entries whose fold is (or, with keep == false, is not) in `folds`.
  CorpusManifest SelectFolds(const std::vector<int> &folds, bool keep) const;

  bool operator==(const CorpusManifest &) const = default;
};

std::string EncodeManifest(const CorpusManifest &manifest);
CorpusManifest ParseManifest(const std::string &text);
// Relative paths in the file are resolved against the manifest's directory.
CorpusManifest ReadManifest(const std::string &path);
void WriteManifest(const std::string &path, const CorpusManifest &manifest);

// A test or training condition: no added speech, or speech at an SBR in dB.
using SbrCondition = std::optional<double>;
inline constexpr const char *kNoSpeechTag = "nospeech";

std::string ConditionTag(const SbrCondition &c);
// Comma-separated list such as "nospeech,-5,5".
std::vector<SbrCondition> ParseSbrList(const std::string &text);
std::string FormatSbrList(const std::vector<SbrCondition> &list);

}  // namespace asc

#endif  // ASC_MANIFEST_H_
