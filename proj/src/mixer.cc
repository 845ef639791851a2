// src/mixer.cc

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

#include "asc/mixer.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "asc/common.h"

namespace asc {

namespace {

// Peak the jointly attenuated mix is scaled to when it would clip.
constexpr double kHeadroomPeak = 0.99;

void RequireMono(const AudioBuffer &buf, const char *what) {
  if (buf.channel_count != 1)
    Fail(Stage::kMixer, ErrorKind::kInvalidArgument, what, " must be mono");
  if (buf.samples.empty())
    Fail(Stage::kMixer, ErrorKind::kTooShort, what, " is empty");
}

}  // namespace

LevelMeasurement RmsLevel(const AudioBuffer &buf) {
  if (buf.samples.empty())
    Fail(Stage::kMixer, ErrorKind::kTooShort, "cannot measure empty signal");
  double energy = 0.0;
  for (double s : buf.samples) energy += s * s;
  if (energy == 0.0)
    Fail(Stage::kMixer, ErrorKind::kSilentSignal,
         "RMS level undefined for an all-zero signal");
  return {10.0 * std::log10(energy / buf.samples.size()), LevelMethod::kRms};
}

LevelMeasurement ActiveSpeechLevel(const AudioBuffer &buf,
                                   const ActiveLevelConfig &cfg) {
  if (buf.samples.empty())
    Fail(Stage::kMixer, ErrorKind::kTooShort, "cannot measure empty signal");
  const std::size_t n = buf.samples.size();
  const std::size_t frame = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(cfg.frame_ms * buf.sample_rate / 1000.0)));
  const std::size_t win = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(cfg.smooth_ms * buf.sample_rate / 1000.0)));

  // Energy envelope: trailing moving average over `win` samples, averaged
  // per frame. A one-pole smoother hangs over for ~150 ms before falling
  // 40 dB, which inflates the active duration of short segments.
  const std::size_t num_frames = (n + frame - 1) / frame;
  std::vector<double> frame_env(num_frames, 0.0);
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    cum[i + 1] = cum[i] + buf.samples[i] * buf.samples[i];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i + 1 >= win ? i + 1 - win : 0;
    frame_env[i / frame] += (cum[i + 1] - cum[lo]) / static_cast<double>(i + 1 - lo);
  }
  double peak = 0.0;
  for (std::size_t f = 0; f < num_frames; ++f) {
    const std::size_t len = std::min(frame, n - f * frame);
    frame_env[f] /= len;
    peak = std::max(peak, frame_env[f]);
  }
  if (peak == 0.0)
    Fail(Stage::kMixer, ErrorKind::kNoActivity, "no active frames (silence)");

  const double threshold = peak * std::pow(10.0, -cfg.margin_db / 10.0);
  double energy = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < num_frames; ++f) {
    if (frame_env[f] < threshold) continue;
    const std::size_t end = std::min(n, (f + 1) * frame);
    for (std::size_t i = f * frame; i < end; ++i)
      energy += buf.samples[i] * buf.samples[i];
    count += end - f * frame;
  }
  if (count == 0 || energy == 0.0)
    Fail(Stage::kMixer, ErrorKind::kNoActivity, "no active frames");
  return {10.0 * std::log10(energy / count), LevelMethod::kActiveSpeech};
}

AudioBuffer PlaceSpeech(const AudioBuffer &speech, std::size_t length,
                        std::size_t offset) {
  RequireMono(speech, "speech");
  AudioBuffer out;
  out.sample_rate = speech.sample_rate;
  out.samples.resize(length);
  const std::size_t n = speech.samples.size();
  for (std::size_t i = 0; i < length; ++i)
    out.samples[i] = speech.samples[(offset + i) % n];
  return out;
}

std::size_t DrawSpeechOffset(std::size_t speech_len, std::size_t length,
                             uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t hi = speech_len > length ? speech_len - length : speech_len - 1;
  return std::uniform_int_distribution<std::size_t>(0, hi)(rng);
}

MixResult MixAtSbr(const AudioBuffer &background, const AudioBuffer &speech,
                   double target_sbr_db, uint64_t rng_seed) {
  RequireMono(background, "background");
  RequireMono(speech, "speech");
  if (background.sample_rate != speech.sample_rate)
    Fail(Stage::kMixer, ErrorKind::kInvalidArgument,
         "sample rate mismatch: background ", background.sample_rate,
         " Hz, speech ", speech.sample_rate, " Hz");
  if (!std::isfinite(target_sbr_db))
    Fail(Stage::kMixer, ErrorKind::kInvalidArgument, "SBR must be finite");

  const std::size_t len = background.samples.size();
  MixResult result;
  MixSpec &spec = result.spec;
  spec.target_sbr_db = target_sbr_db;
  spec.rng_seed = rng_seed;
  spec.speech_offset = DrawSpeechOffset(speech.samples.size(), len, rng_seed);
  const AudioBuffer placed = PlaceSpeech(speech, len, spec.speech_offset);

  const double bg_db = RmsLevel(background).level_db;
  const double sp_db = ActiveSpeechLevel(placed).level_db;
  spec.speech_gain = std::pow(10.0, (target_sbr_db + bg_db - sp_db) / 20.0);

  AudioBuffer &mix = result.audio;
  mix.sample_rate = background.sample_rate;
  mix.samples.resize(len);
  double peak = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    mix.samples[i] = background.samples[i] + spec.speech_gain * placed.samples[i];
    peak = std::max(peak, std::abs(mix.samples[i]));
  }
  if (peak > 1.0) {
    spec.headroom_gain = kHeadroomPeak / peak;
    for (double &s : mix.samples) s *= spec.headroom_gain;
  }
  return result;
}

MixResult RenderMix(const MixRecipe &recipe, int sample_rate) {
  const AudioBuffer bg = ToMono(ReadWav(recipe.background), sample_rate);
  const AudioBuffer sp = ToMono(ReadWav(recipe.speech), sample_rate);
  MixResult r = MixAtSbr(bg, sp, recipe.sbr_db, recipe.seed);
  r.spec.background_id = recipe.background;
  r.spec.speech_id = recipe.speech;
  return r;
}

std::string MixedPath(const std::string &background, const std::string &tag) {
  std::filesystem::path p(background);
  return (p.parent_path() / (p.stem().string() + "." + tag + ".wav")).string();
}

CorpusManifest BuildMulticonditionCorpus(
    const CorpusManifest &backgrounds, const std::vector<SbrCondition> &conditions,
    const CorpusManifest &speech_pool, uint64_t seed,
    const std::set<std::string> &excluded_speakers) {
  std::vector<const CorpusEntry *> eligible;
  for (const auto &e : speech_pool.entries)
    if (!excluded_speakers.count(e.speaker)) eligible.push_back(&e);
  const bool needs_speech =
      std::any_of(conditions.begin(), conditions.end(),
                  [](const SbrCondition &c) { return c.has_value(); });
  if (needs_speech && eligible.empty())
    Fail(Stage::kMixer, ErrorKind::kInvalidArgument,
         "speech pool is empty (after speaker exclusion) but SBR conditions "
         "were requested");

  std::mt19937_64 rng(seed);
  CorpusManifest out;
  for (const auto &bg : backgrounds.entries) {
    for (const auto &cond : conditions) {
      if (!cond) {
        out.entries.push_back(bg);
        continue;
      }
      const std::size_t pick = std::uniform_int_distribution<std::size_t>(
          0, eligible.size() - 1)(rng);
      const CorpusEntry &sp = *eligible[pick];
      CorpusEntry e;
      e.condition = ConditionTag(cond);
      e.path = MixedPath(bg.path, e.condition);
      e.label = bg.label;
      e.speaker = sp.speaker;
      e.fold = bg.fold;
      MixRecipe r;
      r.background = bg.path;
      r.speech = sp.path;
      r.sbr_db = *cond;
      r.seed = rng();
      e.mix = std::move(r);
      out.entries.push_back(std::move(e));
    }
  }
  return out;
}

CorpusManifest MaterializeCorpus(const CorpusManifest &manifest,
                                 int sample_rate) {
  CorpusManifest out = manifest;
  for (auto &e : out.entries) {
    if (!e.mix) continue;
    MixResult r = RenderMix(*e.mix, sample_rate);
    WriteWav(e.path, r.audio);
    e.mix->speech_gain = r.spec.speech_gain;
    e.mix->headroom_gain = r.spec.headroom_gain;
  }
  return out;
}

}  // namespace asc
