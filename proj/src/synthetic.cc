// src/synthetic.cc

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

#include "asc/synthetic.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "asc/common.h"

namespace asc {

namespace {

constexpr double kPi = std::numbers::pi;

// RBJ cookbook biquad, direct form I.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

  static Biquad Make(const char *type, double fc, double q, int rate) {
    const double w = 2.0 * kPi * fc / rate, c = std::cos(w),
                 alpha = std::sin(w) / (2.0 * q);
    double b0, b1, b2;
    const std::string t(type);
    if (t == "lowpass") {
      b0 = (1 - c) / 2; b1 = 1 - c; b2 = (1 - c) / 2;
    } else if (t == "highpass") {
      b0 = (1 + c) / 2; b1 = -(1 + c); b2 = (1 + c) / 2;
    } else {  // bandpass, 0 dB peak
      b0 = alpha; b1 = 0; b2 = -alpha;
    }
    const double a0 = 1 + alpha;
    Biquad f;
    f.b0 = b0 / a0; f.b1 = b1 / a0; f.b2 = b2 / a0;
    f.a1 = -2 * c / a0; f.a2 = (1 - alpha) / a0;
    return f;
  }

  void Apply(std::vector<double> *x) const {
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (double &v : *x) {
      const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
      x2 = x1; x1 = v; y2 = y1; y1 = y;
      v = y;
    }
  }
};

// Paul Kellet's economy pink filter.
void Pink(std::vector<double> *x) {
  double b0 = 0, b1 = 0, b2 = 0;
  for (double &v : *x) {
    b0 = 0.99765 * b0 + v * 0.0990460;
    b1 = 0.96300 * b1 + v * 0.2965164;
    b2 = 0.57000 * b2 + v * 1.0526913;
    v = b0 + b1 + b2 + v * 0.1848;
  }
}

double Rms(const std::vector<double> &x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s / std::max<std::size_t>(x.size(), 1));
}

void ScaleTo(std::vector<double> *x, double rms) {
  const double r = Rms(*x);
  if (r > 0)
    for (double &v : *x) v *= rms / r;
}

struct Vowel {
  double f1, f2, f3;
};
constexpr Vowel kVowels[] = {
    {730, 1090, 2440}, {270, 2290, 3010}, {300, 870, 2240},
    {530, 1840, 2480}, {570, 840, 2410},  {660, 1720, 2410},
};

}  // namespace

std::vector<std::string> SyntheticSceneLabels() {
  return {"band", "hiss", "hum", "pink"};
}

AudioBuffer SynthesizeScene(const std::string &label, double seconds,
                            int sample_rate, uint64_t seed) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::vector<double> x(n);
  for (double &v : x) v = gauss(rng);

  if (label == "hum") {
    const auto f = Biquad::Make("lowpass", uni(250, 500), 0.707, sample_rate);
    f.Apply(&x);
    f.Apply(&x);
  } else if (label == "hiss") {
    const auto f = Biquad::Make("highpass", uni(2500, 4000), 0.707, sample_rate);
    f.Apply(&x);
    f.Apply(&x);
  } else if (label == "band") {
    Biquad::Make("bandpass", uni(800, 1250), uni(1.5, 3.0), sample_rate).Apply(&x);
  } else if (label == "pink") {
    Pink(&x);
    Biquad::Make("highpass", uni(40, 120), 0.707, sample_rate).Apply(&x);
  } else {
    Fail(Stage::kPipeline, ErrorKind::kInvalidArgument,
         "unknown synthetic scene '", label, "'");
  }

  // Weak broadband floor so no band is empty.
  ScaleTo(&x, 1.0);
  for (double &v : x) v += 0.02 * gauss(rng);

  const double depth = uni(0.1, 0.3), rate_hz = uni(0.1, 0.4),
               phase = uni(0, 2 * kPi);
  for (std::size_t i = 0; i < n; ++i)
    x[i] *= 1.0 + depth * std::sin(2 * kPi * rate_hz * i / sample_rate + phase);
  ScaleTo(&x, std::pow(10.0, uni(-32.0, -22.0) / 20.0));

  AudioBuffer buf;
  buf.sample_rate = sample_rate;
  buf.samples = std::move(x);
  return buf;
}

Voice MakeVoice(uint64_t seed) {
  std::mt19937_64 rng(seed);
  Voice v;
  v.f0_hz = std::uniform_real_distribution<double>(90.0, 220.0)(rng);
  v.formant_scale = std::uniform_real_distribution<double>(0.85, 1.2)(rng);
  return v;
}

AudioBuffer SynthesizeSpeech(const Voice &voice, double seconds,
                             int sample_rate, uint64_t seed) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::vector<double> x(n, 0.0);
  const double nyq = 0.45 * sample_rate;
  constexpr double kBw[3] = {90, 110, 160};
  constexpr double kGain[3] = {1.0, 0.5, 0.25};

  std::size_t pos = static_cast<std::size_t>(uni(0.05, 0.3) * sample_rate);
  double phase = 0.0;
  while (pos < n) {
    const int syllables = static_cast<int>(uni(4, 12));
    for (int s = 0; s < syllables && pos < n; ++s) {
      const auto len = static_cast<std::size_t>(uni(0.12, 0.3) * sample_rate);
      const Vowel &vw = kVowels[static_cast<std::size_t>(uni(0, 6)) % 6];
      const double formants[3] = {vw.f1 * voice.formant_scale,
                                  vw.f2 * voice.formant_scale,
                                  vw.f3 * voice.formant_scale};
      const double f0 = voice.f0_hz * uni(0.9, 1.1), glide = uni(-0.1, 0.1);
      const double level = uni(0.6, 1.0);
      for (std::size_t i = 0; i < len && pos + i < n; ++i) {
        const double tau = static_cast<double>(i) / len;
        const double f = f0 * (1.0 + glide * tau);
        phase += 2 * kPi * f / sample_rate;
        if (phase > 2 * kPi) phase -= 2 * kPi;
        double v = 0.0;
        for (int k = 1; k * f < nyq; ++k) {
          double a = 0.0;
          for (int j = 0; j < 3; ++j) {
            const double d = (k * f - formants[j]) / kBw[j];
            a += kGain[j] / (1.0 + d * d);
          }
          v += a * std::sin(k * phase);
        }
        const double env = std::sin(kPi * tau);
        x[pos + i] += level * env * env * v;
      }
      pos += len;
    }
    pos += static_cast<std::size_t>(uni(0.2, 0.8) * sample_rate);
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0)
    for (double &v : x) v *= 0.5 / peak;
  AudioBuffer buf;
  buf.sample_rate = sample_rate;
  buf.samples = std::move(x);
  return buf;
}

SyntheticCorpus WriteSyntheticCorpus(const std::string &dir,
                                     const SyntheticCorpusOptions &opts) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    Fail(Stage::kPipeline, ErrorKind::kIo, "cannot create ", dir, ": ",
         ec.message());
  const fs::path root(dir);
  std::mt19937_64 rng(opts.seed);

  SyntheticCorpus corpus;
  auto emit = [&](CorpusManifest *m, const std::string &name,
                  const AudioBuffer &audio, CorpusEntry e) {
    WriteWav((root / name).string(), audio);
    e.path = (root / name).string();
    m->entries.push_back(std::move(e));
  };

  for (const auto &label : SyntheticSceneLabels()) {
    for (int split = 0; split < 2; ++split) {
      const int count = split == 0 ? opts.train_per_class : opts.test_per_class;
      for (int i = 0; i < count; ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s-%s-%03d.wav",
                      split == 0 ? "train" : "test", label.c_str(), i);
        CorpusEntry e;
        e.label = label;
        e.condition = kNoSpeechTag;
        if (split == 0) e.fold = i % 4;
        emit(split == 0 ? &corpus.train : &corpus.test, name,
             SynthesizeScene(label, opts.clip_seconds, opts.sample_rate, rng()),
             std::move(e));
      }
    }
  }

  for (int split = 0; split < 2; ++split) {
    for (int s = 0; s < opts.speakers_per_split; ++s) {
      const Voice voice = MakeVoice(rng());
      char speaker[32];
      std::snprintf(speaker, sizeof(speaker), "%s-spk%02d",
                    split == 0 ? "train" : "test", s);
      for (int c = 0; c < opts.clips_per_speaker; ++c) {
        char name[64];
        std::snprintf(name, sizeof(name), "speech-%s-%02d.wav", speaker, c);
        CorpusEntry e;
        e.label = "speech";
        e.speaker = speaker;
        emit(split == 0 ? &corpus.speech_train : &corpus.speech_test, name,
             SynthesizeSpeech(voice, opts.speech_seconds, opts.sample_rate, rng()),
             std::move(e));
      }
    }
  }

  auto write = [&](const char *file, const CorpusManifest &m) {
    CorpusManifest rel = m;
    for (auto &e : rel.entries) e.path = fs::path(e.path).filename().string();
    WriteManifest((root / file).string(), rel);
  };
  write("train.jsonl", corpus.train);
  write("test.jsonl", corpus.test);
  write("speech-train.jsonl", corpus.speech_train);
  write("speech-test.jsonl", corpus.speech_test);
  return corpus;
}

}  // namespace asc
