// src/pipeline-config.cc

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

#include "asc/pipeline-config.h"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "asc/binary-io.h"
#include "asc/common.h"

namespace asc {

namespace {

[[noreturn]] void BadValue(const std::string &key, const std::string &value) {
  Fail(Stage::kConfig, ErrorKind::kInvalidArgument, "bad value '", value,
       "' for config key '", key, "'");
}

double ToDouble(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception &) {
    BadValue(key, v);
  }
  if (used != v.size() || !std::isfinite(d)) BadValue(key, v);
  return d;
}

long long ToInt(const std::string &key, const std::string &v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) BadValue(key, v);
  return out;
}

uint64_t ToU64(const std::string &key, const std::string &v) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) BadValue(key, v);
  return out;
}

bool ToBool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  BadValue(key, v);
}

std::string Num(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

struct Key {
  const char *name;
  const char *doc;
  std::function<std::string(const PipelineConfig &)> get;
  std::function<void(PipelineConfig &, const std::string &)> set;
};

#define ASC_DOUBLE_KEY(name, field, doc)                                      \
  Key {                                                                       \
    name, doc, [](const PipelineConfig &c) { return Num(c.field); },          \
        [](PipelineConfig &c, const std::string &v) {                         \
          c.field = ToDouble(name, v);                                        \
        }                                                                     \
  }
#define ASC_INT_KEY(name, field, doc)                                         \
  Key {                                                                       \
    name, doc,                                                                \
        [](const PipelineConfig &c) { return std::to_string(c.field); },      \
        [](PipelineConfig &c, const std::string &v) {                         \
          c.field = static_cast<decltype(c.field)>(ToInt(name, v));           \
        }                                                                     \
  }
#define ASC_BOOL_KEY(name, field, doc)                                        \
  Key {                                                                       \
    name, doc,                                                                \
        [](const PipelineConfig &c) {                                         \
          return std::string(c.field ? "true" : "false");                     \
        },                                                                    \
        [](PipelineConfig &c, const std::string &v) {                         \
          c.field = ToBool(name, v);                                          \
        }                                                                     \
  }

const std::vector<Key> &Keys() {
  static const std::vector<Key> keys = {
      ASC_INT_KEY("sample_rate", features.sample_rate,
                  "analysis sample rate in Hz; audio is resampled to it"),
      ASC_DOUBLE_KEY("frame_len_ms", features.frame.frame_len_ms,
                     "analysis frame length"),
      ASC_DOUBLE_KEY("frame_overlap", features.frame.overlap_fraction,
                     "overlap between successive frames, in [0, 1)"),
      Key{"window", "hann | hamming | rect",
          [](const PipelineConfig &c) {
            switch (c.features.frame.window) {
              case WindowType::kHann: return std::string("hann");
              case WindowType::kHamming: return std::string("hamming");
              case WindowType::kRect: return std::string("rect");
            }
            return std::string("hann");
          },
          [](PipelineConfig &c, const std::string &v) {
            if (v == "hann") c.features.frame.window = WindowType::kHann;
            else if (v == "hamming") c.features.frame.window = WindowType::kHamming;
            else if (v == "rect") c.features.frame.window = WindowType::kRect;
            else BadValue("window", v);
          }},
      ASC_INT_KEY("n_mels", features.n_mels, "mel filter bank size"),
      ASC_INT_KEY("n_ceps", features.n_ceps, "cepstra kept, including c0"),
      ASC_DOUBLE_KEY("fmin_hz", features.fmin_hz, "lowest mel vertex"),
      ASC_DOUBLE_KEY("fmax_hz", features.fmax_hz,
                     "highest mel vertex; 0 means Nyquist"),
      ASC_BOOL_KEY("use_sdc", features.use_sdc, "append shifted delta cepstra"),
      ASC_INT_KEY("sdc_m", features.sdc.spread, "SDC delta spread (frames)"),
      ASC_INT_KEY("sdc_k", features.sdc.context, "SDC blocks on each side"),
      ASC_INT_KEY("sdc_n", features.sdc.num_coeffs,
                  "leading cepstra differenced by SDC"),
      ASC_INT_KEY("sdc_p", features.sdc.shift, "SDC block shift (frames)"),
      ASC_BOOL_KEY("noise_floor", use_noise_floor,
                   "derive features from the tracked noise floor"),
      ASC_INT_KEY("nf_n_init", noise_floor.n_init,
                  "frames averaged to initialize the noise floor"),
      ASC_DOUBLE_KEY("spp_xi_h1_db", noise_floor.spp.xi_h1_db,
                     "fixed a priori SNR under speech presence (dB)"),
      ASC_DOUBLE_KEY("spp_prior_h1", noise_floor.spp.prior_h1,
                     "prior speech presence probability"),
      ASC_DOUBLE_KEY("spp_smooth", noise_floor.spp.spp_smooth,
                     "smoothing of the stuck detector"),
      ASC_DOUBLE_KEY("spp_clamp", noise_floor.spp.spp_clamp,
                     "presence probability cap for stuck bins"),
      ASC_DOUBLE_KEY("psd_smooth", noise_floor.spp.psd_smooth,
                     "recursive smoothing of the noise PSD"),
      ASC_DOUBLE_KEY("psd_floor", noise_floor.spp.psd_floor,
                     "lower bound of the noise PSD"),
      ASC_INT_KEY("ubm_components", ubm_components, "UBM mixture size"),
      ASC_INT_KEY("ubm_iters", ubm_iters, "UBM EM iterations"),
      ASC_DOUBLE_KEY("ubm_var_floor", ubm_var_floor,
                     "variance floor relative to the global variance"),
      ASC_INT_KEY("ubm_max_frames", ubm_max_frames,
                  "frames used for UBM training (evenly strided); 0 = all"),
      ASC_INT_KEY("tv_rank", tv_rank, "iVector dimension"),
      ASC_INT_KEY("tv_iters", tv_iters, "EM iterations after PCA init"),
      ASC_DOUBLE_KEY("tv_count_floor", tv_count_floor,
                     "count floor in PCA residual normalization"),
      Key{"tv_degenerate", "error | fallback: rank-deficient PCA handling",
          [](const PipelineConfig &c) {
            return std::string(c.tv_degenerate == DegeneratePolicy::kError
                                   ? "error"
                                   : "fallback");
          },
          [](PipelineConfig &c, const std::string &v) {
            if (v == "error") c.tv_degenerate = DegeneratePolicy::kError;
            else if (v == "fallback")
              c.tv_degenerate = DegeneratePolicy::kRandomFallback;
            else BadValue("tv_degenerate", v);
          }},
      ASC_DOUBLE_KEY("backend_alpha", backend_alpha,
                     "weight of the shared covariance, in [0, 1]"),
      Key{"backend_mode", "class | shared",
          [](const PipelineConfig &c) {
            return std::string(c.backend_mode == ScoringMode::kShared ? "shared"
                                                                      : "class");
          },
          [](PipelineConfig &c, const std::string &v) {
            if (v == "class") c.backend_mode = ScoringMode::kClassDependent;
            else if (v == "shared") c.backend_mode = ScoringMode::kShared;
            else BadValue("backend_mode", v);
          }},
      Key{"mct_sbr", "training conditions, e.g. nospeech,-5",
          [](const PipelineConfig &c) { return FormatSbrList(c.mct_conditions); },
          [](PipelineConfig &c, const std::string &v) {
            c.mct_conditions = ParseSbrList(v);
          }},
      Key{"seed", "root random seed",
          [](const PipelineConfig &c) { return std::to_string(c.seed); },
          [](PipelineConfig &c, const std::string &v) { c.seed = ToU64("seed", v); }},
      ASC_INT_KEY("threads", num_threads, "worker threads"),
  };
  return keys;
}

#undef ASC_DOUBLE_KEY
#undef ASC_INT_KEY
#undef ASC_BOOL_KEY

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

uint64_t DeriveSeed(uint64_t root, const std::string &stream) {
  // splitmix64 finalizer over the root mixed with the stream name.
  uint64_t z = root ^ Fnv1a64(stream);
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

uint64_t PipelineConfig::UbmSeed() const { return DeriveSeed(seed, "ubm"); }
uint64_t PipelineConfig::TvSeed() const { return DeriveSeed(seed, "tv"); }
uint64_t PipelineConfig::MctSeed() const { return DeriveSeed(seed, "mct"); }

UbmTrainOptions PipelineConfig::UbmOptions() const {
  UbmTrainOptions o;
  o.num_components = ubm_components;
  o.num_iters = ubm_iters;
  o.seed = UbmSeed();
  o.var_floor_scale = ubm_var_floor;
  o.num_threads = num_threads;
  return o;
}

TvTrainOptions PipelineConfig::TvOptions() const {
  TvTrainOptions o;
  o.rank = tv_rank;
  o.num_iters = tv_iters;
  o.seed = TvSeed();
  o.count_floor = tv_count_floor;
  o.degenerate = tv_degenerate;
  o.num_threads = num_threads;
  return o;
}

void PipelineConfig::Set(const std::string &key, const std::string &value) {
  for (const auto &k : Keys()) {
    if (key == k.name) {
      k.set(*this, value);
      return;
    }
  }
  Fail(Stage::kConfig, ErrorKind::kInvalidArgument, "unknown config key '",
       key, "'");
}

void PipelineConfig::Check() const {
  auto bad = [](const char *what) {
    Fail(Stage::kConfig, ErrorKind::kInvalidArgument, "invalid config: ", what);
  };
  if (features.sample_rate <= 0) bad("sample_rate");
  if (features.n_mels < 1 || features.n_ceps < 1 ||
      features.n_ceps > features.n_mels)
    bad("n_mels / n_ceps");
  if (features.use_sdc &&
      (features.sdc.spread < 1 || features.sdc.context < 1 ||
       features.sdc.shift < 1 || features.sdc.num_coeffs < 1 ||
       features.sdc.num_coeffs > features.n_ceps))
    bad("sdc_*");
  if (noise_floor.n_init < 1) bad("nf_n_init");
  noise_floor.spp.Check();
  if (ubm_components < 1 || ubm_iters < 0) bad("ubm_*");
  if (tv_rank < 1 || tv_iters < 0) bad("tv_*");
  if (!(backend_alpha >= 0.0 && backend_alpha <= 1.0)) bad("backend_alpha");
  if (mct_conditions.empty()) bad("mct_sbr must list at least one condition");
  if (num_threads < 1) bad("threads");
}

PipelineConfig ParseConfig(const std::string &text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      Fail(Stage::kConfig, ErrorKind::kInvalidArgument, "config line ",
           line_no, ": expected 'key = value'");
    cfg.Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  cfg.Check();
  return cfg;
}

std::string SerializeConfig(const PipelineConfig &cfg) {
  std::string out;
  for (const auto &k : Keys()) {
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += '\n';
  }
  return out;
}

PipelineConfig ReadConfig(const std::string &path) {
  return ParseConfig(ReadFileBytes(path, Stage::kConfig));
}

std::string ConfigReference() {
  const PipelineConfig defaults;
  std::string out;
  for (const auto &k : Keys()) {
    out += "# ";
    out += k.doc;
    out += '\n';
    out += k.name;
    out += " = ";
    out += k.get(defaults);
    out += '\n';
  }
  return out;
}

}  // namespace asc
