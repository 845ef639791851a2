// src/pipeline.cc

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

#include "asc/pipeline.h"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asc/binary-io.h"
#include "asc/common.h"
#include "asc/mixer.h"
#include "asc/noise-floor.h"

namespace asc {

namespace {

// Re-raises with the recording named, keeping the original stage so the
// exit code still points at the failing stage.
template <typename Fn>
auto WithContext(const std::string &id, Fn &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    throw Error(e.stage(), e.kind(), id + ": " + e.what());
  }
}

}  // namespace

void WriteBundle(const std::string &dir, const ModelBundle &bundle) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    Fail(Stage::kPipeline, ErrorKind::kIo, "cannot create bundle directory ",
         dir, ": ", ec.message());
  const std::filesystem::path d(dir);
  WriteFileBytes((d / "config.txt").string(), SerializeConfig(bundle.config),
                 Stage::kPipeline);
  WriteGmm((d / "ubm.bin").string(), bundle.ubm);
  WriteTv((d / "tv.bin").string(), bundle.tv);
  bundle.backend.Write((d / "backend.bin").string());
}

ModelBundle ReadBundle(const std::string &dir) {
  const std::filesystem::path d(dir);
  ModelBundle b;
  b.config = ReadConfig((d / "config.txt").string());
  b.ubm = ReadGmm((d / "ubm.bin").string());
  b.tv = ReadTv((d / "tv.bin").string());
  b.backend = GaussianBackend::Read((d / "backend.bin").string());
  if (b.tv.ubm_checksum != UbmChecksum(b.ubm))
    Fail(Stage::kIvector, ErrorKind::kChecksumMismatch,
         "TV matrix in ", dir, " was not trained against its UBM");
  if (b.backend.Dim() != b.tv.Rank())
    Fail(Stage::kBackend, ErrorKind::kDimensionMismatch, "backend dim ",
         b.backend.Dim(), " vs TV rank ", b.tv.Rank());
  return b;
}

AudioBuffer LoadRecording(const CorpusEntry &entry, int sample_rate) {
  if (entry.mix) return RenderMix(*entry.mix, sample_rate).audio;
  return ToMono(ReadWav(entry.path), sample_rate);
}

std::vector<FeatureMatrix> ComputeFeatures(const CorpusManifest &manifest,
                                           const PipelineConfig &config) {
  std::vector<FeatureMatrix> out(manifest.entries.size());
  ParallelChunks(out.size(), 1, config.num_threads,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i) {
                     const CorpusEntry &e = manifest.entries[i];
                     out[i] = WithContext(e.path, [&] {
                       const AudioBuffer audio =
                           LoadRecording(e, config.features.sample_rate);
                       FeatureMatrix f =
                           ExtractFeatures(audio, config.use_noise_floor,
                                           config.features, config.noise_floor);
                       f.recording_id = e.path;
                       return f;
                     });
                   }
                 });
  return out;
}

Eigen::MatrixXd PoolFrames(const std::vector<FeatureMatrix> &feats,
                           std::size_t max_frames) {
  if (feats.empty())
    Fail(Stage::kUbm, ErrorKind::kTooShort, "no recordings to train on");
  std::size_t total = 0;
  for (const auto &f : feats) total += static_cast<std::size_t>(f.NumFrames());
  const Eigen::Index dim = feats.front().Dim();
  Eigen::MatrixXd all(static_cast<Eigen::Index>(total), dim);
  Eigen::Index row = 0;
  for (const auto &f : feats) {
    if (f.Dim() != dim)
      Fail(Stage::kUbm, ErrorKind::kDimensionMismatch,
           "feature dimensions differ across recordings");
    all.middleRows(row, f.NumFrames()) = f.rows;
    row += f.NumFrames();
  }
  if (max_frames == 0 || total <= max_frames) return all;
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(max_frames), dim);
  for (std::size_t i = 0; i < max_frames; ++i)
    sub.row(static_cast<Eigen::Index>(i)) =
        all.row(static_cast<Eigen::Index>(i * total / max_frames));
  return sub;
}

std::vector<SufficientStats> ComputeStats(const GmmModel &ubm,
                                          const std::vector<FeatureMatrix> &feats,
                                          int num_threads) {
  std::vector<SufficientStats> out(feats.size());
  ParallelChunks(feats.size(), 1, num_threads,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i)
                     out[i] = WithContext(feats[i].recording_id, [&] {
                       return AccumulateStats(ubm, feats[i].rows, 1);
                     });
                 });
  return out;
}

IvectorSet ExtractIvectors(const TvMatrix &tv, const GmmModel &ubm,
                           const CorpusManifest &manifest,
                           const std::vector<SufficientStats> &stats,
                           int num_threads) {
  if (stats.size() != manifest.entries.size())
    Fail(Stage::kIvector, ErrorKind::kDimensionMismatch, stats.size(),
         " stats for ", manifest.entries.size(), " entries");
  const IvectorExtractor extractor(tv, ubm);
  IvectorSet set;
  set.vectors.resize(stats.size());
  ParallelChunks(stats.size(), 1, num_threads,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i)
                     set.vectors[i] = WithContext(manifest.entries[i].path, [&] {
                       return extractor.Extract(stats[i]).w;
                     });
                 });
  for (const auto &e : manifest.entries) {
    set.ids.push_back(e.path);
    set.labels.push_back(e.label);
    set.conditions.push_back(ConditionOf(e));
  }
  return set;
}

CorpusManifest ExpandTraining(const PipelineConfig &config,
                              const CorpusManifest &train,
                              const CorpusManifest &speech_pool) {
  const bool clean_only =
      std::all_of(config.mct_conditions.begin(), config.mct_conditions.end(),
                  [](const SbrCondition &c) { return !c.has_value(); });
  if (clean_only) return train;
  CorpusManifest out = BuildMulticonditionCorpus(
      train, config.mct_conditions, speech_pool, config.MctSeed());
  out.Validate();
  return out;
}

ModelBundle RunTraining(const PipelineConfig &config,
                        const CorpusManifest &train,
                        const CorpusManifest &speech_pool) {
  config.Check();
  train.Validate();
  const CorpusManifest full = ExpandTraining(config, train, speech_pool);
  const std::vector<FeatureMatrix> feats = ComputeFeatures(full, config);

  ModelBundle b;
  b.config = config;
  b.ubm = TrainUbm(PoolFrames(feats, config.ubm_max_frames),
                   config.UbmOptions()).model;
  const std::vector<SufficientStats> stats =
      ComputeStats(b.ubm, feats, config.num_threads);
  b.tv = TrainTv(stats, b.ubm, config.TvOptions()).tv;
  const IvectorSet ivs =
      ExtractIvectors(b.tv, b.ubm, full, stats, config.num_threads);
  b.backend = GaussianBackend::Train(ivs.vectors, ivs.labels, config.backend_alpha);
  return b;
}

std::string ConditionOf(const CorpusEntry &entry) {
  return entry.condition.empty() ? std::string(kNoSpeechTag) : entry.condition;
}

std::vector<Prediction> Classify(const ModelBundle &bundle,
                                 const CorpusManifest &manifest) {
  manifest.Validate();
  const auto &known = bundle.backend.labels();
  for (const auto &l : manifest.Labels())
    if (!std::binary_search(known.begin(), known.end(), l))
      Fail(Stage::kPipeline, ErrorKind::kLabelMismatch, "label '", l,
           "' is not one of the model's classes");
  const int threads = bundle.config.num_threads;
  const std::vector<FeatureMatrix> feats = ComputeFeatures(manifest, bundle.config);
  const std::vector<SufficientStats> stats = ComputeStats(bundle.ubm, feats, threads);
  const IvectorSet ivs = ExtractIvectors(bundle.tv, bundle.ubm, manifest, stats, threads);

  std::vector<Prediction> out;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    Prediction p;
    p.id = ivs.ids[i];
    p.label = ivs.labels[i];
    p.condition = ivs.conditions[i];
    p.scores = bundle.backend.Score(ivs.vectors[i], bundle.config.backend_mode);
    std::size_t best = 0;
    for (std::size_t c = 1; c < known.size(); ++c)
      if (p.scores[c] > p.scores[best]) best = c;
    p.predicted = known[best];
    out.push_back(std::move(p));
  }
  return out;
}

EvalReport BuildReport(const std::vector<std::string> &labels,
                       const std::vector<Prediction> &predictions) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = i;
  auto lookup = [&](const std::string &l) {
    auto it = index.find(l);
    if (it == index.end())
      Fail(Stage::kPipeline, ErrorKind::kLabelMismatch, "unknown label '", l, "'");
    return it->second;
  };
  auto empty = [&](const std::string &cond) {
    ConditionResult r;
    r.condition = cond;
    r.confusion.assign(labels.size(), std::vector<long>(labels.size(), 0));
    return r;
  };
  auto add = [&](ConditionResult &r, std::size_t t, std::size_t p) {
    ++r.confusion[t][p];
    ++r.total;
    if (t == p) ++r.correct;
  };

  EvalReport rep;
  rep.labels = labels;
  rep.pooled = empty("all");
  std::map<std::string, ConditionResult> groups;
  for (const auto &p : predictions) {
    const std::size_t t = lookup(p.label), q = lookup(p.predicted);
    add(rep.pooled, t, q);
    const std::string cond = p.condition.empty() ? std::string(kNoSpeechTag) : p.condition;
    auto it = groups.find(cond);
    if (it == groups.end()) it = groups.emplace(cond, empty(cond)).first;
    add(it->second, t, q);
  }
  auto finish = [](ConditionResult &r) {
    r.accuracy = r.total > 0 ? static_cast<double>(r.correct) / r.total : 0.0;
  };
  finish(rep.pooled);
  for (auto &[_, r] : groups) {
    finish(r);
    rep.conditions.push_back(std::move(r));
  }
  rep.predictions = predictions;
  return rep;
}

EvalReport RunEvaluation(const ModelBundle &bundle, const CorpusManifest &test) {
  return BuildReport(bundle.backend.labels(), Classify(bundle, test));
}

CorpusManifest SweepManifest(const CorpusManifest &clean_test,
                             const CorpusManifest &speech_pool,
                             const std::vector<double> &sbr_list,
                             uint64_t seed) {
  if (sbr_list.empty()) return clean_test;
  std::vector<SbrCondition> conds{std::nullopt};
  for (double s : sbr_list) conds.emplace_back(s);
  CorpusManifest out =
      BuildMulticonditionCorpus(clean_test, conds, speech_pool, seed);
  out.Validate();
  return out;
}

EvalReport RunSbrSweep(const ModelBundle &bundle,
                       const CorpusManifest &clean_test,
                       const CorpusManifest &speech_pool,
                       const std::vector<double> &sbr_list, uint64_t seed) {
  return RunEvaluation(bundle, SweepManifest(clean_test, speech_pool, sbr_list, seed));
}

namespace {

nlohmann::ordered_json ResultJson(const ConditionResult &r) {
  nlohmann::ordered_json j;
  j["condition"] = r.condition;
  j["accuracy"] = r.accuracy;
  j["correct"] = r.correct;
  j["total"] = r.total;
  j["confusion"] = r.confusion;
  return j;
}

}  // namespace

std::string ReportToJson(const EvalReport &report) {
  nlohmann::ordered_json j;
  j["labels"] = report.labels;
  j["pooled"] = ResultJson(report.pooled);
  j["conditions"] = nlohmann::ordered_json::array();
  for (const auto &c : report.conditions) j["conditions"].push_back(ResultJson(c));
  return j.dump(2) + "\n";
}

std::string ReportToText(const EvalReport &report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "condition        accuracy  correct/total\n";
  auto line = [&](const ConditionResult &r) {
    os << std::left << std::setw(16) << r.condition << " " << std::right
       << std::setw(7) << 100.0 * r.accuracy << "%  " << r.correct << "/"
       << r.total << "\n";
  };
  for (const auto &c : report.conditions) line(c);
  line(report.pooled);

  os << "\nconfusion (rows: true, columns: predicted)\n";
  std::size_t w = 6;
  for (const auto &l : report.labels) w = std::max(w, l.size() + 1);
  os << std::setw(static_cast<int>(w)) << "";
  for (std::size_t i = 0; i < report.labels.size(); ++i)
    os << std::setw(6) << i;
  os << "\n";
  for (std::size_t i = 0; i < report.labels.size(); ++i) {
    os << std::left << std::setw(static_cast<int>(w))
       << (std::to_string(i) + " " + report.labels[i]).substr(0, w - 1)
       << std::right;
    for (long v : report.pooled.confusion[i]) os << std::setw(6) << v;
    os << "\n";
  }
  return os.str();
}

std::string PredictionsToJsonLines(const std::vector<std::string> &labels,
                                   const std::vector<Prediction> &predictions) {
  std::string out;
  for (const auto &p : predictions) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["label"] = p.label;
    j["condition"] = p.condition;
    j["predicted"] = p.predicted;
    nlohmann::ordered_json s;
    for (std::size_t c = 0; c < labels.size(); ++c) s[labels[c]] = p.scores[c];
    j["scores"] = s;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace asc
