// include/asc/pipeline.h

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

#ifndef ASC_PIPELINE_H_
#define ASC_PIPELINE_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asc/audio-io.h"
#include "asc/backend.h"
#include "asc/features.h"
#include "asc/gmm.h"
#include "asc/ivector.h"
#include "asc/manifest.h"
#include "asc/pipeline-config.h"

namespace asc {

// Everything needed to classify new audio.
struct ModelBundle {
  PipelineConfig config;
  GmmModel ubm;
  TvMatrix tv;
  GaussianBackend backend;
};

// Directory layout: config.txt, ubm.bin, tv.bin, backend.bin.
void WriteBundle(const std::string &dir, const ModelBundle &bundle);
ModelBundle ReadBundle(const std::string &dir);

// Mono audio at `sample_rate`; entries with a mix recipe are rendered on the
// fly, others are read from disk.
AudioBuffer LoadRecording(const CorpusEntry &entry, int sample_rate);

// Features of every entry, in manifest order.
std::vector<FeatureMatrix> ComputeFeatures(const CorpusManifest &manifest,
                                           const PipelineConfig &config);

// All frames stacked; with max_frames > 0 an evenly strided subset.
Eigen::MatrixXd PoolFrames(const std::vector<FeatureMatrix> &feats,
                           std::size_t max_frames);

std::vector<SufficientStats> ComputeStats(const GmmModel &ubm,
                                          const std::vector<FeatureMatrix> &feats,
                                          int num_threads);

IvectorSet ExtractIvectors(const TvMatrix &tv, const GmmModel &ubm,
                           const CorpusManifest &manifest,
                           const std::vector<SufficientStats> &stats,
                           int num_threads);

// Expands `train` with the configured multi-condition copies. Returns the
// manifest unchanged when the only condition is no-speech.
CorpusManifest ExpandTraining(const PipelineConfig &config,
                              const CorpusManifest &train,
                              const CorpusManifest &speech_pool);

// features -> UBM -> stats -> TV -> iVectors -> backend.
ModelBundle RunTraining(const PipelineConfig &config,
                        const CorpusManifest &train,
                        const CorpusManifest &speech_pool = {});

struct Prediction {
  std::string id;
  std::string label;
  std::string condition;
  std::string predicted;
  Eigen::VectorXd scores;  // in bundle label order
};

struct ConditionResult {
  std::string condition;
  std::vector<std::vector<long>> confusion;  // [true][predicted]
  long correct = 0;
  long total = 0;
  double accuracy = 0.0;
};

struct EvalReport {
  std::vector<std::string> labels;
  ConditionResult pooled;
  std::vector<ConditionResult> conditions;  // sorted by tag
  std::vector<Prediction> predictions;      // manifest order
};

// Entries without a condition tag are grouped as "nospeech".
std::string ConditionOf(const CorpusEntry &entry);

std::vector<Prediction> Classify(const ModelBundle &bundle,
                                 const CorpusManifest &manifest);
EvalReport BuildReport(const std::vector<std::string> &labels,
                       const std::vector<Prediction> &predictions);
EvalReport RunEvaluation(const ModelBundle &bundle,
                         const CorpusManifest &test);

// Test sets for the no-speech condition plus every SBR in `sbr_list`.
CorpusManifest SweepManifest(const CorpusManifest &clean_test,
                             const CorpusManifest &speech_pool,
                             const std::vector<double> &sbr_list,
                             uint64_t seed);
EvalReport RunSbrSweep(const ModelBundle &bundle,
                       const CorpusManifest &clean_test,
                       const CorpusManifest &speech_pool,
                       const std::vector<double> &sbr_list, uint64_t seed);

std::string ReportToJson(const EvalReport &report);
std::string ReportToText(const EvalReport &report);
// One JSON object per line: id, label, condition, predicted, scores.
std::string PredictionsToJsonLines(const std::vector<std::string> &labels,
                                   const std::vector<Prediction> &predictions);

}  // namespace asc

#endif  // ASC_PIPELINE_H_
