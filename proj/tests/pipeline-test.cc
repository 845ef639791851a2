// tests/pipeline-test.cc

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

#include <cstdlib>
#include <random>

#include <doctest.h>

#include "asc/binary-io.h"
#include "asc/common.h"
#include "asc/pipeline.h"
#include "asc/synthetic.h"
#include "test-util.h"

using namespace asc;
using asc::testing::TempDir;

namespace {

PipelineConfig SmallConfig() {
  return ParseConfig(
      "ubm_components = 8\n"
      "ubm_iters = 3\n"
      "tv_rank = 6\n"
      "tv_iters = 2\n"
      "mct_sbr = nospeech,10\n");
}

SyntheticCorpusOptions SmallCorpus() {
  SyntheticCorpusOptions o;
  o.train_per_class = 6;
  o.test_per_class = 3;
  o.clip_seconds = 3.0;
  o.speakers_per_split = 2;
  o.clips_per_speaker = 2;
  o.speech_seconds = 2.0;
  o.seed = 5;
  return o;
}

std::string BundleBytes(const std::string &dir) {
  std::string out;
  for (const char *f : {"config.txt", "ubm.bin", "tv.bin", "backend.bin"})
    out += ReadFileBytes(dir + "/" + f, Stage::kPipeline);
  return out;
}

Prediction Pred(const std::string &label, const std::string &predicted,
                const std::string &condition) {
  return {"id", label, condition, predicted, Eigen::VectorXd()};
}

int RunCli(const std::string &args) {
  const char *cli = std::getenv("ASC_CLI");
  REQUIRE(cli != nullptr);
  const int status = std::system((std::string(cli) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("report invariants") {
  const std::vector<std::string> labels = {"a", "b", "c"};
  SUBCASE("perfect classification") {
    std::vector<Prediction> p;
    for (const auto &l : labels)
      for (int i = 0; i < 4; ++i) p.push_back(Pred(l, l, "nospeech"));
    const EvalReport r = BuildReport(labels, p);
    CHECK(r.pooled.accuracy == 1.0);
    CHECK(r.pooled.correct == 12);
    for (int i = 0; i < 3; ++i) CHECK(r.pooled.confusion[i][i] == 4);
    REQUIRE(r.conditions.size() == 1);
    CHECK(r.conditions[0].condition == "nospeech");
    CHECK(r.pooled.condition == "all");
  }
  SUBCASE("random predictions, two conditions") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> pick(0, 2);
    std::vector<Prediction> p;
    std::vector<long> per_label(3, 0);
    for (int i = 0; i < 90; ++i) {
      const int t = pick(rng);
      ++per_label[t];
      p.push_back(Pred(labels[t], labels[pick(rng)], i % 2 ? "sbr+5" : "nospeech"));
    }
    const EvalReport r = BuildReport(labels, p);
    CHECK(r.conditions.size() == 2);
    for (const auto *c : {&r.pooled, &r.conditions[0], &r.conditions[1]}) {
      long trace = 0, sum = 0;
      for (int i = 0; i < 3; ++i) {
        trace += c->confusion[i][i];
        for (long v : c->confusion[i]) sum += v;
      }
      CHECK(sum == c->total);
      CHECK(trace == c->correct);
      CHECK(c->accuracy == doctest::Approx(double(trace) / sum));
    }
    for (int i = 0; i < 3; ++i) {
      long row = 0;
      for (long v : r.pooled.confusion[i]) row += v;
      CHECK(row == per_label[i]);
    }
    CHECK(r.conditions[0].total + r.conditions[1].total == 90);
  }
  SUBCASE("15 classes with 26 recordings each") {
    std::vector<std::string> many;
    for (int i = 0; i < 15; ++i) many.push_back("class" + std::to_string(10 + i));
    std::vector<Prediction> p;
    for (int i = 0; i < 15; ++i)
      for (int k = 0; k < 26; ++k) p.push_back(Pred(many[i], many[(i + k) % 15], ""));
    const EvalReport r = BuildReport(many, p);
    CHECK(r.pooled.confusion.size() == 15);
    CHECK(r.pooled.confusion[0].size() == 15);
    CHECK(r.pooled.total == 390);
    CHECK(r.conditions.at(0).condition == "nospeech");
  }
}

TEST_CASE("end-to-end on a small synthetic corpus") {
  TempDir dir("pipeline");
  const SyntheticCorpus corpus = WriteSyntheticCorpus(dir / "corpus", SmallCorpus());
  PipelineConfig cfg = SmallConfig();

  const ModelBundle bundle = RunTraining(cfg, corpus.train, corpus.speech_train);
  CHECK(bundle.backend.labels() == SyntheticSceneLabels());
  CHECK(bundle.backend.Dim() == 6);
  WriteBundle(dir / "model", bundle);
  const ModelBundle loaded = ReadBundle(dir / "model");
  CHECK(SerializeConfig(loaded.config) == SerializeConfig(cfg));

  const EvalReport report = RunEvaluation(loaded, corpus.test);
  CHECK(report.pooled.total == 12);
  CHECK(report.predictions.size() == 12);
  CHECK(report.pooled.accuracy > 0.5);  // four classes, chance is 0.25
  const std::string json = ReportToJson(report);
  CHECK(json.find("\"accuracy\"") != std::string::npos);
  CHECK_FALSE(ReportToText(report).empty());

  SUBCASE("rerun is byte identical") {
    WriteBundle(dir / "again", RunTraining(cfg, corpus.train, corpus.speech_train));
    CHECK(BundleBytes(dir / "model") == BundleBytes(dir / "again"));
    CHECK(ReportToJson(RunEvaluation(ReadBundle(dir / "again"), corpus.test)) == json);
  }
  SUBCASE("empty sweep equals plain evaluation") {
    CHECK(ReportToJson(RunSbrSweep(loaded, corpus.test, corpus.speech_test, {}, 3)) == json);
    const EvalReport sw = RunSbrSweep(loaded, corpus.test, corpus.speech_test, {0.0}, 3);
    CHECK(sw.conditions.size() == 2);
    CHECK(sw.pooled.total == 24);
  }
  SUBCASE("missing audio aborts at the audio stage") {
    CorpusManifest broken = corpus.test;
    broken.entries[1].path = dir / "nope.wav";
    try {
      RunEvaluation(loaded, broken);
      FAIL("missing file accepted");
    } catch (const Error &e) {
      CHECK(e.stage() == Stage::kAudioIo);
      CHECK(e.kind() == ErrorKind::kFileNotFound);
      CHECK(std::string(e.what()).find("nope.wav") != std::string::npos);
    }
  }
  SUBCASE("labels unknown to the model") {
    CorpusManifest other = corpus.test;
    other.entries[0].label = "forest";
    try {
      Classify(loaded, other);
      FAIL("unknown label accepted");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::kLabelMismatch);
    }
  }
  SUBCASE("a damaged bundle is refused") {
    const std::string tv = ReadFileBytes(dir / "model/tv.bin", Stage::kPipeline);
    WriteFileBytes(dir / "model/tv.bin", tv.substr(0, tv.size() - 3), Stage::kPipeline);
    CHECK_THROWS_AS(ReadBundle(dir / "model"), Error);
    std::string bad = tv;
    bad[0] ^= 0x20;  // tag
    WriteFileBytes(dir / "model/tv.bin", bad, Stage::kPipeline);
    CHECK_THROWS_AS(ReadBundle(dir / "model"), Error);
  }
}

TEST_CASE("command line exit codes") {
  TempDir dir("cli");
  CorpusManifest m;
  m.entries.push_back({dir / "missing.wav", "x", "", "", -1, std::nullopt});
  WriteManifest(dir / "m.jsonl", m);
  CHECK(RunCli("config") == 0);
  CHECK(RunCli("-s no_such_key=1 config") == 2);
  CHECK(RunCli("extract-features -m " + (dir / "m.jsonl") + " -o " + (dir / "out")) == 10);
  CHECK(RunCli("no-such-command") == 2);

  // Shorter than one frame: framing is part of audio I/O.
  WriteWav(dir / "short.wav", asc::testing::WhiteNoise(100, 0.1, 1));
  m.entries[0].path = dir / "short.wav";
  WriteManifest(dir / "m.jsonl", m);
  CHECK(RunCli("extract-features -m " + (dir / "m.jsonl") + " -o " + (dir / "out")) == 10);
}
