// tools/asc-cli.cc

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

// asc: command-line front end for the scene classification pipeline.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asc/binary-io.h"
#include "asc/common.h"
#include "asc/features.h"
#include "asc/gmm.h"
#include "asc/ivector.h"
#include "asc/manifest.h"
#include "asc/mixer.h"
#include "asc/noise-floor.h"
#include "asc/pipeline-config.h"
#include "asc/pipeline.h"
#include "asc/synthetic.h"

namespace fs = std::filesystem;
using namespace asc;

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> sets;
  int threads = 0;
};

PipelineConfig LoadConfig(const Globals &g) {
  PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{}
                                             : ReadConfig(g.config_path);
  for (const auto &kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      Fail(Stage::kConfig, ErrorKind::kInvalidArgument,
           "--set expects key=value, got '", kv, "'");
    cfg.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.threads > 0) cfg.num_threads = g.threads;
  cfg.Check();
  return cfg;
}

void WriteText(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    WriteFileBytes(path, text, Stage::kPipeline);
  }
}

std::string Stem(const std::string &path) {
  return fs::path(path).stem().string();
}

std::vector<double> NumericSbrs(const std::string &list) {
  std::vector<double> out;
  for (const auto &c : ParseSbrList(list))
    if (c) out.push_back(*c);
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Acoustic scene classification with noise-floor features, "
               "iVectors and a Gaussian backend"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("-c,--config", g.config_path, "config file (key = value)");
  app.add_option("-s,--set", g.sets, "override a config key: key=value")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("-j,--threads", g.threads, "worker threads");

  std::function<void()> run;

  // config
  auto *config_cmd = app.add_subcommand("config", "print the effective config");
  bool defaults = false;
  config_cmd->add_flag("--defaults", defaults, "documented defaults instead");
  config_cmd->callback([&] {
    run = [&] {
      std::cout << (defaults ? ConfigReference() : SerializeConfig(LoadConfig(g)));
    };
  });

  // mix
  auto *mix = app.add_subcommand("mix", "mix speech into a background at a target SBR");
  std::string mix_bg, mix_sp, mix_out;
  double mix_sbr = 0.0;
  uint64_t mix_seed = 0;
  mix->add_option("--background", mix_bg)->required();
  mix->add_option("--speech", mix_sp)->required();
  mix->add_option("--sbr", mix_sbr, "target SBR in dB")->required();
  mix->add_option("--seed", mix_seed);
  mix->add_option("-o,--out", mix_out)->required();
  mix->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      MixRecipe r{mix_bg, mix_sp, mix_sbr, mix_seed, {}, {}};
      const MixResult m = RenderMix(r, cfg.features.sample_rate);
      WriteWav(mix_out, m.audio);
      nlohmann::ordered_json j;
      j["out"] = mix_out;
      j["sbr_db"] = mix_sbr;
      j["speech_gain"] = m.spec.speech_gain;
      j["headroom_gain"] = m.spec.headroom_gain;
      j["speech_offset"] = m.spec.speech_offset;
      j["seed"] = mix_seed;
      std::cout << j.dump() << "\n";
    };
  });

  // build-corpus
  auto *build = app.add_subcommand("build-corpus", "multi-condition manifest from backgrounds and a speech pool");
  std::string bc_manifest, bc_pool, bc_sbr = "nospeech", bc_out, bc_exclude;
  uint64_t bc_seed = 0;
  bool bc_materialize = false;
  build->add_option("-m,--manifest", bc_manifest, "background manifest")->required();
  build->add_option("--speech-pool", bc_pool, "speech manifest");
  build->add_option("--sbr", bc_sbr, "conditions, e.g. nospeech,-5,5");
  build->add_option("--seed", bc_seed);
  build->add_option("--exclude-speakers", bc_exclude, "comma-separated");
  build->add_flag("--materialize", bc_materialize, "render mixes to WAV files");
  build->add_option("-o,--out", bc_out)->required();
  build->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      const CorpusManifest bg = ReadManifest(bc_manifest);
      const CorpusManifest pool =
          bc_pool.empty() ? CorpusManifest{} : ReadManifest(bc_pool);
      std::set<std::string> excluded;
      std::stringstream ss(bc_exclude);
      for (std::string s; std::getline(ss, s, ',');)
        if (!s.empty()) excluded.insert(s);
      CorpusManifest out = BuildMulticonditionCorpus(bg, ParseSbrList(bc_sbr),
                                                     pool, bc_seed, excluded);
      if (bc_materialize) out = MaterializeCorpus(out, cfg.features.sample_rate);
      WriteManifest(bc_out, out);
    };
  });

  // extract-features
  auto *feat = app.add_subcommand("extract-features", "write one feature file per recording");
  std::string ef_manifest, ef_dir;
  bool ef_csv = false, ef_dump_nf = false;
  feat->add_option("-m,--manifest", ef_manifest)->required();
  feat->add_option("-o,--out-dir", ef_dir)->required();
  feat->add_flag("--csv", ef_csv, "CSV instead of the binary container");
  feat->add_flag("--dump-noise-floor", ef_dump_nf,
                 "also write the tracked noise-floor spectrogram");
  feat->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      const CorpusManifest m = ReadManifest(ef_manifest);
      fs::create_directories(ef_dir);
      const auto feats = ComputeFeatures(m, cfg);
      for (std::size_t i = 0; i < feats.size(); ++i) {
        const fs::path base = fs::path(ef_dir) / Stem(m.entries[i].path);
        if (ef_csv)
          WriteFileBytes(base.string() + ".csv", FeaturesToCsv(feats[i]),
                         Stage::kFeatures);
        else
          WriteFeatures(base.string() + ".feat", feats[i]);
        if (ef_dump_nf) {
          const AudioBuffer a = LoadRecording(m.entries[i], cfg.features.sample_rate);
          const Spectrogram spec = PowerSpectrogram(
              FrameSignal(a, cfg.features.frame), cfg.features.sample_rate,
              FrameHopSamples(cfg.features.frame, cfg.features.sample_rate) /
                  static_cast<double>(cfg.features.sample_rate));
          WriteFileBytes(base.string() + ".nf",
                         EncodeSpectrogram(NoiseFloorSpectrogram(spec, cfg.noise_floor)),
                         Stage::kNoiseFloor);
        }
      }
    };
  });

  // train-ubm
  auto *tubm = app.add_subcommand("train-ubm", "train the diagonal GMM-UBM");
  std::string tu_manifest, tu_out;
  tubm->add_option("-m,--manifest", tu_manifest)->required();
  tubm->add_option("-o,--out", tu_out)->required();
  tubm->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      const auto feats = ComputeFeatures(ReadManifest(tu_manifest), cfg);
      const UbmTrainResult r =
          TrainUbm(PoolFrames(feats, cfg.ubm_max_frames), cfg.UbmOptions());
      WriteGmm(tu_out, r.model);
      for (std::size_t i = 0; i < r.avg_loglikes.size(); ++i)
        std::cerr << "iter " << i << " avg loglike " << r.avg_loglikes[i] << "\n";
    };
  });

  // train-tv
  auto *ttv = app.add_subcommand("train-tv", "train the total-variability matrix");
  std::string tt_manifest, tt_ubm, tt_out;
  ttv->add_option("-m,--manifest", tt_manifest)->required();
  ttv->add_option("--ubm", tt_ubm)->required();
  ttv->add_option("-o,--out", tt_out)->required();
  ttv->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      const GmmModel ubm = ReadGmm(tt_ubm);
      const auto feats = ComputeFeatures(ReadManifest(tt_manifest), cfg);
      const TvTrainResult r =
          TrainTv(ComputeStats(ubm, feats, cfg.num_threads), ubm, cfg.TvOptions());
      WriteTv(tt_out, r.tv);
      for (std::size_t i = 0; i < r.objective.size(); ++i)
        std::cerr << "iter " << i << " objective " << r.objective[i] << "\n";
    };
  });

  // extract-ivectors
  auto *eiv = app.add_subcommand("extract-ivectors", "iVector per recording");
  std::string ei_manifest, ei_ubm, ei_tv, ei_out;
  eiv->add_option("-m,--manifest", ei_manifest)->required();
  eiv->add_option("--ubm", ei_ubm)->required();
  eiv->add_option("--tv", ei_tv)->required();
  eiv->add_option("-o,--out", ei_out)->required();
  eiv->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      const GmmModel ubm = ReadGmm(ei_ubm);
      const TvMatrix tv = ReadTv(ei_tv);
      const CorpusManifest m = ReadManifest(ei_manifest);
      const auto feats = ComputeFeatures(m, cfg);
      WriteIvectorSet(ei_out, ExtractIvectors(tv, ubm, m,
                                              ComputeStats(ubm, feats, cfg.num_threads),
                                              cfg.num_threads));
    };
  });

  // train-backend
  auto *tgb = app.add_subcommand("train-backend", "fit the Gaussian backend");
  std::string tb_iv, tb_out;
  tgb->add_option("-i,--ivectors", tb_iv)->required();
  tgb->add_option("-o,--out", tb_out)->required();
  tgb->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      const IvectorSet set = ReadIvectorSet(tb_iv);
      GaussianBackend::Train(set.vectors, set.labels, cfg.backend_alpha).Write(tb_out);
    };
  });

  // train
  auto *train = app.add_subcommand("train", "full training run into a model bundle");
  std::string tr_manifest, tr_pool, tr_bundle;
  train->add_option("-m,--manifest", tr_manifest)->required();
  train->add_option("--speech-pool", tr_pool, "speech for multi-condition training");
  train->add_option("-b,--bundle", tr_bundle, "output directory")->required();
  train->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      const CorpusManifest pool =
          tr_pool.empty() ? CorpusManifest{} : ReadManifest(tr_pool);
      WriteBundle(tr_bundle, RunTraining(cfg, ReadManifest(tr_manifest), pool));
    };
  });

  // classify
  auto *cls = app.add_subcommand("classify", "label recordings (JSON lines)");
  std::string cl_bundle, cl_manifest, cl_out;
  cls->add_option("-b,--bundle", cl_bundle)->required();
  cls->add_option("-m,--manifest", cl_manifest)->required();
  cls->add_option("-o,--out", cl_out, "default: stdout");
  cls->callback([&] {
    run = [&] {
      ModelBundle b = ReadBundle(cl_bundle);
      if (g.threads > 0) b.config.num_threads = g.threads;
      WriteText(cl_out, PredictionsToJsonLines(
                            b.backend.labels(),
                            asc::Classify(b, ReadManifest(cl_manifest))));
    };
  });

  // evaluate
  auto *ev = app.add_subcommand("evaluate", "accuracy and confusion on a labeled manifest");
  std::string ev_bundle, ev_manifest, ev_json;
  ev->add_option("-b,--bundle", ev_bundle)->required();
  ev->add_option("-m,--manifest", ev_manifest)->required();
  ev->add_option("--json", ev_json, "also write the JSON report here");
  ev->callback([&] {
    run = [&] {
      ModelBundle b = ReadBundle(ev_bundle);
      if (g.threads > 0) b.config.num_threads = g.threads;
      const EvalReport r = RunEvaluation(b, ReadManifest(ev_manifest));
      std::cout << ReportToText(r);
      if (!ev_json.empty()) WriteText(ev_json, ReportToJson(r));
    };
  });

  // sweep
  auto *sw = app.add_subcommand("sweep", "evaluate at a list of SBRs");
  std::string sw_bundle, sw_manifest, sw_pool, sw_sbr, sw_json;
  uint64_t sw_seed = 0;
  sw->add_option("-b,--bundle", sw_bundle)->required();
  sw->add_option("-m,--manifest", sw_manifest, "clean test manifest")->required();
  sw->add_option("--speech-pool", sw_pool)->required();
  sw->add_option("--sbr", sw_sbr, "e.g. -5,0,5,10,15,20");
  sw->add_option("--seed", sw_seed);
  sw->add_option("--json", sw_json, "also write the JSON report here");
  sw->callback([&] {
    run = [&] {
      ModelBundle b = ReadBundle(sw_bundle);
      if (g.threads > 0) b.config.num_threads = g.threads;
      const EvalReport r =
          RunSbrSweep(b, ReadManifest(sw_manifest), ReadManifest(sw_pool),
                      NumericSbrs(sw_sbr), sw_seed);
      std::cout << ReportToText(r);
      if (!sw_json.empty()) WriteText(sw_json, ReportToJson(r));
    };
  });

  // synth-corpus
  auto *syn = app.add_subcommand("synth-corpus", "write the synthetic scene corpus");
  SyntheticCorpusOptions so;
  std::string syn_dir;
  syn->add_option("-o,--out-dir", syn_dir)->required();
  syn->add_option("--train-per-class", so.train_per_class);
  syn->add_option("--test-per-class", so.test_per_class);
  syn->add_option("--clip-seconds", so.clip_seconds);
  syn->add_option("--speakers", so.speakers_per_split, "speakers per split");
  syn->add_option("--seed", so.seed);
  syn->callback([&] {
    run = [&] {
      const PipelineConfig cfg = LoadConfig(g);
      so.sample_rate = cfg.features.sample_rate;
      WriteSyntheticCorpus(syn_dir, so);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ExitCodeForStage(Stage::kConfig);
  }

  try {
    run();
  } catch (const Error &e) {
    std::cerr << "asc: " << StageName(e.stage()) << " failed ("
              << ErrorKindName(e.kind()) << "): " << e.what() << "\n";
    return ExitCodeForStage(e.stage());
  } catch (const fs::filesystem_error &e) {
    std::cerr << "asc: pipeline failed (io): " << e.what() << "\n";
    return ExitCodeForStage(Stage::kPipeline);
  }
  return 0;
}
