// src/manifest.cc

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

#include "asc/manifest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asc/binary-io.h"
#include "asc/common.h"

namespace asc {

namespace {

using nlohmann::json;

json EntryToJson(const CorpusEntry &e) {
  json j;
  j["path"] = e.path;
  j["label"] = e.label;
  if (!e.speaker.empty()) j["speaker"] = e.speaker;
  if (!e.condition.empty()) j["condition"] = e.condition;
  if (e.fold >= 0) j["fold"] = e.fold;
  if (e.mix) {
    json m;
    m["background"] = e.mix->background;
    m["speech"] = e.mix->speech;
    m["sbr_db"] = e.mix->sbr_db;
    m["seed"] = e.mix->seed;
    if (e.mix->speech_gain) m["speech_gain"] = *e.mix->speech_gain;
    if (e.mix->headroom_gain) m["headroom_gain"] = *e.mix->headroom_gain;
    j["mix"] = std::move(m);
  }
  return j;
}

CorpusEntry EntryFromJson(const json &j) {
  CorpusEntry e;
  e.path = j.at("path").get<std::string>();
  e.label = j.at("label").get<std::string>();
  e.speaker = j.value("speaker", "");
  e.condition = j.value("condition", "");
  e.fold = j.value("fold", -1);
  if (j.contains("mix")) {
    const json &m = j.at("mix");
    MixRecipe r;
    r.background = m.at("background").get<std::string>();
    r.speech = m.at("speech").get<std::string>();
    r.sbr_db = m.at("sbr_db").get<double>();
    r.seed = m.at("seed").get<uint64_t>();
    if (m.contains("speech_gain")) r.speech_gain = m.at("speech_gain").get<double>();
    if (m.contains("headroom_gain"))
      r.headroom_gain = m.at("headroom_gain").get<double>();
    e.mix = std::move(r);
  }
  return e;
}

std::string Resolve(const std::filesystem::path &base, const std::string &p) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (base / path).lexically_normal().string();
}

}  // namespace

std::vector<std::string> CorpusManifest::Labels() const {
  std::set<std::string> s;
  for (const auto &e : entries) s.insert(e.label);
  return {s.begin(), s.end()};
}

std::vector<std::string> CorpusManifest::Conditions() const {
  std::set<std::string> s;
  for (const auto &e : entries) s.insert(e.condition);
  return {s.begin(), s.end()};
}

void CorpusManifest::Validate() const {
  std::set<std::string> seen;
  for (const auto &e : entries) {
    if (e.path.empty() || e.label.empty())
      Fail(Stage::kPipeline, ErrorKind::kInvalidArgument,
           "manifest entry without path or label");
    if (!seen.insert(e.path).second)
      Fail(Stage::kPipeline, ErrorKind::kInvalidArgument,
           "duplicate manifest path ", e.path);
  }
}

CorpusManifest CorpusManifest::SelectFolds(const std::vector<int> &folds,
                                           bool keep) const {
  CorpusManifest out;
  for (const auto &e : entries) {
    bool in = std::find(folds.begin(), folds.end(), e.fold) != folds.end();
    if (in == keep) out.entries.push_back(e);
  }
  return out;
}

std::string EncodeManifest(const CorpusManifest &manifest) {
  std::string out;
  for (const auto &e : manifest.entries) {
    out += EntryToJson(e).dump();
    out += '\n';
  }
  return out;
}

CorpusManifest ParseManifest(const std::string &text) {
  CorpusManifest m;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      m.entries.push_back(EntryFromJson(json::parse(line)));
    } catch (const json::exception &ex) {
      Fail(Stage::kPipeline, ErrorKind::kInvalidArgument, "manifest line ",
           line_no, ": ", ex.what());
    }
  }
  return m;
}

CorpusManifest ReadManifest(const std::string &path) {
  CorpusManifest m = ParseManifest(ReadFileBytes(path, Stage::kPipeline));
  const auto base = std::filesystem::path(path).parent_path();
  for (auto &e : m.entries) {
    e.path = Resolve(base, e.path);
    if (e.mix) {
      e.mix->background = Resolve(base, e.mix->background);
      e.mix->speech = Resolve(base, e.mix->speech);
    }
  }
  return m;
}

void WriteManifest(const std::string &path, const CorpusManifest &manifest) {
  WriteFileBytes(path, EncodeManifest(manifest), Stage::kPipeline);
}

std::string ConditionTag(const SbrCondition &c) {
  if (!c) return kNoSpeechTag;
  std::ostringstream os;
  os << "sbr" << (*c >= 0 ? "+" : "") << *c;
  return os.str();
}

std::vector<SbrCondition> ParseSbrList(const std::string &text) {
  std::vector<SbrCondition> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) continue;
    if (tok == kNoSpeechTag || tok == "clean") {
      out.emplace_back(std::nullopt);
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v))
      Fail(Stage::kConfig, ErrorKind::kInvalidArgument, "bad SBR value '",
           tok, "'");
    out.emplace_back(v);
  }
  return out;
}

std::string FormatSbrList(const std::vector<SbrCondition> &list) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) os << ',';
    if (list[i])
      os << *list[i];
    else
      os << kNoSpeechTag;
  }
  return os.str();
}

}  // namespace asc
