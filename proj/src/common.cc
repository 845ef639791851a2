// src/common.cc

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

#include "asc/common.h"

#include <atomic>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

namespace asc {

const char *StageName(Stage stage) {
  switch (stage) {
    case Stage::kConfig: return "config";
    case Stage::kAudioIo: return "audio-io";
    case Stage::kFeatures: return "features";
    case Stage::kNoiseFloor: return "noise-floor";
    case Stage::kMixer: return "mixer";
    case Stage::kUbm: return "gmm-ubm";
    case Stage::kIvector: return "ivector";
    case Stage::kBackend: return "backend";
    case Stage::kPipeline: return "pipeline";
  }
  return "unknown";
}

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kFileNotFound: return "file-not-found";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kUnsupportedFormat: return "unsupported-format";
    case ErrorKind::kCorruptHeader: return "corrupt-header";
    case ErrorKind::kTooShort: return "too-short";
    case ErrorKind::kDimensionMismatch: return "dimension-mismatch";
    case ErrorKind::kSilentSignal: return "silent-signal";
    case ErrorKind::kNoActivity: return "no-activity";
    case ErrorKind::kDegenerateData: return "degenerate-data";
    case ErrorKind::kNonFinite: return "non-finite";
    case ErrorKind::kChecksumMismatch: return "checksum-mismatch";
    case ErrorKind::kLabelMismatch: return "label-mismatch";
    case ErrorKind::kVersionMismatch: return "version-mismatch";
  }
  return "unknown";
}

int ExitCodeForStage(Stage stage) {
  switch (stage) {
    case Stage::kConfig: return 2;
    case Stage::kAudioIo: return 10;
    case Stage::kFeatures: return 11;
    case Stage::kNoiseFloor: return 12;
    case Stage::kMixer: return 13;
    case Stage::kUbm: return 14;
    case Stage::kIvector: return 15;
    case Stage::kBackend: return 16;
    case Stage::kPipeline: return 17;
  }
  return 1;
}

namespace {
std::mutex g_warn_mutex;
WarningSink g_warn_sink;
}  // namespace

void SetWarningSink(WarningSink sink) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  g_warn_sink = std::move(sink);
}

void EmitWarning(const std::string &msg) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  if (g_warn_sink) {
    g_warn_sink(msg);
  } else {
    std::cerr << "WARNING: " << msg << '\n';
  }
}

void ParallelChunks(std::size_t n, std::size_t chunk, int num_threads,
                    const std::function<void(std::size_t, std::size_t,
                                             std::size_t)> &fn) {
  if (n == 0) return;
  if (chunk == 0) chunk = n;
  const std::size_t num_chunks = (n + chunk - 1) / chunk;
  auto run = [&](std::size_t c) {
    std::size_t begin = c * chunk;
    fn(c, begin, std::min(n, begin + chunk));
  };
  if (num_threads <= 1 || num_chunks == 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  const std::size_t nt = std::min<std::size_t>(num_threads, num_chunks);
  for (std::size_t t = 0; t < nt; ++t) {
    workers.emplace_back([&] {
      for (std::size_t c = next++; c < num_chunks; c = next++) {
        try {
          run(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace asc
