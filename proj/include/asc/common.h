// include/asc/common.h

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

#ifndef ASC_COMMON_H_
#define ASC_COMMON_H_

#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace asc {

// Pipeline stage that raised an error. The CLI maps each stage to its own
// nonzero exit code.
enum class Stage {
  kConfig,
  kAudioIo,
  kFeatures,
  kNoiseFloor,
  kMixer,
  kUbm,
  kIvector,
  kBackend,
  kPipeline,
};

enum class ErrorKind {
  kInvalidArgument,
  kFileNotFound,
  kIo,
  kUnsupportedFormat,
  kCorruptHeader,
  kTooShort,
  kDimensionMismatch,
  kSilentSignal,
  kNoActivity,
  kDegenerateData,
  kNonFinite,
  kChecksumMismatch,
  kLabelMismatch,
  kVersionMismatch,
};

const char *StageName(Stage stage);
const char *ErrorKindName(ErrorKind kind);
int ExitCodeForStage(Stage stage);

class Error : public std::runtime_error {
 public:
  Error(Stage stage, ErrorKind kind, const std::string &what)
      : std::runtime_error(what), stage_(stage), kind_(kind) {}
  Stage stage() const { return stage_; }
  ErrorKind kind() const { return kind_; }

 private:
  Stage stage_;
  ErrorKind kind_;
};

namespace internal {
template <typename... Args>
std::string Concat(const Args &...args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}
}  // namespace internal

template <typename... Args>
[[noreturn]] void Fail(Stage stage, ErrorKind kind, const Args &...args) {
  throw Error(stage, kind, internal::Concat(args...));
}

// Warnings go to stderr unless a sink is installed (tests capture them).
using WarningSink = std::function<void(std::string_view)>;
void SetWarningSink(WarningSink sink);
void EmitWarning(const std::string &msg);

template <typename... Args>
void Warn(const Args &...args) {
  EmitWarning(internal::Concat(args...));
}

// Runs fn(begin, end) over [0, n) split into fixed-size chunks. Chunk
// boundaries do not depend on the thread count, so callers that reduce
// per-chunk results in chunk order get bit-identical output for any
// num_threads.
void ParallelChunks(std::size_t n, std::size_t chunk, int num_threads,
                    const std::function<void(std::size_t chunk_index,
                                             std::size_t begin,
                                             std::size_t end)> &fn);

}  // namespace asc

#endif  // ASC_COMMON_H_
