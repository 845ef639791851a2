// include/asc/binary-io.h

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

#ifndef ASC_BINARY_IO_H_
#define ASC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "asc/common.h"

namespace asc {

static_assert(std::endian::native == std::endian::little,
              "binary containers are written in host order, which must be "
              "little-endian");

// Append-only little-endian byte buffer for the versioned model containers.
class BinaryWriter {
 public:
  // Every container starts with an 8-byte tag and a version number.
  BinaryWriter(std::string_view magic, uint32_t version);

  void U32(uint32_t v) { Raw(&v, sizeof v); }
  void I32(int32_t v) { Raw(&v, sizeof v); }
  void U64(uint64_t v) { Raw(&v, sizeof v); }
  void F32(float v) { Raw(&v, sizeof v); }
  void F64(double v) { Raw(&v, sizeof v); }
  void Str(std::string_view s);
  void Vec(const Eigen::VectorXd &v);
  void Mat(const Eigen::MatrixXd &m);  // row-major on disk

  const std::string &bytes() const { return buf_; }

 private:
  void Raw(const void *p, std::size_t n) {
    buf_.append(static_cast<const char *>(p), n);
  }
  std::string buf_;
};

class BinaryReader {
 public:
  // Verifies the tag and returns the version through *version. Errors are
  // raised against `stage`.
  BinaryReader(std::string bytes, std::string_view magic, Stage stage,
               uint32_t *version);

  uint32_t U32() { return Pod<uint32_t>(); }
  int32_t I32() { return Pod<int32_t>(); }
  uint64_t U64() { return Pod<uint64_t>(); }
  float F32() { return Pod<float>(); }
  double F64() { return Pod<double>(); }
  std::string Str();
  Eigen::VectorXd Vec();
  Eigen::MatrixXd Mat();

  bool AtEnd() const { return pos_ == buf_.size(); }
  void ExpectEnd() const;

 private:
  template <typename T>
  T Pod() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void Need(std::size_t n) const;

  std::string buf_;
  std::size_t pos_ = 0;
  Stage stage_;
};

// 64-bit FNV-1a; used to bind the iVector extractor to its UBM.
uint64_t Fnv1a64(std::string_view bytes);

std::string ReadFileBytes(const std::string &path, Stage stage);
void WriteFileBytes(const std::string &path, std::string_view bytes,
                    Stage stage);

}  // namespace asc

#endif  // ASC_BINARY_IO_H_
