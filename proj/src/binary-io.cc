// src/binary-io.cc

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

#include "asc/binary-io.h"

#include <filesystem>
#include <fstream>
#include <iterator>

namespace asc {

namespace {
constexpr std::size_t kMagicLen = 8;

std::string PadMagic(std::string_view magic) {
  std::string m(magic.substr(0, kMagicLen));
  m.resize(kMagicLen, '\0');
  return m;
}
}  // namespace

BinaryWriter::BinaryWriter(std::string_view magic, uint32_t version) {
  buf_ = PadMagic(magic);
  U32(version);
}

void BinaryWriter::Str(std::string_view s) {
  U64(s.size());
  Raw(s.data(), s.size());
}

void BinaryWriter::Vec(const Eigen::VectorXd &v) {
  U64(static_cast<uint64_t>(v.size()));
  Raw(v.data(), sizeof(double) * v.size());
}

void BinaryWriter::Mat(const Eigen::MatrixXd &m) {
  U64(static_cast<uint64_t>(m.rows()));
  U64(static_cast<uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) F64(m(r, c));
}

BinaryReader::BinaryReader(std::string bytes, std::string_view magic,
                           Stage stage, uint32_t *version)
    : buf_(std::move(bytes)), stage_(stage) {
  if (buf_.size() < kMagicLen + sizeof(uint32_t) ||
      buf_.compare(0, kMagicLen, PadMagic(magic)) != 0) {
    Fail(stage_, ErrorKind::kCorruptHeader, "expected container tag '",
         magic, "'");
  }
  pos_ = kMagicLen;
  *version = U32();
}

void BinaryReader::Need(std::size_t n) const {
  if (buf_.size() - pos_ < n)
    Fail(stage_, ErrorKind::kCorruptHeader,
         "binary container truncated at byte ", pos_);
}

std::string BinaryReader::Str() {
  uint64_t n = U64();
  Need(n);
  std::string s = buf_.substr(pos_, n);
  pos_ += n;
  return s;
}

Eigen::VectorXd BinaryReader::Vec() {
  uint64_t n = U64();
  Need(n * sizeof(double));
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  std::memcpy(v.data(), buf_.data() + pos_, n * sizeof(double));
  pos_ += n * sizeof(double);
  return v;
}

Eigen::MatrixXd BinaryReader::Mat() {
  uint64_t rows = U64(), cols = U64();
  Need(rows * cols * sizeof(double));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = F64();
  return m;
}

void BinaryReader::ExpectEnd() const {
  if (!AtEnd())
    Fail(stage_, ErrorKind::kCorruptHeader, "trailing bytes in container");
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string ReadFileBytes(const std::string &path, Stage stage) {
  if (!std::filesystem::exists(path))
    Fail(stage, ErrorKind::kFileNotFound, "no such file: ", path);
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(stage, ErrorKind::kIo, "cannot open ", path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::string &path, std::string_view bytes,
                    Stage stage) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(stage, ErrorKind::kIo, "cannot write ", path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(stage, ErrorKind::kIo, "short write to ", path);
}

}  // namespace asc
