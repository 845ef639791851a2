// src/backend.cc

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

#include "asc/backend.h"

#include <cmath>
#include <map>

#include "asc/binary-io.h"
#include "asc/common.h"

namespace asc {

namespace {

constexpr const char *kBackendMagic = "ASCGB";
constexpr uint32_t kBackendVersion = 1;
constexpr int kMaxRidgeAttempts = 16;
// A pivot this small relative to the mean diagonal counts as a failed
// factorization.
constexpr double kMinRelativePivot = 1e-12;

}  // namespace

GaussianBackend GaussianBackend::Train(const std::vector<Eigen::VectorXd> &ivectors,
                                       const std::vector<std::string> &labels,
                                       double alpha) {
  if (ivectors.size() != labels.size())
    Fail(Stage::kBackend, ErrorKind::kDimensionMismatch, ivectors.size(),
         " iVectors but ", labels.size(), " labels");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    Fail(Stage::kBackend, ErrorKind::kInvalidArgument, "alpha ", alpha,
         " outside [0, 1]");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  if (by_class.size() < 2)
    Fail(Stage::kBackend, ErrorKind::kInvalidArgument,
         "backend needs at least two classes, got ", by_class.size());
  const Eigen::Index dim = ivectors.front().size();
  for (const auto &w : ivectors)
    if (w.size() != dim)
      Fail(Stage::kBackend, ErrorKind::kDimensionMismatch,
           "iVectors of differing dimension");

  GaussianBackend gb;
  gb.alpha_ = alpha;
  gb.shared_cov_ = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto &[label, idx] : by_class) {
    if (idx.size() < 2)
      Fail(Stage::kBackend, ErrorKind::kTooShort, "class '", label,
           "' has ", idx.size(), " sample(s); need at least 2");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (auto i : idx) mean += ivectors[i];
    mean /= static_cast<double>(idx.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (auto i : idx) {
      const Eigen::VectorXd d = ivectors[i] - mean;
      cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(idx.size());
    gb.labels_.push_back(label);
    gb.counts_.push_back(static_cast<int>(idx.size()));
    gb.means_.push_back(std::move(mean));
    gb.class_cov_.push_back(std::move(cov));
  }
  for (const auto &cov : gb.class_cov_) gb.shared_cov_ += cov;
  gb.shared_cov_ /= static_cast<double>(gb.class_cov_.size());
  gb.Finalize();
  return gb;
}

GaussianBackend::Factor GaussianBackend::FactorWithRidge(const Eigen::MatrixXd &cov,
                                                         double *ridge) {
  const Eigen::Index dim = cov.rows();
  const double mean_diag = cov.trace() / static_cast<double>(dim);
  auto attempt = [&](const Eigen::MatrixXd &m, Factor *out) {
    out->llt.compute(m);
    if (out->llt.info() != Eigen::Success) return false;
    const Eigen::VectorXd diag = out->llt.matrixLLT().diagonal();
    if (!(diag.minCoeff() > 0.0) ||
        diag.cwiseAbs2().minCoeff() <= kMinRelativePivot * mean_diag)
      return false;
    out->logdet = 2.0 * diag.array().log().sum();
    return true;
  };
  Factor f;
  *ridge = 0.0;
  if (attempt(cov, &f)) return f;
  if (!(mean_diag > 0.0))
    Fail(Stage::kBackend, ErrorKind::kDegenerateData,
         "covariance is zero (all iVectors identical); cannot regularize");
  double eps = 1e-8 * mean_diag;
  for (int i = 0; i < kMaxRidgeAttempts; ++i, eps *= 10.0) {
    Eigen::MatrixXd m = cov;
    m.diagonal().array() += eps;
    if (attempt(m, &f)) {
      *ridge = eps;
      Warn("backend: added ridge ", eps, " to a non positive definite covariance");
      return f;
    }
  }
  Fail(Stage::kBackend, ErrorKind::kDegenerateData,
       "covariance not positive definite after ", kMaxRidgeAttempts,
       " ridge attempts");
}

void GaussianBackend::Finalize() {
  blended_.clear();
  factors_.clear();
  ridges_.clear();
  for (const auto &cov : class_cov_) {
    blended_.push_back(alpha_ * shared_cov_ + (1.0 - alpha_) * cov);
    double ridge;
    factors_.push_back(FactorWithRidge(blended_.back(), &ridge));
    ridges_.push_back(ridge);
  }
  double ridge;
  shared_factor_ = FactorWithRidge(shared_cov_, &ridge);
  ridges_.push_back(ridge);
}

Eigen::VectorXd GaussianBackend::Score(const Eigen::VectorXd &w,
                                       ScoringMode mode) const {
  if (w.size() != Dim())
    Fail(Stage::kBackend, ErrorKind::kDimensionMismatch, "iVector dim ",
         w.size(), " vs backend dim ", Dim());
  Eigen::VectorXd scores(labels_.size());
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    const Eigen::VectorXd d = w - means_[c];
    if (mode == ScoringMode::kShared) {
      const Eigen::VectorXd z = shared_factor_.llt.matrixL().solve(d);
      scores[c] = -0.5 * z.squaredNorm();
    } else {
      const Eigen::VectorXd z = factors_[c].llt.matrixL().solve(d);
      scores[c] = -0.5 * factors_[c].logdet - 0.5 * z.squaredNorm();
    }
  }
  return scores;
}

std::size_t GaussianBackend::ClassifyIndex(const Eigen::VectorXd &w,
                                           ScoringMode mode) const {
  const Eigen::VectorXd s = Score(w, mode);
  std::size_t best = 0;
  for (std::size_t c = 1; c < labels_.size(); ++c)
    if (s[c] > s[best]) best = c;
  return best;
}

const std::string &GaussianBackend::Classify(const Eigen::VectorXd &w,
                                             ScoringMode mode) const {
  return labels_[ClassifyIndex(w, mode)];
}

std::string GaussianBackend::Encode() const {
  BinaryWriter w(kBackendMagic, kBackendVersion);
  w.U32(static_cast<uint32_t>(labels_.size()));
  w.U32(static_cast<uint32_t>(Dim()));
  w.F64(alpha_);
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    w.Str(labels_[c]);
    w.I32(counts_[c]);
    w.Vec(means_[c]);
    w.Mat(class_cov_[c]);
  }
  w.Mat(shared_cov_);
  for (double r : ridges_) w.F64(r);
  return w.bytes();
}

GaussianBackend GaussianBackend::Decode(std::string bytes) {
  uint32_t version;
  BinaryReader r(std::move(bytes), kBackendMagic, Stage::kBackend, &version);
  if (version != kBackendVersion)
    Fail(Stage::kBackend, ErrorKind::kVersionMismatch, "backend version ",
         version);
  GaussianBackend gb;
  const uint32_t classes = r.U32(), dim = r.U32();
  gb.alpha_ = r.F64();
  for (uint32_t c = 0; c < classes; ++c) {
    gb.labels_.push_back(r.Str());
    gb.counts_.push_back(r.I32());
    gb.means_.push_back(r.Vec());
    gb.class_cov_.push_back(r.Mat());
  }
  gb.shared_cov_ = r.Mat();
  for (uint32_t c = 0; c <= classes; ++c) r.F64();  // ridges, recomputed below
  r.ExpectEnd();
  if (gb.Dim() != static_cast<int>(dim))
    Fail(Stage::kBackend, ErrorKind::kCorruptHeader, "backend shape mismatch");
  gb.Finalize();
  return gb;
}

void GaussianBackend::Write(const std::string &path) const {
  WriteFileBytes(path, Encode(), Stage::kBackend);
}

GaussianBackend GaussianBackend::Read(const std::string &path) {
  return Decode(ReadFileBytes(path, Stage::kBackend));
}

}  // namespace asc
