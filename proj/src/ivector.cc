// src/ivector.cc

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

#include "asc/ivector.h"

#include <cmath>
#include <random>

#include "asc/binary-io.h"
#include "asc/common.h"

namespace asc {

namespace {

constexpr const char *kTvMagic = "ASCTV";
constexpr uint32_t kTvVersion = 1;
constexpr const char *kIvecMagic = "ASCIVEC";
constexpr uint32_t kIvecVersion = 1;
// Principal directions with energy below this fraction of the leading one
// are treated as absent.
constexpr double kDegenerateEnergy = 1e-12;

void CheckStats(const SufficientStats &s, int num_components, int dim) {
  if (s.n.size() != num_components || s.f.rows() != num_components ||
      s.f.cols() != dim)
    Fail(Stage::kIvector, ErrorKind::kDimensionMismatch,
         "statistics shape does not match the extractor");
  if (!s.n.allFinite() || !s.f.allFinite())
    Fail(Stage::kIvector, ErrorKind::kNonFinite, "non-finite statistics");
}

// Whitened residual supervector of one recording, length C*F.
Eigen::VectorXd WhitenedResidual(const SufficientStats &s, const GmmModel &ubm,
                                 double count_floor) {
  const int c = ubm.NumComponents(), dim = ubm.Dim();
  Eigen::VectorXd r(static_cast<Eigen::Index>(c) * dim);
  for (int k = 0; k < c; ++k) {
    const double n = std::max(s.n[k], count_floor);
    r.segment(static_cast<Eigen::Index>(k) * dim, dim) =
        (s.f.row(k).array() / n / ubm.variances.row(k).array().sqrt())
            .transpose();
  }
  return r;
}

}  // namespace

uint64_t UbmChecksum(const GmmModel &ubm) { return Fnv1a64(EncodeGmm(ubm)); }

IvectorExtractor::IvectorExtractor(const TvMatrix &tv, const GmmModel &ubm) {
  if (tv.NumComponents() != ubm.NumComponents() || tv.Dim() != ubm.Dim())
    Fail(Stage::kIvector, ErrorKind::kDimensionMismatch,
         "T has ", tv.NumComponents(), "x", tv.Dim(), " blocks, UBM is ",
         ubm.NumComponents(), "x", ubm.Dim());
  if (tv.ubm_checksum != UbmChecksum(ubm))
    Fail(Stage::kIvector, ErrorKind::kChecksumMismatch,
         "iVector extractor was trained against a different UBM");
  rank_ = tv.Rank();
  dim_ = tv.Dim();
  tt_scaled_.resize(tv.NumComponents());
  quadratic_.resize(tv.NumComponents());
  for (int c = 0; c < tv.NumComponents(); ++c) {
    const Eigen::VectorXd inv_var = ubm.variances.row(c).cwiseInverse().transpose();
    tt_scaled_[c] = tv.blocks[c].transpose() * inv_var.asDiagonal();
    quadratic_[c] = tt_scaled_[c] * tv.blocks[c];
  }
}

IvectorExtractor::Posterior IvectorExtractor::ComputePosterior(
    const SufficientStats &stats) const {
  CheckStats(stats, static_cast<int>(quadratic_.size()), dim_);
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(rank_, rank_);
  Eigen::VectorXd linear = Eigen::VectorXd::Zero(rank_);
  for (std::size_t c = 0; c < quadratic_.size(); ++c) {
    if (stats.n[c] != 0.0) precision.noalias() += stats.n[c] * quadratic_[c];
    linear.noalias() += tt_scaled_[c] * stats.f.row(c).transpose();
  }
  // Identity plus PSD terms: Cholesky cannot fail on valid statistics.
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    Fail(Stage::kIvector, ErrorKind::kNonFinite,
         "iVector posterior precision is not positive definite");
  Posterior p;
  p.linear = linear;
  p.mean = llt.solve(linear);
  p.covariance = llt.solve(Eigen::MatrixXd::Identity(rank_, rank_));
  p.precision_logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return p;
}

IVector IvectorExtractor::Extract(const SufficientStats &stats) const {
  Posterior p = ComputePosterior(stats);
  return {std::move(p.mean), p.precision_logdet};
}

IVector ExtractIvector(const TvMatrix &tv, const GmmModel &ubm,
                       const SufficientStats &stats) {
  return IvectorExtractor(tv, ubm).Extract(stats);
}

TvMatrix InitTvPca(const std::vector<SufficientStats> &stats,
                   const GmmModel &ubm, const TvTrainOptions &opts) {
  const int c = ubm.NumComponents(), dim = ubm.Dim(), rank = opts.rank;
  const Eigen::Index super_dim = static_cast<Eigen::Index>(c) * dim;
  if (rank < 1 || rank > super_dim)
    Fail(Stage::kIvector, ErrorKind::kInvalidArgument, "rank ", rank,
         " must lie in [1, ", super_dim, "]");
  if (static_cast<int>(stats.size()) < rank)
    Fail(Stage::kIvector, ErrorKind::kTooShort, "PCA initialization of rank ",
         rank, " needs at least as many recordings, got ", stats.size());

  const Eigen::Index num = static_cast<Eigen::Index>(stats.size());
  Eigen::MatrixXd residuals(num, super_dim);
  for (Eigen::Index r = 0; r < num; ++r) {
    CheckStats(stats[r], c, dim);
    residuals.row(r) = WhitenedResidual(stats[r], ubm, opts.count_floor).transpose();
  }
  residuals.rowwise() -= residuals.colwise().mean();

  // Principal directions via whichever Gram matrix is smaller. Eigen returns
  // eigenvalues in increasing order.
  Eigen::MatrixXd directions(super_dim, rank);
  Eigen::VectorXd energies(rank);
  if (num <= super_dim) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(residuals *
                                                       residuals.transpose());
    for (int i = 0; i < rank; ++i) {
      const Eigen::Index j = num - 1 - i;
      energies[i] = std::max(eig.eigenvalues()[j], 0.0);
      directions.col(i) = residuals.transpose() * eig.eigenvectors().col(j);
      const double norm = directions.col(i).norm();
      if (norm > 0.0) directions.col(i) /= norm;
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(residuals.transpose() *
                                                       residuals);
    for (int i = 0; i < rank; ++i) {
      const Eigen::Index j = super_dim - 1 - i;
      energies[i] = std::max(eig.eigenvalues()[j], 0.0);
      directions.col(i) = eig.eigenvectors().col(j);
    }
  }

  // Columns beyond the data's rank are either an error or seeded random
  // directions orthogonal to everything before them.
  const double lead = energies[0];
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  int valid = 0;
  for (int i = 0; i < rank; ++i) {
    if (lead > 0.0 && energies[i] > kDegenerateEnergy * lead) {
      ++valid;
      continue;
    }
    if (opts.degenerate == DegeneratePolicy::kError)
      Fail(Stage::kIvector, ErrorKind::kDegenerateData,
           "recording residuals span only ", valid,
           " dimensions, fewer than rank ", rank);
    Eigen::VectorXd v(super_dim);
    for (Eigen::Index k = 0; k < super_dim; ++k) v[k] = gauss(rng);
    for (int j = 0; j < i; ++j)
      v -= directions.col(j).dot(v) * directions.col(j);
    directions.col(i) = v.normalized();
  }
  if (valid < rank)
    Warn("PCA initialization: residuals span ", valid, " of ", rank,
         " dimensions; remaining columns are random");

  // Sign convention: largest-magnitude entry of each column is positive.
  for (int i = 0; i < rank; ++i) {
    Eigen::Index k;
    directions.col(i).cwiseAbs().maxCoeff(&k);
    if (directions(k, i) < 0.0) directions.col(i) *= -1.0;
  }

  const double fallback_scale =
      valid > 0 ? std::sqrt(energies[valid - 1] / num) : 1.0;
  TvMatrix tv;
  tv.seed = opts.seed;
  tv.ubm_checksum = UbmChecksum(ubm);
  tv.blocks.assign(c, Eigen::MatrixXd(dim, rank));
  for (int i = 0; i < rank; ++i) {
    const double scale = i < valid ? std::sqrt(energies[i] / num) : fallback_scale;
    for (int k = 0; k < c; ++k)
      tv.blocks[k].col(i) =
          scale * directions.col(i).segment(static_cast<Eigen::Index>(k) * dim, dim)
                      .cwiseProduct(ubm.variances.row(k).cwiseSqrt().transpose());
  }
  return tv;
}

double TvObjective(const IvectorExtractor &extractor,
                   const std::vector<SufficientStats> &stats) {
  double total = 0.0;
  for (const auto &s : stats) {
    const auto p = extractor.ComputePosterior(s);
    total += 0.5 * (p.linear.dot(p.mean) - p.precision_logdet);
  }
  return total;
}

TvTrainResult TrainTv(const std::vector<SufficientStats> &stats,
                      const GmmModel &ubm, const TvTrainOptions &opts) {
  TvTrainResult result;
  result.tv = InitTvPca(stats, ubm, opts);
  TvMatrix &tv = result.tv;
  const int c = ubm.NumComponents(), dim = ubm.Dim(), rank = opts.rank;
  const std::size_t num = stats.size();

  for (int it = 0; it <= opts.num_iters; ++it) {
    const IvectorExtractor extractor(tv, ubm);
    // E-step: posterior mean and second moment per recording.
    std::vector<Eigen::VectorXd> means(num);
    std::vector<Eigen::MatrixXd> moments(num);
    std::vector<double> objective(num);
    ParallelChunks(num, 8, opts.num_threads,
                   [&](std::size_t, std::size_t begin, std::size_t end) {
                     for (std::size_t r = begin; r < end; ++r) {
                       auto p = extractor.ComputePosterior(stats[r]);
                       objective[r] =
                           0.5 * (p.linear.dot(p.mean) - p.precision_logdet);
                       moments[r] = p.covariance + p.mean * p.mean.transpose();
                       means[r] = std::move(p.mean);
                     }
                   });
    double total = 0.0;
    for (double o : objective) total += o;
    result.objective.push_back(total);
    if (it == opts.num_iters) break;

    // M-step, per component: T_c = (sum_r f_c w') (sum_r n_c E[ww'])^-1.
    std::vector<int> skipped(c, 0);
    ParallelChunks(c, 1, opts.num_threads,
                   [&](std::size_t k, std::size_t, std::size_t) {
                     Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rank, rank);
                     Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, rank);
                     double count = 0.0;
                     for (std::size_t r = 0; r < num; ++r) {
                       const double n = stats[r].n[k];
                       count += n;
                       a.noalias() += n * moments[r];
                       b.noalias() += stats[r].f.row(k).transpose() *
                                      means[r].transpose();
                     }
                     Eigen::LLT<Eigen::MatrixXd> llt(a);
                     if (count <= 0.0 || llt.info() != Eigen::Success) {
                       skipped[k] = 1;
                       return;
                     }
                     tv.blocks[k] = llt.solve(b.transpose()).transpose();
                   });
    for (int k = 0; k < c; ++k)
      if (skipped[k])
        Warn("T update: component ", k,
             " has a singular accumulator (no occupancy); keeping its block");
  }
  return result;
}

std::string EncodeTv(const TvMatrix &tv) {
  BinaryWriter w(kTvMagic, kTvVersion);
  w.U32(static_cast<uint32_t>(tv.NumComponents()));
  w.U32(static_cast<uint32_t>(tv.Dim()));
  w.U32(static_cast<uint32_t>(tv.Rank()));
  w.U64(tv.ubm_checksum);
  w.U64(tv.seed);
  for (const auto &b : tv.blocks) w.Mat(b);
  return w.bytes();
}

TvMatrix DecodeTv(std::string bytes) {
  uint32_t version;
  BinaryReader r(std::move(bytes), kTvMagic, Stage::kIvector, &version);
  if (version != kTvVersion)
    Fail(Stage::kIvector, ErrorKind::kVersionMismatch, "T version ", version);
  TvMatrix tv;
  const uint32_t c = r.U32(), dim = r.U32(), rank = r.U32();
  tv.ubm_checksum = r.U64();
  tv.seed = r.U64();
  for (uint32_t k = 0; k < c; ++k) {
    tv.blocks.push_back(r.Mat());
    if (tv.blocks.back().rows() != dim || tv.blocks.back().cols() != rank)
      Fail(Stage::kIvector, ErrorKind::kCorruptHeader, "T block shape mismatch");
  }
  r.ExpectEnd();
  return tv;
}

void WriteTv(const std::string &path, const TvMatrix &tv) {
  WriteFileBytes(path, EncodeTv(tv), Stage::kIvector);
}

TvMatrix ReadTv(const std::string &path) {
  return DecodeTv(ReadFileBytes(path, Stage::kIvector));
}

std::string EncodeIvectorSet(const IvectorSet &set) {
  BinaryWriter w(kIvecMagic, kIvecVersion);
  w.U64(set.ids.size());
  for (std::size_t i = 0; i < set.ids.size(); ++i) {
    w.Str(set.ids[i]);
    w.Str(set.labels[i]);
    w.Str(set.conditions[i]);
    w.Vec(set.vectors[i]);
  }
  return w.bytes();
}

IvectorSet DecodeIvectorSet(std::string bytes) {
  uint32_t version;
  BinaryReader r(std::move(bytes), kIvecMagic, Stage::kIvector, &version);
  if (version != kIvecVersion)
    Fail(Stage::kIvector, ErrorKind::kVersionMismatch, "iVector set version ",
         version);
  IvectorSet set;
  const uint64_t n = r.U64();
  for (uint64_t i = 0; i < n; ++i) {
    set.ids.push_back(r.Str());
    set.labels.push_back(r.Str());
    set.conditions.push_back(r.Str());
    set.vectors.push_back(r.Vec());
  }
  r.ExpectEnd();
  return set;
}

void WriteIvectorSet(const std::string &path, const IvectorSet &set) {
  WriteFileBytes(path, EncodeIvectorSet(set), Stage::kIvector);
}

IvectorSet ReadIvectorSet(const std::string &path) {
  return DecodeIvectorSet(ReadFileBytes(path, Stage::kIvector));
}

}  // namespace asc
