// src/gmm.cc

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

#include "asc/gmm.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "asc/binary-io.h"
#include "asc/common.h"

namespace asc {

namespace {

constexpr const char *kGmmMagic = "ASCUBM";
constexpr uint32_t kGmmVersion = 1;
// Frames per E-step chunk. Fixed so the reduction order never depends on the
// number of threads.
constexpr std::size_t kChunkFrames = 2048;

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void CheckFinite(const Eigen::MatrixXd &frames) {
  if (!frames.allFinite())
    Fail(Stage::kUbm, ErrorKind::kNonFinite, "features contain NaN or Inf");
}

// Squared Euclidean distances, frames x centers.
Eigen::MatrixXd SquaredDistances(const Eigen::MatrixXd &x,
                                 const Eigen::MatrixXd &centers) {
  Eigen::MatrixXd d = -2.0 * x * centers.transpose();
  d.colwise() += x.rowwise().squaredNorm();
  d.rowwise() += centers.rowwise().squaredNorm().transpose();
  return d.cwiseMax(0.0);
}

Eigen::MatrixXd KMeansPlusPlus(const Eigen::MatrixXd &x, int k,
                               std::mt19937_64 *rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = x.row(pick(*rng));
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double target = unit(*rng) * total;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(*rng);
    }
    centers.row(c) = x.row(chosen);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

std::vector<int> Assign(const Eigen::MatrixXd &x, const Eigen::MatrixXd &centers) {
  std::vector<int> a(x.rows());
  for (Eigen::Index begin = 0; begin < x.rows(); begin += kChunkFrames) {
    const Eigen::Index len = std::min<Eigen::Index>(kChunkFrames, x.rows() - begin);
    Eigen::MatrixXd d = SquaredDistances(x.middleRows(begin, len), centers);
    for (Eigen::Index i = 0; i < len; ++i) {
      Eigen::Index best;
      d.row(i).minCoeff(&best);
      a[begin + i] = static_cast<int>(best);
    }
  }
  return a;
}

struct EmAccumulators {
  Eigen::VectorXd n;
  Eigen::MatrixXd f;   // C x F
  Eigen::MatrixXd s;   // C x F
  double loglike = 0.0;
};

EmAccumulators EStep(const GmmModel &model, const Eigen::MatrixXd &x,
                     int num_threads) {
  const int c = model.NumComponents(), dim = model.Dim();
  const GmmEvaluator eval(model);
  const std::size_t num_chunks = (x.rows() + kChunkFrames - 1) / kChunkFrames;
  std::vector<EmAccumulators> parts(num_chunks);
  ParallelChunks(x.rows(), kChunkFrames, num_threads,
                 [&](std::size_t ci, std::size_t begin, std::size_t end) {
                   const auto rows = x.middleRows(begin, end - begin);
                   Eigen::MatrixXd post = eval.ComponentLogLikes(rows);
                   Eigen::VectorXd ll = GmmEvaluator::PosteriorsInPlace(&post);
                   EmAccumulators &p = parts[ci];
                   p.n = post.colwise().sum().transpose();
                   p.f = post.transpose() * rows;
                   p.s = post.transpose() * rows.array().square().matrix();
                   p.loglike = ll.sum();
                 });
  EmAccumulators acc{Eigen::VectorXd::Zero(c), Eigen::MatrixXd::Zero(c, dim),
                     Eigen::MatrixXd::Zero(c, dim), 0.0};
  for (const auto &p : parts) {
    acc.n += p.n;
    acc.f += p.f;
    acc.s += p.s;
    acc.loglike += p.loglike;
  }
  return acc;
}

void MStep(const EmAccumulators &acc, double num_frames, GmmModel *model) {
  const int c = model->NumComponents();
  // Components with (numerically) no responsibility keep their parameters
  // and end up with zero weight.
  const double min_count = 1e-10 * num_frames;
  for (int k = 0; k < c; ++k) {
    model->weights[k] = acc.n[k] / num_frames;
    if (acc.n[k] <= min_count) continue;
    Eigen::RowVectorXd mean = acc.f.row(k) / acc.n[k];
    Eigen::RowVectorXd var = acc.s.row(k) / acc.n[k] - mean.cwiseAbs2();
    model->means.row(k) = mean;
    model->variances.row(k) = var.cwiseMax(model->var_floor.transpose());
  }
  model->weights /= model->weights.sum();
}

}  // namespace

void GmmModel::Check() const {
  const Eigen::Index c = weights.size();
  if (c == 0 || means.rows() != c || variances.rows() != c ||
      variances.cols() != means.cols() || var_floor.size() != means.cols())
    Fail(Stage::kUbm, ErrorKind::kDimensionMismatch, "inconsistent GMM shapes");
  if (!(variances.array() > 0.0).all())
    Fail(Stage::kUbm, ErrorKind::kInvalidArgument, "GMM variances must be positive");
}

GmmEvaluator::GmmEvaluator(const GmmModel &model) {
  model.Check();
  const Eigen::MatrixXd inv_var = model.variances.cwiseInverse();
  linear_ = (model.means.cwiseProduct(inv_var)).transpose();
  quadratic_ = (-0.5 * inv_var).transpose();
  gconst_.resize(model.NumComponents());
  for (int c = 0; c < model.NumComponents(); ++c) {
    const double w = model.weights[c];
    gconst_[c] =
        (w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity()) -
        0.5 * (model.Dim() * kLog2Pi +
               model.variances.row(c).array().log().sum() +
               (model.means.row(c).array().square() *
                inv_var.row(c).array()).sum());
  }
}

Eigen::MatrixXd GmmEvaluator::ComponentLogLikes(
    const Eigen::MatrixXd &frames) const {
  if (frames.cols() != linear_.rows())
    Fail(Stage::kUbm, ErrorKind::kDimensionMismatch, "frame dim ",
         frames.cols(), " vs model dim ", linear_.rows());
  Eigen::MatrixXd ll = frames * linear_ +
                       frames.array().square().matrix() * quadratic_;
  ll.rowwise() += gconst_;
  return ll;
}

Eigen::VectorXd GmmEvaluator::PosteriorsInPlace(Eigen::MatrixXd *loglikes) {
  Eigen::MatrixXd &m = *loglikes;
  Eigen::VectorXd total(m.rows());
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    const double peak = m.row(t).maxCoeff();
    m.row(t) = (m.row(t).array() - peak).exp();
    const double sum = m.row(t).sum();
    m.row(t) /= sum;
    total[t] = peak + std::log(sum);
  }
  return total;
}

double LogLikelihood(const GmmModel &model, const Eigen::VectorXd &frame) {
  if (frame.size() != model.Dim())
    Fail(Stage::kUbm, ErrorKind::kDimensionMismatch, "frame dim ",
         frame.size(), " vs model dim ", model.Dim());
  Eigen::MatrixXd ll = GmmEvaluator(model).ComponentLogLikes(frame.transpose());
  return GmmEvaluator::PosteriorsInPlace(&ll)[0];
}

UbmTrainResult TrainUbm(const Eigen::MatrixXd &frames,
                        const UbmTrainOptions &opts) {
  const Eigen::Index n = frames.rows();
  const int c = opts.num_components;
  if (c < 1 || opts.num_iters < 0)
    Fail(Stage::kUbm, ErrorKind::kInvalidArgument, "bad UBM options");
  if (n < c)
    Fail(Stage::kUbm, ErrorKind::kTooShort, "UBM with ", c,
         " components needs at least as many frames, got ", n);
  CheckFinite(frames);

  const Eigen::RowVectorXd global_mean = frames.colwise().mean();
  const Eigen::RowVectorXd global_var =
      (frames.rowwise() - global_mean).array().square().colwise().mean();

  GmmModel model;
  model.seed = opts.seed;
  model.var_floor = (opts.var_floor_scale * global_var.transpose())
                        .cwiseMax(std::numeric_limits<double>::min());

  std::mt19937_64 rng(opts.seed);
  Eigen::MatrixXd centers = KMeansPlusPlus(frames, c, &rng);
  std::vector<int> assign;
  for (int it = 0; it <= opts.kmeans_iters; ++it) {
    assign = Assign(frames, centers);
    if (it == opts.kmeans_iters) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(c, frames.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(c);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[i]) += frames.row(i);
      counts[assign[i]] += 1.0;
    }
    for (int k = 0; k < c; ++k)
      if (counts[k] > 0) centers.row(k) = sums.row(k) / counts[k];
  }

  model.weights = Eigen::VectorXd::Zero(c);
  model.means = centers;
  model.variances = Eigen::MatrixXd::Zero(c, frames.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(c);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = assign[i];
    counts[k] += 1.0;
    model.variances.row(k) += (frames.row(i) - centers.row(k)).cwiseAbs2();
  }
  for (int k = 0; k < c; ++k) {
    if (counts[k] >= 2.0)
      model.variances.row(k) /= counts[k];
    else
      model.variances.row(k) = global_var;
    model.variances.row(k) =
        model.variances.row(k).cwiseMax(model.var_floor.transpose());
  }
  // Empty clusters still get a little weight so EM can revive them.
  model.weights = (counts.array() + 1.0) / (static_cast<double>(n) + c);

  UbmTrainResult result;
  for (int it = 0; it < opts.num_iters; ++it) {
    EmAccumulators acc = EStep(model, frames, opts.num_threads);
    result.avg_loglikes.push_back(acc.loglike / n);
    MStep(acc, static_cast<double>(n), &model);
  }
  result.avg_loglikes.push_back(EStep(model, frames, opts.num_threads).loglike / n);
  result.model = std::move(model);
  return result;
}

SufficientStats &SufficientStats::operator+=(const SufficientStats &other) {
  if (n.size() == 0) {
    *this = other;
    return *this;
  }
  n += other.n;
  f += other.f;
  return *this;
}

SufficientStats SufficientStats::Scaled(double factor) const {
  return {n * factor, f * factor};
}

SufficientStats AccumulateStats(const GmmModel &model,
                                const Eigen::MatrixXd &frames,
                                int num_threads) {
  if (frames.rows() == 0)
    Fail(Stage::kUbm, ErrorKind::kTooShort, "no frames to accumulate");
  if (frames.cols() != model.Dim())
    Fail(Stage::kUbm, ErrorKind::kDimensionMismatch, "feature dim ",
         frames.cols(), " vs UBM dim ", model.Dim());
  CheckFinite(frames);
  const GmmEvaluator eval(model);
  const std::size_t num_chunks = (frames.rows() + kChunkFrames - 1) / kChunkFrames;
  std::vector<SufficientStats> parts(num_chunks);
  ParallelChunks(frames.rows(), kChunkFrames, num_threads,
                 [&](std::size_t ci, std::size_t begin, std::size_t end) {
                   const auto rows = frames.middleRows(begin, end - begin);
                   Eigen::MatrixXd post = eval.ComponentLogLikes(rows);
                   GmmEvaluator::PosteriorsInPlace(&post);
                   parts[ci].n = post.colwise().sum().transpose();
                   parts[ci].f = post.transpose() * rows;
                 });
  SufficientStats stats{Eigen::VectorXd::Zero(model.NumComponents()),
                        Eigen::MatrixXd::Zero(model.NumComponents(), model.Dim())};
  for (const auto &p : parts) stats += p;
  stats.f -= stats.n.asDiagonal() * model.means;
  return stats;
}

std::string EncodeGmm(const GmmModel &model) {
  model.Check();
  BinaryWriter w(kGmmMagic, kGmmVersion);
  w.U32(static_cast<uint32_t>(model.NumComponents()));
  w.U32(static_cast<uint32_t>(model.Dim()));
  w.U64(model.seed);
  w.Vec(model.weights);
  w.Mat(model.means);
  w.Mat(model.variances);
  w.Vec(model.var_floor);
  return w.bytes();
}

GmmModel DecodeGmm(std::string bytes) {
  uint32_t version;
  BinaryReader r(std::move(bytes), kGmmMagic, Stage::kUbm, &version);
  if (version != kGmmVersion)
    Fail(Stage::kUbm, ErrorKind::kVersionMismatch, "UBM version ", version);
  GmmModel m;
  const uint32_t c = r.U32(), dim = r.U32();
  m.seed = r.U64();
  m.weights = r.Vec();
  m.means = r.Mat();
  m.variances = r.Mat();
  m.var_floor = r.Vec();
  r.ExpectEnd();
  if (m.NumComponents() != static_cast<int>(c) || m.Dim() != static_cast<int>(dim))
    Fail(Stage::kUbm, ErrorKind::kCorruptHeader, "UBM header/shape mismatch");
  m.Check();
  return m;
}

void WriteGmm(const std::string &path, const GmmModel &model) {
  WriteFileBytes(path, EncodeGmm(model), Stage::kUbm);
}

GmmModel ReadGmm(const std::string &path) {
  return DecodeGmm(ReadFileBytes(path, Stage::kUbm));
}

}  // namespace asc
