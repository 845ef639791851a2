// include/asc/ivector.h

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

#ifndef ASC_IVECTOR_H_
#define ASC_IVECTOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asc/gmm.h"

namespace asc {

// Total-variability matrix T, one F x R block per UBM component, bound to
// the UBM it was trained against by a checksum of the UBM's encoding.
struct TvMatrix {
  std::vector<Eigen::MatrixXd> blocks;
  uint64_t ubm_checksum = 0;
  uint64_t seed = 0;

  int NumComponents() const { return static_cast<int>(blocks.size()); }
  int Dim() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].rows()); }
  int Rank() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].cols()); }
};

uint64_t UbmChecksum(const GmmModel &ubm);

struct IVector {
  Eigen::VectorXd w;
  double posterior_precision_logdet = 0.0;
};

// Posterior of w given statistics:
//   L = I + sum_c n_c T_c' S_c^-1 T_c,   w = L^-1 sum_c T_c' S_c^-1 f_c.
// Holds the per-component products so extraction costs O(C R^2 + R^3).
class IvectorExtractor {
 public:
  IvectorExtractor(const TvMatrix &tv, const GmmModel &ubm);

  IVector Extract(const SufficientStats &stats) const;

  struct Posterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  // L^-1
    Eigen::VectorXd linear;      // sum_c T_c' S_c^-1 f_c
    double precision_logdet = 0.0;
  };
  Posterior ComputePosterior(const SufficientStats &stats) const;

  int Rank() const { return rank_; }

 private:
  int rank_ = 0;
  int dim_ = 0;
  std::vector<Eigen::MatrixXd> tt_scaled_;  // T_c' S_c^-1, R x F
  std::vector<Eigen::MatrixXd> quadratic_;  // T_c' S_c^-1 T_c, R x R
};

// Convenience wrapper; builds an extractor per call.
IVector ExtractIvector(const TvMatrix &tv, const GmmModel &ubm,
                       const SufficientStats &stats);

enum class DegeneratePolicy { kError, kRandomFallback };

struct TvTrainOptions {
  int rank = 150;
  int num_iters = 5;
  uint64_t seed = 0;
  double count_floor = 1e-2;  // n_floor in the PCA residual normalization
  DegeneratePolicy degenerate = DegeneratePolicy::kRandomFallback;
  int num_threads = 1;
};

// PCA over per-recording whitened residual supervectors
// (f_c / max(n_c, count_floor)) / sqrt(var_c). Columns are the top principal
// directions scaled by singular value / sqrt(#recordings), un-whitened.
TvMatrix InitTvPca(const std::vector<SufficientStats> &stats,
                   const GmmModel &ubm, const TvTrainOptions &opts);

struct TvTrainResult {
  TvMatrix tv;
  // sum_r (b_r' w_r - log|L_r|) / 2: the log marginal likelihood of the
  // statistics up to a T-independent constant. One value before each EM
  // iteration, plus the final one.
  std::vector<double> objective;
};

TvTrainResult TrainTv(const std::vector<SufficientStats> &stats,
                      const GmmModel &ubm, const TvTrainOptions &opts);

double TvObjective(const IvectorExtractor &extractor,
                   const std::vector<SufficientStats> &stats);

std::string EncodeTv(const TvMatrix &tv);
TvMatrix DecodeTv(std::string bytes);
void WriteTv(const std::string &path, const TvMatrix &tv);
TvMatrix ReadTv(const std::string &path);

// Batch file mapping recording id -> (label, iVector).
struct IvectorSet {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<std::string> conditions;
  std::vector<Eigen::VectorXd> vectors;
};
std::string EncodeIvectorSet(const IvectorSet &set);
IvectorSet DecodeIvectorSet(std::string bytes);
void WriteIvectorSet(const std::string &path, const IvectorSet &set);
IvectorSet ReadIvectorSet(const std::string &path);

}  // namespace asc

#endif  // ASC_IVECTOR_H_
