// include/asc/gmm.h

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

#ifndef ASC_GMM_H_
#define ASC_GMM_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace asc {

// Diagonal-covariance GMM used as the universal background model.
struct GmmModel {
  Eigen::VectorXd weights;    // C, sums to 1
  Eigen::MatrixXd means;      // C x F
  Eigen::MatrixXd variances;  // C x F, >= var_floor per dimension
  Eigen::VectorXd var_floor;  // F
  uint64_t seed = 0;          // k-means++ seed the model was trained with

  int NumComponents() const { return static_cast<int>(weights.size()); }
  int Dim() const { return static_cast<int>(means.cols()); }
  void Check() const;
};

// Precomputed per-component terms for fast evaluation:
//   log w_c N(x) = gconst_c + x . (mu_c / v_c) - 0.5 x^2 . (1 / v_c)
class GmmEvaluator {
 public:
  explicit GmmEvaluator(const GmmModel &model);

  // T x C matrix of log(w_c N(x_t; mu_c, v_c)).
  Eigen::MatrixXd ComponentLogLikes(const Eigen::MatrixXd &frames) const;
  // Converts the output of ComponentLogLikes into posteriors in place and
  // returns the per-frame total log-likelihoods.
  static Eigen::VectorXd PosteriorsInPlace(Eigen::MatrixXd *loglikes);

 private:
  Eigen::MatrixXd linear_;     // F x C
  Eigen::MatrixXd quadratic_;  // F x C
  Eigen::RowVectorXd gconst_;  // C
};

// log sum_c w_c N(frame; mu_c, diag v_c), via log-sum-exp.
double LogLikelihood(const GmmModel &model, const Eigen::VectorXd &frame);

struct UbmTrainOptions {
  int num_components = 256;
  int num_iters = 25;
  int kmeans_iters = 5;
  uint64_t seed = 0;
  double var_floor_scale = 1e-3;  // times the global per-dimension variance
  int num_threads = 1;
};

struct UbmTrainResult {
  GmmModel model;
  // Mean per-frame log-likelihood at the start of each EM iteration, plus the
  // value for the final model.
  std::vector<double> avg_loglikes;
};

UbmTrainResult TrainUbm(const Eigen::MatrixXd &frames,
                        const UbmTrainOptions &opts);

// Zeroth- and first-order Baum-Welch statistics, first order centered on the
// UBM means.
struct SufficientStats {
  Eigen::VectorXd n;  // C
  Eigen::MatrixXd f;  // C x F

  SufficientStats &operator+=(const SufficientStats &other);
  SufficientStats Scaled(double factor) const;
};

SufficientStats AccumulateStats(const GmmModel &model,
                                const Eigen::MatrixXd &frames,
                                int num_threads = 1);

std::string EncodeGmm(const GmmModel &model);
GmmModel DecodeGmm(std::string bytes);
void WriteGmm(const std::string &path, const GmmModel &model);
GmmModel ReadGmm(const std::string &path);

}  // namespace asc

#endif  // ASC_GMM_H_
