// include/asc/backend.h

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

#ifndef ASC_BACKEND_H_
#define ASC_BACKEND_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace asc {

enum class ScoringMode {
  kClassDependent,  // blended per-class covariances, with log-determinant
  kShared,          // shared covariance only, no log-determinant
};

// Gaussian backend over iVectors. Each class c has mean mu_c and ML
// covariance S_c; the shared covariance S_s is the unweighted mean of the
// S_c and the scoring covariance is alpha * S_s + (1 - alpha) * S_c.
class GaussianBackend {
 public:
  GaussianBackend() = default;

  // Classes are ordered by label (lexicographic). Each class needs at least
  // two vectors.
  static GaussianBackend Train(const std::vector<Eigen::VectorXd> &ivectors,
                               const std::vector<std::string> &labels,
                               double alpha);

  // Per-class scores, in label order:
  //   kClassDependent: -1/2 log|S~_c| - 1/2 (w - mu_c)' S~_c^-1 (w - mu_c)
  //   kShared:         -1/2 (w - mu_c)' S_s^-1 (w - mu_c)
  Eigen::VectorXd Score(const Eigen::VectorXd &w,
                        ScoringMode mode = ScoringMode::kClassDependent) const;

  // Label of the maximal score; ties go to the earlier label.
  const std::string &Classify(const Eigen::VectorXd &w,
                              ScoringMode mode = ScoringMode::kClassDependent) const;
  std::size_t ClassifyIndex(const Eigen::VectorXd &w,
                            ScoringMode mode = ScoringMode::kClassDependent) const;

  const std::vector<std::string> &labels() const { return labels_; }
  const std::vector<Eigen::VectorXd> &means() const { return means_; }
  const std::vector<Eigen::MatrixXd> &class_covariances() const { return class_cov_; }
  const Eigen::MatrixXd &shared_covariance() const { return shared_cov_; }
  // Blended covariances before any ridge repair.
  const std::vector<Eigen::MatrixXd> &blended_covariances() const { return blended_; }
  // Ridge added to each blended covariance (and, last entry, to the shared
  // one) to make it factorizable; 0 when none was needed.
  const std::vector<double> &ridges() const { return ridges_; }
  const std::vector<int> &class_counts() const { return counts_; }
  double alpha() const { return alpha_; }
  int Dim() const { return static_cast<int>(shared_cov_.rows()); }

  std::string Encode() const;
  static GaussianBackend Decode(std::string bytes);
  void Write(const std::string &path) const;
  static GaussianBackend Read(const std::string &path);

 private:
  // Builds blended covariances, factorizations and log-determinants.
  void Finalize();

  struct Factor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double logdet = 0.0;
  };
  static Factor FactorWithRidge(const Eigen::MatrixXd &cov, double *ridge);

  std::vector<std::string> labels_;
  std::vector<int> counts_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> class_cov_;
  Eigen::MatrixXd shared_cov_;
  double alpha_ = 0.7;

  std::vector<Eigen::MatrixXd> blended_;
  std::vector<double> ridges_;
  std::vector<Factor> factors_;
  Factor shared_factor_;
};

}  // namespace asc

#endif  // ASC_BACKEND_H_
