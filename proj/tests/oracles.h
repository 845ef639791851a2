// tests/oracles.h

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

#ifndef ASC_TESTS_ORACLES_H_
#define ASC_TESTS_ORACLES_H_

// Reference implementations and generators shared by the unit tests and the
// acceptance binary. Written from the definitions, not from src/.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "asc/features.h"
#include "asc/gmm.h"
#include "asc/ivector.h"
#include "test-util.h"

namespace asc {
namespace testing {

// Straight transcription of the definitions: HTK mel triangles linear on the
// mel axis, natural log with floor, DCT-II with orthonormal scaling. Long
// double throughout.
inline Eigen::MatrixXd NaiveLogMelDct(const Eigen::MatrixXd &power, int n_mels,
                               int n_ceps, int fft_size, int rate) {
  auto mel = [](long double f) { return 2595.0L * std::log10(1.0L + f / 700.0L); };
  const long double top = mel(rate / 2.0L);
  std::vector<long double> vtx(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) vtx[i] = top * i / (n_mels + 1);

  Eigen::MatrixXd out(power.rows(), n_ceps);
  for (Eigen::Index t = 0; t < power.rows(); ++t) {
    std::vector<long double> logmel(n_mels);
    for (int m = 0; m < n_mels; ++m) {
      long double e = 0.0L;
      for (Eigen::Index k = 0; k < power.cols(); ++k) {
        const long double z = mel(static_cast<long double>(k) * rate / fft_size);
        long double w = 0.0L;
        if (z > vtx[m] && z <= vtx[m + 1])
          w = (z - vtx[m]) / (vtx[m + 1] - vtx[m]);
        else if (z > vtx[m + 1] && z < vtx[m + 2])
          w = (vtx[m + 2] - z) / (vtx[m + 2] - vtx[m + 1]);
        e += w * power(t, k);
      }
      logmel[m] = std::log(e + 1e-10L);
    }
    for (int c = 0; c < n_ceps; ++c) {
      long double s = 0.0L;
      for (int m = 0; m < n_mels; ++m)
        s += logmel[m] * std::cos(M_PIl * c * (m + 0.5L) / n_mels);
      s *= std::sqrt((c == 0 ? 1.0L : 2.0L) / n_mels);
      out(t, c) = static_cast<double>(s);
    }
  }
  return out;
}

inline Spectrogram RandomSpectrogram(std::mt19937_64 &rng, Eigen::Index frames,
                              int fft_size) {
  Spectrogram s;
  s.fft_size = fft_size;
  s.bin_hz = 16000.0 / fft_size;
  s.power = RandomMatrix(frames, fft_size / 2 + 1, rng).array().square();
  std::uniform_real_distribution<double> scale(-6, 2);
  s.power *= std::pow(10.0, scale(rng));
  return s;
}

inline Eigen::MatrixXd Clusters(std::mt19937_64 &rng, int per, double sep) {
  Eigen::MatrixXd x = RandomMatrix(2 * per, 2, rng);
  x.topRows(per).col(0).array() += sep;
  x.bottomRows(per).col(0).array() -= sep;
  return x;
}

using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct Instance {
  GmmModel ubm;
  TvMatrix tv;
  SufficientStats stats;
};

inline GmmModel RandomUbm(int c, int f, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.3, 2.5);
  GmmModel m;
  m.weights = Eigen::VectorXd::Constant(c, 1.0 / c);
  m.means = RandomMatrix(c, f, rng);
  m.variances.resize(c, f);
  for (Eigen::Index i = 0; i < m.variances.size(); ++i) m.variances.data()[i] = u(rng);
  m.var_floor = Eigen::VectorXd::Constant(f, 1e-3);
  return m;
}

inline TvMatrix RandomTv(const GmmModel &ubm, int rank, std::mt19937_64 &rng) {
  TvMatrix tv;
  tv.ubm_checksum = UbmChecksum(ubm);
  for (int c = 0; c < ubm.NumComponents(); ++c)
    tv.blocks.push_back(RandomMatrix(ubm.Dim(), rank, rng));
  return tv;
}

inline Instance RandomInstance(std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> cd(1, 4), fd(1, 3), rd(1, 3);
  const int c = cd(rng), f = fd(rng), r = std::min(rd(rng), c * f);
  Instance in;
  in.ubm = RandomUbm(c, f, rng);
  in.tv = RandomTv(in.ubm, r, rng);
  std::uniform_real_distribution<double> n(0.0, 30.0);
  in.stats.n.resize(c);
  for (int i = 0; i < c; ++i) in.stats.n[i] = n(rng);
  in.stats.f = RandomMatrix(c, f, rng, 3.0);
  return in;
}

// Posterior of w in the full supervector model: observations f (CF) with
// per-entry precision n_c / sigma_c^2 and mean N T w. Dense long double
// solve, no block structure exploited.
inline VectorL DensePosteriorMean(const Instance &in) {
  const int c = in.ubm.NumComponents(), f = in.ubm.Dim(), r = in.tv.Rank();
  MatrixL t(c * f, r), nsig(c * f, c * f), sig_inv(c * f, c * f);
  VectorL fv(c * f);
  nsig.setZero();
  sig_inv.setZero();
  for (int k = 0; k < c; ++k)
    for (int d = 0; d < f; ++d) {
      const int i = k * f + d;
      for (int j = 0; j < r; ++j) t(i, j) = in.tv.blocks[k](d, j);
      sig_inv(i, i) = 1.0L / in.ubm.variances(k, d);
      nsig(i, i) = in.stats.n[k] * sig_inv(i, i);
      fv[i] = in.stats.f(k, d);
    }
  const MatrixL prec = MatrixL::Identity(r, r) + t.transpose() * nsig * t;
  return prec.fullPivLu().solve(t.transpose() * sig_inv * fv);
}

inline double SubspaceAngleDeg(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  // Largest principal angle between column spaces.
  const Eigen::MatrixXd qa = a.householderQr().householderQ() *
                             Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd qb = b.householderQr().householderQ() *
                             Eigen::MatrixXd::Identity(b.rows(), b.cols());
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(qa.transpose() * qb);
  const double smin = std::min(1.0, svd.singularValues().minCoeff());
  return std::acos(smin) * 180.0 / M_PI;
}

inline Eigen::MatrixXd Stack(const TvMatrix &tv) {
  Eigen::MatrixXd s(tv.NumComponents() * tv.Dim(), tv.Rank());
  for (int c = 0; c < tv.NumComponents(); ++c)
    s.middleRows(c * tv.Dim(), tv.Dim()) = tv.blocks[c];
  return s;
}

// Statistics drawn from s = m + T w with hard alignments: f_c is the sum of
// n_c centered frames, i.e. N(n_c T_c w, n_c Sigma_c).
inline std::vector<SufficientStats> Generate(const GmmModel &ubm, const TvMatrix &tv,
                                      int count, double frames,
                                      std::mt19937_64 &rng,
                                      std::vector<Eigen::VectorXd> *truth) {
  std::normal_distribution<double> g;
  std::vector<SufficientStats> out;
  for (int r = 0; r < count; ++r) {
    Eigen::VectorXd w(tv.Rank());
    for (auto &v : w) v = g(rng);
    SufficientStats s;
    s.n = Eigen::VectorXd::Constant(ubm.NumComponents(), frames);
    s.f.resize(ubm.NumComponents(), ubm.Dim());
    for (int c = 0; c < ubm.NumComponents(); ++c) {
      const Eigen::VectorXd mean = frames * tv.blocks[c] * w;
      for (int d = 0; d < ubm.Dim(); ++d)
        s.f(c, d) = mean[d] + std::sqrt(frames * ubm.variances(c, d)) * g(rng);
    }
    out.push_back(std::move(s));
    truth->push_back(w);
  }
  return out;
}

}  // namespace testing
}  // namespace asc

#endif  // ASC_TESTS_ORACLES_H_
