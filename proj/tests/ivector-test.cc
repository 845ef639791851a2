// tests/ivector-test.cc

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

#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "asc/binary-io.h"
#include "asc/common.h"
#include "asc/ivector.h"
#include "oracles.h"
#include "test-util.h"

using namespace asc;
using namespace asc::testing;
using asc::testing::RandomMatrix;

TEST_CASE("scalar closed form") {
  GmmModel ubm;
  ubm.weights = Eigen::VectorXd::Ones(1);
  ubm.means = Eigen::MatrixXd::Zero(1, 1);
  ubm.variances = Eigen::MatrixXd::Ones(1, 1);
  ubm.var_floor = Eigen::VectorXd::Constant(1, 1e-3);
  TvMatrix tv;
  tv.blocks = {Eigen::MatrixXd::Ones(1, 1)};
  tv.ubm_checksum = UbmChecksum(ubm);
  SufficientStats s{Eigen::VectorXd::Constant(1, 4.0), Eigen::MatrixXd::Constant(1, 1, 2.0)};
  const IVector w = ExtractIvector(tv, ubm, s);
  CHECK(w.w[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(w.posterior_precision_logdet == doctest::Approx(std::log(5.0)));
}

TEST_CASE("zero statistics give the prior mean") {
  std::mt19937_64 rng(1);
  const GmmModel ubm = RandomUbm(4, 3, rng);
  const TvMatrix tv = RandomTv(ubm, 3, rng);
  SufficientStats s{Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Zero(4, 3)};
  const IVector w = ExtractIvector(tv, ubm, s);
  for (int i = 0; i < 3; ++i) CHECK(w.w[i] == 0.0);
  CHECK(w.posterior_precision_logdet == doctest::Approx(0.0));
}

TEST_CASE("matches the dense posterior oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance in = RandomInstance(rng);
    const IVector w = ExtractIvector(in.tv, in.ubm, in.stats);
    const VectorL ref = DensePosteriorMean(in);
    for (int i = 0; i < in.tv.Rank(); ++i)
      CHECK(std::abs(w.w[i] - static_cast<double>(ref[i])) < 1e-8);
  }
}

TEST_CASE("component order does not matter") {
  std::mt19937_64 rng(3);
  const GmmModel ubm = RandomUbm(6, 3, rng);
  const TvMatrix tv = RandomTv(ubm, 3, rng);
  SufficientStats s{Eigen::VectorXd::Constant(6, 5.0), RandomMatrix(6, 3, rng)};
  std::vector<int> perm(6);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  GmmModel pu = ubm;
  TvMatrix pt = tv;
  SufficientStats ps = s;
  for (int i = 0; i < 6; ++i) {
    pu.weights[i] = ubm.weights[perm[i]];
    pu.means.row(i) = ubm.means.row(perm[i]);
    pu.variances.row(i) = ubm.variances.row(perm[i]);
    pt.blocks[i] = tv.blocks[perm[i]];
    ps.n[i] = s.n[perm[i]];
    ps.f.row(i) = s.f.row(perm[i]);
  }
  pt.ubm_checksum = UbmChecksum(pu);
  CHECK((ExtractIvector(tv, ubm, s).w - ExtractIvector(pt, pu, ps).w)
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("less evidence shrinks toward the prior") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance in = RandomInstance(rng);
    if (in.stats.f.isZero()) continue;
    const double full = ExtractIvector(in.tv, in.ubm, in.stats).w.norm();
    for (double a : {0.1, 0.5, 0.9})
      CHECK(ExtractIvector(in.tv, in.ubm, in.stats.Scaled(a)).w.norm() < full);
  }
}

TEST_CASE("extraction never fails on valid statistics") {
  std::mt19937_64 rng(5);
  const GmmModel ubm = RandomUbm(8, 4, rng);
  const TvMatrix tv = RandomTv(ubm, 6, rng);
  const IvectorExtractor ex(tv, ubm);
  for (double n : {0.0, 1e-9, 1.0, 1e6, 1e9}) {
    SufficientStats s{Eigen::VectorXd::Constant(8, n), RandomMatrix(8, 4, rng, n + 1)};
    const auto p = ex.ComputePosterior(s);
    CHECK(p.mean.allFinite());
    CHECK(p.covariance.allFinite());
    CHECK(p.precision_logdet >= 0.0);
  }
}

TEST_CASE("extractor errors") {
  std::mt19937_64 rng(6);
  const GmmModel ubm = RandomUbm(3, 2, rng);
  TvMatrix tv = RandomTv(ubm, 2, rng);
  tv.ubm_checksum ^= 1;
  try {
    IvectorExtractor ex(tv, ubm);
    FAIL("checksum accepted");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kChecksumMismatch);
    CHECK(e.stage() == Stage::kIvector);
  }
  tv.ubm_checksum ^= 1;
  const IvectorExtractor ex(tv, ubm);
  SufficientStats bad{Eigen::VectorXd::Ones(3), Eigen::MatrixXd::Ones(3, 2)};
  bad.f(1, 1) = INFINITY;
  CHECK_THROWS_AS(ex.Extract(bad), Error);
  SufficientStats shape{Eigen::VectorXd::Ones(2), Eigen::MatrixXd::Ones(2, 2)};
  CHECK_THROWS_AS(ex.Extract(shape), Error);
}

TEST_CASE("PCA initialization on rank-one residuals") {
  std::mt19937_64 rng(7);
  const GmmModel ubm = RandomUbm(3, 2, rng);
  const Eigen::VectorXd d = RandomMatrix(6, 1, rng);
  std::normal_distribution<double> g;
  std::vector<SufficientStats> stats;
  for (int r = 0; r < 12; ++r) {
    SufficientStats s;
    s.n = Eigen::VectorXd::Constant(3, 10.0);
    const double a = g(rng);
    s.f.resize(3, 2);
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 2; ++k) s.f(c, k) = 10.0 * a * d[c * 2 + k];
    stats.push_back(s);
  }
  TvTrainOptions o;
  o.rank = 3;
  o.seed = 5;
  const TvMatrix tv = InitTvPca(stats, ubm, o);
  const Eigen::MatrixXd t = Stack(tv);
  CHECK(std::abs(t.col(0).normalized().dot(d.normalized())) > 0.999);

  // The other columns are orthogonal to the first in whitened coordinates.
  Eigen::VectorXd isd(6);
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < 2; ++k) isd[c * 2 + k] = 1.0 / std::sqrt(ubm.variances(c, k));
  const Eigen::VectorXd u0 = t.col(0).cwiseProduct(isd).normalized();
  for (int i = 1; i < 3; ++i)
    CHECK(std::abs(t.col(i).cwiseProduct(isd).normalized().dot(u0)) < 1e-9);

  // Same seed, same fill.
  CHECK(EncodeTv(InitTvPca(stats, ubm, o)) == EncodeTv(tv));

  o.degenerate = DegeneratePolicy::kError;
  try {
    InitTvPca(stats, ubm, o);
    FAIL("degenerate data accepted");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kDegenerateData);
  }
}

TEST_CASE("PCA initialization: duplicates and size limits") {
  std::mt19937_64 rng(8);
  const GmmModel ubm = RandomUbm(2, 2, rng);
  SufficientStats s{Eigen::VectorXd::Constant(2, 3.0), RandomMatrix(2, 2, rng)};
  std::vector<SufficientStats> dup(5, s);
  TvTrainOptions o;
  o.rank = 2;
  const TvMatrix fb = InitTvPca(dup, ubm, o);
  CHECK(Stack(fb).allFinite());
  const Eigen::MatrixXd st = Stack(fb);
  CHECK(st.col(0).norm() > 0.0);
  o.degenerate = DegeneratePolicy::kError;
  CHECK_THROWS_AS(InitTvPca(dup, ubm, o), Error);

  o.rank = 3;
  CHECK_THROWS_AS(InitTvPca(std::vector<SufficientStats>(2, s), ubm, o), Error);
  o.rank = 5;
  CHECK_THROWS_AS(InitTvPca(std::vector<SufficientStats>(9, s), ubm, o), Error);
}

TEST_CASE("rank 150 is accepted for a 256 x 76 supervector") {
  // Only the shape check matters here; the data is tiny on purpose.
  GmmModel ubm;
  ubm.weights = Eigen::VectorXd::Constant(256, 1.0 / 256);
  ubm.means = Eigen::MatrixXd::Zero(256, 76);
  ubm.variances = Eigen::MatrixXd::Ones(256, 76);
  ubm.var_floor = Eigen::VectorXd::Constant(76, 1e-3);
  std::mt19937_64 rng(9);
  std::vector<SufficientStats> stats;
  for (int r = 0; r < 150; ++r)
    stats.push_back({Eigen::VectorXd::Constant(256, 2.0), RandomMatrix(256, 76, rng)});
  TvTrainOptions o;
  CHECK(o.rank == 150);
  const TvMatrix tv = InitTvPca(stats, ubm, o);
  CHECK(tv.Rank() == 150);
  CHECK(tv.Dim() == 76);
  CHECK(tv.NumComponents() == 256);
}

TEST_CASE("train_tv") {
  std::mt19937_64 rng(10);
  const GmmModel ubm = RandomUbm(2, 2, rng);
  TvMatrix truth = RandomTv(ubm, 1, rng);
  std::vector<Eigen::VectorXd> w_true;
  const auto stats = Generate(ubm, truth, 400, 20.0, rng, &w_true);

  TvTrainOptions o;
  o.rank = 1;
  o.num_iters = 10;
  o.seed = 3;
  const TvTrainResult r = TrainTv(stats, ubm, o);
  CHECK(SubspaceAngleDeg(Stack(r.tv), Stack(truth)) < 5.0);
  REQUIRE(r.objective.size() == 11);
  for (std::size_t i = 1; i < r.objective.size(); ++i)
    CHECK(r.objective[i] >= r.objective[i - 1] - 1e-6 * std::abs(r.objective[i - 1]));

  o.num_iters = 0;
  CHECK(EncodeTv(TrainTv(stats, ubm, o).tv) == EncodeTv(InitTvPca(stats, ubm, o)));

  o.num_iters = 3;
  o.num_threads = 3;
  TvTrainOptions single = o;
  single.num_threads = 1;
  CHECK(EncodeTv(TrainTv(stats, ubm, o).tv) == EncodeTv(TrainTv(stats, ubm, single).tv));
}

TEST_CASE("train_tv skips components nobody visits") {
  std::mt19937_64 rng(11);
  const GmmModel ubm = RandomUbm(3, 2, rng);
  TvMatrix truth = RandomTv(ubm, 2, rng);
  std::vector<Eigen::VectorXd> w;
  auto stats = Generate(ubm, truth, 50, 10.0, rng, &w);
  for (auto &s : stats) {
    s.n[2] = 0.0;
    s.f.row(2).setZero();
  }
  std::vector<std::string> warnings;
  SetWarningSink([&](std::string_view m) { warnings.emplace_back(m); });
  TvTrainOptions o;
  o.rank = 2;
  o.num_iters = 2;
  const TvTrainResult r = TrainTv(stats, ubm, o);
  SetWarningSink(nullptr);
  CHECK(Stack(r.tv).allFinite());
  bool saw = false;
  for (const auto &m : warnings) saw |= m.find("component 2") != std::string::npos;
  CHECK(saw);
}

TEST_CASE("generative recovery of the factors") {
  std::mt19937_64 rng(12);
  const GmmModel ubm = RandomUbm(8, 3, rng);
  const TvMatrix truth = RandomTv(ubm, 3, rng);
  std::vector<Eigen::VectorXd> w_true;
  const auto stats = Generate(ubm, truth, 500, 30.0, rng, &w_true);
  TvTrainOptions o;
  o.rank = 3;
  o.num_iters = 10;
  const TvTrainResult r = TrainTv(stats, ubm, o);
  CHECK(SubspaceAngleDeg(Stack(r.tv), Stack(truth)) < 5.0);

  // Factors are identified up to an invertible map; align by least squares
  // and correlate every coordinate.
  const IvectorExtractor ex(r.tv, ubm);
  Eigen::MatrixXd est(500, 3), tru(500, 3);
  for (int i = 0; i < 500; ++i) {
    est.row(i) = ex.Extract(stats[i]).w.transpose();
    tru.row(i) = w_true[i].transpose();
  }
  const Eigen::MatrixXd map = est.colPivHouseholderQr().solve(tru);
  const Eigen::MatrixXd fit = est * map;
  for (int k = 0; k < 3; ++k) {
    const Eigen::ArrayXd a = fit.col(k).array() - fit.col(k).mean();
    const Eigen::ArrayXd b = tru.col(k).array() - tru.col(k).mean();
    const double pr = (a * b).sum() / std::sqrt((a * a).sum() * (b * b).sum());
    CHECK(pr > 0.95);
  }
}

TEST_CASE("containers") {
  std::mt19937_64 rng(13);
  const GmmModel ubm = RandomUbm(3, 2, rng);
  TvMatrix tv = RandomTv(ubm, 2, rng);
  tv.seed = 77;
  const TvMatrix back = DecodeTv(EncodeTv(tv));
  CHECK(back.seed == 77);
  CHECK(back.ubm_checksum == tv.ubm_checksum);
  CHECK(Stack(back) == Stack(tv));
  CHECK_THROWS_AS(DecodeTv(EncodeTv(tv).substr(0, 30)), Error);

  IvectorSet set;
  set.ids = {"a", "b"};
  set.labels = {"x", "y"};
  set.conditions = {"nospeech", "sbr+5"};
  set.vectors = {RandomMatrix(2, 1, rng), RandomMatrix(2, 1, rng)};
  const IvectorSet s2 = DecodeIvectorSet(EncodeIvectorSet(set));
  CHECK(s2.ids == set.ids);
  CHECK(s2.labels == set.labels);
  CHECK(s2.conditions == set.conditions);
  CHECK(s2.vectors[1] == set.vectors[1]);
  CHECK(EncodeIvectorSet(s2) == EncodeIvectorSet(set));
}
