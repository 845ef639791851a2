// tests/features-test.cc

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
#include <random>

#include <doctest.h>

#include "asc/common.h"
#include "asc/features.h"
#include "asc/noise-floor.h"
#include "oracles.h"
#include "test-util.h"

using namespace asc;
using asc::testing::NaiveLogMelDct;
using asc::testing::RandomSpectrogram;
using asc::testing::RandomMatrix;

TEST_CASE("mel scale") {
  CHECK(HzToMel(0.0) == 0.0);
  CHECK(HzToMel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
  CHECK(MelToHz(HzToMel(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
  CHECK(NextPowerOfTwo(640) == 1024);
  CHECK(NextPowerOfTwo(1024) == 1024);
  CHECK(NextPowerOfTwo(1) == 1);
}

TEST_CASE("power_spectrogram") {
  SUBCASE("zero frames give zero power") {
    const Spectrogram s = PowerSpectrogram(Eigen::MatrixXd::Zero(3, 640), 16000, 0.02);
    CHECK(s.fft_size == 1024);
    CHECK(s.NumBins() == 513);
    CHECK(s.power.isZero(0.0));
  }
  SUBCASE("on-bin cosine") {
    Eigen::MatrixXd f(1, 1024);
    for (int n = 0; n < 1024; ++n) f(0, n) = std::cos(2 * M_PI * 10 * n / 1024.0);
    const Spectrogram s = PowerSpectrogram(f, 16000, 0.02);
    CHECK(s.power(0, 10) == doctest::Approx(512.0 * 512.0).epsilon(1e-12));
    CHECK(s.power.sum() - s.power(0, 10) < 1e-12 * s.power(0, 10));
  }
  SUBCASE("Parseval") {
    std::mt19937_64 rng(11);
    const Eigen::MatrixXd f = RandomMatrix(20, 1024, rng);
    const Spectrogram s = PowerSpectrogram(f, 16000, 0.02);
    for (Eigen::Index t = 0; t < f.rows(); ++t) {
      const double two_sided = s.power(t, 0) + s.power(t, 512) +
                               2.0 * s.power.row(t).segment(1, 511).sum();
      const double energy = 1024.0 * f.row(t).squaredNorm();
      CHECK(std::abs(two_sided - energy) <= 1e-6 * energy);
    }
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(PowerSpectrogram(Eigen::MatrixXd(0, 640), 16000, 0.02), Error);
  }
}

TEST_CASE("make_mel_bank") {
  const MelFilterBank b = MakeMelBank(40, 1024, 16000, 0.0, 8000.0);
  CHECK(b.weights.rows() == 40);
  CHECK(b.weights.cols() == 513);
  CHECK((b.weights.array() >= 0.0).all());
  for (int m = 1; m < 40; ++m) CHECK(b.center_freqs_hz[m] > b.center_freqs_hz[m - 1]);
  // Equal spacing in mel.
  const double step = HzToMel(b.center_freqs_hz[1]) - HzToMel(b.center_freqs_hz[0]);
  for (int m = 1; m < 40; ++m)
    CHECK(HzToMel(b.center_freqs_hz[m]) - HzToMel(b.center_freqs_hz[m - 1]) ==
          doctest::Approx(step).epsilon(1e-9));

  // Every row a single-peaked triangle.
  for (int m = 0; m < 40; ++m) {
    Eigen::Index peak;
    b.weights.row(m).maxCoeff(&peak);
    for (Eigen::Index k = 1; k <= peak; ++k)
      CHECK(b.weights(m, k) >= b.weights(m, k - 1));
    for (Eigen::Index k = peak + 1; k < 513; ++k)
      CHECK(b.weights(m, k) <= b.weights(m, k - 1));
  }

  // Column sums for bins strictly between the first and last vertex.
  const double hi_vertex = 8000.0;
  for (int k = 1; k < 513; ++k) {
    const double hz = k * 16000.0 / 1024;
    if (hz >= hi_vertex) continue;
    const double sum = b.weights.col(k).sum();
    CHECK(sum > 0.0);
    CHECK(sum <= 1.0001);
  }

  CHECK_THROWS_AS(MakeMelBank(40, 1024, 16000, 4000.0, 4000.0), Error);
  CHECK_THROWS_AS(MakeMelBank(40, 1024, 16000, 5000.0, 3000.0), Error);
  CHECK_THROWS_AS(MakeMelBank(40, 1024, 16000, 0.0, 9000.0), Error);
}

TEST_CASE("mfcc matches the naive oracle") {
  std::mt19937_64 rng(5);
  const MelFilterBank bank = MakeMelBank(40, 1024, 16000, 0.0, 8000.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Spectrogram s = RandomSpectrogram(rng, 4, 1024);
    const FeatureMatrix f = Mfcc(s, bank, 21);
    CHECK(f.Dim() == 21);
    CHECK(f.static_dim == 21);
    const Eigen::MatrixXd ref = NaiveLogMelDct(s.power, 40, 21, 1024, 16000);
    CHECK((f.rows - ref).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("mfcc of a constant spectrum") {
  Spectrogram s;
  s.fft_size = 1024;
  s.power = Eigen::MatrixXd::Constant(3, 513, 0.7);
  // Constant mel energies need a constant filter response: use unit
  // rectangular "filters" over disjoint bins.
  MelFilterBank flat;
  flat.weights = Eigen::MatrixXd::Zero(40, 513);
  for (int m = 0; m < 40; ++m) flat.weights.block(m, 1 + 12 * m, 1, 12).setOnes();
  const FeatureMatrix f = Mfcc(s, flat, 21);
  CHECK(std::abs(f.rows(0, 0)) > 1.0);
  CHECK(f.rows.rightCols(20).cwiseAbs().maxCoeff() < 1e-9);

  CHECK_THROWS_AS(Mfcc(s, flat, 41), Error);
  s.power = Eigen::MatrixXd::Constant(3, 257, 0.7);
  CHECK_THROWS_AS(Mfcc(s, flat, 21), Error);
}

TEST_CASE("gain only moves c0") {
  std::mt19937_64 rng(6);
  const MelFilterBank bank = MakeMelBank(40, 1024, 16000, 0.0, 8000.0);
  Spectrogram s = RandomSpectrogram(rng, 6, 1024);
  s.power.array() += 1.0;  // keep the log floor negligible
  const FeatureMatrix a = Mfcc(s, bank, 21);
  s.power *= 37.0;
  const FeatureMatrix b = Mfcc(s, bank, 21);
  CHECK((a.rows.rightCols(20) - b.rows.rightCols(20)).cwiseAbs().maxCoeff() < 1e-8);
  const Eigen::VectorXd shift = b.rows.col(0) - a.rows.col(0);
  for (Eigen::Index t = 0; t < shift.size(); ++t)
    CHECK(shift[t] == doctest::Approx(std::sqrt(40.0) * std::log(37.0)).epsilon(1e-9));
}

TEST_CASE("features stay finite on silent and extreme spectra") {
  const MelFilterBank bank = MakeMelBank(40, 1024, 16000, 0.0, 8000.0);
  Spectrogram s;
  s.fft_size = 1024;
  s.power = Eigen::MatrixXd::Zero(2, 513);
  s.power(1, 100) = 1e12;
  CHECK(Mfcc(s, bank, 21).rows.allFinite());
}

TEST_CASE("append_sdc") {
  SdcConfig cfg;
  CHECK(cfg.AppendedDim() == 55);

  FeatureMatrix c;
  c.static_dim = 21;
  c.rows = Eigen::MatrixXd::Constant(30, 21, 1.5);
  const FeatureMatrix sc = AppendSdc(c, cfg);
  CHECK(sc.Dim() == 76);
  CHECK(sc.rows.rightCols(55).isZero(0.0));
  CHECK(sc.rows.leftCols(21) == c.rows);

  // Ramp c(t) = t * v: interior blocks equal 2 M v[0..N).
  std::mt19937_64 rng(2);
  const Eigen::RowVectorXd v = RandomMatrix(1, 21, rng);
  FeatureMatrix ramp;
  ramp.static_dim = 21;
  ramp.rows.resize(60, 21);
  for (int t = 0; t < 60; ++t) ramp.rows.row(t) = t * v;
  const FeatureMatrix rs = AppendSdc(ramp, cfg);
  for (int t = 10; t < 50; ++t)
    for (int j = 0; j < 5; ++j)
      CHECK((rs.rows.block(t, 21 + 11 * j, 1, 11) - 4.0 * v.head(11))
                .cwiseAbs()
                .maxCoeff() < 1e-12);

  // Clamped edges: at t = 0 the leftmost block differences frame 0 with itself.
  CHECK(rs.rows.block(0, 21, 1, 11).isZero(0.0));

  for (int k = 1; k <= 3; ++k)
    for (int n = 1; n <= 21; n += 5) {
      SdcConfig other{1, k, n, 2};
      CHECK(AppendSdc(c, other).Dim() == 21 + (2 * k + 1) * n);
    }

  SdcConfig bad = cfg;
  bad.num_coeffs = 22;
  CHECK_THROWS_AS(AppendSdc(c, bad), Error);
  bad = cfg;
  bad.spread = 0;
  CHECK_THROWS_AS(AppendSdc(c, bad), Error);
}

TEST_CASE("extract_features") {
  const FeatureConfig cfg;
  const NoiseFloorConfig nf;
  const AudioBuffer noise = asc::testing::WhiteNoise(16000 * 3, 0.05, 9);

  SUBCASE("flag off is the plain composition") {
    const FeatureMatrix f = ExtractFeatures(noise, false, cfg, nf);
    const Spectrogram spec =
        PowerSpectrogram(FrameSignal(noise, cfg.frame), 16000, 0.02);
    const MelFilterBank bank = MakeMelBank(40, spec.fft_size, 16000, 0.0, 8000.0);
    const FeatureMatrix ref = AppendSdc(Mfcc(spec, bank, 21), cfg.sdc);
    CHECK(f.rows == ref.rows);
    CHECK(f.Dim() == 76);
    CHECK_FALSE(f.noise_floor);
    CHECK(ExtractFeatures(noise, true, cfg, nf).noise_floor);
  }

  SUBCASE("row count for 30 s") {
    const AudioBuffer longer = asc::testing::WhiteNoise(16000 * 30, 0.05, 3);
    CHECK(ExtractFeatures(longer, false, cfg, nf).NumFrames() == 1499);
  }

  SUBCASE("deterministic") {
    CHECK(ExtractFeatures(noise, true, cfg, nf).rows ==
          ExtractFeatures(noise, true, cfg, nf).rows);
  }

  SUBCASE("noise-floor features settle on stationary noise") {
    // Mean frame-to-frame distance of the static cepstra after 2 s, with the
    // tracker on, relative to the same quantity for the raw features.
    const AudioBuffer ten = asc::testing::WhiteNoise(16000 * 10, 0.1, 21);
    FeatureConfig st = cfg;
    st.use_sdc = false;
    const FeatureMatrix on = ExtractFeatures(ten, true, st, nf);
    const FeatureMatrix off = ExtractFeatures(ten, false, st, nf);
    auto step = [](const FeatureMatrix &f, Eigen::Index from) {
      double d = 0.0;
      for (Eigen::Index t = from + 1; t < f.NumFrames(); ++t)
        d += (f.rows.row(t) - f.rows.row(t - 1)).norm();
      return d / static_cast<double>(f.NumFrames() - from - 1);
    };
    const Eigen::Index two_s = 100;
    MESSAGE("settled/raw frame step ratio: ", step(on, two_s) / step(off, 0));
    CHECK(step(on, two_s) < 0.1 * step(off, 0));
  }

  SUBCASE("wrong rate or channels") {
    AudioBuffer wrong = noise;
    wrong.sample_rate = 8000;
    CHECK_THROWS_AS(ExtractFeatures(wrong, false, cfg, nf), Error);
    AudioBuffer st = noise;
    st.channel_count = 2;
    CHECK_THROWS_AS(ExtractFeatures(st, false, cfg, nf), Error);
  }
}

TEST_CASE("feature container round trip") {
  std::mt19937_64 rng(3);
  FeatureMatrix f;
  f.rows = RandomMatrix(7, 76, rng);
  f.static_dim = 21;
  f.noise_floor = true;
  f.recording_id = "a/b.wav";
  const FeatureMatrix g = DecodeFeatures(EncodeFeatures(f));
  CHECK(g.static_dim == 21);
  CHECK(g.noise_floor);
  CHECK(g.recording_id == "a/b.wav");
  CHECK((g.rows - f.rows.cast<float>().cast<double>()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(EncodeFeatures(g) == EncodeFeatures(f));

  std::string bytes = EncodeFeatures(f);
  bytes[0] = 'X';
  CHECK_THROWS_AS(DecodeFeatures(bytes), Error);
  CHECK_THROWS_AS(DecodeFeatures(EncodeFeatures(f).substr(0, 40)), Error);

  const std::string csv = FeaturesToCsv(f);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 7);

  Spectrogram s;
  s.power = RandomMatrix(3, 5, rng).array().square();
  s.fft_size = 8;
  s.bin_hz = 2000;
  s.frame_hop_s = 0.02;
  const Spectrogram s2 = DecodeSpectrogram(EncodeSpectrogram(s));
  CHECK(s2.fft_size == 8);
  CHECK(s2.power.rows() == 3);
}
