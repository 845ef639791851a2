// src/features.cc

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

#include "asc/features.h"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "asc/binary-io.h"
#include "asc/common.h"
#include "asc/noise-floor.h"

namespace asc {

namespace {

// FFTW planning is not thread safe; execution on private buffers is.
std::mutex g_fftw_plan_mutex;

constexpr const char *kFeatureMagic = "ASCFEAT";
constexpr const char *kSpectrogramMagic = "ASCSPEC";
constexpr uint32_t kFeatureVersion = 1;

}  // namespace

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

Spectrogram PowerSpectrogram(const Eigen::MatrixXd &frames, int sample_rate,
                             double frame_hop_s) {
  if (frames.rows() == 0 || frames.cols() == 0)
    Fail(Stage::kFeatures, ErrorKind::kTooShort, "no frames to transform");
  const int n = NextPowerOfTwo(static_cast<int>(frames.cols()));
  const int bins = n / 2 + 1;

  double *in = fftw_alloc_real(n);
  fftw_complex *out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }

  Spectrogram spec;
  spec.fft_size = n;
  spec.bin_hz = static_cast<double>(sample_rate) / n;
  spec.frame_hop_s = frame_hop_s;
  spec.power.resize(frames.rows(), bins);
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    for (Eigen::Index i = 0; i < frames.cols(); ++i) in[i] = frames(t, i);
    for (int i = static_cast<int>(frames.cols()); i < n; ++i) in[i] = 0.0;
    fftw_execute(plan);
    for (int k = 0; k < bins; ++k)
      spec.power(t, k) = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  }

  {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return spec;
}

MelFilterBank MakeMelBank(int n_filters, int fft_size, int sample_rate,
                          double fmin, double fmax) {
  if (n_filters < 1 || fft_size < 2 || sample_rate <= 0)
    Fail(Stage::kFeatures, ErrorKind::kInvalidArgument,
         "bad mel bank dimensions");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0))
    Fail(Stage::kFeatures, ErrorKind::kInvalidArgument,
         "invalid mel frequency range [", fmin, ", ", fmax, "] at ",
         sample_rate, " Hz");
  const int bins = fft_size / 2 + 1;
  const double mel_lo = HzToMel(fmin), mel_hi = HzToMel(fmax);
  const double step = (mel_hi - mel_lo) / (n_filters + 1);

  MelFilterBank bank;
  bank.weights = Eigen::MatrixXd::Zero(n_filters, bins);
  bank.center_freqs_hz.resize(n_filters);
  for (int m = 0; m < n_filters; ++m) {
    const double left = mel_lo + m * step;
    const double center = left + step;
    const double right = center + step;
    bank.center_freqs_hz[m] = MelToHz(center);
    for (int k = 0; k < bins; ++k) {
      const double mel = HzToMel(static_cast<double>(k) * sample_rate / fft_size);
      if (mel > left && mel <= center)
        bank.weights(m, k) = (mel - left) / (center - left);
      else if (mel > center && mel < right)
        bank.weights(m, k) = (right - mel) / (right - center);
    }
  }
  return bank;
}

FeatureMatrix Mfcc(const Spectrogram &spec, const MelFilterBank &bank,
                   int n_ceps) {
  const Eigen::Index n_mels = bank.weights.rows();
  if (spec.NumBins() != bank.weights.cols())
    Fail(Stage::kFeatures, ErrorKind::kDimensionMismatch, "spectrogram has ",
         spec.NumBins(), " bins, mel bank expects ", bank.weights.cols());
  if (n_ceps < 1 || n_ceps > n_mels)
    Fail(Stage::kFeatures, ErrorKind::kInvalidArgument, "n_ceps ", n_ceps,
         " must lie in [1, ", n_mels, "]");

  // Orthonormal DCT-II basis, n_ceps x n_mels.
  Eigen::MatrixXd dct(n_ceps, n_mels);
  for (int k = 0; k < n_ceps; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n_mels);
    for (Eigen::Index m = 0; m < n_mels; ++m)
      dct(k, m) = scale * std::cos(std::numbers::pi * k * (m + 0.5) / n_mels);
  }

  Eigen::MatrixXd log_mel =
      ((spec.power * bank.weights.transpose()).array() + kLogFloor).log();
  FeatureMatrix out;
  out.rows = log_mel * dct.transpose();
  out.static_dim = n_ceps;
  return out;
}

FeatureMatrix AppendSdc(const FeatureMatrix &feats, const SdcConfig &cfg) {
  if (cfg.spread < 1 || cfg.context < 1 || cfg.num_coeffs < 1 || cfg.shift < 1)
    Fail(Stage::kFeatures, ErrorKind::kInvalidArgument,
         "SDC parameters must be positive");
  if (feats.NumFrames() < 1)
    Fail(Stage::kFeatures, ErrorKind::kTooShort, "no frames for SDC");
  if (cfg.num_coeffs > feats.static_dim)
    Fail(Stage::kFeatures, ErrorKind::kInvalidArgument, "SDC uses ",
         cfg.num_coeffs, " coefficients but only ", feats.static_dim,
         " static ones exist");

  const long frames = feats.NumFrames();
  const int n = cfg.num_coeffs;
  auto clamp = [frames](long t) { return std::clamp(t, 0L, frames - 1); };

  FeatureMatrix out = feats;
  out.rows.conservativeResize(frames, feats.static_dim + cfg.AppendedDim());
  for (long t = 0; t < frames; ++t) {
    for (int j = -cfg.context; j <= cfg.context; ++j) {
      const long center = t + static_cast<long>(j) * cfg.shift;
      const long ahead = clamp(center + cfg.spread);
      const long behind = clamp(center - cfg.spread);
      const int col = feats.static_dim + (j + cfg.context) * n;
      out.rows.block(t, col, 1, n) =
          feats.rows.block(ahead, 0, 1, n) - feats.rows.block(behind, 0, 1, n);
    }
  }
  return out;
}

FeatureMatrix ExtractFeatures(const AudioBuffer &buf, bool use_noise_floor,
                              const FeatureConfig &cfg,
                              const NoiseFloorConfig &nf_cfg) {
  if (buf.channel_count != 1 || buf.sample_rate != cfg.sample_rate)
    Fail(Stage::kFeatures, ErrorKind::kInvalidArgument,
         "feature extraction expects mono audio at ", cfg.sample_rate,
         " Hz, got ", buf.channel_count, " channel(s) at ", buf.sample_rate);
  const Eigen::MatrixXd frames = FrameSignal(buf, cfg.frame);
  const double hop_s =
      static_cast<double>(FrameHopSamples(cfg.frame, cfg.sample_rate)) /
      cfg.sample_rate;
  Spectrogram spec = PowerSpectrogram(frames, cfg.sample_rate, hop_s);
  if (use_noise_floor) spec = NoiseFloorSpectrogram(spec, nf_cfg);
  const double fmax = cfg.fmax_hz > 0.0 ? cfg.fmax_hz : cfg.sample_rate / 2.0;
  const MelFilterBank bank = MakeMelBank(cfg.n_mels, spec.fft_size,
                                         cfg.sample_rate, cfg.fmin_hz, fmax);
  FeatureMatrix feats = Mfcc(spec, bank, cfg.n_ceps);
  if (cfg.use_sdc) feats = AppendSdc(feats, cfg.sdc);
  feats.noise_floor = use_noise_floor;
  return feats;
}

std::string EncodeFeatures(const FeatureMatrix &feats) {
  BinaryWriter w(kFeatureMagic, kFeatureVersion);
  w.U64(static_cast<uint64_t>(feats.Dim()));
  w.U64(static_cast<uint64_t>(feats.NumFrames()));
  w.U32(static_cast<uint32_t>(feats.static_dim));
  w.U32(feats.noise_floor ? 1 : 0);
  w.Str(feats.recording_id);
  for (Eigen::Index t = 0; t < feats.NumFrames(); ++t)
    for (Eigen::Index d = 0; d < feats.Dim(); ++d)
      w.F32(static_cast<float>(feats.rows(t, d)));
  return w.bytes();
}

FeatureMatrix DecodeFeatures(std::string bytes) {
  uint32_t version;
  BinaryReader r(std::move(bytes), kFeatureMagic, Stage::kFeatures, &version);
  if (version != kFeatureVersion)
    Fail(Stage::kFeatures, ErrorKind::kVersionMismatch,
         "feature container version ", version);
  FeatureMatrix f;
  const auto dim = static_cast<Eigen::Index>(r.U64());
  const auto rows = static_cast<Eigen::Index>(r.U64());
  f.static_dim = static_cast<int>(r.U32());
  f.noise_floor = r.U32() != 0;
  f.recording_id = r.Str();
  f.rows.resize(rows, dim);
  for (Eigen::Index t = 0; t < rows; ++t)
    for (Eigen::Index d = 0; d < dim; ++d) f.rows(t, d) = r.F32();
  r.ExpectEnd();
  return f;
}

void WriteFeatures(const std::string &path, const FeatureMatrix &feats) {
  WriteFileBytes(path, EncodeFeatures(feats), Stage::kFeatures);
}

FeatureMatrix ReadFeatures(const std::string &path) {
  return DecodeFeatures(ReadFileBytes(path, Stage::kFeatures));
}

std::string FeaturesToCsv(const FeatureMatrix &feats) {
  std::ostringstream os;
  os.precision(9);
  for (Eigen::Index t = 0; t < feats.NumFrames(); ++t) {
    for (Eigen::Index d = 0; d < feats.Dim(); ++d) {
      if (d) os << ',';
      os << feats.rows(t, d);
    }
    os << '\n';
  }
  return os.str();
}

std::string EncodeSpectrogram(const Spectrogram &spec) {
  BinaryWriter w(kSpectrogramMagic, kFeatureVersion);
  w.U32(static_cast<uint32_t>(spec.fft_size));
  w.F64(spec.bin_hz);
  w.F64(spec.frame_hop_s);
  w.U64(static_cast<uint64_t>(spec.NumBins()));
  w.U64(static_cast<uint64_t>(spec.NumFrames()));
  for (Eigen::Index t = 0; t < spec.NumFrames(); ++t)
    for (Eigen::Index k = 0; k < spec.NumBins(); ++k)
      w.F32(static_cast<float>(spec.power(t, k)));
  return w.bytes();
}

Spectrogram DecodeSpectrogram(std::string bytes) {
  uint32_t version;
  BinaryReader r(std::move(bytes), kSpectrogramMagic, Stage::kFeatures,
                 &version);
  if (version != kFeatureVersion)
    Fail(Stage::kFeatures, ErrorKind::kVersionMismatch,
         "spectrogram container version ", version);
  Spectrogram s;
  s.fft_size = static_cast<int>(r.U32());
  s.bin_hz = r.F64();
  s.frame_hop_s = r.F64();
  const auto bins = static_cast<Eigen::Index>(r.U64());
  const auto rows = static_cast<Eigen::Index>(r.U64());
  s.power.resize(rows, bins);
  for (Eigen::Index t = 0; t < rows; ++t)
    for (Eigen::Index k = 0; k < bins; ++k) s.power(t, k) = r.F32();
  r.ExpectEnd();
  return s;
}

}  // namespace asc
