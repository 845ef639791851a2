// include/asc/features.h

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

#ifndef ASC_FEATURES_H_
#define ASC_FEATURES_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asc/audio-io.h"

namespace asc {

// Power values |X|^2, one frame per row, bins 0..fft_size/2 per column.
struct Spectrogram {
  Eigen::MatrixXd power;
  int fft_size = 0;
  double bin_hz = 0.0;
  double frame_hop_s = 0.0;

  Eigen::Index NumFrames() const { return power.rows(); }
  Eigen::Index NumBins() const { return power.cols(); }
};

struct MelFilterBank {
  Eigen::MatrixXd weights;  // n_filters x (fft_size/2 + 1)
  std::vector<double> center_freqs_hz;
};

struct FeatureMatrix {
  Eigen::MatrixXd rows;  // one feature vector per frame
  int static_dim = 0;    // leading MFCC columns; the rest are SDC
  bool noise_floor = false;
  std::string recording_id;

  Eigen::Index NumFrames() const { return rows.rows(); }
  Eigen::Index Dim() const { return rows.cols(); }
};

// Shifted delta cepstra. Block j (j = -context..context) at frame t is
// c[0..num_coeffs)(t + j*shift + spread) - c[0..num_coeffs)(t + j*shift - spread),
// frame indices clamped to the valid range.
struct SdcConfig {
  int spread = 2;       // M
  int context = 2;      // K
  int num_coeffs = 11;  // N
  int shift = 3;        // P

  int AppendedDim() const { return (2 * context + 1) * num_coeffs; }
};

double HzToMel(double hz);
double MelToHz(double mel);
int NextPowerOfTwo(int n);

// Magnitude-squared FFT of each row, zero padded to the next power of two.
Spectrogram PowerSpectrogram(const Eigen::MatrixXd &frames, int sample_rate,
                             double frame_hop_s);

// Triangular filters between n_filters + 2 vertices equally spaced on the
// HTK mel scale; each triangle peaks at 1.
MelFilterBank MakeMelBank(int n_filters, int fft_size, int sample_rate,
                          double fmin, double fmax);

// Orthonormal DCT-II of log(mel energy + kLogFloor), first n_ceps kept.
constexpr double kLogFloor = 1e-10;
FeatureMatrix Mfcc(const Spectrogram &spec, const MelFilterBank &bank,
                   int n_ceps);

FeatureMatrix AppendSdc(const FeatureMatrix &feats, const SdcConfig &cfg);

struct NoiseFloorConfig;  // noise-floor.h

struct FeatureConfig {
  FrameConfig frame;
  int sample_rate = 16000;
  int n_mels = 40;
  int n_ceps = 21;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;  // 0 means Nyquist
  bool use_sdc = true;
  SdcConfig sdc;
};

// frame -> power spectrogram -> [noise floor] -> mel -> MFCC -> [SDC].
// `buf` must already be mono at cfg.sample_rate.
FeatureMatrix ExtractFeatures(const AudioBuffer &buf, bool use_noise_floor,
                              const FeatureConfig &cfg,
                              const NoiseFloorConfig &nf_cfg);

// Binary container: tag, version, dim, rows, static dim, noise-floor flag,
// id, then row-major float32 values.
std::string EncodeFeatures(const FeatureMatrix &feats);
FeatureMatrix DecodeFeatures(std::string bytes);
void WriteFeatures(const std::string &path, const FeatureMatrix &feats);
FeatureMatrix ReadFeatures(const std::string &path);
std::string FeaturesToCsv(const FeatureMatrix &feats);

// Same container for spectrograms (debug dumps of the noise floor).
std::string EncodeSpectrogram(const Spectrogram &spec);
Spectrogram DecodeSpectrogram(std::string bytes);

}  // namespace asc

#endif  // ASC_FEATURES_H_
