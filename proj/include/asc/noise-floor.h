// include/asc/noise-floor.h

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

#ifndef ASC_NOISE_FLOOR_H_
#define ASC_NOISE_FLOOR_H_

#include <vector>

#include <Eigen/Dense>

#include "asc/features.h"

namespace asc {

// Constants of the speech-presence-probability noise tracker. All of them
// can be overridden from the config file.
struct SppParams {
  double xi_h1_db = 15.0;  // fixed a priori SNR under speech presence
  double prior_h1 = 0.5;   // prior speech presence probability q
  double spp_smooth = 0.9;
  double psd_smooth = 0.8;
  double spp_clamp = 0.99;
  double stuck_threshold = 0.99;  // smoothed SPP above this triggers clamp
  double psd_floor = 1e-12;

  void Check() const;
};

struct NoiseFloorConfig {
  SppParams spp;
  int n_init = 5;
};

struct NoiseFloorState {
  Eigen::VectorXd noise_psd;
  Eigen::VectorXd smoothed_spp;
  long frame_index = 0;
};

// Per-bin mean of the first n_init rows, floored at psd_floor.
NoiseFloorState InitNoiseFloor(const Eigen::MatrixXd &first_frames, int n_init,
                               const SppParams &params);

// P(H1 | X) = 1 / (1 + (1-q)/q * (1+xi) * exp(-|X|^2/sigma^2 * xi/(1+xi))).
Eigen::VectorXd SpeechPresenceProb(const Eigen::VectorXd &periodogram,
                                   const Eigen::VectorXd &noise_psd,
                                   const SppParams &params);

// E(|N|^2 | X) = (1 - P) |X|^2 + P sigma^2.
Eigen::VectorXd NoisePeriodogram(const Eigen::VectorXd &periodogram,
                                 const Eigen::VectorXd &prev_noise_psd,
                                 const Eigen::VectorXd &spp);

// One tracker step: SPP, stuck-detector clamp, noise periodogram, recursive
// smoothing. Returns the updated noise PSD (also left in *state).
const Eigen::VectorXd &UpdateNoiseFloor(const Eigen::VectorXd &periodogram,
                                        const SppParams &params,
                                        NoiseFloorState *state);

// Same step with an externally supplied presence probability (no SPP
// estimation, no clamp). With spp == 0 this is plain exponential smoothing.
const Eigen::VectorXd &UpdateNoiseFloorWithSpp(
    const Eigen::VectorXd &periodogram, const Eigen::VectorXd &spp,
    const SppParams &params, NoiseFloorState *state);

// Runs the tracker over a whole spectrogram. Row t of the output is the
// estimate after processing row t; the n_init initialization rows all carry
// the initial estimate.
Spectrogram NoiseFloorSpectrogram(const Spectrogram &spec,
                                  const NoiseFloorConfig &cfg);

}  // namespace asc

#endif  // ASC_NOISE_FLOOR_H_
