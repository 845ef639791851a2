// src/noise-floor.cc

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

#include "asc/noise-floor.h"

#include <cmath>

#include "asc/common.h"

namespace asc {

void SppParams::Check() const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_unit(prior_h1) || !in_unit(spp_smooth) || !in_unit(psd_smooth) ||
      !in_unit(spp_clamp) || !in_unit(stuck_threshold) ||
      !std::isfinite(xi_h1_db) || !(psd_floor > 0.0))
    Fail(Stage::kNoiseFloor, ErrorKind::kInvalidArgument,
         "noise-floor constants out of range");
}

NoiseFloorState InitNoiseFloor(const Eigen::MatrixXd &first_frames, int n_init,
                               const SppParams &params) {
  if (n_init < 1 || first_frames.rows() < n_init || first_frames.cols() == 0)
    Fail(Stage::kNoiseFloor, ErrorKind::kTooShort,
         "need at least ", std::max(n_init, 1),
         " frames to initialize the noise floor, got ", first_frames.rows());
  NoiseFloorState state;
  state.noise_psd = first_frames.topRows(n_init).colwise().mean().transpose();
  state.noise_psd = state.noise_psd.cwiseMax(params.psd_floor);
  state.smoothed_spp = Eigen::VectorXd::Constant(first_frames.cols(), 0.5);
  state.frame_index = n_init;
  return state;
}

Eigen::VectorXd SpeechPresenceProb(const Eigen::VectorXd &periodogram,
                                   const Eigen::VectorXd &noise_psd,
                                   const SppParams &params) {
  if (periodogram.size() != noise_psd.size())
    Fail(Stage::kNoiseFloor, ErrorKind::kDimensionMismatch,
         "periodogram has ", periodogram.size(), " bins, noise PSD ",
         noise_psd.size());
  const double xi = std::pow(10.0, params.xi_h1_db / 10.0);
  const double q = params.prior_h1;
  const double log_prior_ratio = std::log((1.0 - q) / q) + std::log1p(xi);
  const double gain = xi / (1.0 + xi);
  Eigen::VectorXd p(periodogram.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (!(noise_psd[k] > 0.0))
      Fail(Stage::kNoiseFloor, ErrorKind::kInvalidArgument,
           "noise PSD must be positive, bin ", k, " is ", noise_psd[k]);
    // 1 / (1 + exp(z)) written to stay finite for large |z|.
    const double z = log_prior_ratio - periodogram[k] / noise_psd[k] * gain;
    p[k] = z > 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                   : 1.0 / (1.0 + std::exp(z));
  }
  return p;
}

Eigen::VectorXd NoisePeriodogram(const Eigen::VectorXd &periodogram,
                                 const Eigen::VectorXd &prev_noise_psd,
                                 const Eigen::VectorXd &spp) {
  if (periodogram.size() != prev_noise_psd.size() ||
      periodogram.size() != spp.size())
    Fail(Stage::kNoiseFloor, ErrorKind::kDimensionMismatch,
         "bin count mismatch in noise periodogram");
  return (1.0 - spp.array()) * periodogram.array() +
         spp.array() * prev_noise_psd.array();
}

const Eigen::VectorXd &UpdateNoiseFloorWithSpp(
    const Eigen::VectorXd &periodogram, const Eigen::VectorXd &spp,
    const SppParams &params, NoiseFloorState *state) {
  Eigen::VectorXd estimate = NoisePeriodogram(periodogram, state->noise_psd, spp);
  const double a = params.psd_smooth;
  state->noise_psd = (a * state->noise_psd + (1.0 - a) * estimate)
                         .cwiseMax(params.psd_floor);
  ++state->frame_index;
  return state->noise_psd;
}

const Eigen::VectorXd &UpdateNoiseFloor(const Eigen::VectorXd &periodogram,
                                        const SppParams &params,
                                        NoiseFloorState *state) {
  if (periodogram.size() != state->noise_psd.size())
    Fail(Stage::kNoiseFloor, ErrorKind::kDimensionMismatch,
         "periodogram has ", periodogram.size(), " bins, state has ",
         state->noise_psd.size());
  Eigen::VectorXd p = SpeechPresenceProb(periodogram, state->noise_psd, params);
  const double b = params.spp_smooth;
  state->smoothed_spp = b * state->smoothed_spp + (1.0 - b) * p;
  // Stuck detector: a bin that has looked like speech for too long is
  // allowed to update slowly.
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (state->smoothed_spp[k] > params.stuck_threshold)
      p[k] = std::min(p[k], params.spp_clamp);
  return UpdateNoiseFloorWithSpp(periodogram, p, params, state);
}

Spectrogram NoiseFloorSpectrogram(const Spectrogram &spec,
                                  const NoiseFloorConfig &cfg) {
  cfg.spp.Check();
  if (spec.NumFrames() <= cfg.n_init)
    Fail(Stage::kNoiseFloor, ErrorKind::kTooShort, "spectrogram has ",
         spec.NumFrames(), " frames; noise floor needs more than ",
         cfg.n_init);
  Spectrogram out = spec;
  NoiseFloorState state = InitNoiseFloor(spec.power, cfg.n_init, cfg.spp);
  for (int t = 0; t < cfg.n_init; ++t)
    out.power.row(t) = state.noise_psd.transpose();
  for (Eigen::Index t = cfg.n_init; t < spec.NumFrames(); ++t) {
    Eigen::VectorXd row = spec.power.row(t).transpose();
    out.power.row(t) = UpdateNoiseFloor(row, cfg.spp, &state).transpose();
  }
  return out;
}

}  // namespace asc
