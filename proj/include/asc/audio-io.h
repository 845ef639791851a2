// include/asc/audio-io.h

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

#ifndef ASC_AUDIO_IO_H_
#define ASC_AUDIO_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace asc {

// Interleaved waveform, amplitudes in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;
  int channel_count = 1;

  std::size_t NumFrames() const {
    return channel_count > 0 ? samples.size() / channel_count : 0;
  }
  double DurationSeconds() const {
    return static_cast<double>(NumFrames()) / sample_rate;
  }
};

enum class WindowType { kHann, kHamming, kRect };

struct FrameConfig {
  double frame_len_ms = 40.0;
  double overlap_fraction = 0.5;
  WindowType window = WindowType::kHann;
};

// Reads PCM WAV (16/24/32-bit integer, 32-bit float). Throws Error with
// kFileNotFound, kUnsupportedFormat or kCorruptHeader as appropriate.
AudioBuffer ReadWav(const std::string &path);
AudioBuffer ParseWav(std::string_view bytes);

// Encodes as 16-bit PCM (bits == 16) or 32-bit float (bits == 32).
// Samples outside [-1, 1] are an error, not clipped.
std::string EncodeWav(const AudioBuffer &buf, int bits = 16);
void WriteWav(const std::string &path, const AudioBuffer &buf, int bits = 16);

AudioBuffer DownmixMono(const AudioBuffer &buf);

// Windowed-sinc resampler, anti-aliasing cutoff at 0.45 * min(rates).
// Output length is round(in_len * target_rate / in_rate).
AudioBuffer Resample(const AudioBuffer &buf, int target_rate);

// Downmix + resample in one step; what every recording goes through on load.
AudioBuffer ToMono(const AudioBuffer &buf, int target_rate);

int FrameLengthSamples(const FrameConfig &cfg, int sample_rate);
int FrameHopSamples(const FrameConfig &cfg, int sample_rate);
// floor((num_samples - frame_len) / hop) + 1, or 0 if the signal is shorter
// than one frame.
std::size_t NumFrames(std::size_t num_samples, int frame_len, int hop);

std::vector<double> MakeWindow(WindowType type, int length);

// One windowed frame per row; the trailing partial frame is dropped.
Eigen::MatrixXd FrameSignal(const AudioBuffer &buf, const FrameConfig &cfg);

}  // namespace asc

#endif  // ASC_AUDIO_IO_H_
