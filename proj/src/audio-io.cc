// src/audio-io.cc

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

#include "asc/audio-io.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "asc/binary-io.h"
#include "asc/common.h"

namespace asc {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t Le16(const unsigned char *p) { return p[0] | (p[1] << 8); }
uint32_t Le32(const unsigned char *p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}

void Put16(std::string *s, uint16_t v) {
  s->push_back(char(v & 0xff));
  s->push_back(char(v >> 8));
}
void Put32(std::string *s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s->push_back(char((v >> (8 * i)) & 0xff));
}

[[noreturn]] void Corrupt(const std::string &what) {
  Fail(Stage::kAudioIo, ErrorKind::kCorruptHeader, "corrupt WAV: ", what);
}

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

AudioBuffer ParseWav(std::string_view bytes) {
  const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0)
    Corrupt("missing RIFF/WAVE tag");

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const unsigned char *chunk = p + pos;
    uint32_t size = Le32(chunk + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > n) Corrupt("truncated fmt chunk");
      format = Le16(p + body);
      channels = Le16(p + body + 2);
      rate = Le32(p + body + 4);
      bits = Le16(p + body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) Corrupt("truncated extensible fmt chunk");
        // First two bytes of the subformat GUID carry the actual codec.
        format = Le16(p + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) Corrupt("data chunk before fmt chunk");
      if (format != kFormatPcm && format != kFormatFloat)
        Fail(Stage::kAudioIo, ErrorKind::kUnsupportedFormat,
             "unsupported WAV codec 0x", std::hex, format);
      if (format == kFormatPcm && bits != 16 && bits != 24 && bits != 32)
        Fail(Stage::kAudioIo, ErrorKind::kUnsupportedFormat,
             "unsupported PCM bit depth ", bits);
      if (format == kFormatFloat && bits != 32)
        Fail(Stage::kAudioIo, ErrorKind::kUnsupportedFormat,
             "unsupported float bit depth ", bits);
      if (channels == 0 || rate == 0) Corrupt("zero channels or rate");

      const std::size_t bytes_per_sample = bits / 8;
      const std::size_t block = bytes_per_sample * channels;
      // Streaming writers leave the size as 0xFFFFFFFF; read what exists.
      std::size_t avail = std::min<std::size_t>(size, n - body);
      std::size_t count = (avail / block) * channels;

      AudioBuffer buf;
      buf.sample_rate = static_cast<int>(rate);
      buf.channel_count = channels;
      buf.samples.resize(count);
      const unsigned char *d = p + body;
      for (std::size_t i = 0; i < count; ++i, d += bytes_per_sample) {
        double v;
        if (format == kFormatFloat) {
          float f;
          std::memcpy(&f, d, 4);
          v = f;
        } else if (bits == 16) {
          v = static_cast<int16_t>(Le16(d)) / 32768.0;
        } else if (bits == 24) {
          int32_t s = int32_t(d[0] | (d[1] << 8) | (d[2] << 16)) << 8 >> 8;
          v = s / 8388608.0;
        } else {
          v = static_cast<int32_t>(Le32(d)) / 2147483648.0;
        }
        buf.samples[i] = v;
      }
      return buf;
    }
    pos = body + size + (size & 1);
  }
  Corrupt(have_fmt ? "no data chunk" : "no fmt chunk");
}

AudioBuffer ReadWav(const std::string &path) {
  return ParseWav(ReadFileBytes(path, Stage::kAudioIo));
}

std::string EncodeWav(const AudioBuffer &buf, int bits) {
  if (bits != 16 && bits != 32)
    Fail(Stage::kAudioIo, ErrorKind::kInvalidArgument,
         "can only write 16-bit PCM or 32-bit float, got ", bits);
  if (buf.channel_count <= 0 || buf.sample_rate <= 0 ||
      buf.samples.size() % buf.channel_count != 0)
    Fail(Stage::kAudioIo, ErrorKind::kInvalidArgument,
         "malformed audio buffer");
  const uint16_t format = bits == 16 ? kFormatPcm : kFormatFloat;
  const uint32_t bps = bits / 8;
  const uint32_t data_size = static_cast<uint32_t>(buf.samples.size() * bps);
  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  Put32(&out, 36 + data_size);
  out += "WAVEfmt ";
  Put32(&out, 16);
  Put16(&out, format);
  Put16(&out, static_cast<uint16_t>(buf.channel_count));
  Put32(&out, static_cast<uint32_t>(buf.sample_rate));
  Put32(&out, static_cast<uint32_t>(buf.sample_rate * buf.channel_count * bps));
  Put16(&out, static_cast<uint16_t>(buf.channel_count * bps));
  Put16(&out, static_cast<uint16_t>(bits));
  out += "data";
  Put32(&out, data_size);
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    double v = buf.samples[i];
    if (!(std::abs(v) <= 1.0))
      Fail(Stage::kAudioIo, ErrorKind::kInvalidArgument, "sample ", i,
           " out of range: ", v);
    if (bits == 16) {
      long q = std::lround(v * 32768.0);
      q = std::min(q, 32767L);  // +1.0 maps to the largest code
      Put16(&out, static_cast<uint16_t>(static_cast<int16_t>(q)));
    } else {
      float f = static_cast<float>(v);
      uint32_t u;
      std::memcpy(&u, &f, 4);
      Put32(&out, u);
    }
  }
  return out;
}

void WriteWav(const std::string &path, const AudioBuffer &buf, int bits) {
  WriteFileBytes(path, EncodeWav(buf, bits), Stage::kAudioIo);
}

AudioBuffer DownmixMono(const AudioBuffer &buf) {
  if (buf.channel_count == 1) return buf;
  AudioBuffer out;
  out.sample_rate = buf.sample_rate;
  out.channel_count = 1;
  const std::size_t frames = buf.NumFrames();
  const int ch = buf.channel_count;
  out.samples.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (int c = 0; c < ch; ++c) sum += buf.samples[t * ch + c];
    out.samples[t] = sum / ch;
  }
  return out;
}

AudioBuffer Resample(const AudioBuffer &buf, int target_rate) {
  if (target_rate <= 0)
    Fail(Stage::kAudioIo, ErrorKind::kInvalidArgument,
         "target sample rate must be positive, got ", target_rate);
  if (buf.channel_count != 1)
    Fail(Stage::kAudioIo, ErrorKind::kInvalidArgument,
         "resampling needs mono input");
  if (buf.sample_rate == target_rate) return buf;

  const long in_rate = buf.sample_rate, out_rate = target_rate;
  const long g = std::gcd(in_rate, out_rate);
  const long period_in = in_rate / g, period_out = out_rate / g;
  const double cutoff = 0.45 * std::min(in_rate, out_rate);
  const int num_zeros = 32;
  const double half_width = num_zeros / (2.0 * cutoff);

  // One filter per output phase; output n = k * period_out + j reuses phase j
  // with input indices shifted by k * period_in.
  std::vector<long> first_index(period_out);
  std::vector<std::vector<double>> weights(period_out);
  for (long j = 0; j < period_out; ++j) {
    const double t = static_cast<double>(j) / out_rate;
    const long lo = static_cast<long>(std::ceil((t - half_width) * in_rate));
    const long hi = static_cast<long>(std::floor((t + half_width) * in_rate));
    first_index[j] = lo;
    auto &w = weights[j];
    w.resize(hi - lo + 1);
    for (long i = lo; i <= hi; ++i) {
      const double dt = t - static_cast<double>(i) / in_rate;
      const double window =
          std::abs(dt) >= half_width
              ? 0.0
              : 0.5 + 0.5 * std::cos(std::numbers::pi * dt / half_width);
      w[i - lo] = 2.0 * cutoff * Sinc(2.0 * cutoff * dt) * window / in_rate;
    }
  }

  const long in_len = static_cast<long>(buf.samples.size());
  const long out_len = (in_len * out_rate + in_rate / 2) / in_rate;
  AudioBuffer out;
  out.sample_rate = target_rate;
  out.channel_count = 1;
  out.samples.resize(out_len);
  for (long n = 0; n < out_len; ++n) {
    const long k = n / period_out, j = n % period_out;
    const long base = first_index[j] + k * period_in;
    const auto &w = weights[j];
    double acc = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) {
      const long i = base + static_cast<long>(m);
      if (i >= 0 && i < in_len) acc += w[m] * buf.samples[i];
    }
    out.samples[n] = acc;
  }
  return out;
}

AudioBuffer ToMono(const AudioBuffer &buf, int target_rate) {
  return Resample(DownmixMono(buf), target_rate);
}

int FrameLengthSamples(const FrameConfig &cfg, int sample_rate) {
  const double len = cfg.frame_len_ms * sample_rate / 1000.0;
  const double rounded = std::round(len);
  if (rounded < 1.0 || std::abs(len - rounded) > 1e-9)
    Fail(Stage::kAudioIo, ErrorKind::kInvalidArgument, "frame length ",
         cfg.frame_len_ms, " ms is not a whole number of samples at ",
         sample_rate, " Hz");
  return static_cast<int>(rounded);
}

int FrameHopSamples(const FrameConfig &cfg, int sample_rate) {
  if (!(cfg.overlap_fraction >= 0.0 && cfg.overlap_fraction < 1.0))
    Fail(Stage::kAudioIo, ErrorKind::kInvalidArgument,
         "overlap fraction must lie in [0, 1), got ", cfg.overlap_fraction);
  const int len = FrameLengthSamples(cfg, sample_rate);
  return std::max(1, static_cast<int>(
                         std::lround(len * (1.0 - cfg.overlap_fraction))));
}

std::size_t NumFrames(std::size_t num_samples, int frame_len, int hop) {
  if (num_samples < static_cast<std::size_t>(frame_len)) return 0;
  return (num_samples - frame_len) / hop + 1;
}

std::vector<double> MakeWindow(WindowType type, int length) {
  std::vector<double> w(length, 1.0);
  if (length == 1 || type == WindowType::kRect) return w;
  const double a = 2.0 * std::numbers::pi / (length - 1);
  for (int i = 0; i < length; ++i) {
    if (type == WindowType::kHann)
      w[i] = 0.5 - 0.5 * std::cos(a * i);
    else
      w[i] = 0.54 - 0.46 * std::cos(a * i);
  }
  return w;
}

Eigen::MatrixXd FrameSignal(const AudioBuffer &buf, const FrameConfig &cfg) {
  if (buf.channel_count != 1)
    Fail(Stage::kAudioIo, ErrorKind::kInvalidArgument,
         "framing needs mono input");
  const int len = FrameLengthSamples(cfg, buf.sample_rate);
  const int hop = FrameHopSamples(cfg, buf.sample_rate);
  const std::size_t count = NumFrames(buf.samples.size(), len, hop);
  if (count == 0)
    Fail(Stage::kAudioIo, ErrorKind::kTooShort, "signal of ",
         buf.samples.size(), " samples is shorter than one frame (", len,
         ")");
  const std::vector<double> window = MakeWindow(cfg.window, len);
  Eigen::MatrixXd frames(static_cast<Eigen::Index>(count), len);
  for (std::size_t t = 0; t < count; ++t) {
    const double *src = buf.samples.data() + t * hop;
    for (int i = 0; i < len; ++i) frames(t, i) = src[i] * window[i];
  }
  return frames;
}

}  // namespace asc
