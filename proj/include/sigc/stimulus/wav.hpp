#pragma once

#include <string>

#include "sigc/stimulus/audio.hpp"

namespace sigc::stimulus {

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  std::size_t frames = 0;
};

// RIFF/WAVE, PCM 16-bit mono only. Anything else (float, 24-bit, stereo,
// truncated data chunk) raises FormatError.
AudioBuffer read_wav(const std::string& path);

// Header-only inspection; same format rules as read_wav.
WavInfo probe_wav(const std::string& path);

// Writes PCM 16-bit mono. Samples are clamped to [-1, 1] and quantized by
// rounding.
void write_wav(const AudioBuffer& buffer, const std::string& path);

}  // namespace sigc::stimulus
