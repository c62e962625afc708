#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sigc::stimulus {

inline constexpr int kDefaultSampleRate = 48000;

// Mono floating-point audio. Samples are nominally in [-1, 1]; every
// generator in this module guarantees that bound on its output.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;
  int channels = 1;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  // Throws ValidationError when sample_rate <= 0, channels != 1, or a
  // sample is not finite.
  void validate() const;
};

double rms(std::span<const double> x);
double energy(std::span<const double> x);
double peak(std::span<const double> x);

// Scales the whole buffer down when its peak exceeds 1. Returns the gain
// applied (1 when untouched).
double limit_peak(std::vector<double>& x);

std::size_t samples_for(double seconds, int sample_rate);

}  // namespace sigc::stimulus
