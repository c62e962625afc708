#include "sigc/stimulus/audio.hpp"

#include <cmath>

#include "sigc/common/errors.hpp"

namespace sigc::stimulus {

void AudioBuffer::validate() const {
  if (sample_rate <= 0) throw ValidationError("audio: sample rate must be positive");
  if (channels != 1) throw ValidationError("audio: only mono buffers are supported");
  for (double s : samples) {
    if (!std::isfinite(s)) throw ValidationError("audio: non-finite sample");
  }
}

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(energy(x) / static_cast<double>(x.size()));
}

double peak(std::span<const double> x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

double limit_peak(std::vector<double>& x) {
  const double p = peak(x);
  if (p <= 1.0) return 1.0;
  const double gain = 1.0 / p;
  for (double& v : x) {
    v *= gain;
    // Guard against 1.0000000000000002 after the division.
    if (v > 1.0) v = 1.0;
    if (v < -1.0) v = -1.0;
  }
  return gain;
}

std::size_t samples_for(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

}  // namespace sigc::stimulus
