#include "sigc/stimulus/filter.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "sigc/common/errors.hpp"

namespace sigc::stimulus {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

}  // namespace

void BandSpec::validate(int sample_rate) const {
  const double nyquist = sample_rate / 2.0;
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || high_hz > nyquist) {
    throw InvalidBandError("invalid band " + std::to_string(low_hz) + "-" +
                           std::to_string(high_hz) + " Hz for sample rate " +
                           std::to_string(sample_rate));
  }
}

double FilterKernel::transition_width_hz() const {
  return 3.3 * sample_rate / static_cast<double>(taps.size());
}

double FilterKernel::magnitude_at(double hz) const {
  const double w = 2.0 * std::numbers::pi * hz / sample_rate;
  std::complex<double> acc = 0.0;
  for (std::size_t n = 0; n < taps.size(); ++n) {
    acc += taps[n] * std::polar(1.0, -w * static_cast<double>(n));
  }
  return std::abs(acc);
}

FilterKernel design_bandpass(const BandSpec& band, int sample_rate, int num_taps) {
  if (sample_rate <= 0) throw ValidationError("sample rate must be positive");
  band.validate(sample_rate);
  if (num_taps < 255 || num_taps % 2 == 0) {
    throw ValidationError("num_taps must be odd and >= 255, got " + std::to_string(num_taps));
  }
  const double f_lo = band.low_hz / sample_rate;
  const double f_hi = band.high_hz / sample_rate;
  const int order = num_taps - 1;
  const double centre = order / 2.0;

  FilterKernel kernel;
  kernel.sample_rate = sample_rate;
  kernel.band = band;
  kernel.taps.resize(num_taps);
  for (int n = 0; n < num_taps; ++n) {
    const double t = n - centre;
    const double ideal = 2.0 * f_hi * sinc(2.0 * f_hi * t) - 2.0 * f_lo * sinc(2.0 * f_lo * t);
    const double window = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / order);
    kernel.taps[n] = ideal * window;
  }
  const double gain = kernel.magnitude_at(0.5 * (band.low_hz + band.high_hz));
  for (double& h : kernel.taps) h /= gain;
  return kernel;
}

std::vector<double> apply_fir(const FilterKernel& kernel, std::span<const double> input) {
  const auto& h = kernel.taps;
  std::vector<double> out(input.size(), 0.0);
  for (std::size_t n = 0; n < input.size(); ++n) {
    const std::size_t kmax = std::min(h.size(), n + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * input[n - k];
    out[n] = acc;
  }
  return out;
}

std::vector<double> apply_fir_valid(const FilterKernel& kernel, std::span<const double> input) {
  const auto& h = kernel.taps;
  if (input.size() < h.size()) return {};
  const std::size_t m = h.size();
  std::vector<double> out(input.size() - m + 1);
  for (std::size_t n = 0; n < out.size(); ++n) {
    const double* x = input.data() + n + m - 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += h[k] * x[-static_cast<std::ptrdiff_t>(k)];
    out[n] = acc;
  }
  return out;
}

}  // namespace sigc::stimulus
