#pragma once

#include <span>
#include <vector>

namespace sigc::stimulus {

struct BandSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;

  // Throws InvalidBandError unless 0 < low < high <= sample_rate / 2.
  void validate(int sample_rate) const;

  friend bool operator==(const BandSpec&, const BandSpec&) = default;
};

// The three noise bands of the device bandwidth check.
inline constexpr BandSpec kBandWideband{3500.0, 22000.0};
inline constexpr BandSpec kBandSuperWideband{9500.0, 22000.0};
inline constexpr BandSpec kBandFullband{15000.0, 22000.0};

inline constexpr int kDefaultNumTaps = 1023;

struct FilterKernel {
  std::vector<double> taps;
  int sample_rate = 0;
  BandSpec band;

  std::size_t num_taps() const { return taps.size(); }
  std::size_t group_delay() const { return (taps.size() - 1) / 2; }
  // Nominal Hamming transition width, 3.3 * fs / N.
  double transition_width_hz() const;

  // Magnitude response at `hz` (linear).
  double magnitude_at(double hz) const;
};

// Linear-phase windowed-sinc (Hamming) bandpass, normalized to unit gain at
// the band centre. num_taps must be odd and >= 255.
FilterKernel design_bandpass(const BandSpec& band, int sample_rate,
                             int num_taps = kDefaultNumTaps);

// Causal convolution, output truncated to the input length.
std::vector<double> apply_fir(const FilterKernel& kernel, std::span<const double> input);

// Steady-state filtering: consumes input.size() and returns
// input.size() - num_taps + 1 fully-overlapped output samples.
std::vector<double> apply_fir_valid(const FilterKernel& kernel, std::span<const double> input);

}  // namespace sigc::stimulus
