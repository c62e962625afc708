#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigc/common/dimension.hpp"
#include "sigc/stimulus/audio.hpp"
#include "sigc/stimulus/filter.hpp"

namespace sigc::stimulus {

struct BeepSpec {
  double frequency_hz = 1000.0;
  double duration_s = 0.5;
  double level_dbfs = -6.0;
  double ramp_s = 0.010;
};

// Sine tone with raised-cosine on/off ramps.
AudioBuffer beep(const BeepSpec& spec = {}, int sample_rate = kDefaultSampleRate);

inline constexpr double kDefaultNoiseSnrDb = 10.0;
inline constexpr double kMinBandwidthBaseSeconds = 2.0;

// [part A][beep][part B]. Part B equals part A, plus band-limited noise when
// `band` is set.
struct BandwidthSample {
  AudioBuffer audio;
  bool has_noise = false;
  std::optional<BandSpec> band;
  std::size_t part_length = 0;
  std::size_t beep_length = 0;

  std::span<const double> part_a() const;
  std::span<const double> part_b() const;
};

BandwidthSample gen_bandwidth_sample(const AudioBuffer& base, std::optional<BandSpec> band,
                                     double noise_snr_db, std::uint64_t seed);

struct BatteryKeyEntry {
  std::size_t index = 0;
  bool has_noise = false;
  std::optional<BandSpec> band;
};

struct BandwidthBattery {
  std::vector<BandwidthSample> samples;  // presentation order
  std::vector<BatteryKeyEntry> key;      // key[i] describes samples[i]
};

// Five samples: one per check band with noise, two clean; shuffled by seed.
BandwidthBattery gen_bandwidth_battery(const AudioBuffer& base, std::uint64_t seed,
                                       double noise_snr_db = kDefaultNoiseSnrDb);

// Answer-key sidecar: [{"index":..,"has_noise":..,"band":[lo,hi]|null}].
std::string battery_key_json(const std::vector<BatteryKeyEntry>& key);

enum class TrapTarget { kBest, kWorst };

std::string_view to_string(TrapTarget t);
TrapTarget trap_target_from_string(std::string_view s);

// Vote every scale must carry for a trapping clip.
inline int expected_trap_vote(TrapTarget t) { return t == TrapTarget::kBest ? 5 : 1; }

struct TrappingClip {
  AudioBuffer audio;
  TrapTarget target = TrapTarget::kWorst;
  std::map<Dimension, int> expected;
  std::size_t overlay_begin = 0;
  std::size_t overlay_end = 0;
  // Linear gain applied to the instruction so it stays audible over the bed.
  double instruction_gain = 1.0;
  // Peak-limiting gain applied to the final mix (1 when untouched).
  double output_gain = 1.0;
};

inline constexpr double kTrapOverlayPosition = 0.25;
inline constexpr double kTrapBedAttenuationDb = -12.0;

// Mixes a spoken instruction into a normal clip starting at 25% of its
// length, ducking the clip by 12 dB under the instruction.
TrappingClip gen_trapping_clip(const AudioBuffer& base, const AudioBuffer& instruction,
                               TrapTarget target);

}  // namespace sigc::stimulus
