#include "sigc/stimulus/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"

namespace sigc::stimulus {

namespace {

double db_to_gain(double db) { return std::pow(10.0, db / 20.0); }

// Raised-cosine gain ramp from 0 to 1 over `length` samples.
double ramp_gain(std::size_t i, std::size_t length) {
  if (length == 0) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) / length);
}

}  // namespace

AudioBuffer beep(const BeepSpec& spec, int sample_rate) {
  AudioBuffer out;
  out.sample_rate = sample_rate;
  const std::size_t n = samples_for(spec.duration_s, sample_rate);
  const std::size_t ramp = std::min(samples_for(spec.ramp_s, sample_rate), n / 2);
  const double amplitude = db_to_gain(spec.level_dbfs);
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double g = 1.0;
    if (i < ramp) g = ramp_gain(i, ramp);
    if (i >= n - ramp) g = ramp_gain(n - 1 - i, ramp);
    out.samples[i] = amplitude * g *
                     std::sin(2.0 * std::numbers::pi * spec.frequency_hz * i / sample_rate);
  }
  return out;
}

std::span<const double> BandwidthSample::part_a() const {
  return std::span<const double>(audio.samples).subspan(0, part_length);
}

std::span<const double> BandwidthSample::part_b() const {
  return std::span<const double>(audio.samples).subspan(part_length + beep_length, part_length);
}

BandwidthSample gen_bandwidth_sample(const AudioBuffer& base, std::optional<BandSpec> band,
                                     double noise_snr_db, std::uint64_t seed) {
  base.validate();
  if (base.duration_seconds() < kMinBandwidthBaseSeconds) {
    throw InputTooShortError("bandwidth sample base must be at least 2 s, got " +
                             std::to_string(base.duration_seconds()) + " s");
  }
  const std::size_t n = base.size();
  const AudioBuffer separator = beep({}, base.sample_rate);

  std::vector<double> part_b = base.samples;
  if (band) {
    const FilterKernel kernel = design_bandpass(*band, base.sample_rate);
    Rng rng(seed);
    std::vector<double> white(n + kernel.num_taps() - 1);
    for (double& w : white) w = rng.normal();
    std::vector<double> noise = apply_fir_valid(kernel, white);
    const double base_power = energy(base.samples) / static_cast<double>(n);
    const double noise_power = energy(noise) / static_cast<double>(n);
    if (base_power <= 0.0) throw ValidationError("bandwidth sample base is silent");
    const double gain = std::sqrt(base_power / (noise_power * std::pow(10.0, noise_snr_db / 10.0)));
    for (std::size_t i = 0; i < n; ++i) part_b[i] += gain * noise[i];
  }

  BandwidthSample out;
  out.has_noise = band.has_value();
  out.band = band;
  out.part_length = n;
  out.beep_length = separator.size();
  out.audio.sample_rate = base.sample_rate;
  auto& s = out.audio.samples;
  s.reserve(2 * n + separator.size());
  s.insert(s.end(), base.samples.begin(), base.samples.end());
  s.insert(s.end(), separator.samples.begin(), separator.samples.end());
  s.insert(s.end(), part_b.begin(), part_b.end());
  limit_peak(s);
  return out;
}

BandwidthBattery gen_bandwidth_battery(const AudioBuffer& base, std::uint64_t seed,
                                       double noise_snr_db) {
  std::vector<std::optional<BandSpec>> plan = {
      kBandWideband, kBandSuperWideband, kBandFullband, std::nullopt, std::nullopt};
  Rng order_rng(derive_seed(seed, "battery-order"));
  order_rng.shuffle(plan);

  BandwidthBattery battery;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    battery.samples.push_back(
        gen_bandwidth_sample(base, plan[i], noise_snr_db, derive_seed(seed, i)));
    battery.key.push_back({i, plan[i].has_value(), plan[i]});
  }
  return battery;
}

std::string battery_key_json(const std::vector<BatteryKeyEntry>& key) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& k : key) {
    nlohmann::json e;
    e["index"] = k.index;
    e["has_noise"] = k.has_noise;
    if (k.band) {
      e["band"] = {k.band->low_hz, k.band->high_hz};
    } else {
      e["band"] = nullptr;
    }
    arr.push_back(std::move(e));
  }
  return arr.dump(2) + "\n";
}

std::string_view to_string(TrapTarget t) { return t == TrapTarget::kBest ? "best" : "worst"; }

TrapTarget trap_target_from_string(std::string_view s) {
  if (s == "best") return TrapTarget::kBest;
  if (s == "worst") return TrapTarget::kWorst;
  throw ValidationError("trap target must be 'best' or 'worst', got '" + std::string(s) + "'");
}

TrappingClip gen_trapping_clip(const AudioBuffer& base, const AudioBuffer& instruction,
                               TrapTarget target) {
  base.validate();
  instruction.validate();
  if (instruction.sample_rate != base.sample_rate) {
    throw ValidationError("trapping clip: instruction and base sample rates differ");
  }
  if (instruction.size() >= base.size()) {
    throw ValidationError("trapping clip: instruction (" +
                          std::to_string(instruction.duration_seconds()) +
                          " s) must be shorter than the base clip (" +
                          std::to_string(base.duration_seconds()) + " s)");
  }
  const double instr_rms = rms(instruction.samples);
  if (instr_rms <= 0.0) throw ValidationError("trapping clip: instruction is silent");

  const std::size_t n = base.size();
  const std::size_t len = instruction.size();
  // Start at 25%; pulled earlier only when the instruction would overrun.
  const std::size_t begin = std::min(samples_for(kTrapOverlayPosition * base.duration_seconds(),
                                                 base.sample_rate),
                                     n - len);
  const std::size_t end = begin + len;
  const std::size_t ramp = samples_for(0.010, base.sample_rate);
  const double duck = db_to_gain(kTrapBedAttenuationDb);

  TrappingClip out;
  out.target = target;
  out.overlay_begin = begin;
  out.overlay_end = end;
  for (Dimension d : kAllDimensions) out.expected[d] = expected_trap_vote(target);

  std::vector<double> mix = base.samples;
  for (std::size_t i = 0; i < n; ++i) {
    double g = 1.0;
    if (i >= begin && i < end) {
      g = duck;
    } else if (i < begin && begin - i <= ramp) {
      g = 1.0 + (duck - 1.0) * ramp_gain(ramp - (begin - i), ramp);
    } else if (i >= end && i - end < ramp) {
      g = duck + (1.0 - duck) * ramp_gain(i - end, ramp);
    }
    mix[i] *= g;
  }
  const double bed_rms =
      rms(std::span<const double>(mix).subspan(begin, len));
  out.instruction_gain = std::max(1.0, bed_rms / instr_rms);
  for (std::size_t i = 0; i < len; ++i) {
    mix[begin + i] += out.instruction_gain * instruction.samples[i];
  }
  out.output_gain = limit_peak(mix);
  out.audio.sample_rate = base.sample_rate;
  out.audio.samples = std::move(mix);
  return out;
}

}  // namespace sigc::stimulus
