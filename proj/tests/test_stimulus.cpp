#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "campaign_fixture.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"
#include "sigc/stimulus/filter.hpp"
#include "sigc/stimulus/generators.hpp"
#include "sigc/stimulus/wav.hpp"

using namespace sigc;
using namespace sigc::stimulus;
using namespace sigc::oracle;

TEST_CASE("wav round trip stays within quantization") {
  const auto dir = testing::temp_dir("wav");
  AudioBuffer b = speechlike(0.5);
  b.samples[10] = 1.0;
  b.samples[11] = -1.0;
  const auto path = dir + "/x.wav";
  write_wav(b, path);
  const auto info = probe_wav(path);
  CHECK(info.sample_rate == 48000);
  CHECK(info.channels == 1);
  CHECK(info.bits_per_sample == 16);
  CHECK(info.frames == b.size());
  const auto back = read_wav(path);
  REQUIRE(back.size() == b.size());
  double worst = 0;
  for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(back.samples[i] - b.samples[i]));
  CHECK(worst <= 1.0 / 32768.0);
}

TEST_CASE("wav rejects empty, truncated and unsupported files") {
  const auto dir = testing::temp_dir("wavbad");
  { std::ofstream(dir + "/empty.wav"); }
  CHECK_THROWS_AS(read_wav(dir + "/empty.wav"), FormatError);
  {
    std::ofstream os(dir + "/junk.wav", std::ios::binary);
    os << "RIFX1234WAVEfmt garbage garbage garbage";
  }
  CHECK_THROWS_AS(probe_wav(dir + "/junk.wav"), FormatError);

  AudioBuffer b = speechlike(0.1);
  write_wav(b, dir + "/ok.wav");
  auto bytes = testing::read_text(dir + "/ok.wav");
  {
    std::ofstream os(dir + "/short.wav", std::ios::binary);
    os << bytes.substr(0, bytes.size() / 2);
  }
  CHECK_THROWS_AS(read_wav(dir + "/short.wav"), FormatError);
  // Flip bits-per-sample to 24.
  bytes[34] = 24;
  {
    std::ofstream os(dir + "/b24.wav", std::ios::binary);
    os << bytes;
  }
  CHECK_THROWS_AS(probe_wav(dir + "/b24.wav"), FormatError);
  CHECK_THROWS(read_wav(dir + "/does-not-exist.wav"));
}

TEST_CASE("bandpass design validates its band and taps") {
  CHECK_THROWS_AS(design_bandpass({25000, 26000}, 48000), InvalidBandError);
  CHECK_THROWS_AS(design_bandpass({5000, 4000}, 48000), InvalidBandError);
  CHECK_THROWS_AS(design_bandpass({0, 4000}, 48000), InvalidBandError);
  CHECK_THROWS_AS(design_bandpass({3500, 22000}, 48000, 254), ValidationError);
  CHECK_THROWS_AS(design_bandpass({3500, 22000}, 48000, 101), ValidationError);
}

TEST_CASE("bandpass magnitude response meets the mask") {
  for (const BandSpec band : {kBandWideband, kBandSuperWideband, kBandFullband}) {
    const auto k = design_bandpass(band, 48000, 1023);
    CHECK(k.num_taps() == 1023);
    // Linear phase: symmetric taps.
    for (std::size_t i = 0; i < k.num_taps() / 2; ++i) CHECK(k.taps[i] == doctest::Approx(k.taps[k.num_taps() - 1 - i]));
    const double margin = 0.05 * (band.high_hz - band.low_hz);
    for (double f = band.low_hz + margin; f <= band.high_hz - margin; f += 50) {
      CHECK(20 * std::log10(k.magnitude_at(f)) >= -1.0);
    }
    const double tw = k.transition_width_hz();
    for (double f = 0; f <= band.low_hz - tw; f += 50) {
      CHECK(20 * std::log10(k.magnitude_at(f) + 1e-300) <= -50.0);
    }
    for (double f = band.high_hz + tw; f <= 24000; f += 50) {
      CHECK(20 * std::log10(k.magnitude_at(f) + 1e-300) <= -50.0);
    }
  }
}

TEST_CASE("filtered white noise keeps 99% of its energy in band") {
  const auto k = design_bandpass(kBandWideband, 48000, 1023);
  const auto y = apply_fir_valid(k, white_noise(512 * 100 + 1022, 11));
  REQUIRE(y.size() == 512 * 100);
  CHECK(band_energy_fraction(y, 48000, 3300, 22200) >= 0.99);

  for (const BandSpec band : {kBandSuperWideband, kBandFullband}) {
    const auto kb = design_bandpass(band, 48000, 1023);
    const auto yb = apply_fir_valid(kb, white_noise(512 * 100 + 1022, 12));
    CHECK(band_energy_fraction(yb, 48000, band.low_hz - 200, band.high_hz + 200) >= 0.99);
  }
}

TEST_CASE("1 kHz sine through the fullband filter is at least 50 dB down") {
  const auto k = design_bandpass(kBandFullband, 48000, 1023);
  std::vector<double> x(48000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * std::numbers::pi * 1000 * i / 48000.0);
  const auto y = apply_fir_valid(k, x);
  // Direct convolution of the steady-state part.
  std::vector<double> direct(x.size() - k.num_taps() + 1, 0.0);
  for (std::size_t n = 0; n < direct.size(); ++n) {
    for (std::size_t j = 0; j < k.num_taps(); ++j) direct[n] += k.taps[j] * x[n + k.num_taps() - 1 - j];
  }
  REQUIRE(y.size() == direct.size());
  for (std::size_t n = 0; n < y.size(); n += 97) CHECK(y[n] == doctest::Approx(direct[n]).epsilon(1e-9).scale(1e-12));
  CHECK(20 * std::log10(rms(y) / rms(x)) <= -50.0);
}

TEST_CASE("causal filtering keeps length") {
  const auto k = design_bandpass(kBandWideband, 48000, 255);
  const auto x = white_noise(1000, 1);
  CHECK(apply_fir(k, x).size() == x.size());
}

TEST_CASE("beep has the requested length and level") {
  const auto b = beep();
  CHECK(b.size() == 24000);
  CHECK(peak(b.samples) <= std::pow(10.0, -6.0 / 20.0) + 1e-12);
  CHECK(b.samples.front() == doctest::Approx(0.0));
}

TEST_CASE("bandwidth sample structure and determinism") {
  const auto base = speechlike(2.2);
  const auto a = gen_bandwidth_sample(base, kBandSuperWideband, 10.0, 7);
  const auto b = gen_bandwidth_sample(base, kBandSuperWideband, 10.0, 7);
  CHECK(a.audio.samples == b.audio.samples);
  CHECK(a.audio.size() == 2 * base.size() + a.beep_length);
  CHECK(peak(a.audio.samples) <= 1.0);

  const auto clean = gen_bandwidth_sample(base, std::nullopt, 10.0, 3);
  CHECK_FALSE(clean.has_noise);
  const auto pa = clean.part_a(), pb = clean.part_b();
  CHECK(std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()));

  CHECK_THROWS_AS(gen_bandwidth_sample(speechlike(1.5), kBandWideband, 10.0, 1), InputTooShortError);
}

TEST_CASE("added noise lies in its band at the requested SNR") {
  const auto base = speechlike(2.2);
  const auto s = gen_bandwidth_sample(base, kBandWideband, 10.0, 1);
  const auto pa = s.part_a(), pb = s.part_b();
  std::vector<double> diff(pa.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = pb[i] - pa[i];
  CHECK(band_energy_fraction(diff, 48000, 3500, 22000) >= 0.99);
  const double snr = 10 * std::log10(energy(pa) / energy(diff));
  CHECK(snr == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("battery: three noisy samples covering the three bands") {
  const auto base = speechlike(2.1);
  std::set<std::vector<std::size_t>> orders;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto bat = gen_bandwidth_battery(base, seed);
    REQUIRE(bat.samples.size() == 5);
    REQUIRE(bat.key.size() == 5);
    int noisy = 0;
    std::vector<BandSpec> bands;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(bat.key[i].index == i);
      CHECK(bat.key[i].has_noise == bat.samples[i].has_noise);
      if (bat.key[i].has_noise) {
        ++noisy;
        bands.push_back(*bat.key[i].band);
        order.push_back(i);
      }
    }
    CHECK(noisy == 3);
    for (const BandSpec band : {kBandWideband, kBandSuperWideband, kBandFullband}) {
      CHECK(std::count(bands.begin(), bands.end(), band) == 1);
    }
    orders.insert(order);
    const auto again = gen_bandwidth_battery(base, seed);
    for (std::size_t i = 0; i < 5; ++i) CHECK(again.samples[i].audio.samples == bat.samples[i].audio.samples);
  }
  CHECK(orders.size() > 1);
  CHECK_THROWS_AS(gen_bandwidth_battery(speechlike(1.0), 1), InputTooShortError);
}

TEST_CASE("battery key json") {
  const auto bat = gen_bandwidth_battery(speechlike(2.0), 4);
  const auto j = nlohmann::json::parse(battery_key_json(bat.key));
  REQUIRE(j.size() == 5);
  int noisy = 0;
  for (const auto& e : j) {
    if (e.at("has_noise").get<bool>()) {
      ++noisy;
      CHECK(e.at("band").size() == 2);
    } else {
      CHECK(e.at("band").is_null());
    }
  }
  CHECK(noisy == 3);
}

TEST_CASE("trapping clip overlays the instruction at a quarter of the clip") {
  const auto base = speechlike(4.0);
  AudioBuffer instr;
  instr.samples.resize(samples_for(1.0, 48000));
  for (std::size_t i = 0; i < instr.size(); ++i) instr.samples[i] = 0.02 * std::sin(2 * std::numbers::pi * 300 * i / 48000.0);
  const auto t = gen_trapping_clip(base, instr, TrapTarget::kWorst);
  CHECK(t.overlay_begin == 48000);
  CHECK(t.overlay_end == 96000);
  CHECK(t.audio.size() == base.size());
  CHECK(peak(t.audio.samples) <= 1.0);
  for (Dimension d : kAllDimensions) CHECK(t.expected.at(d) == 1);
  // The quiet instruction was boosted to at least the ducked bed level.
  CHECK(t.instruction_gain > 1.0);
  // Away from the overlay the clip is untouched (up to the output gain).
  CHECK(t.audio.samples[1000] == doctest::Approx(base.samples[1000] * t.output_gain));

  const auto best = gen_trapping_clip(base, instr, TrapTarget::kBest);
  for (Dimension d : kAllDimensions) CHECK(best.expected.at(d) == 5);
  CHECK(trap_target_from_string("best") == TrapTarget::kBest);
  CHECK_THROWS_AS(gen_trapping_clip(speechlike(0.5), instr, TrapTarget::kBest), ValidationError);
}
