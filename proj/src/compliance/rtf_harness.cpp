#include "sigc/compliance/rtf_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "sigc/common/errors.hpp"

namespace sigc::compliance {

RtfMeasurement measure_rtf(const StepFn& step_fn, const std::vector<double>& signal,
                           std::size_t step_samples, int sample_rate) {
  if (step_samples == 0) throw ValidationError("step must be at least one sample");
  if (sample_rate <= 0) throw ValidationError("sample rate must be positive");
  if (signal.empty()) throw ValidationError("RTF measurement needs a non-empty signal");
  using clock = std::chrono::steady_clock;

  const std::size_t steps = (signal.size() + step_samples - 1) / step_samples;
  std::vector<double> in(step_samples), out(step_samples);
  const double step_seconds = static_cast<double>(step_samples) / sample_rate;

  RtfMeasurement m;
  m.steps = steps;
  double step_total = 0.0;
  const auto start = clock::now();
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t begin = s * step_samples;
    const std::size_t n = std::min(step_samples, signal.size() - begin);
    std::copy_n(signal.begin() + static_cast<std::ptrdiff_t>(begin), n, in.begin());
    std::fill(in.begin() + static_cast<std::ptrdiff_t>(n), in.end(), 0.0);
    const auto t0 = clock::now();
    step_fn(in, out);
    const double dt = std::chrono::duration<double>(clock::now() - t0).count();
    step_total += dt;
    m.max_step_rtf = std::max(m.max_step_rtf, dt / step_seconds);
  }
  m.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  m.audio_seconds = static_cast<double>(signal.size()) / sample_rate;
  m.file_rtf = m.wall_seconds / m.audio_seconds;
  m.per_step_rtf = (step_total / static_cast<double>(steps)) / step_seconds;
  return m;
}

StepFn fir_workload(std::size_t taps) {
  if (taps == 0) throw ValidationError("workload needs at least one tap");
  struct State {
    std::vector<double> coeffs;
    std::vector<double> history;  // circular, newest at pos
    std::size_t pos = 0;
  };
  auto st = std::make_shared<State>();
  st->coeffs.resize(taps);
  for (std::size_t i = 0; i < taps; ++i) {
    st->coeffs[i] = std::sin(0.1 * static_cast<double>(i + 1)) / static_cast<double>(taps);
  }
  st->history.assign(taps, 0.0);
  return [st](std::span<const double> in, std::span<double> out) {
    const std::size_t n = st->coeffs.size();
    for (std::size_t i = 0; i < in.size(); ++i) {
      st->pos = (st->pos + 1) % n;
      st->history[st->pos] = in[i];
      double acc = 0.0;
      std::size_t h = st->pos;
      for (std::size_t k = 0; k < n; ++k) {
        acc += st->coeffs[k] * st->history[h];
        h = h == 0 ? n - 1 : h - 1;
      }
      out[i] = acc;
    }
  };
}

}  // namespace sigc::compliance
