#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sigc::compliance {

// Processes one block of `step` input samples into the output block.
using StepFn = std::function<void(std::span<const double> in, std::span<double> out)>;

struct RtfMeasurement {
  std::size_t steps = 0;
  double wall_seconds = 0.0;    // whole-file wall time
  double audio_seconds = 0.0;
  double file_rtf = 0.0;        // wall_seconds / audio_seconds
  double per_step_rtf = 0.0;    // mean step compute time / step duration
  double max_step_rtf = 0.0;
};

// Feeds `signal` through `step_fn` block by block (the trailing partial
// block is zero padded) and times both the whole run and each step.
RtfMeasurement measure_rtf(const StepFn& step_fn, const std::vector<double>& signal,
                           std::size_t step_samples, int sample_rate);

// A deterministic CPU-bound stand-in for an enhancement model: a causal FIR
// of `taps` coefficients with state carried across blocks.
StepFn fir_workload(std::size_t taps);

}  // namespace sigc::compliance
