#pragma once

#include <string>
#include <vector>

#include "sigc/compliance/chain.hpp"
#include "sigc/compliance/rational.hpp"

namespace sigc::compliance {

inline const Rational kMaxLatencyMs{20};
inline constexpr double kMaxRtf = 0.5;

// Milliseconds for a sample count at the given rate.
Rational samples_to_ms(std::int64_t samples, int sample_rate);
// Exact sample count for a duration; throws if it is not a whole number.
std::int64_t ms_to_samples(Rational ms, int sample_rate);

Rational stage_algorithmic_ms(const ProcessingStage& stage, int sample_rate);
Rational stage_buffering_ms(const ProcessingStage& stage, int sample_rate);

// Sum of per-stage algorithmic latencies.
Rational algorithmic_latency(const ProcessingChain& chain);
// Largest per-stage buffering latency (the slowest block gates output).
Rational buffering_latency(const ProcessingChain& chain);

// The time step RTF is measured against: the chain's block size.
Rational processing_step_ms(const ProcessingChain& chain);

// compute time / time step. Throws ValidationError unless time_step > 0 and
// compute >= 0.
double rtf(double compute_seconds, double time_step_seconds);

bool uses_lookahead(const ProcessingChain& chain);

struct ComplianceVerdict {
  Rational algorithmic_ms;
  Rational buffering_ms;
  Rational total_ms;
  double rtf = 0.0;
  bool rtf_ok = false;
  bool latency_ok = false;
  bool causal = false;
  bool passes = false;
  std::vector<std::string> reasons;  // one line per failed rule
};

ComplianceVerdict check_compliance(const ProcessingChain& chain, double rtf_value);

// Fixed-width verdict table for terminal output.
std::string verdict_table(const ProcessingChain& chain, const ComplianceVerdict& verdict);

}  // namespace sigc::compliance
