#include "sigc/compliance/latency.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sigc/common/errors.hpp"

namespace sigc::compliance {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string ms_text(Rational ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", ms.to_double());
  std::string out(buf);
  if (!ms.is_integer()) out += " (" + ms.str() + ")";
  return out;
}

}  // namespace

Rational samples_to_ms(std::int64_t samples, int sample_rate) {
  if (sample_rate <= 0) throw ValidationError("sample rate must be positive");
  return Rational(samples * 1000, sample_rate);
}

std::int64_t ms_to_samples(Rational ms, int sample_rate) {
  const Rational s = ms * Rational(sample_rate, 1000);
  if (!s.is_integer()) {
    throw ValidationError(ms.str() + " ms is not a whole number of samples at " +
                          std::to_string(sample_rate) + " Hz");
  }
  return s.num();
}

Rational stage_algorithmic_ms(const ProcessingStage& stage, int sample_rate) {
  return std::visit(
      overloaded{[](const StftStage& s) {
                   return (s.window_ms - s.hop_ms) + Rational(s.lookahead_frames) * s.hop_ms;
                 },
                 [&](const ConvStage& s) {
                   return samples_to_ms(s.kernel_samples - 1 - s.left_pad_samples, sample_rate);
                 },
                 [](const OverlapSaveStage&) { return Rational(0); },
                 [](const PassthroughStage&) { return Rational(0); }},
      stage);
}

Rational stage_buffering_ms(const ProcessingStage& stage, int sample_rate) {
  return std::visit(overloaded{[](const StftStage& s) { return s.hop_ms; },
                               [&](const ConvStage& s) {
                                 return samples_to_ms(s.stride_samples, sample_rate);
                               },
                               [](const OverlapSaveStage& s) { return s.frame_ms; },
                               [](const PassthroughStage&) { return Rational(0); }},
                    stage);
}

Rational algorithmic_latency(const ProcessingChain& chain) {
  chain.validate();
  Rational total(0);
  for (const auto& s : chain.stages) total += stage_algorithmic_ms(s, chain.sample_rate);
  return total;
}

Rational buffering_latency(const ProcessingChain& chain) {
  chain.validate();
  Rational worst(0);
  for (const auto& s : chain.stages) worst = max(worst, stage_buffering_ms(s, chain.sample_rate));
  return worst;
}

Rational processing_step_ms(const ProcessingChain& chain) { return buffering_latency(chain); }

double rtf(double compute_seconds, double time_step_seconds) {
  if (!(time_step_seconds > 0.0)) throw ValidationError("RTF time step must be positive");
  if (!(compute_seconds >= 0.0)) throw ValidationError("compute time must be non-negative");
  return compute_seconds / time_step_seconds;
}

bool uses_lookahead(const ProcessingChain& chain) {
  for (const auto& s : chain.stages) {
    if (const auto* st = std::get_if<StftStage>(&s); st && st->lookahead_frames > 0) return true;
  }
  return false;
}

ComplianceVerdict check_compliance(const ProcessingChain& chain, double rtf_value) {
  if (!(rtf_value >= 0.0) || !std::isfinite(rtf_value)) {
    throw ValidationError("RTF must be a finite non-negative number");
  }
  ComplianceVerdict v;
  v.algorithmic_ms = algorithmic_latency(chain);
  v.buffering_ms = buffering_latency(chain);
  v.total_ms = v.algorithmic_ms + v.buffering_ms;
  v.rtf = rtf_value;
  v.rtf_ok = rtf_value <= kMaxRtf;
  v.latency_ok = v.total_ms <= kMaxLatencyMs;
  v.causal = !uses_lookahead(chain);
  if (!v.rtf_ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "rule 1: RTF %.4f exceeds 0.5", rtf_value);
    v.reasons.emplace_back(buf);
  }
  if (!v.latency_ok) {
    v.reasons.push_back("rule 2: algorithmic + buffering latency " + ms_text(v.total_ms) +
                        " ms exceeds 20 ms");
  }
  if (!v.causal) v.reasons.emplace_back("rule 3: chain uses lookahead (future) frames");
  v.passes = v.rtf_ok && v.latency_ok && v.causal;
  return v;
}

std::string verdict_table(const ProcessingChain& chain, const ComplianceVerdict& verdict) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %-14s %22s %22s\n", "#", "stage", "algorithmic_ms",
                "buffering_ms");
  os << line;
  for (std::size_t i = 0; i < chain.stages.size(); ++i) {
    const auto& s = chain.stages[i];
    std::snprintf(line, sizeof line, "%-4zu %-14s %22s %22s\n", i, stage_name(s).c_str(),
                  ms_text(stage_algorithmic_ms(s, chain.sample_rate)).c_str(),
                  ms_text(stage_buffering_ms(s, chain.sample_rate)).c_str());
    os << line;
  }
  os << "\n";
  std::snprintf(line, sizeof line, "%-28s %s\n", "algorithmic latency (ms)",
                ms_text(verdict.algorithmic_ms).c_str());
  os << line;
  std::snprintf(line, sizeof line, "%-28s %s\n", "buffering latency (ms)",
                ms_text(verdict.buffering_ms).c_str());
  os << line;
  std::snprintf(line, sizeof line, "%-28s %s\n", "total latency (ms)", ms_text(verdict.total_ms).c_str());
  os << line;
  std::snprintf(line, sizeof line, "%-28s %.4f\n", "rtf", verdict.rtf);
  os << line;
  std::snprintf(line, sizeof line, "%-28s %s\n", "rule 1 (rtf <= 0.5)", verdict.rtf_ok ? "pass" : "FAIL");
  os << line;
  std::snprintf(line, sizeof line, "%-28s %s\n", "rule 2 (latency <= 20 ms)",
                verdict.latency_ok ? "pass" : "FAIL");
  os << line;
  std::snprintf(line, sizeof line, "%-28s %s\n", "rule 3 (no lookahead)", verdict.causal ? "pass" : "FAIL");
  os << line;
  std::snprintf(line, sizeof line, "%-28s %s\n", "verdict", verdict.passes ? "PASS" : "FAIL");
  os << line;
  for (const auto& r : verdict.reasons) os << "  " << r << "\n";
  return os.str();
}

}  // namespace sigc::compliance
