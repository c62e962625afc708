#include "sigc/qc/controls.hpp"

#include <cstdlib>

#include "sigc/common/errors.hpp"

namespace sigc::qc {

void VoteRecord::validate(bool require_all_dimensions) const {
  for (const auto& [dim, v] : votes) {
    if (v < 1 || v > 5) {
      throw ValidationError("vote on " + std::string(to_string(dim)) + " for clip '" + clip_ref +
                            "' is " + std::to_string(v) + ", expected 1..5");
    }
  }
  if (require_all_dimensions) {
    for (Dimension d : kAllDimensions) {
      if (!votes.contains(d)) {
        throw ValidationError("vote for clip '" + clip_ref + "' is missing scale '" +
                              std::string(to_string(d)) + "'");
      }
    }
  }
}

void GoldSpec::validate() const {
  if (expected.empty()) throw ValidationError("gold '" + clip_ref + "' has no expected answers");
  for (const auto& [dim, v] : expected) {
    if (v != 1 && v != 5) {
      throw ValidationError("gold '" + clip_ref + "' expects " + std::to_string(v) + " on " +
                            std::string(to_string(dim)) + "; gold answers must be 1 or 5");
    }
  }
  if (tolerance < 0) throw ValidationError("gold tolerance must be >= 0");
}

ControlResult check_gold(const VoteRecord& vote, const GoldSpec& spec) {
  for (const auto& [dim, expected] : spec.expected) {
    auto it = vote.votes.find(dim);
    if (it == vote.votes.end()) {
      throw ValidationError("gold vote for '" + spec.clip_ref + "' lacks scale '" +
                            std::string(to_string(dim)) + "'");
    }
    if (std::abs(it->second - expected) > spec.tolerance) return ControlResult::kFail;
  }
  return ControlResult::kPass;
}

ControlResult check_trapping(const VoteRecord& vote, stimulus::TrapTarget target) {
  if (vote.votes.empty()) throw ValidationError("trapping vote has no scales");
  const int want = stimulus::expected_trap_vote(target);
  for (const auto& [dim, v] : vote.votes) {
    if (v != want) return ControlResult::kFail;
  }
  return ControlResult::kPass;
}

BandwidthAnswer bandwidth_answer_from_string(std::string_view s) {
  if (s == "same") return BandwidthAnswer::kSame;
  if (s == "different") return BandwidthAnswer::kDifferent;
  throw ValidationError("bandwidth answer must be 'same' or 'different', got '" +
                        std::string(s) + "'");
}

std::string_view to_string(BandwidthVerdict v) {
  switch (v) {
    case BandwidthVerdict::kFail: return "fail";
    case BandwidthVerdict::kNarrowband: return "narrowband";
    case BandwidthVerdict::kWideband: return "wideband";
    case BandwidthVerdict::kSuperWideband: return "superwideband";
    case BandwidthVerdict::kFullband: return "fullband";
  }
  return "fail";
}

BandwidthVerdict bandwidth_verdict_from_string(std::string_view s) {
  for (auto v : {BandwidthVerdict::kFail, BandwidthVerdict::kNarrowband,
                 BandwidthVerdict::kWideband, BandwidthVerdict::kSuperWideband,
                 BandwidthVerdict::kFullband}) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError("unknown bandwidth class '" + std::string(s) + "'");
}

BandwidthVerdict bandwidth_verdict(std::span<const BandwidthAnswer> answers,
                                   std::span<const BandwidthKey> key) {
  if (answers.size() != 5 || key.size() != 5) {
    throw ValidationError("bandwidth check needs 5 answers and 5 key entries, got " +
                          std::to_string(answers.size()) + " and " +
                          std::to_string(key.size()));
  }
  bool heard_wb = false;
  bool heard_swb = false;
  bool heard_fb = false;
  for (std::size_t i = 0; i < 5; ++i) {
    const bool different = answers[i] == BandwidthAnswer::kDifferent;
    if (!key[i].has_noise) {
      if (different) return BandwidthVerdict::kFail;
      continue;
    }
    if (!key[i].band) throw ValidationError("noisy bandwidth key entry without a band");
    if (!different) continue;
    const auto& band = *key[i].band;
    if (band == stimulus::kBandWideband) heard_wb = true;
    else if (band == stimulus::kBandSuperWideband) heard_swb = true;
    else if (band == stimulus::kBandFullband) heard_fb = true;
    else throw ValidationError("bandwidth key uses a band outside the check set");
  }
  if (!heard_wb) return BandwidthVerdict::kFail;
  if (heard_fb) return BandwidthVerdict::kFullband;
  if (heard_swb) return BandwidthVerdict::kSuperWideband;
  return BandwidthVerdict::kWideband;
}

}  // namespace sigc::qc
