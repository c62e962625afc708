#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigc/qc/votes.hpp"
#include "sigc/stimulus/generators.hpp"

namespace sigc::qc {

inline constexpr int kDefaultGoldTolerance = 1;

struct GoldSpec {
  std::string clip_ref;
  std::map<Dimension, int> expected;  // values are 1 or 5
  int tolerance = kDefaultGoldTolerance;

  void validate() const;
};

enum class ControlResult { kPass, kFail };

// Pass iff every expected dimension is within `spec.tolerance` of the known
// answer. A vote missing one of those dimensions is a ValidationError.
ControlResult check_gold(const VoteRecord& vote, const GoldSpec& spec);

// Pass iff every rated dimension equals 5 (best) or 1 (worst).
ControlResult check_trapping(const VoteRecord& vote, stimulus::TrapTarget target);

enum class BandwidthAnswer { kSame, kDifferent };

BandwidthAnswer bandwidth_answer_from_string(std::string_view s);

// Ordered: a higher class implies every lower one is reproduced too.
enum class BandwidthVerdict { kFail, kNarrowband, kWideband, kSuperWideband, kFullband };

std::string_view to_string(BandwidthVerdict v);
BandwidthVerdict bandwidth_verdict_from_string(std::string_view s);

// Key entry: whether the sample carried noise and in which band.
struct BandwidthKey {
  bool has_noise = false;
  std::optional<stimulus::BandSpec> band;
};

// Decision logic for the five-sample device bandwidth check:
//  * a clean sample answered "different" -> kFail
//  * the 3.5-22 kHz noise must be heard for any pass
//  * fullband if 15-22 kHz heard, else super-wideband if 9.5-22 kHz heard,
//    else wideband.
// Throws ValidationError unless answers and key both have five entries.
BandwidthVerdict bandwidth_verdict(std::span<const BandwidthAnswer> answers,
                                   std::span<const BandwidthKey> key);

}  // namespace sigc::qc
