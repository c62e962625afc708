#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sigc/qc/controls.hpp"

namespace sigc::qc {

inline constexpr int kDefaultStrikeLimit = 2;

// What the screener needs to know about control items.
struct ControlSpecs {
  std::map<std::string, GoldSpec> gold;                      // by clip_ref
  std::map<std::string, stimulus::TrapTarget> trapping;      // by clip_ref
  int strike_limit = kDefaultStrikeLimit;
  // Off by default: flagged participants keep earlier accepted votes, only
  // marked.
  bool drop_flagged_votes = false;
};

// All votes a participant cast on one package page (rating + control items).
struct PackageSubmission {
  std::string participant_id;
  std::string package_id;
  std::vector<VoteRecord> votes;
};

struct PackageVerdict {
  std::string participant_id;
  std::string package_id;
  bool gold_passed = true;
  bool trapping_passed = true;
  bool passed() const { return gold_passed && trapping_passed; }
  std::vector<VoteRecord> accepted;  // rating votes only
  std::size_t rejected_unlistened = 0;
};

// Screens a single package page. Controls are recognised by clip_ref via
// `specs`; every other vote is a rating vote. Throws ValidationError when
// the page carries no control item.
PackageVerdict screen_package(const PackageSubmission& submission, const ControlSpecs& specs);

struct ParticipantReport {
  std::string participant_id;
  std::size_t packages_submitted = 0;
  std::size_t packages_excluded = 0;
  int strikes = 0;
  bool flagged = false;
};

struct AcceptedVote {
  VoteRecord vote;
  // Participant later crossed the strike limit. Retained for audit and
  // excluded from default analysis.
  bool participant_flagged = false;
};

struct ScreeningResult {
  std::vector<AcceptedVote> accepted;                  // canonical order
  std::map<std::string, ParticipantReport> participants;
  std::vector<PackageVerdict> packages;                // canonical order

  // Accepted votes from participants that are not flagged.
  std::vector<VoteRecord> analysis_votes() const;
};

// Campaign-wide screening. Result is independent of submission order.
ScreeningResult screen_submission(const std::vector<PackageSubmission>& submissions,
                                  const ControlSpecs& specs);

// participant_id,packages_submitted,packages_excluded,strikes,flagged
std::string screening_report_csv(const ScreeningResult& result);

}  // namespace sigc::qc
