#include "sigc/qc/screening.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "sigc/common/csv.hpp"
#include "sigc/common/errors.hpp"

namespace sigc::qc {

PackageVerdict screen_package(const PackageSubmission& submission, const ControlSpecs& specs) {
  PackageVerdict verdict;
  verdict.participant_id = submission.participant_id;
  verdict.package_id = submission.package_id;
  bool saw_control = false;
  std::vector<const VoteRecord*> rating;
  for (const auto& vote : submission.votes) {
    if (auto g = specs.gold.find(vote.clip_ref); g != specs.gold.end()) {
      saw_control = true;
      if (check_gold(vote, g->second) == ControlResult::kFail) verdict.gold_passed = false;
    } else if (auto t = specs.trapping.find(vote.clip_ref); t != specs.trapping.end()) {
      saw_control = true;
      if (check_trapping(vote, t->second) == ControlResult::kFail) verdict.trapping_passed = false;
    } else {
      rating.push_back(&vote);
    }
  }
  if (!saw_control) {
    throw ValidationError("package '" + submission.package_id + "' from '" +
                          submission.participant_id + "' contains no control item");
  }
  if (!verdict.passed()) return verdict;
  for (const VoteRecord* v : rating) {
    if (!v->listen_complete) {
      ++verdict.rejected_unlistened;
      continue;
    }
    verdict.accepted.push_back(*v);
  }
  return verdict;
}

std::vector<VoteRecord> ScreeningResult::analysis_votes() const {
  std::vector<VoteRecord> out;
  for (const auto& a : accepted) {
    if (!a.participant_flagged) out.push_back(a.vote);
  }
  return out;
}

ScreeningResult screen_submission(const std::vector<PackageSubmission>& submissions,
                                  const ControlSpecs& specs) {
  ScreeningResult result;
  for (const auto& s : submissions) {
    PackageVerdict v = screen_package(s, specs);
    auto& report = result.participants[s.participant_id];
    report.participant_id = s.participant_id;
    ++report.packages_submitted;
    if (!v.passed()) {
      ++report.packages_excluded;
      ++report.strikes;
    }
    result.packages.push_back(std::move(v));
  }
  for (auto& [id, report] : result.participants) {
    report.flagged = report.strikes >= specs.strike_limit;
  }
  std::sort(result.packages.begin(), result.packages.end(),
            [](const PackageVerdict& a, const PackageVerdict& b) {
              return std::tie(a.participant_id, a.package_id) <
                     std::tie(b.participant_id, b.package_id);
            });
  for (const auto& pkg : result.packages) {
    const bool flagged = result.participants.at(pkg.participant_id).flagged;
    if (flagged && specs.drop_flagged_votes) continue;
    for (const auto& vote : pkg.accepted) result.accepted.push_back({vote, flagged});
  }
  std::stable_sort(result.accepted.begin(), result.accepted.end(),
                   [](const AcceptedVote& a, const AcceptedVote& b) {
                     return std::tie(a.vote.participant_id, a.vote.package_id, a.vote.clip_ref) <
                            std::tie(b.vote.participant_id, b.vote.package_id, b.vote.clip_ref);
                   });
  return result;
}

std::string screening_report_csv(const ScreeningResult& result) {
  std::ostringstream os;
  csv::write_row(os, {"participant_id", "packages_submitted", "packages_excluded", "strikes",
                      "flagged"});
  for (const auto& [id, r] : result.participants) {
    csv::write_row(os, {id, std::to_string(r.packages_submitted),
                        std::to_string(r.packages_excluded), std::to_string(r.strikes),
                        r.flagged ? "true" : "false"});
  }
  return os.str();
}

}  // namespace sigc::qc
