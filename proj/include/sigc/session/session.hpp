#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sigc/common/dimension.hpp"
#include "sigc/common/time.hpp"
#include "sigc/qc/controls.hpp"
#include "sigc/qc/screening.hpp"
#include "sigc/session/certificate.hpp"
#include "sigc/session/packages.hpp"

namespace sigc::session {

enum class Section {
  kHearing,
  kBandwidth,
  kSetupJnd,
  kInstructions,
  kLoudnessAdjust,
  kTraining,
  kRating,
};

std::string_view to_string(Section s);
Section section_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Campaign-provided protocol material. Stimuli are referenced by clip ref;
// the service maps refs to media URLs.

struct HearingStimulus {
  std::string ref;
  std::string answer;  // the digit triplet, e.g. "364"
};

struct JndPair {
  std::string ref_a;
  std::string ref_b;
  char better = 'a';  // 'a' or 'b'
};

struct TrainingClip {
  std::string ref;
  // Inclusive acceptable vote interval per scale, used for live feedback.
  std::map<Dimension, std::pair<int, int>> expected_ranges;
};

struct ProtocolMaterials {
  std::vector<HearingStimulus> hearing;
  double hearing_pass_fraction = 0.8;

  std::vector<std::string> bandwidth_refs;       // presentation order
  std::vector<qc::BandwidthKey> bandwidth_key;   // parallel to bandwidth_refs
  qc::BandwidthVerdict required_bandwidth = qc::BandwidthVerdict::kFullband;

  std::vector<JndPair> jnd;
  int jnd_pass_count = 3;

  std::vector<std::string> instruction_refs;
  std::string loudness_ref;

  std::vector<TrainingClip> training;
  int training_clip_count = 7;

  qc::ControlSpecs controls;
  std::uint64_t seed = 2023;
};

// ---------------------------------------------------------------------------

struct TaskRecord {
  std::string task_id;
  Section section = Section::kHearing;
  bool passed = false;
  Timestamp completed_at{};
};

struct Session {
  std::string id;
  std::string participant_id;
  std::vector<Certificate> certificates;  // latest per kind
  std::vector<Dimension> scale_order;
  std::optional<std::string> current_package;
  std::vector<TaskRecord> history;

  // Progress inside the qualification section and the current training
  // round; not expressible as certificates.
  bool hearing_passed = false;
  std::optional<qc::BandwidthVerdict> bandwidth;
  bool blocked = false;
  std::string blocked_reason;
  bool instructions_done = false;
  bool loudness_done = false;
  int training_rounds_started = 0;

  std::string played_task_id;
  std::set<std::string> played;       // playback-complete marks for played_task_id
  std::set<std::string> rated_clips;  // rating clips already voted on

  const Certificate* certificate(CertificateKind kind) const;
  bool has_valid(CertificateKind kind, Timestamp now) const;
  void grant(const Certificate& cert);
};

// Shuffled sub-dimensions followed by Signal, Overall.
std::vector<Dimension> draw_scale_order(std::uint64_t seed, const std::string& participant_id,
                                        int round);

Session create_session(const std::string& session_id, const std::string& participant_id,
                       std::uint64_t seed);

// Sessions of one campaign keyed by participant; rejects duplicates.
class SessionDirectory {
 public:
  Session& create(const std::string& session_id, const std::string& participant_id,
                  std::uint64_t seed);
  bool contains(const std::string& participant_id) const;

 private:
  std::map<std::string, Session> by_participant_;
};

// ---------------------------------------------------------------------------

struct PackageSlot {
  TestPackage package;
  std::optional<std::string> holder;  // session id
  Timestamp reserved_at{};
  bool completed = false;
};

inline constexpr Duration kDefaultReclaimAfter = std::chrono::hours(24);

struct Task {
  std::string id;
  Section section = Section::kHearing;
  std::vector<std::string> stimuli;
  std::vector<Dimension> scale_order;
  std::optional<std::size_t> package_slot;
  std::optional<std::string> package_id;
  // First issue of a rating task: the caller must record the reservation.
  bool reserves_package = false;
};

struct SectionOutcome;

struct NoWork {
  std::string reason;
};

using NextTask = std::variant<Task, NoWork>;

// Pure routing over (session, plan, now).
NextTask next_task(const Session& session, const ProtocolMaterials& materials,
                   const std::vector<PackageSlot>& plan, Timestamp now,
                   Duration reclaim_after = kDefaultReclaimAfter);

// Lowest-index package that is free (or whose reservation lapsed) and shares
// no rating clip with what the session already rated.
std::optional<std::size_t> select_package(const std::vector<PackageSlot>& plan,
                                          const Session& session, Timestamp now,
                                          Duration reclaim_after = kDefaultReclaimAfter);

// Records the reservation carried by a rating task (reserves_package set).
void reserve_package(Session& session, std::vector<PackageSlot>& plan, const Task& task,
                     Timestamp now);

// Marks the session's package completed after its rating submission.
void complete_package(std::vector<PackageSlot>& plan, const SectionOutcome& outcome);

// Marks a stimulus of `task` as played to the end. Throws ValidationError for
// refs outside the task.
void record_playback_complete(Session& session, const Task& task, const std::string& clip_ref);

struct Answers {
  std::string task_id;
  std::vector<std::string> hearing;
  std::vector<qc::BandwidthAnswer> bandwidth;
  std::vector<char> jnd;
  std::map<std::string, std::map<Dimension, int>> ratings;  // training + rating
};

struct ScaleFeedback {
  std::string clip_ref;
  Dimension dimension = Dimension::kOverall;
  int vote = 0;
  int expected_low = 1;
  int expected_high = 5;
  bool in_range = true;
  std::string message;
};

struct SectionOutcome {
  std::string task_id;
  Section section = Section::kHearing;
  bool passed = false;
  std::optional<CertificateKind> certificate_issued;
  std::optional<qc::BandwidthVerdict> bandwidth;
  std::vector<ScaleFeedback> feedback;
  std::optional<qc::PackageVerdict> screening;
  std::optional<qc::PackageSubmission> submission;
  std::string message;
};

// Applies a section submission. `task` must be the session's current task;
// a differing answers.task_id raises ConflictError. Malformed answers raise
// ValidationError and leave the session untouched.
SectionOutcome submit_section(Session& session, const Task& task, const Answers& answers,
                              const ProtocolMaterials& materials, Timestamp now);

}  // namespace sigc::session
