#include "sigc/session/session.hpp"

#include <algorithm>
#include <cmath>

#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"

namespace sigc::session {

std::string_view to_string(Section s) {
  switch (s) {
    case Section::kHearing: return "hearing";
    case Section::kBandwidth: return "bandwidth";
    case Section::kSetupJnd: return "setup_jnd";
    case Section::kInstructions: return "instructions";
    case Section::kLoudnessAdjust: return "loudness_adjust";
    case Section::kTraining: return "training";
    case Section::kRating: return "rating";
  }
  return "hearing";
}

Section section_from_string(std::string_view s) {
  for (auto sec : {Section::kHearing, Section::kBandwidth, Section::kSetupJnd,
                   Section::kInstructions, Section::kLoudnessAdjust, Section::kTraining,
                   Section::kRating}) {
    if (to_string(sec) == s) return sec;
  }
  throw ValidationError("unknown section '" + std::string(s) + "'");
}

const Certificate* Session::certificate(CertificateKind kind) const {
  for (const auto& c : certificates) {
    if (c.kind == kind) return &c;
  }
  return nullptr;
}

bool Session::has_valid(CertificateKind kind, Timestamp now) const {
  const Certificate* c = certificate(kind);
  return c && c->valid_at(now);
}

void Session::grant(const Certificate& cert) {
  for (auto& c : certificates) {
    if (c.kind == cert.kind) {
      c = cert;
      return;
    }
  }
  certificates.push_back(cert);
}

std::vector<Dimension> draw_scale_order(std::uint64_t seed, const std::string& participant_id,
                                        int round) {
  std::vector<Dimension> order(kSubDimensions.begin(), kSubDimensions.end());
  Rng rng(derive_seed(derive_seed(seed, "scale-order:" + participant_id),
                      static_cast<std::uint64_t>(round)));
  rng.shuffle(order);
  order.push_back(Dimension::kSignal);
  order.push_back(Dimension::kOverall);
  return order;
}

Session create_session(const std::string& session_id, const std::string& participant_id,
                       std::uint64_t seed) {
  if (participant_id.empty()) throw ValidationError("participant id must be non-empty");
  Session s;
  s.id = session_id;
  s.participant_id = participant_id;
  s.scale_order = draw_scale_order(seed, participant_id, 0);
  return s;
}

Session& SessionDirectory::create(const std::string& session_id,
                                  const std::string& participant_id, std::uint64_t seed) {
  if (contains(participant_id)) {
    throw ConflictError("participant '" + participant_id + "' already has a session");
  }
  return by_participant_.emplace(participant_id, create_session(session_id, participant_id, seed))
      .first->second;
}

bool SessionDirectory::contains(const std::string& participant_id) const {
  return by_participant_.contains(participant_id);
}

namespace {

std::string task_id_for(const Session& session, Section section,
                        const std::optional<std::string>& package_id = std::nullopt) {
  std::string id = std::string(to_string(section)) + "-" + std::to_string(session.history.size());
  if (package_id) id += "-" + *package_id;
  return id;
}

std::vector<std::string> training_stimuli(const Session& session,
                                          const ProtocolMaterials& materials) {
  std::vector<std::string> refs;
  for (const auto& t : materials.training) refs.push_back(t.ref);
  Rng rng(derive_seed(derive_seed(materials.seed, "training:" + session.participant_id),
                      static_cast<std::uint64_t>(session.training_rounds_started)));
  rng.shuffle(refs);
  refs.resize(std::min(refs.size(), static_cast<std::size_t>(materials.training_clip_count)));
  return refs;
}

Task make_task(const Session& session, Section section, std::vector<std::string> stimuli) {
  Task t;
  t.id = task_id_for(session, section);
  t.section = section;
  t.stimuli = std::move(stimuli);
  t.scale_order = session.scale_order;
  return t;
}

bool slot_available(const PackageSlot& slot, Timestamp now, Duration reclaim_after) {
  if (slot.completed) return false;
  if (!slot.holder) return true;
  return now - slot.reserved_at >= reclaim_after;
}

std::optional<std::size_t> held_slot(const std::vector<PackageSlot>& plan,
                                     const Session& session) {
  if (!session.current_package) return std::nullopt;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& slot = plan[i];
    if (slot.package.id == *session.current_package && slot.holder == session.id &&
        !slot.completed) {
      return i;
    }
  }
  return std::nullopt;
}

Task rating_task(const Session& session, const std::vector<PackageSlot>& plan, std::size_t slot,
                 bool reserves) {
  const auto& pkg = plan[slot].package;
  Task t;
  t.id = task_id_for(session, Section::kRating, pkg.id);
  t.section = Section::kRating;
  for (const auto& item : pkg.items) t.stimuli.push_back(item.clip_ref);
  t.scale_order = session.scale_order;
  t.package_slot = slot;
  t.package_id = pkg.id;
  t.reserves_package = reserves;
  return t;
}

void require_played(const Session& session, const Task& task, const std::string& ref) {
  if (session.played_task_id != task.id || !session.played.contains(ref)) {
    throw ValidationError("clip '" + ref + "' was not played to the end before voting");
  }
}

void validate_scale_votes(const std::string& ref, const std::map<Dimension, int>& votes) {
  for (Dimension d : kAllDimensions) {
    auto it = votes.find(d);
    if (it == votes.end()) {
      throw ValidationError("clip '" + ref + "' is missing a vote on '" +
                            std::string(to_string(d)) + "'");
    }
    if (it->second < 1 || it->second > 5) {
      throw ValidationError("clip '" + ref + "' has vote " + std::to_string(it->second) +
                            " on '" + std::string(to_string(d)) + "', expected 1..5");
    }
  }
}

void require_ratings_for(const Task& task, const Answers& answers) {
  if (answers.ratings.size() != task.stimuli.size()) {
    throw ValidationError("expected votes for " + std::to_string(task.stimuli.size()) +
                          " clips, got " + std::to_string(answers.ratings.size()));
  }
  for (const auto& ref : task.stimuli) {
    auto it = answers.ratings.find(ref);
    if (it == answers.ratings.end()) {
      throw ValidationError("no votes for clip '" + ref + "'");
    }
    validate_scale_votes(ref, it->second);
  }
}

void finish(Session& session, const Task& task, bool passed, Timestamp now) {
  session.history.push_back({task.id, task.section, passed, now});
  session.played.clear();
  session.played_task_id.clear();
}

}  // namespace

std::optional<std::size_t> select_package(const std::vector<PackageSlot>& plan,
                                          const Session& session, Timestamp now,
                                          Duration reclaim_after) {
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!slot_available(plan[i], now, reclaim_after)) continue;
    const auto clips = plan[i].package.rating_clips();
    const bool overlap = std::any_of(clips.begin(), clips.end(), [&](const std::string& c) {
      return session.rated_clips.contains(c);
    });
    if (!overlap) return i;
  }
  return std::nullopt;
}

NextTask next_task(const Session& session, const ProtocolMaterials& materials,
                   const std::vector<PackageSlot>& plan, Timestamp now, Duration reclaim_after) {
  if (session.blocked) return NoWork{session.blocked_reason};
  if (auto slot = held_slot(plan, session)) return rating_task(session, plan, *slot, false);

  if (!session.has_valid(CertificateKind::kQualification, now)) {
    if (!session.hearing_passed) {
      std::vector<std::string> refs;
      for (const auto& h : materials.hearing) refs.push_back(h.ref);
      return make_task(session, Section::kHearing, std::move(refs));
    }
    return make_task(session, Section::kBandwidth, materials.bandwidth_refs);
  }
  if (!session.has_valid(CertificateKind::kSetup, now)) {
    std::vector<std::string> refs;
    for (const auto& p : materials.jnd) {
      refs.push_back(p.ref_a);
      refs.push_back(p.ref_b);
    }
    return make_task(session, Section::kSetupJnd, std::move(refs));
  }
  if (!session.has_valid(CertificateKind::kTraining, now)) {
    if (!session.instructions_done) {
      return make_task(session, Section::kInstructions, materials.instruction_refs);
    }
    if (!session.loudness_done) {
      return make_task(session, Section::kLoudnessAdjust, {materials.loudness_ref});
    }
    return make_task(session, Section::kTraining, training_stimuli(session, materials));
  }
  if (auto slot = select_package(plan, session, now, reclaim_after)) {
    return rating_task(session, plan, *slot, true);
  }
  return NoWork{"campaign exhausted: no package available for this participant"};
}

void reserve_package(Session& session, std::vector<PackageSlot>& plan, const Task& task,
                     Timestamp now) {
  if (task.section != Section::kRating || !task.package_slot || !task.reserves_package) return;
  auto& slot = plan.at(*task.package_slot);
  if (slot.completed) throw ConflictError("package '" + slot.package.id + "' already completed");
  slot.holder = session.id;
  slot.reserved_at = now;
  session.current_package = slot.package.id;
}

void complete_package(std::vector<PackageSlot>& plan, const SectionOutcome& outcome) {
  if (outcome.section != Section::kRating || !outcome.submission) return;
  for (auto& slot : plan) {
    if (slot.package.id == outcome.submission->package_id) {
      slot.completed = true;
      return;
    }
  }
}

void record_playback_complete(Session& session, const Task& task, const std::string& clip_ref) {
  if (std::find(task.stimuli.begin(), task.stimuli.end(), clip_ref) == task.stimuli.end()) {
    throw ValidationError("clip '" + clip_ref + "' is not part of task '" + task.id + "'");
  }
  if (session.played_task_id != task.id) {
    session.played.clear();
    session.played_task_id = task.id;
  }
  session.played.insert(clip_ref);
}

SectionOutcome submit_section(Session& session, const Task& task, const Answers& answers,
                              const ProtocolMaterials& materials, Timestamp now) {
  if (answers.task_id != task.id) {
    throw ConflictError("stale task: submitted '" + answers.task_id + "', current is '" +
                        task.id + "'");
  }
  SectionOutcome out;
  out.task_id = task.id;
  out.section = task.section;

  switch (task.section) {
    case Section::kHearing: {
      if (answers.hearing.size() != materials.hearing.size()) {
        throw ValidationError("hearing test expects " + std::to_string(materials.hearing.size()) +
                              " answers, got " + std::to_string(answers.hearing.size()));
      }
      std::size_t correct = 0;
      for (std::size_t i = 0; i < answers.hearing.size(); ++i) {
        if (answers.hearing[i] == materials.hearing[i].answer) ++correct;
      }
      const double needed = materials.hearing_pass_fraction * materials.hearing.size();
      out.passed = static_cast<double>(correct) + 1e-9 >= needed;
      if (out.passed) {
        session.hearing_passed = true;
      } else {
        session.blocked = true;
        session.blocked_reason = "hearing test failed";
      }
      out.message = std::to_string(correct) + "/" + std::to_string(materials.hearing.size()) +
                    " digit triplets correct";
      break;
    }
    case Section::kBandwidth: {
      if (answers.bandwidth.size() != materials.bandwidth_key.size()) {
        throw ValidationError("bandwidth check expects " +
                              std::to_string(materials.bandwidth_key.size()) + " answers");
      }
      const auto verdict = qc::bandwidth_verdict(answers.bandwidth, materials.bandwidth_key);
      out.bandwidth = verdict;
      session.bandwidth = verdict;
      out.passed = verdict != qc::BandwidthVerdict::kFail &&
                   verdict >= materials.required_bandwidth;
      if (out.passed) {
        session.grant(Certificate::issue(CertificateKind::kQualification, now));
        out.certificate_issued = CertificateKind::kQualification;
      } else {
        session.blocked = true;
        session.blocked_reason = "device bandwidth '" + std::string(qc::to_string(verdict)) +
                                 "' below required '" +
                                 std::string(qc::to_string(materials.required_bandwidth)) + "'";
      }
      out.message = "bandwidth verdict: " + std::string(qc::to_string(verdict));
      break;
    }
    case Section::kSetupJnd: {
      if (answers.jnd.size() != materials.jnd.size()) {
        throw ValidationError("setup check expects " + std::to_string(materials.jnd.size()) +
                              " answers, got " + std::to_string(answers.jnd.size()));
      }
      int correct = 0;
      for (std::size_t i = 0; i < answers.jnd.size(); ++i) {
        if (answers.jnd[i] != 'a' && answers.jnd[i] != 'b') {
          throw ValidationError("setup answers must be 'a' or 'b'");
        }
        if (answers.jnd[i] == materials.jnd[i].better) ++correct;
      }
      out.passed = correct >= materials.jnd_pass_count;
      if (out.passed) {
        session.grant(Certificate::issue(CertificateKind::kSetup, now));
        out.certificate_issued = CertificateKind::kSetup;
      }
      out.message = std::to_string(correct) + "/" + std::to_string(materials.jnd.size()) +
                    " comparisons correct";
      break;
    }
    case Section::kInstructions: {
      for (const auto& ref : task.stimuli) {
        if (session.played_task_id != task.id || !session.played.contains(ref)) {
          throw ValidationError("instruction sample '" + ref + "' has not been played");
        }
      }
      if (session.training_rounds_started > 0) {
        // A new training round: scales are reshuffled for it.
        session.scale_order = draw_scale_order(materials.seed, session.participant_id,
                                               session.training_rounds_started);
      }
      ++session.training_rounds_started;
      session.instructions_done = true;
      out.passed = true;
      break;
    }
    case Section::kLoudnessAdjust: {
      for (const auto& ref : task.stimuli) require_played(session, task, ref);
      session.loudness_done = true;
      out.passed = true;
      break;
    }
    case Section::kTraining: {
      require_ratings_for(task, answers);
      for (const auto& ref : task.stimuli) require_played(session, task, ref);
      for (const auto& ref : task.stimuli) {
        const auto clip = std::find_if(materials.training.begin(), materials.training.end(),
                                       [&](const TrainingClip& c) { return c.ref == ref; });
        const auto& votes = answers.ratings.at(ref);
        for (Dimension d : session.scale_order) {
          ScaleFeedback fb;
          fb.clip_ref = ref;
          fb.dimension = d;
          fb.vote = votes.at(d);
          if (clip != materials.training.end()) {
            if (auto r = clip->expected_ranges.find(d); r != clip->expected_ranges.end()) {
              fb.expected_low = r->second.first;
              fb.expected_high = r->second.second;
            }
          }
          fb.in_range = fb.vote >= fb.expected_low && fb.vote <= fb.expected_high;
          if (!fb.in_range) {
            fb.message = std::string(display_name(d)) + ": your vote " + std::to_string(fb.vote) +
                         " is outside the expected range " + std::to_string(fb.expected_low) +
                         "-" + std::to_string(fb.expected_high);
          }
          out.feedback.push_back(std::move(fb));
        }
      }
      session.grant(Certificate::issue(CertificateKind::kTraining, now));
      out.certificate_issued = CertificateKind::kTraining;
      session.instructions_done = false;
      session.loudness_done = false;
      out.passed = true;
      break;
    }
    case Section::kRating: {
      if (!task.package_id || session.current_package != task.package_id) {
        throw ConflictError("no package reserved for this rating task");
      }
      require_ratings_for(task, answers);
      for (const auto& ref : task.stimuli) require_played(session, task, ref);
      qc::PackageSubmission submission;
      submission.participant_id = session.participant_id;
      submission.package_id = *task.package_id;
      for (const auto& ref : task.stimuli) {
        qc::VoteRecord v;
        v.participant_id = session.participant_id;
        v.clip_ref = ref;
        v.votes = answers.ratings.at(ref);
        v.listen_complete = true;
        v.submitted_at = now;
        v.package_id = *task.package_id;
        submission.votes.push_back(std::move(v));
      }
      out.screening = qc::screen_package(submission, materials.controls);
      out.passed = out.screening->passed();
      out.submission = std::move(submission);
      for (const auto& ref : task.stimuli) {
        if (!materials.controls.gold.contains(ref) && !materials.controls.trapping.contains(ref)) {
          session.rated_clips.insert(ref);
        }
      }
      session.current_package.reset();
      out.message = out.passed ? "package accepted" : "control question failed";
      break;
    }
  }
  finish(session, task, out.passed, now);
  return out;
}

}  // namespace sigc::session
