#include "sigc/service/service.hpp"

#include <cmath>
#include <filesystem>

#include "sigc/analytics/challenge.hpp"
#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"

namespace sigc::service {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string session_id_for(std::uint64_t seed, const std::string& campaign_id,
                           const std::string& participant_id) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "s%016llx",
                static_cast<unsigned long long>(
                    derive_seed(seed, "session:" + campaign_id + ":" + participant_id)));
  return buf;
}

json score_json(const analytics::DimensionScores& scores) {
  json j = json::object();
  for (Dimension d : kAllDimensions) {
    if (!scores.has(d)) continue;
    const auto& s = scores.at(d);
    j[std::string(to_string(d))] = {{"mean", s.mean}, {"ci95", s.ci95}, {"n", s.vote_count}};
  }
  return j;
}

}  // namespace

Timestamp system_now() {
  return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
}

std::string events_path(const std::string& data_dir) { return (fs::path(data_dir) / "events.jsonl").string(); }
std::string snapshot_path(const std::string& data_dir) { return (fs::path(data_dir) / "snapshot.json").string(); }

CampaignResults compute_results(const CampaignState& c, analytics::Level level) {
  CampaignResults r;
  r.screening = qc::screen_submission(c.submissions, c.manifest->materials.controls);
  for (const auto& v : r.screening.analysis_votes()) {
    const ManifestClip* clip = c.manifest->clip(v.clip_ref);
    if (!clip) continue;
    for (const auto& [d, vote] : v.votes) {
      r.votes.push_back({v.participant_id, clip->clip_id, clip->model_id, d, vote});
    }
  }
  r.table.level = level;
  if (r.votes.empty()) return r;
  std::optional<std::string> baseline;
  if (const auto& b = c.manifest->baseline_model) {
    for (const auto& v : r.votes) {
      if (v.model_id == *b) {
        baseline = b;
        break;
      }
    }
  }
  r.table = analytics::build_clip_table(r.votes, baseline);
  if (level == analytics::Level::kModel) r.table = analytics::build_model_table(r.table);
  return r;
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (options_.data_dir.empty()) throw ConfigurationError("service needs a data directory");
  fs::create_directories(options_.data_dir);
  log_ = std::make_unique<EventLog>(events_path(options_.data_dir));
  std::uint64_t from = 0;
  if (auto snap = read_snapshot(snapshot_path(options_.data_dir))) {
    if (snap->seq > log_->last_seq()) {
      throw FormatError("snapshot is ahead of the event log (" + std::to_string(snap->seq) + " > " +
                        std::to_string(log_->last_seq()) + ")");
    }
    state_ = state_from_json(snap->state);
    from = snap->seq;
  }
  for (const auto& e : log_->since(from)) apply_event(state_, e, options_.reclaim_after);
}

json Service::execute(EventRecord e) {
  // Caller holds mu_. Validate against the current state, make the event
  // durable, then commit.
  e.ts = options_.clock();
  Transition t = prepare(state_, e, options_.reclaim_after);
  const EventRecord stored = log_->append(std::move(e));
  json response = t.response;
  commit(state_, std::move(t), stored.seq);
  if (options_.snapshot_every > 0 && stored.seq % options_.snapshot_every == 0) {
    write_snapshot(snapshot_path(options_.data_dir), state_.seq, state_to_json(state_));
  }
  return response;
}

json Service::create_campaign(const std::string& manifest_path) {
  const Manifest m = ingest_manifest_file(manifest_path);
  const std::string base = fs::absolute(fs::path(manifest_path)).parent_path().string();
  std::lock_guard lock(mu_);
  EventRecord e;
  e.kind = kCampaignCreated;
  e.payload = {{"manifest", m.document}, {"base_dir", base}};
  return execute(std::move(e));
}

json Service::create_campaign(const json& manifest, const std::string& base_dir) {
  const std::string base = fs::absolute(fs::path(base_dir)).lexically_normal().string();
  const Manifest m = parse_manifest(manifest, base);
  const auto issues = check_media(m);
  if (!issues.empty()) throw ValidationError("manifest media check failed", issues);
  std::lock_guard lock(mu_);
  EventRecord e;
  e.kind = kCampaignCreated;
  e.payload = {{"manifest", m.document}, {"base_dir", base}};
  return execute(std::move(e));
}

json Service::open_campaign(const std::string& campaign_id) {
  std::lock_guard lock(mu_);
  EventRecord e;
  e.kind = kCampaignOpened;
  e.payload = {{"campaign", campaign_id}};
  return execute(std::move(e));
}

json Service::close_campaign(const std::string& campaign_id) {
  std::lock_guard lock(mu_);
  EventRecord e;
  e.kind = kCampaignClosed;
  e.payload = {{"campaign", campaign_id}};
  return execute(std::move(e));
}

json Service::create_session(const std::string& campaign_id, const std::string& participant_id) {
  if (participant_id.empty()) throw ValidationError("participant_id is required");
  std::lock_guard lock(mu_);
  const auto& c = campaign_of(state_, campaign_id);
  if (auto it = c.participants.find(participant_id); it != c.participants.end()) {
    return {{"session_id", it->second}, {"participant_id", participant_id}, {"resumed", true}};
  }
  EventRecord e;
  e.kind = kSessionCreated;
  e.session = session_id_for(c.manifest->seed, campaign_id, participant_id);
  e.payload = {{"campaign", campaign_id}, {"participant_id", participant_id}};
  return execute(std::move(e));
}

json Service::next_task(const std::string& session_id) {
  std::lock_guard lock(mu_);
  const auto& c = campaign_of_session(state_, session_id);
  const std::string campaign_id = c.manifest->campaign_id;
  const Timestamp now = options_.clock();
  auto next = current_task(c, c.sessions.at(session_id), now, options_.reclaim_after);
  if (auto* task = std::get_if<session::Task>(&next); task && task->reserves_package) {
    EventRecord e;
    e.kind = kPackageReserved;
    e.session = session_id;
    e.payload = {{"campaign", campaign_id}, {"task_id", task->id}};
    execute(std::move(e));
    const auto& after = campaign_of(state_, campaign_id);
    next = current_task(after, after.sessions.at(session_id), now, options_.reclaim_after);
  }
  return task_document(campaign_id, next);
}

json Service::playback_complete(const std::string& session_id, const std::string& task_id,
                                const std::string& clip_ref) {
  std::lock_guard lock(mu_);
  const auto& c = campaign_of_session(state_, session_id);
  EventRecord e;
  e.kind = kPlaybackComplete;
  e.session = session_id;
  e.payload = {{"campaign", c.manifest->campaign_id}, {"task_id", task_id}, {"clip_ref", clip_ref}};
  return execute(std::move(e));
}

json Service::submit_answers(const std::string& session_id, const std::string& idempotency_key,
                             const json& answers) {
  if (idempotency_key.empty()) throw ValidationError("an idempotency key is required on submits");
  std::lock_guard lock(mu_);
  const auto& c = campaign_of_session(state_, session_id);
  if (auto it = c.responses.find(session_id + "/" + idempotency_key); it != c.responses.end()) {
    return it->second;
  }
  if (!answers.is_object()) throw ValidationError("answers must be an object");
  const auto task_id = answers.find("task_id");
  if (task_id == answers.end() || !task_id->is_string()) throw ValidationError("answers need a task_id");
  EventRecord e;
  e.kind = kAnswersSubmitted;
  e.session = session_id;
  e.payload = {{"campaign", c.manifest->campaign_id},
               {"task_id", *task_id},
               {"idempotency_key", idempotency_key},
               {"answers", answers}};
  return execute(std::move(e));
}

const CampaignState& Service::exportable(const std::string& campaign_id, bool partial) const {
  const auto& c = campaign_of(state_, campaign_id);
  if (c.status != CampaignStatus::kClosed && !partial) {
    throw ConflictError("campaign '" + campaign_id + "' is " + std::string(to_string(c.status)) +
                        "; close it or request partial results");
  }
  return c;
}

json Service::results_document(const std::string& campaign_id, analytics::Level level, bool partial) {
  std::lock_guard lock(mu_);
  const auto& c = exportable(campaign_id, partial);
  const auto r = compute_results(c, level);
  std::size_t flagged = 0;
  for (const auto& [id, p] : r.screening.participants) flagged += p.flagged ? 1 : 0;
  std::size_t failed = 0;
  for (const auto& p : r.screening.packages) failed += p.passed() ? 0 : 1;

  json rows = json::array();
  for (const auto& [id, row] : r.table.rows) {
    json jr{{"entity_id", row.entity_id}, {"model_id", row.model_id}, {"scores", score_json(row.scores)}};
    if (level == analytics::Level::kClip) jr["clip_id"] = row.clip_id;
    if (row.scores.has(Dimension::kSignal) && row.scores.has(Dimension::kOverall)) {
      jr["m"] = analytics::challenge_metric(row.scores.at(Dimension::kSignal).mean,
                                            row.scores.at(Dimension::kOverall).mean);
    } else {
      jr["m"] = nullptr;
    }
    rows.push_back(std::move(jr));
  }
  return {{"campaign_id", campaign_id},
          {"level", analytics::to_string(level)},
          {"status", std::string(to_string(c.status))},
          {"partial", c.status != CampaignStatus::kClosed},
          {"baseline_model", r.table.baseline_model ? json(*r.table.baseline_model) : json(nullptr)},
          {"accepted_votes", r.votes.size()},
          {"packages_submitted", r.screening.packages.size()},
          {"packages_failed", failed},
          {"participants_flagged", flagged},
          {"rows", rows}};
}

std::string Service::results_csv(const std::string& campaign_id, analytics::Level level, bool partial) {
  std::lock_guard lock(mu_);
  return analytics::score_table_csv(compute_results(exportable(campaign_id, partial), level).table);
}

std::string Service::media_file(const std::string& campaign_id, const std::string& ref) const {
  std::lock_guard lock(mu_);
  return media_path(*campaign_of(state_, campaign_id).manifest, ref);
}

json Service::campaign_summary(const std::string& campaign_id) const {
  std::lock_guard lock(mu_);
  const auto& c = campaign_of(state_, campaign_id);
  std::size_t completed = 0, reserved = 0;
  for (const auto& s : c.plan) {
    completed += s.completed ? 1 : 0;
    reserved += (!s.completed && s.holder) ? 1 : 0;
  }
  return {{"campaign_id", campaign_id},
          {"status", std::string(to_string(c.status))},
          {"packages", c.plan.size()},
          {"packages_completed", completed},
          {"packages_reserved", reserved},
          {"sessions", c.sessions.size()}};
}

json Service::state_document() const {
  std::lock_guard lock(mu_);
  return state_to_json(state_);
}

std::uint64_t Service::last_seq() const {
  std::lock_guard lock(mu_);
  return log_->last_seq();
}

std::size_t Service::event_count() const {
  std::lock_guard lock(mu_);
  return log_->events().size();
}

void Service::snapshot() {
  std::lock_guard lock(mu_);
  write_snapshot(snapshot_path(options_.data_dir), state_.seq, state_to_json(state_));
}

void Service::inject_fault(FaultPoint p) {
  std::lock_guard lock(mu_);
  log_->inject_fault(p);
}

}  // namespace sigc::service
