#include "sigc/service/state.hpp"

#include "sigc/common/errors.hpp"

namespace sigc::service {

namespace {

using nlohmann::json;
using session::Section;

template <class T>
std::vector<json> map_vec(const std::vector<T>& v, json (*f)(const T&)) {
  std::vector<json> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(f(x));
  return out;
}

json votes_json(const std::map<Dimension, int>& votes) {
  json j = json::object();
  for (const auto& [d, v] : votes) j[std::string(to_string(d))] = v;
  return j;
}

std::map<Dimension, int> votes_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("votes must be an object of scale -> 1..5");
  std::map<Dimension, int> out;
  for (const auto& [name, v] : j.items()) {
    auto d = parse_dimension(name);
    if (!d) throw ValidationError("unknown scale '" + name + "'");
    if (!v.is_number_integer()) throw ValidationError("vote on '" + name + "' must be an integer");
    out[*d] = v.get<int>();
  }
  return out;
}

json vote_record_json(const qc::VoteRecord& v) {
  return json{{"participant_id", v.participant_id},
              {"clip_ref", v.clip_ref},
              {"votes", votes_json(v.votes)},
              {"listen_complete", v.listen_complete},
              {"submitted_at", to_epoch_ms(v.submitted_at)},
              {"package_id", v.package_id}};
}

qc::VoteRecord vote_record_from_json(const json& j) {
  qc::VoteRecord v;
  v.participant_id = j.at("participant_id").get<std::string>();
  v.clip_ref = j.at("clip_ref").get<std::string>();
  v.votes = votes_from_json(j.at("votes"));
  v.listen_complete = j.at("listen_complete").get<bool>();
  v.submitted_at = from_epoch_ms(j.at("submitted_at").get<std::int64_t>());
  v.package_id = j.at("package_id").get<std::string>();
  return v;
}

json submission_json(const qc::PackageSubmission& s) {
  return json{{"participant_id", s.participant_id},
              {"package_id", s.package_id},
              {"votes", map_vec(s.votes, &vote_record_json)}};
}

qc::PackageSubmission submission_from_json(const json& j) {
  qc::PackageSubmission s;
  s.participant_id = j.at("participant_id").get<std::string>();
  s.package_id = j.at("package_id").get<std::string>();
  for (const auto& v : j.at("votes")) s.votes.push_back(vote_record_from_json(v));
  return s;
}

json slot_json(const session::PackageSlot& s) {
  json items = json::array();
  for (const auto& it : s.package.items) {
    items.push_back({{"clip_ref", it.clip_ref}, {"kind", std::string(session::to_string(it.kind))}});
  }
  return json{{"id", s.package.id},
              {"items", items},
              {"holder", s.holder ? json(*s.holder) : json(nullptr)},
              {"reserved_at", to_epoch_ms(s.reserved_at)},
              {"completed", s.completed}};
}

session::PackageSlot slot_from_json(const json& j) {
  session::PackageSlot s;
  s.package.id = j.at("id").get<std::string>();
  for (const auto& it : j.at("items")) {
    s.package.items.push_back({it.at("clip_ref").get<std::string>(),
                               session::item_kind_from_string(it.at("kind").get<std::string>())});
  }
  if (!j.at("holder").is_null()) s.holder = j.at("holder").get<std::string>();
  s.reserved_at = from_epoch_ms(j.at("reserved_at").get<std::int64_t>());
  s.completed = j.at("completed").get<bool>();
  return s;
}

json dims_json(const std::vector<Dimension>& dims) {
  json j = json::array();
  for (Dimension d : dims) j.push_back(std::string(to_string(d)));
  return j;
}

json session_json(const session::Session& s) {
  json certs = json::array();
  for (const auto& c : s.certificates) {
    certs.push_back({{"kind", std::string(session::to_string(c.kind))},
                     {"issued_at", to_epoch_ms(c.issued_at)},
                     {"ttl_ms", c.ttl ? json(c.ttl->count()) : json(nullptr)}});
  }
  json history = json::array();
  for (const auto& h : s.history) {
    history.push_back({{"task_id", h.task_id},
                       {"section", std::string(session::to_string(h.section))},
                       {"passed", h.passed},
                       {"completed_at", to_epoch_ms(h.completed_at)}});
  }
  return json{{"id", s.id},
              {"participant_id", s.participant_id},
              {"certificates", certs},
              {"scale_order", dims_json(s.scale_order)},
              {"current_package", s.current_package ? json(*s.current_package) : json(nullptr)},
              {"history", history},
              {"hearing_passed", s.hearing_passed},
              {"bandwidth", s.bandwidth ? json(std::string(qc::to_string(*s.bandwidth))) : json(nullptr)},
              {"blocked", s.blocked},
              {"blocked_reason", s.blocked_reason},
              {"instructions_done", s.instructions_done},
              {"loudness_done", s.loudness_done},
              {"training_rounds_started", s.training_rounds_started},
              {"played_task_id", s.played_task_id},
              {"played", s.played},
              {"rated_clips", s.rated_clips}};
}

session::Session session_from_json(const json& j) {
  session::Session s;
  s.id = j.at("id").get<std::string>();
  s.participant_id = j.at("participant_id").get<std::string>();
  for (const auto& c : j.at("certificates")) {
    session::Certificate cert;
    cert.kind = session::certificate_kind_from_string(c.at("kind").get<std::string>());
    cert.issued_at = from_epoch_ms(c.at("issued_at").get<std::int64_t>());
    if (!c.at("ttl_ms").is_null()) cert.ttl = Duration(c.at("ttl_ms").get<std::int64_t>());
    s.certificates.push_back(cert);
  }
  for (const auto& d : j.at("scale_order")) s.scale_order.push_back(dimension_from_string(d.get<std::string>()));
  if (!j.at("current_package").is_null()) s.current_package = j.at("current_package").get<std::string>();
  for (const auto& h : j.at("history")) {
    s.history.push_back({h.at("task_id").get<std::string>(),
                         session::section_from_string(h.at("section").get<std::string>()),
                         h.at("passed").get<bool>(),
                         from_epoch_ms(h.at("completed_at").get<std::int64_t>())});
  }
  s.hearing_passed = j.at("hearing_passed").get<bool>();
  if (!j.at("bandwidth").is_null()) {
    s.bandwidth = qc::bandwidth_verdict_from_string(j.at("bandwidth").get<std::string>());
  }
  s.blocked = j.at("blocked").get<bool>();
  s.blocked_reason = j.at("blocked_reason").get<std::string>();
  s.instructions_done = j.at("instructions_done").get<bool>();
  s.loudness_done = j.at("loudness_done").get<bool>();
  s.training_rounds_started = j.at("training_rounds_started").get<int>();
  s.played_task_id = j.at("played_task_id").get<std::string>();
  s.played = j.at("played").get<std::set<std::string>>();
  s.rated_clips = j.at("rated_clips").get<std::set<std::string>>();
  return s;
}

json answer_schema(const session::Task& t) {
  switch (t.section) {
    case Section::kHearing:
      return {{"field", "hearing"}, {"type", "digits"}, {"count", t.stimuli.size()}};
    case Section::kBandwidth:
      return {{"field", "bandwidth"}, {"values", {"same", "different"}}, {"count", t.stimuli.size()}};
    case Section::kSetupJnd:
      return {{"field", "jnd"}, {"values", {"a", "b"}}, {"count", t.stimuli.size() / 2}};
    case Section::kInstructions:
    case Section::kLoudnessAdjust:
      return {{"field", nullptr}, {"requires_playback", true}};
    case Section::kTraining:
    case Section::kRating:
      return {{"field", "ratings"}, {"scales", dims_json(t.scale_order)}, {"range", {1, 5}},
              {"requires_playback", true}};
  }
  return json::object();
}

std::string response_key(const std::string& session_id, const std::string& key) {
  return session_id + "/" + key;
}

const std::string& payload_str(const EventRecord& e, const char* key) {
  auto it = e.payload.find(key);
  if (it == e.payload.end() || !it->is_string()) {
    throw ValidationError("event " + e.kind + " lacks '" + key + "'");
  }
  return it->get_ref<const std::string&>();
}

session::Task require_task(const CampaignState& c, const session::Session& s, Timestamp now,
                           Duration reclaim_after, const std::string& task_id) {
  if (c.status != CampaignStatus::kOpen) throw ConflictError("campaign is not open");
  auto next = current_task(c, s, now, reclaim_after);
  if (auto* none = std::get_if<session::NoWork>(&next)) throw ConflictError(none->reason);
  auto& task = std::get<session::Task>(next);
  if (task.id != task_id) {
    throw ConflictError("stale task: '" + task_id + "', current is '" + task.id + "'");
  }
  if (task.reserves_package) throw ConflictError("fetch the rating task before answering it");
  return task;
}

}  // namespace

std::string_view to_string(CampaignStatus s) {
  switch (s) {
    case CampaignStatus::kDraft: return "draft";
    case CampaignStatus::kOpen: return "open";
    case CampaignStatus::kClosed: return "closed";
  }
  return "draft";
}

CampaignStatus campaign_status_from_string(std::string_view s) {
  for (auto v : {CampaignStatus::kDraft, CampaignStatus::kOpen, CampaignStatus::kClosed}) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError("unknown campaign status '" + std::string(s) + "'");
}

std::string media_url(const std::string& campaign_id, const std::string& ref) {
  return "/v1/media/" + campaign_id + "/" + ref;
}

const CampaignState& campaign_of(const ServiceState& state, const std::string& campaign_id) {
  auto it = state.campaigns.find(campaign_id);
  if (it == state.campaigns.end()) throw NotFoundError("unknown campaign '" + campaign_id + "'");
  return it->second;
}

const CampaignState& campaign_of_session(const ServiceState& state, const std::string& session_id) {
  auto it = state.session_campaign.find(session_id);
  if (it == state.session_campaign.end()) throw NotFoundError("unknown session '" + session_id + "'");
  return campaign_of(state, it->second);
}

session::NextTask current_task(const CampaignState& c, const session::Session& s, Timestamp now,
                               Duration reclaim_after) {
  if (c.status == CampaignStatus::kClosed) return session::NoWork{"campaign closed"};
  if (c.status == CampaignStatus::kDraft) return session::NoWork{"campaign not open yet"};
  return session::next_task(s, c.manifest->materials, c.plan, now, reclaim_after);
}

Transition prepare(const ServiceState& state, const EventRecord& e, Duration reclaim_after) {
  Transition t;
  if (e.kind == kCampaignCreated) {
    const auto& base = payload_str(e, "base_dir");
    auto m = std::make_shared<Manifest>(parse_manifest(e.payload.at("manifest"), base));
    if (state.campaigns.contains(m->campaign_id)) {
      throw ConflictError("campaign '" + m->campaign_id + "' already exists");
    }
    t.campaign_id = m->campaign_id;
    t.next.base_dir = base;
    for (auto& pkg : plan_packages(*m)) t.next.plan.push_back({std::move(pkg), std::nullopt, {}, false});
    t.next.manifest = std::move(m);
    t.response = {{"campaign_id", t.campaign_id},
                  {"status", "draft"},
                  {"packages", t.next.plan.size()},
                  {"clips", t.next.manifest->clips.size()}};
    return t;
  }

  t.campaign_id = payload_str(e, "campaign");
  t.next = campaign_of(state, t.campaign_id);
  auto& c = t.next;

  if (e.kind == kCampaignOpened || e.kind == kCampaignClosed) {
    const bool open = e.kind == kCampaignOpened;
    const auto from = open ? CampaignStatus::kDraft : CampaignStatus::kOpen;
    if (c.status != from) {
      throw ConflictError("campaign '" + t.campaign_id + "' is " + std::string(to_string(c.status)));
    }
    c.status = open ? CampaignStatus::kOpen : CampaignStatus::kClosed;
    t.response = {{"campaign_id", t.campaign_id}, {"status", std::string(to_string(c.status))}};
    return t;
  }

  if (e.kind == kSessionCreated) {
    if (c.status != CampaignStatus::kOpen) throw ConflictError("campaign is not open");
    const auto& participant = payload_str(e, "participant_id");
    if (c.participants.contains(participant)) {
      throw ConflictError("participant '" + participant + "' already has a session");
    }
    if (e.session.empty() || state.session_campaign.contains(e.session)) {
      throw ConflictError("session id '" + e.session + "' unavailable");
    }
    c.sessions.emplace(e.session, session::create_session(e.session, participant, c.manifest->seed));
    c.participants.emplace(participant, e.session);
    t.new_session = e.session;
    t.response = {{"session_id", e.session}, {"participant_id", participant}};
    return t;
  }

  auto sit = c.sessions.find(e.session);
  if (sit == c.sessions.end()) throw NotFoundError("unknown session '" + e.session + "'");
  auto& s = sit->second;
  const auto& task_id = payload_str(e, "task_id");

  if (e.kind == kPackageReserved) {
    if (c.status != CampaignStatus::kOpen) throw ConflictError("campaign is not open");
    auto next = current_task(c, s, e.ts, reclaim_after);
    auto* task = std::get_if<session::Task>(&next);
    if (!task || task->id != task_id || !task->reserves_package) {
      throw ConflictError("no package to reserve for task '" + task_id + "'");
    }
    session::reserve_package(s, c.plan, *task, e.ts);
    t.response = {{"task_id", task_id}, {"package_id", *task->package_id}};
    return t;
  }

  if (e.kind == kPlaybackComplete) {
    const auto task = require_task(c, s, e.ts, reclaim_after, task_id);
    const auto& ref = payload_str(e, "clip_ref");
    session::record_playback_complete(s, task, ref);
    t.response = {{"task_id", task_id}, {"clip_ref", ref}, {"played", s.played.size()},
                  {"of", task.stimuli.size()}};
    return t;
  }

  if (e.kind == kAnswersSubmitted) {
    const auto& key = payload_str(e, "idempotency_key");
    if (c.responses.contains(response_key(e.session, key))) {
      throw ConflictError("idempotency key '" + key + "' already used");
    }
    const auto task = require_task(c, s, e.ts, reclaim_after, task_id);
    auto answers = answers_from_json(e.payload.at("answers"));
    answers.task_id = task_id;
    const auto outcome = session::submit_section(s, task, answers, c.manifest->materials, e.ts);
    if (outcome.submission) {
      session::complete_package(c.plan, outcome);
      c.submissions.push_back(*outcome.submission);
    }
    t.response = outcome_document(outcome);
    c.responses[response_key(e.session, key)] = t.response;
    return t;
  }

  throw ValidationError("unknown event kind '" + e.kind + "'");
}

void commit(ServiceState& state, Transition t, std::uint64_t seq) {
  if (t.new_session) state.session_campaign[*t.new_session] = t.campaign_id;
  state.campaigns[t.campaign_id] = std::move(t.next);
  state.seq = seq;
}

json apply_event(ServiceState& state, const EventRecord& e, Duration reclaim_after) {
  Transition t = prepare(state, e, reclaim_after);
  json response = t.response;
  commit(state, std::move(t), e.seq);
  return response;
}

json task_document(const std::string& campaign_id, const session::NextTask& next) {
  if (const auto* none = std::get_if<session::NoWork>(&next)) {
    return {{"status", "no_work"}, {"reason", none->reason}};
  }
  const auto& t = std::get<session::Task>(next);
  json stimuli = json::array();
  for (const auto& ref : t.stimuli) stimuli.push_back({{"ref", ref}, {"url", media_url(campaign_id, ref)}});
  json doc{{"status", "task"},
           {"task_id", t.id},
           {"section", std::string(session::to_string(t.section))},
           {"stimuli", stimuli},
           {"scale_order", dims_json(t.scale_order)},
           {"answer_schema", answer_schema(t)}};
  if (t.package_id) doc["package_id"] = *t.package_id;
  return doc;
}

json outcome_document(const session::SectionOutcome& o) {
  json feedback = json::array();
  for (const auto& f : o.feedback) {
    feedback.push_back({{"clip_ref", f.clip_ref},
                        {"scale", std::string(to_string(f.dimension))},
                        {"vote", f.vote},
                        {"expected", {f.expected_low, f.expected_high}},
                        {"in_range", f.in_range},
                        {"message", f.message}});
  }
  json doc{{"task_id", o.task_id},
           {"section", std::string(session::to_string(o.section))},
           {"passed", o.passed},
           {"certificate_issued",
            o.certificate_issued ? json(std::string(session::to_string(*o.certificate_issued))) : json(nullptr)},
           {"bandwidth", o.bandwidth ? json(std::string(qc::to_string(*o.bandwidth))) : json(nullptr)},
           {"feedback", feedback},
           {"message", o.message}};
  if (o.screening) {
    doc["screening"] = {{"gold_passed", o.screening->gold_passed},
                        {"trapping_passed", o.screening->trapping_passed},
                        {"accepted_votes", o.screening->accepted.size()}};
  }
  return doc;
}

session::Answers answers_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("answers must be an object");
  session::Answers a;
  try {
    if (j.contains("task_id")) a.task_id = j.at("task_id").get<std::string>();
    if (j.contains("hearing")) a.hearing = j.at("hearing").get<std::vector<std::string>>();
    if (j.contains("bandwidth")) {
      for (const auto& b : j.at("bandwidth")) a.bandwidth.push_back(qc::bandwidth_answer_from_string(b.get<std::string>()));
    }
    if (j.contains("jnd")) {
      for (const auto& v : j.at("jnd")) {
        const auto s = v.get<std::string>();
        if (s.size() != 1) throw ValidationError("setup answers must be 'a' or 'b'");
        a.jnd.push_back(s[0]);
      }
    }
    if (j.contains("ratings")) {
      if (!j.at("ratings").is_object()) throw ValidationError("ratings must map clip ref -> votes");
      for (const auto& [ref, votes] : j.at("ratings").items()) a.ratings[ref] = votes_from_json(votes);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed answers: ") + e.what());
  }
  return a;
}

json state_to_json(const ServiceState& state) {
  json campaigns = json::object();
  for (const auto& [id, c] : state.campaigns) {
    json sessions = json::object();
    for (const auto& [sid, s] : c.sessions) sessions[sid] = session_json(s);
    campaigns[id] = {{"manifest", c.manifest->document},
                     {"base_dir", c.base_dir},
                     {"status", std::string(to_string(c.status))},
                     {"plan", map_vec(c.plan, &slot_json)},
                     {"sessions", sessions},
                     {"participants", c.participants},
                     {"submissions", map_vec(c.submissions, &submission_json)},
                     {"responses", c.responses}};
  }
  return json{{"seq", state.seq}, {"campaigns", campaigns}, {"session_campaign", state.session_campaign}};
}

ServiceState state_from_json(const json& j) {
  try {
    ServiceState state;
    state.seq = j.at("seq").get<std::uint64_t>();
    state.session_campaign = j.at("session_campaign").get<std::map<std::string, std::string>>();
    for (const auto& [id, cj] : j.at("campaigns").items()) {
      CampaignState c;
      c.base_dir = cj.at("base_dir").get<std::string>();
      c.manifest = std::make_shared<Manifest>(parse_manifest(cj.at("manifest"), c.base_dir));
      c.status = campaign_status_from_string(cj.at("status").get<std::string>());
      for (const auto& s : cj.at("plan")) c.plan.push_back(slot_from_json(s));
      for (const auto& [sid, s] : cj.at("sessions").items()) c.sessions.emplace(sid, session_from_json(s));
      c.participants = cj.at("participants").get<std::map<std::string, std::string>>();
      for (const auto& s : cj.at("submissions")) c.submissions.push_back(submission_from_json(s));
      for (const auto& [k, v] : cj.at("responses").items()) c.responses[k] = v;
      state.campaigns.emplace(id, std::move(c));
    }
    return state;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed state document: ") + e.what());
  }
}

}  // namespace sigc::service
