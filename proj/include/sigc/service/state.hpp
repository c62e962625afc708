#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sigc/service/event_log.hpp"
#include "sigc/service/manifest.hpp"
#include "sigc/session/session.hpp"

namespace sigc::service {

enum class CampaignStatus { kDraft, kOpen, kClosed };

std::string_view to_string(CampaignStatus s);
CampaignStatus campaign_status_from_string(std::string_view s);

struct CampaignState {
  std::shared_ptr<const Manifest> manifest;
  std::string base_dir;
  CampaignStatus status = CampaignStatus::kDraft;
  std::vector<session::PackageSlot> plan;
  std::map<std::string, session::Session> sessions;   // by session id
  std::map<std::string, std::string> participants;    // participant id -> session id
  std::vector<qc::PackageSubmission> submissions;     // arrival order
  std::map<std::string, nlohmann::json> responses;    // "<session>/<key>" -> outcome
};

// Everything the event log folds into.
struct ServiceState {
  std::map<std::string, CampaignState> campaigns;
  std::map<std::string, std::string> session_campaign;  // session id -> campaign id
  std::uint64_t seq = 0;
};

// Event kinds.
inline constexpr const char* kCampaignCreated = "campaign_created";
inline constexpr const char* kCampaignOpened = "campaign_opened";
inline constexpr const char* kCampaignClosed = "campaign_closed";
inline constexpr const char* kSessionCreated = "session_created";
inline constexpr const char* kPackageReserved = "package_reserved";
inline constexpr const char* kPlaybackComplete = "playback_complete";
inline constexpr const char* kAnswersSubmitted = "answers_submitted";

// The result of applying one event, computed without touching the state so
// the caller can make the event durable before committing.
struct Transition {
  std::string campaign_id;
  CampaignState next;
  std::optional<std::string> new_session;
  nlohmann::json response;
};

// Throws NotFoundError, ConflictError or ValidationError for an event that
// does not apply; the state is unchanged either way.
Transition prepare(const ServiceState& state, const EventRecord& event, Duration reclaim_after);
void commit(ServiceState& state, Transition t, std::uint64_t seq);

// prepare + commit; the replay fold.
nlohmann::json apply_event(ServiceState& state, const EventRecord& event, Duration reclaim_after);

const CampaignState& campaign_of(const ServiceState& state, const std::string& campaign_id);
const CampaignState& campaign_of_session(const ServiceState& state, const std::string& session_id);

// The session's current task (or why there is none) at `now`.
session::NextTask current_task(const CampaignState& c, const session::Session& s, Timestamp now,
                               Duration reclaim_after);

// Structured documents for the API.
nlohmann::json task_document(const std::string& campaign_id, const session::NextTask& next);
nlohmann::json outcome_document(const session::SectionOutcome& outcome);
session::Answers answers_from_json(const nlohmann::json& j);

// Full state as a canonical document; used for snapshots and for state
// comparison in tests.
nlohmann::json state_to_json(const ServiceState& state);
ServiceState state_from_json(const nlohmann::json& j);

std::string media_url(const std::string& campaign_id, const std::string& ref);

}  // namespace sigc::service
