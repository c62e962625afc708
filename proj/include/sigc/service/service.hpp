#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"
#include "sigc/analytics/score_table.hpp"
#include "sigc/qc/screening.hpp"
#include "sigc/service/event_log.hpp"
#include "sigc/service/state.hpp"

namespace sigc::service {

using Clock = std::function<Timestamp()>;

Timestamp system_now();

struct ServiceOptions {
  std::string data_dir;
  Clock clock = system_now;
  Duration reclaim_after = session::kDefaultReclaimAfter;
  std::size_t snapshot_every = 100;  // events; 0 disables periodic snapshots
};

// Exported results of a campaign.
struct CampaignResults {
  analytics::ScoreTable table;
  qc::ScreeningResult screening;
  std::vector<analytics::RatingVote> votes;  // what the table was built from
};

// Screened rating votes of a campaign as score-analytics rows. Only votes of
// passed packages from unflagged participants survive.
CampaignResults compute_results(const CampaignState& campaign, analytics::Level level);

// The evaluation service core: every mutating command becomes one durable
// event before it is acknowledged. Safe to call from many threads.
class Service {
 public:
  explicit Service(ServiceOptions options);

  // Ingest from a file (media checked) or from a document whose relative
  // paths resolve against base_dir.
  nlohmann::json create_campaign(const std::string& manifest_path);
  nlohmann::json create_campaign(const nlohmann::json& manifest, const std::string& base_dir);
  nlohmann::json open_campaign(const std::string& campaign_id);
  nlohmann::json close_campaign(const std::string& campaign_id);

  // An existing participant gets their session back without a new event.
  nlohmann::json create_session(const std::string& campaign_id, const std::string& participant_id);
  nlohmann::json next_task(const std::string& session_id);
  nlohmann::json playback_complete(const std::string& session_id, const std::string& task_id,
                                   const std::string& clip_ref);
  nlohmann::json submit_answers(const std::string& session_id, const std::string& idempotency_key,
                                const nlohmann::json& answers);

  // Throws ConflictError for an open campaign unless `partial`.
  nlohmann::json results_document(const std::string& campaign_id, analytics::Level level, bool partial);
  std::string results_csv(const std::string& campaign_id, analytics::Level level, bool partial);

  std::string media_file(const std::string& campaign_id, const std::string& ref) const;
  nlohmann::json campaign_summary(const std::string& campaign_id) const;

  nlohmann::json state_document() const;
  std::uint64_t last_seq() const;
  std::size_t event_count() const;
  void snapshot();

  // Test hook, forwarded to the event log.
  void inject_fault(FaultPoint p);

  const std::string& data_dir() const { return options_.data_dir; }

 private:
  nlohmann::json execute(EventRecord e);
  const CampaignState& exportable(const std::string& campaign_id, bool partial) const;

  ServiceOptions options_;
  mutable std::mutex mu_;
  std::unique_ptr<EventLog> log_;
  ServiceState state_;
};

std::string events_path(const std::string& data_dir);
std::string snapshot_path(const std::string& data_dir);

}  // namespace sigc::service
