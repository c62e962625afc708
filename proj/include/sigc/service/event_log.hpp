#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sigc/common/time.hpp"

namespace sigc::service {

struct EventRecord {
  std::uint64_t seq = 0;
  Timestamp ts{};
  std::string session;  // empty for campaign-level events
  std::string kind;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

nlohmann::json to_json(const EventRecord& e);
EventRecord event_from_json(const nlohmann::json& j);

// Test hook: simulates a process crash at one point of the next append.
enum class FaultPoint {
  kNone,
  kBeforeAppend,  // nothing reaches the file
  kTornAppend,    // half a line reaches the file
  kAfterAppend,   // the full line is durable but the caller never hears back
};

// Thrown by an injected fault. Not derived from sigc::Error so nothing in the
// request path mistakes it for a client error.
struct SimulatedCrash {
  FaultPoint point;
};

// Append-only JSON-lines log, one event per line, fsynced per append.
// Opening recovers from a torn final line (a crash mid-write) by truncating
// it; a malformed line anywhere else is a FormatError.
class EventLog {
 public:
  explicit EventLog(std::string path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  const std::vector<EventRecord>& events() const { return events_; }
  std::uint64_t last_seq() const { return events_.empty() ? 0 : events_.back().seq; }

  // Assigns the next sequence number, writes and fsyncs. Returns the stored
  // record.
  EventRecord append(EventRecord e);

  void inject_fault(FaultPoint p) { fault_ = p; }

  // Events after a snapshot's sequence number.
  std::vector<EventRecord> since(std::uint64_t seq) const;

 private:
  std::string path_;
  int fd_ = -1;
  std::vector<EventRecord> events_;
  FaultPoint fault_ = FaultPoint::kNone;
};

// Atomic snapshot file: written to a temporary then renamed.
void write_snapshot(const std::string& path, std::uint64_t seq, const nlohmann::json& state);

struct Snapshot {
  std::uint64_t seq = 0;
  nlohmann::json state;
};
std::optional<Snapshot> read_snapshot(const std::string& path);

}  // namespace sigc::service
