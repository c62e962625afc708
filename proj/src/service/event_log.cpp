#include "sigc/service/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sigc/common/errors.hpp"

namespace sigc::service {

namespace {

using nlohmann::json;

[[noreturn]] void io_fail(const std::string& what) {
  throw Error(what + ": " + std::strerror(errno));
}

void write_all(int fd, const char* data, std::size_t n, const std::string& path) {
  while (n > 0) {
    const ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      io_fail("write " + path);
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

}  // namespace

json to_json(const EventRecord& e) {
  return json{{"seq", e.seq},
              {"ts", to_epoch_ms(e.ts)},
              {"session", e.session},
              {"kind", e.kind},
              {"payload", e.payload}};
}

EventRecord event_from_json(const json& j) {
  try {
    EventRecord e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.ts = from_epoch_ms(j.at("ts").get<std::int64_t>());
    e.session = j.at("session").get<std::string>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.at("payload");
    return e;
  } catch (const json::exception& ex) {
    throw FormatError(std::string("malformed event record: ") + ex.what());
  }
}

EventLog::EventLog(std::string path) : path_(std::move(path)) {
  std::string text;
  {
    std::ifstream in(path_, std::ios::binary);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
  }
  std::size_t pos = 0, good_end = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail: no terminating newline
    const std::string line = text.substr(pos, nl - pos);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw FormatError("event log " + path_ + ": corrupt line " + std::to_string(line_no));
    }
    EventRecord e = event_from_json(j);
    if (e.seq != last_seq() + 1) {
      throw FormatError("event log " + path_ + ": sequence gap at line " + std::to_string(line_no));
    }
    events_.push_back(std::move(e));
    pos = nl + 1;
    good_end = pos;
  }

  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT, 0644);
  if (fd_ < 0) io_fail("open " + path_);
  if (good_end < text.size()) {
    if (::ftruncate(fd_, static_cast<off_t>(good_end)) != 0) io_fail("truncate " + path_);
    if (::fsync(fd_) != 0) io_fail("fsync " + path_);
  }
  if (::lseek(fd_, static_cast<off_t>(good_end), SEEK_SET) < 0) io_fail("seek " + path_);
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

EventRecord EventLog::append(EventRecord e) {
  const FaultPoint fault = fault_;
  fault_ = FaultPoint::kNone;
  if (fault == FaultPoint::kBeforeAppend) throw SimulatedCrash{fault};

  e.seq = last_seq() + 1;
  const std::string line = to_json(e).dump() + "\n";
  if (fault == FaultPoint::kTornAppend) {
    write_all(fd_, line.data(), line.size() / 2, path_);
    ::fsync(fd_);
    throw SimulatedCrash{fault};
  }
  write_all(fd_, line.data(), line.size(), path_);
  if (::fsync(fd_) != 0) io_fail("fsync " + path_);
  events_.push_back(e);
  if (fault == FaultPoint::kAfterAppend) throw SimulatedCrash{fault};
  return e;
}

std::vector<EventRecord> EventLog::since(std::uint64_t seq) const {
  std::vector<EventRecord> out;
  for (const auto& e : events_) {
    if (e.seq > seq) out.push_back(e);
  }
  return out;
}

void write_snapshot(const std::string& path, std::uint64_t seq, const json& state) {
  const std::string tmp = path + ".tmp";
  const std::string body = json{{"seq", seq}, {"state", state}}.dump();
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) io_fail("open " + tmp);
  write_all(fd, body.data(), body.size(), tmp);
  if (::fsync(fd) != 0) io_fail("fsync " + tmp);
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("rename " + tmp + ": " + ec.message());
}

std::optional<Snapshot> read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    return Snapshot{j.at("seq").get<std::uint64_t>(), j.at("state")};
  } catch (const json::exception& ex) {
    throw FormatError("snapshot " + path + ": " + ex.what());
  }
}

}  // namespace sigc::service
