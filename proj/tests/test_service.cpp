#include <filesystem>
#include <fstream>

#include "campaign_fixture.hpp"
#include "doctest.h"
#include "durability.hpp"
#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"
#include "sigc/service/event_log.hpp"
#include "sigc/service/manifest.hpp"
#include "sigc/service/service.hpp"
#include "sigc/service/state.hpp"
#include "sigc/stimulus/wav.hpp"

using namespace sigc;
using namespace sigc::service;
using namespace sigc::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct FixedClock {
  Timestamp now = from_epoch_ms(1'700'000'000'000);
  Clock clock() {
    return [this] { return now; };
  }
};

ServiceOptions options_for(const std::string& dir, FixedClock& fc, std::size_t snapshot_every = 100) {
  ServiceOptions o;
  o.data_dir = dir;
  o.clock = fc.clock();
  o.snapshot_every = snapshot_every;
  return o;
}

Rater good_rater(const std::string& id, int vote = 4) {
  return {id, [vote](const std::string&) { return uniform_votes(vote); }, false};
}

std::vector<std::string> log_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines, const std::string& tail = "") {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : lines) out << l << "\n";
  out << tail;
}

}  // namespace

TEST_CASE("manifest ingest") {
  const auto dir = temp_dir("manifest");
  auto doc = write_campaign_fixture(dir);
  const auto path = dir + "/manifest.json";
  const auto m = ingest_manifest_file(path);
  CHECK(m.campaign_id == "demo");
  CHECK(m.clips.size() == 20);
  CHECK(m.baseline_model == "noisy");

  const auto plan = plan_packages(m);
  CHECK(plan.size() == 2);
  std::map<std::string, int> seen;
  for (const auto& p : plan) {
    CHECK(p.count(session::ItemKind::kGold) >= 1);
    CHECK(p.count(session::ItemKind::kTrapping) >= 1);
    for (const auto& r : p.rating_clips()) ++seen[r];
  }
  CHECK(seen.size() == 20);
  for (const auto& [ref, n] : seen) CHECK(n == 1);

  SUBCASE("missing media") {
    fs::remove(dir + "/media/noisy_c03.wav");
    CHECK_THROWS_AS(ingest_manifest_file(path), ValidationError);
  }
  SUBCASE("wrong sample rate") {
    stimulus::AudioBuffer b;
    b.sample_rate = 44100;
    b.samples.assign(441, 0.0);
    stimulus::write_wav(b, dir + "/media/enh_c01.wav");
    try {
      ingest_manifest_file(path);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      std::string all = e.what();
      for (const auto& i : e.issues()) all += i;
      CHECK(all.find("enh_c01") != std::string::npos);
    }
  }
  SUBCASE("duplicate clip") {
    doc["clips"].push_back(doc["clips"][0]);
    write_json(path, doc);
    CHECK_THROWS_AS(ingest_manifest_file(path), ValidationError);
  }
  SUBCASE("schema problems are collected") {
    doc["schema_version"] = 2;
    doc["votes_per_clip"] = 0;
    doc.erase("training");
    try {
      parse_manifest(doc, dir);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.issues().size() >= 3);
    }
  }
  CHECK_THROWS_AS(ingest_manifest_file(dir + "/nope.json"), ValidationError);
}

TEST_CASE("event log recovery") {
  const auto dir = temp_dir("log");
  const auto path = dir + "/events.jsonl";
  {
    EventLog log(path);
    for (int i = 0; i < 5; ++i) {
      EventRecord e;
      e.kind = "campaign_opened";
      e.payload = {{"i", i}};
      CHECK(log.append(e).seq == static_cast<std::uint64_t>(i + 1));
    }
  }
  const auto lines = log_lines(path);
  REQUIRE(lines.size() == 5);

  SUBCASE("torn tail is truncated") {
    write_lines(path, lines, lines[4].substr(0, lines[4].size() / 2));
    EventLog log(path);
    CHECK(log.events().size() == 5);
    EventRecord e;
    e.kind = "x";
    CHECK(log.append(e).seq == 6);
    CHECK(log_lines(path).size() == 6);
    EventLog again(path);
    CHECK(again.events().size() == 6);
  }
  SUBCASE("corrupt middle line") {
    auto bad = lines;
    bad[2] = "{not json";
    write_lines(path, bad);
    CHECK_THROWS_AS(EventLog{path}, FormatError);
  }
  SUBCASE("sequence gap") {
    auto bad = lines;
    bad.erase(bad.begin() + 2);
    write_lines(path, bad);
    CHECK_THROWS_AS(EventLog{path}, FormatError);
  }
  SUBCASE("since") {
    EventLog log(path);
    CHECK(log.since(3).size() == 2);
    CHECK(log.since(3).front().seq == 4);
    CHECK(log.since(0).size() == 5);
  }
  SUBCASE("injected faults") {
    EventLog log(path);
    EventRecord e;
    e.kind = "x";
    log.inject_fault(FaultPoint::kBeforeAppend);
    CHECK_THROWS_AS(log.append(e), SimulatedCrash);
    CHECK(EventLog(path).events().size() == 5);
    EventLog l2(path);
    l2.inject_fault(FaultPoint::kTornAppend);
    CHECK_THROWS_AS(l2.append(e), SimulatedCrash);
    CHECK(EventLog(path).events().size() == 5);
    EventLog l3(path);
    l3.inject_fault(FaultPoint::kAfterAppend);
    CHECK_THROWS_AS(l3.append(e), SimulatedCrash);
    CHECK(EventLog(path).events().size() == 6);
  }
}

TEST_CASE("snapshot files") {
  const auto dir = temp_dir("snap");
  const auto path = dir + "/snapshot.json";
  CHECK_FALSE(read_snapshot(path).has_value());
  write_snapshot(path, 7, json{{"a", 1}});
  const auto s = read_snapshot(path);
  REQUIRE(s.has_value());
  CHECK(s->seq == 7);
  CHECK(s->state == json{{"a", 1}});
  std::ofstream(path) << "{broken";
  CHECK_THROWS_AS(read_snapshot(path), FormatError);
}

TEST_CASE("service lifecycle and idempotency") {
  const auto dir = temp_dir("svc");
  write_campaign_fixture(dir);
  const auto manifest = ingest_manifest_file(dir + "/manifest.json");
  FixedClock fc;
  Service svc(options_for(dir + "/data", fc));

  CHECK(svc.create_campaign(dir + "/manifest.json").at("campaign_id") == "demo");
  CHECK_THROWS_AS(svc.create_campaign(dir + "/manifest.json"), ConflictError);
  CHECK_THROWS_AS(svc.create_session("demo", "p1"), ConflictError);  // still draft
  CHECK_THROWS_AS(svc.open_campaign("nope"), NotFoundError);
  svc.open_campaign("demo");
  CHECK(svc.campaign_summary("demo").at("packages") == 2);

  const auto s1 = svc.create_session("demo", "p1");
  const std::string sid = s1.at("session_id");
  const auto events = svc.event_count();
  const auto again = svc.create_session("demo", "p1");
  CHECK(again.at("session_id") == sid);
  CHECK(again.at("resumed") == true);
  CHECK(svc.event_count() == events);
  CHECK_THROWS_AS(svc.create_session("demo", ""), ValidationError);
  CHECK_THROWS_AS(svc.next_task("s-nope"), NotFoundError);

  // Fetching the same task twice is a pure read.
  const auto t1 = svc.next_task(sid);
  const auto t2 = svc.next_task(sid);
  CHECK(t1 == t2);
  CHECK(t1.at("section") == "hearing");
  CHECK(svc.event_count() == events);

  const auto ans = answers_for(manifest, t1, good_rater("p1"));
  const auto r1 = svc.submit_answers(sid, "key-1", ans);
  const auto after = svc.event_count();
  CHECK(after == events + 1);
  CHECK(r1.at("passed") == true);
  // Same key: same response, no new event, even with a different body.
  CHECK(svc.submit_answers(sid, "key-1", ans) == r1);
  CHECK(svc.submit_answers(sid, "key-1", json{{"task_id", "whatever"}}) == r1);
  CHECK(svc.event_count() == after);
  CHECK_THROWS_AS(svc.submit_answers(sid, "", ans), ValidationError);
  // The hearing task is done; answering it again under a new key is stale.
  CHECK_THROWS_AS(svc.submit_answers(sid, "key-2", ans), ConflictError);
  CHECK(svc.event_count() == after);

  // Walk to the rating page; the unreserved task cannot be answered.
  for (int i = 0; i < 10; ++i) {
    const auto st = state_from_json(svc.state_document());
    const auto& c = campaign_of(st, "demo");
    const auto next = current_task(c, c.sessions.at(sid), fc.now, session::kDefaultReclaimAfter);
    const auto& task = std::get<session::Task>(next);
    if (task.section == session::Section::kRating) {
      CHECK(task.reserves_package);
      json early = answers_for(manifest, task_document("demo", next), good_rater("p1"));
      try {
        svc.submit_answers(sid, "early", early);
        FAIL("expected a conflict");
      } catch (const ConflictError& e) {
        CHECK(std::string(e.what()).find("fetch the rating task") != std::string::npos);
      }
      break;
    }
    complete_task(svc, sid, manifest, svc.next_task(sid), good_rater("p1"), "walk-" + std::to_string(i));
  }
  const auto rating = svc.next_task(sid);
  CHECK(rating.at("section") == "rating");
  CHECK(svc.next_task(sid) == rating);
  CHECK(svc.campaign_summary("demo").at("packages_reserved") == 1);

  // Unplayed stimuli block the submit.
  CHECK_THROWS_AS(svc.submit_answers(sid, "unplayed", answers_for(manifest, rating, good_rater("p1"))),
                  ValidationError);
  CHECK_THROWS_AS(svc.playback_complete(sid, rating.at("task_id"), "not-a-ref"), ValidationError);
  CHECK(svc.media_file("demo", "gold_noisy").find("gold_noisy.wav") != std::string::npos);
  CHECK_THROWS_AS(svc.media_file("demo", "nope"), NotFoundError);
}

TEST_CASE("snapshot plus tail equals full replay") {
  const auto dir = temp_dir("replay");
  write_campaign_fixture(dir, {.votes_per_clip = 2});
  const auto manifest = ingest_manifest_file(dir + "/manifest.json");
  FixedClock fc;
  json expected;
  {
    Service svc(options_for(dir + "/data", fc, 7));
    svc.create_campaign(dir + "/manifest.json");
    svc.open_campaign("demo");
    run_participant(svc, "demo", manifest, good_rater("a"), 1);
    fc.now += std::chrono::minutes(5);
    run_participant(svc, "demo", manifest, good_rater("b"), 2);
    expected = svc.state_document();
    CHECK(fs::exists(snapshot_path(dir + "/data")));
    CHECK(read_snapshot(snapshot_path(dir + "/data"))->seq < svc.last_seq());
  }
  CHECK(Service(options_for(dir + "/data", fc)).state_document() == expected);
  fs::remove(snapshot_path(dir + "/data"));
  CHECK(Service(options_for(dir + "/data", fc)).state_document() == expected);

  // A snapshot taken now covers everything; reopening reads no tail.
  {
    Service svc(options_for(dir + "/data", fc));
    svc.snapshot();
  }
  CHECK(Service(options_for(dir + "/data", fc)).state_document() == expected);

  write_snapshot(snapshot_path(dir + "/data"), 1'000'000, expected);
  CHECK_THROWS_AS(Service(options_for(dir + "/data", fc)), FormatError);
}

TEST_CASE("results export") {
  const auto dir = temp_dir("results");
  write_campaign_fixture(dir, {.votes_per_clip = 2});
  const auto manifest = ingest_manifest_file(dir + "/manifest.json");
  FixedClock fc;
  Service svc(options_for(dir + "/data", fc));
  svc.create_campaign(dir + "/manifest.json");
  svc.open_campaign("demo");

  const int good = run_participant(svc, "demo", manifest, good_rater("good", 4), 2);
  Rater bad = good_rater("bad", 1);
  bad.fail_controls = true;
  const int bad_done = run_participant(svc, "demo", manifest, bad, 2);
  CHECK(good == 2);
  CHECK(bad_done == 2);

  CHECK_THROWS_AS(svc.results_document("demo", analytics::Level::kClip, false), ConflictError);
  const auto partial = svc.results_document("demo", analytics::Level::kClip, true);
  CHECK(partial.at("partial") == true);

  svc.close_campaign("demo");
  const auto doc = svc.results_document("demo", analytics::Level::kClip, false);
  CHECK(doc.at("partial") == false);
  CHECK(doc.at("participants_flagged") == 1);
  CHECK(doc.at("packages_failed") == 2);
  CHECK(doc.at("baseline_model") == "noisy");
  int overall_votes = 0;
  for (const auto& row : doc.at("rows")) {
    // Only the good rater's 4s survive.
    CHECK(row.at("scores").at("overall").at("mean") == 4.0);
    overall_votes += row.at("scores").at("overall").at("n").get<int>();
  }
  CHECK(overall_votes == 20);
  CHECK(doc == svc.results_document("demo", analytics::Level::kClip, false));

  const auto model = svc.results_document("demo", analytics::Level::kModel, false);
  CHECK(model.at("rows").size() == 2);
  const auto csv = svc.results_csv("demo", analytics::Level::kModel, false);
  CHECK(csv == svc.results_csv("demo", analytics::Level::kModel, false));
  CHECK(csv.find("enh") != std::string::npos);
  CHECK_THROWS_AS(svc.create_session("demo", "late"), ConflictError);
}

TEST_CASE("kill and replay under injected faults") {
  const auto media = temp_dir("fault-media");
  write_campaign_fixture(media, {.votes_per_clip = 2});
  const auto manifest = ingest_manifest_file(media + "/manifest.json");
  for (int schedule = 0; schedule < 20; ++schedule) {
    CAPTURE(schedule);
    const auto r = kill_and_replay(schedule, media + "/manifest.json", manifest);
    CAPTURE(r.diff);
    CHECK(r.crashed);
    CHECK(r.restart_matches);
    CHECK(r.retry_matches);
    CHECK(r.lockstep_matches);
    CHECK(r.response_mismatches == 0);
  }
}
