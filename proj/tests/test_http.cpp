#include <thread>

#include "campaign_fixture.hpp"
#include "doctest.h"
#include "httplib.h"
#include "sigc/service/http_api.hpp"

using namespace sigc;
using namespace sigc::service;
using namespace sigc::testing;
using nlohmann::json;

namespace {

struct Running {
  std::string dir;
  json manifest_doc;
  Service service;
  HttpServer http;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;

  explicit Running(const std::string& tag)
      : dir(temp_dir(tag)),
        manifest_doc(write_campaign_fixture(dir)),
        service(ServiceOptions{dir + "/data"}),
        http(service) {
    REQUIRE(http.bind("127.0.0.1", 0));
    thread = std::thread([this] { http.serve(); });
    http.wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", http.port());
  }
  ~Running() {
    http.stop();
    thread.join();
  }

  httplib::Result post(const std::string& path, const json& body, const httplib::Headers& h = {}) {
    return client->Post(path, h, body.dump(), "application/json");
  }
  json get_json(const std::string& path, int expect = 200) {
    auto r = client->Get(path);
    REQUIRE(r);
    CHECK(r->status == expect);
    return json::parse(r->body);
  }
};

int status(const httplib::Result& r) { return r ? r->status : -1; }

}  // namespace

TEST_CASE("campaign and session flow over HTTP") {
  Running srv("http");
  const auto manifest = ingest_manifest_file(srv.dir + "/manifest.json");

  CHECK(srv.get_json("/healthz").at("status") == "ok");

  auto created = srv.post("/v1/campaigns", {{"manifest_path", srv.dir + "/manifest.json"}});
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(status(srv.post("/v1/campaigns", {{"manifest_path", srv.dir + "/manifest.json"}})) == 409);
  CHECK(status(srv.post("/v1/campaigns", {{"manifest_path", srv.dir + "/missing.json"}})) == 422);
  CHECK(status(srv.post("/v1/campaigns", json{{"schema_version", 1}})) == 422);
  CHECK(srv.get_json("/v1/campaigns/demo").at("status") == "draft");
  srv.get_json("/v1/campaigns/nope", 404);

  // Sessions need an open campaign.
  CHECK(status(srv.post("/v1/campaigns/demo/sessions", {{"participant_id", "p1"}})) == 409);
  CHECK(status(srv.post("/v1/campaigns/demo/open", json::object())) == 200);
  auto sess = srv.post("/v1/campaigns/demo/sessions", {{"participant_id", "p1"}});
  REQUIRE(sess);
  CHECK(sess->status == 201);
  const std::string sid = json::parse(sess->body).at("session_id");
  CHECK(status(srv.post("/v1/campaigns/demo/sessions", {{"participant_id", "p1"}})) == 200);
  CHECK(status(srv.post("/v1/campaigns/demo/sessions", json::object())) == 422);
  CHECK(status(srv.client->Post("/v1/campaigns/demo/sessions", "participant_id=p2", "text/plain")) == 415);
  CHECK(status(srv.client->Post("/v1/campaigns/demo/sessions", "{not json", "application/json")) == 422);
  srv.get_json("/v1/sessions/nope/task", 404);

  const Rater rater{"p1", [](const std::string&) { return uniform_votes(4); }, false};
  json task = srv.get_json("/v1/sessions/" + sid + "/task");
  CHECK(task.at("section") == "hearing");
  CHECK(task.at("stimuli").size() == 5);
  CHECK(task.at("stimuli")[0].at("url").get<std::string>().rfind("/v1/media/demo/", 0) == 0);

  // Answers need an idempotency key.
  CHECK(status(srv.post("/v1/sessions/" + sid + "/answers", answers_for(manifest, task, rater))) == 422);

  int key = 0;
  json last_outcome;
  while (task.at("section") != "rating") {
    const std::string section = task.at("section");
    if (section != "hearing" && section != "bandwidth" && section != "setup_jnd") {
      for (const auto& s : task.at("stimuli")) {
        CHECK(status(srv.post("/v1/sessions/" + sid + "/playback-complete",
                              {{"task_id", task.at("task_id")}, {"clip_ref", s.at("ref")}})) == 200);
      }
    }
    const httplib::Headers h{{"Idempotency-Key", "k" + std::to_string(key++)}};
    auto r = srv.post("/v1/sessions/" + sid + "/answers", answers_for(manifest, task, rater), h);
    REQUIRE(r);
    REQUIRE(r->status == 200);
    last_outcome = json::parse(r->body);
    CHECK(last_outcome.at("passed") == true);
    // Replaying the same key returns the stored response.
    auto replay = srv.post("/v1/sessions/" + sid + "/answers", json{{"task_id", "x"}}, h);
    CHECK(json::parse(replay->body) == last_outcome);
    task = srv.get_json("/v1/sessions/" + sid + "/task");
  }
  CHECK(last_outcome.at("section") == "training");
  CHECK(last_outcome.at("certificate_issued") == "training");
  CHECK(srv.get_json("/v1/campaigns/demo").at("packages_reserved") == 1);

  // Stale and unplayed submissions.
  const httplib::Headers stale{{"Idempotency-Key", "stale"}};
  CHECK(status(srv.post("/v1/sessions/" + sid + "/answers", {{"task_id", "hearing-0"}, {"hearing", json::array()}},
                        stale)) == 409);
  const httplib::Headers early{{"Idempotency-Key", "early"}};
  CHECK(status(srv.post("/v1/sessions/" + sid + "/answers", answers_for(manifest, task, rater), early)) == 422);
  CHECK(status(srv.post("/v1/sessions/" + sid + "/playback-complete",
                        {{"task_id", task.at("task_id")}, {"clip_ref", "nope"}})) == 422);

  for (const auto& s : task.at("stimuli")) {
    srv.post("/v1/sessions/" + sid + "/playback-complete", {{"task_id", task.at("task_id")}, {"clip_ref", s.at("ref")}});
  }
  auto done = srv.post("/v1/sessions/" + sid + "/answers", answers_for(manifest, task, rater), {{"Idempotency-Key", "rate"}});
  REQUIRE(done);
  CHECK(done->status == 200);
  CHECK(json::parse(done->body).at("screening").at("gold_passed") == true);

  // Results: conflict while open, partial on request, CSV on request.
  srv.get_json("/v1/campaigns/demo/results?level=clip", 409);
  const auto partial = srv.get_json("/v1/campaigns/demo/results?level=model&partial=1");
  CHECK(partial.at("partial") == true);
  CHECK(srv.get_json("/v1/campaigns/demo/results?level=galaxy&partial=1", 422).contains("error"));
  CHECK(status(srv.post("/v1/campaigns/demo/close", json::object())) == 200);
  const auto results = srv.get_json("/v1/campaigns/demo/results?level=clip");
  CHECK(results.at("rows").size() == 10);
  for (const auto& row : results.at("rows")) CHECK(row.at("scores").at("overall").at("mean") == 4.0);
  auto csv = srv.client->Get("/v1/campaigns/demo/results?level=model&format=csv");
  REQUIRE(csv);
  CHECK(csv->status == 200);
  CHECK(csv->get_header_value("Content-Type") == "text/csv");
  CHECK(csv->body.rfind("entity_id", 0) == 0);
}

TEST_CASE("media serving honours byte ranges") {
  Running srv("http-media");
  srv.post("/v1/campaigns", {{"manifest_path", srv.dir + "/manifest.json"}});
  const std::string whole = read_text(srv.dir + "/media/gold_noisy.wav");

  auto full = srv.client->Get("/v1/media/demo/gold_noisy");
  REQUIRE(full);
  CHECK(full->status == 200);
  CHECK(full->get_header_value("Content-Type") == "audio/wav");
  CHECK(full->body == whole);

  auto part = srv.client->Get("/v1/media/demo/gold_noisy", {{"Range", "bytes=0-43"}});
  REQUIRE(part);
  CHECK(part->status == 206);
  CHECK(part->body == whole.substr(0, 44));
  CHECK(part->get_header_value("Content-Range") == "bytes 0-43/" + std::to_string(whole.size()));

  auto tail = srv.client->Get("/v1/media/demo/gold_noisy", {{"Range", "bytes=100-"}});
  REQUIRE(tail);
  CHECK(tail->status == 206);
  CHECK(tail->body == whole.substr(100));

  CHECK(status(srv.client->Get("/v1/media/demo/nope")) == 404);
  CHECK(status(srv.client->Get("/v1/media/other/gold_noisy")) == 404);
  // Clip refs contain a slash.
  CHECK(status(srv.client->Get("/v1/media/demo/enh/c03")) == 200);
}

TEST_CASE("a busy port is refused") {
  Running srv("http-port");
  Service other(ServiceOptions{srv.dir + "/data2"});
  HttpServer second(other);
  CHECK_FALSE(second.bind("127.0.0.1", srv.http.port()));
}

TEST_CASE("posted manifest documents resolve against the server directory") {
  Running srv("http-doc");
  json doc = srv.manifest_doc;
  doc["campaign_id"] = "inline";
  doc["media_root"] = srv.dir + "/media";
  auto r = srv.post("/v1/campaigns", doc);
  REQUIRE(r);
  CHECK(r->status == 201);
  CHECK(srv.get_json("/v1/campaigns/inline").at("packages") == 2);
}

TEST_CASE("a bound but never served port is released") {
  const auto dir = temp_dir("http-release");
  Service svc(ServiceOptions{dir + "/data"});
  int port = 0;
  {
    HttpServer first(svc);
    REQUIRE(first.bind("127.0.0.1", 0));
    port = first.port();
  }
  HttpServer second(svc);
  CHECK(second.bind("127.0.0.1", port));
}
