#include "campaign_fixture.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "sigc/common/rng.hpp"
#include "sigc/session/packages.hpp"
#include "sigc/stimulus/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sigc::testing {

std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = fs::temp_directory_path() /
                   ("sigc-test-" + std::to_string(::getpid()) + "-" + tag + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream os(path);
  os << doc.dump(2) << "\n";
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {

void silent_wav(const fs::path& path) {
  fs::create_directories(path.parent_path());
  stimulus::AudioBuffer b;
  b.samples.assign(480, 0.0);
  stimulus::write_wav(b, path.string());
}

}  // namespace

json write_campaign_fixture(const std::string& dir, const FixtureOptions& opt) {
  const fs::path media = fs::path(dir) / "media";
  auto file = [&](const std::string& name) {
    silent_wav(media / name);
    return name;
  };

  json clips = json::array();
  for (const auto& m : opt.models) {
    for (int i = 0; i < opt.clips_per_model; ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "c%02d", i);
      clips.push_back({{"model_id", m}, {"clip_id", id}, {"file", file(m + "_" + id + ".wav")}});
    }
  }
  json gold = json::array({
      {{"id", "gold_noisy"}, {"file", file("gold_noisy.wav")}, {"expected", {{"noisiness", 1}}}},
      {{"id", "gold_clean"}, {"file", file("gold_clean.wav")}, {"expected", {{"overall", 5}, {"signal", 5}}}},
  });
  json trapping = json::array({
      {{"id", "trap_worst"}, {"file", file("trap_worst.wav")}, {"target", "worst"}},
      {{"id", "trap_best"}, {"file", file("trap_best.wav")}, {"target", "best"}},
  });
  json hearing = json::array();
  for (const char* a : {"364", "912", "507", "248", "731"}) {
    hearing.push_back({{"id", std::string("dtt_") + a}, {"file", file(std::string("dtt_") + a + ".wav")}, {"answer", a}});
  }
  json bandwidth = json::array({
      {{"id", "bw_0"}, {"file", file("bw_0.wav")}, {"has_noise", true}, {"band", {9500, 22000}}},
      {{"id", "bw_1"}, {"file", file("bw_1.wav")}, {"has_noise", false}, {"band", nullptr}},
      {{"id", "bw_2"}, {"file", file("bw_2.wav")}, {"has_noise", true}, {"band", {3500, 22000}}},
      {{"id", "bw_3"}, {"file", file("bw_3.wav")}, {"has_noise", true}, {"band", {15000, 22000}}},
      {{"id", "bw_4"}, {"file", file("bw_4.wav")}, {"has_noise", false}, {"band", nullptr}},
  });
  json jnd = json::array();
  for (int i = 0; i < 4; ++i) {
    const std::string s = std::to_string(i);
    jnd.push_back({{"id_a", "jnd_" + s + "a"}, {"file_a", file("jnd_" + s + "a.wav")},
                   {"id_b", "jnd_" + s + "b"}, {"file_b", file("jnd_" + s + "b.wav")},
                   {"better", i % 2 ? "b" : "a"}});
  }
  json instructions = json::array({{{"id", "inst_1"}, {"file", file("inst_1.wav")}},
                                   {{"id", "inst_2"}, {"file", file("inst_2.wav")}}});
  json training = json::array();
  for (int i = 0; i < 7; ++i) {
    const std::string id = "train_" + std::to_string(i);
    training.push_back({{"id", id}, {"file", file(id + ".wav")}, {"expected_ranges", {{"overall", {2, 4}}}}});
  }

  json doc{{"schema_version", 1},
           {"campaign_id", opt.campaign_id},
           {"media_root", "media"},
           {"seed", opt.seed},
           {"votes_per_clip", opt.votes_per_clip},
           {"required_bandwidth", opt.required_bandwidth},
           {"clips", clips},
           {"gold", gold},
           {"trapping", trapping},
           {"hearing", hearing},
           {"bandwidth", bandwidth},
           {"jnd", jnd},
           {"instructions", instructions},
           {"loudness", {{"id", "loud"}, {"file", file("loud.wav")}}},
           {"training", training}};
  if (!opt.models.empty()) doc["baseline_model"] = opt.models.front();
  write_json((fs::path(dir) / "manifest.json").string(), doc);
  return doc;
}

std::map<Dimension, int> uniform_votes(int v) {
  std::map<Dimension, int> out;
  for (Dimension d : kAllDimensions) out[d] = v;
  return out;
}

json answers_for(const service::Manifest& manifest, const json& task, const Rater& rater) {
  const auto& mat = manifest.materials;
  const std::string section = task.at("section");
  json a{{"task_id", task.at("task_id")}};
  if (section == "hearing") {
    json h = json::array();
    for (const auto& s : mat.hearing) h.push_back(s.answer);
    a["hearing"] = h;
  } else if (section == "bandwidth") {
    json b = json::array();
    for (const auto& k : mat.bandwidth_key) b.push_back(k.has_noise ? "different" : "same");
    a["bandwidth"] = b;
  } else if (section == "setup_jnd") {
    json j = json::array();
    for (const auto& p : mat.jnd) j.push_back(std::string(1, p.better));
    a["jnd"] = j;
  } else if (section == "training" || section == "rating") {
    json ratings = json::object();
    for (const auto& s : task.at("stimuli")) {
      const std::string ref = s.at("ref");
      std::map<Dimension, int> votes;
      if (auto g = mat.controls.gold.find(ref); g != mat.controls.gold.end()) {
        votes = uniform_votes(3);
        for (const auto& [d, v] : g->second.expected) votes[d] = rater.fail_controls ? 6 - v : v;
      } else if (auto t = mat.controls.trapping.find(ref); t != mat.controls.trapping.end()) {
        const int v = stimulus::expected_trap_vote(t->second);
        votes = uniform_votes(rater.fail_controls ? 3 : v);
      } else if (section == "rating" && rater.vote) {
        votes = rater.vote(ref);
      } else {
        votes = uniform_votes(3);
      }
      json vj = json::object();
      for (const auto& [d, v] : votes) vj[std::string(to_string(d))] = v;
      ratings[ref] = vj;
    }
    a["ratings"] = ratings;
  }
  return a;
}

json complete_task(service::Service& svc, const std::string& session_id,
                   const service::Manifest& manifest, const json& task, const Rater& rater,
                   const std::string& key) {
  const std::string section = task.at("section");
  if (section == "instructions" || section == "loudness_adjust" || section == "training" ||
      section == "rating") {
    for (const auto& s : task.at("stimuli")) {
      svc.playback_complete(session_id, task.at("task_id"), s.at("ref"));
    }
  }
  return svc.submit_answers(session_id, key, answers_for(manifest, task, rater));
}

int run_participant(service::Service& svc, const std::string& campaign_id,
                    const service::Manifest& manifest, const Rater& rater, int packages) {
  const auto created = svc.create_session(campaign_id, rater.participant_id);
  const std::string sid = created.at("session_id");
  static int serial = 0;
  int done = 0;
  for (int step = 0; done < packages && step < 1000; ++step) {
    const auto task = svc.next_task(sid);
    if (task.at("status") != "task") break;
    complete_task(svc, sid, manifest, task, rater, "k" + std::to_string(serial++));
    if (task.at("section") == "rating") ++done;
  }
  return done;
}

SimulatedCampaign simulate_campaign(const SimulationConfig& cfg) {
  Rng rng(cfg.seed);
  SimulatedCampaign sim;

  std::vector<std::string> clip_ids;
  std::map<std::string, double> clip_effect;
  for (int i = 0; i < cfg.clips; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "clip%03d", i);
    clip_ids.push_back(id);
    clip_effect[id] = rng.normal(0.0, cfg.clip_sigma);
  }
  std::vector<std::string> refs;
  for (const auto& [m, off] : cfg.models) {
    for (const auto& c : clip_ids) refs.push_back(m + "/" + c);
  }

  qc::GoldSpec gold{"gold/1", {{Dimension::kNoisiness, 1}}, 1};
  sim.controls.gold[gold.clip_ref] = gold;
  sim.controls.trapping["trap/1"] = stimulus::TrapTarget::kWorst;

  auto true_quality = [&](const std::string& ref) {
    const auto slash = ref.find('/');
    return cfg.base_quality + cfg.models.at(ref.substr(0, slash)) + clip_effect.at(ref.substr(slash + 1));
  };
  auto clamp_vote = [](double x) { return static_cast<int>(std::clamp(std::lround(x), 1L, 5L)); };

  auto fill = [&](const session::TestPackage& pkg, const std::string& rater, bool bad) {
    qc::PackageSubmission sub;
    sub.participant_id = rater;
    sub.package_id = pkg.id;
    for (const auto& item : pkg.items) {
      qc::VoteRecord v;
      v.participant_id = rater;
      v.clip_ref = item.clip_ref;
      v.package_id = pkg.id;
      v.listen_complete = true;
      if (item.kind == session::ItemKind::kGold) {
        v.votes = uniform_votes(3);
        v.votes[Dimension::kNoisiness] = bad ? 5 : 1;
      } else if (item.kind == session::ItemKind::kTrapping) {
        v.votes = uniform_votes(bad ? 4 : 1);
      } else {
        const double q = true_quality(item.clip_ref);
        for (Dimension d : kAllDimensions) {
          // The careless rater answers against the grain.
          v.votes[d] = clamp_vote((bad ? 6.0 - q : q) + rng.normal(0.0, cfg.vote_sigma));
        }
      }
      sub.votes.push_back(std::move(v));
    }
    return sub;
  };

  const auto plan = session::build_packages(refs, {"gold/1"}, {"trap/1"}, cfg.votes_per_clip,
                                            derive_seed(cfg.seed, "plan"));
  for (std::size_t i = 0; i < plan.size(); ++i) {
    sim.submissions.push_back(fill(plan[i], "rater" + std::to_string(i % cfg.raters), false));
  }
  sim.bad_rater = "rater_bad";
  const auto extra = session::build_packages(refs, {"gold/1"}, {"trap/1"}, 1,
                                             derive_seed(cfg.seed, "extra"));
  for (int i = 0; i < cfg.bad_rater_packages && i < static_cast<int>(extra.size()); ++i) {
    auto pkg = extra[i];
    pkg.id = "extra-" + pkg.id;
    sim.submissions.push_back(fill(pkg, sim.bad_rater, true));
  }
  return sim;
}

std::vector<analytics::RatingVote> screened_votes(const SimulatedCampaign& sim,
                                                  qc::ScreeningResult* screening) {
  auto result = qc::screen_submission(sim.submissions, sim.controls);
  std::vector<analytics::RatingVote> out;
  for (const auto& v : result.analysis_votes()) {
    const auto slash = v.clip_ref.find('/');
    for (const auto& [d, vote] : v.votes) {
      out.push_back({v.participant_id, v.clip_ref.substr(slash + 1), v.clip_ref.substr(0, slash), d, vote});
    }
  }
  if (screening) *screening = std::move(result);
  return out;
}

}  // namespace sigc::testing
