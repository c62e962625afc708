#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sigc/analytics/score_table.hpp"
#include "sigc/common/dimension.hpp"
#include "sigc/qc/screening.hpp"
#include "sigc/service/manifest.hpp"
#include "sigc/service/service.hpp"

namespace sigc::testing {

// Fresh empty directory under the system temp dir.
std::string temp_dir(const std::string& tag);

struct FixtureOptions {
  std::string campaign_id = "demo";
  std::vector<std::string> models = {"noisy", "enh"};
  int clips_per_model = 10;
  int votes_per_clip = 1;
  std::uint64_t seed = 2023;
  std::string required_bandwidth = "fullband";
};

// Writes a complete campaign (short 48 kHz media plus manifest.json) into
// `dir` and returns the manifest document. Media files are tiny silent WAVs.
nlohmann::json write_campaign_fixture(const std::string& dir, const FixtureOptions& opt = {});

void write_json(const std::string& path, const nlohmann::json& doc);
std::string read_text(const std::string& path);

// A simulated participant answering whatever the service hands out.
struct Rater {
  std::string participant_id;
  // Votes for a rating clip; controls are answered correctly unless
  // `fail_controls`.
  std::function<std::map<Dimension, int>(const std::string& ref)> vote;
  bool fail_controls = false;
};

std::map<Dimension, int> uniform_votes(int v);

// Answer document for a task document.
nlohmann::json answers_for(const service::Manifest& manifest, const nlohmann::json& task,
                           const Rater& rater);

// Plays every stimulus of the task and submits the answers.
nlohmann::json complete_task(service::Service& svc, const std::string& session_id,
                             const service::Manifest& manifest, const nlohmann::json& task,
                             const Rater& rater, const std::string& key);

// Runs a participant through the protocol until `packages` rating pages are
// done or there is no work. Returns the number of rating pages submitted.
int run_participant(service::Service& svc, const std::string& campaign_id,
                    const service::Manifest& manifest, const Rater& rater, int packages);

// Votes-level campaign simulator: models with planted per-dimension quality,
// a package plan from the session engine, simulated raters with vote noise,
// and one rater who fails the control items.
struct SimulationConfig {
  int clips = 50;
  // model id -> offset added to every dimension's true quality.
  std::map<std::string, double> models = {
      {"noisy", 0.0}, {"model_a", 1.5}, {"model_b", 1.0}, {"model_c", 0.5}};
  std::string baseline = "noisy";
  int votes_per_clip = 5;
  double vote_sigma = 0.5;
  double base_quality = 2.2;
  double clip_sigma = 0.3;
  int raters = 30;
  int bad_rater_packages = 4;
  std::uint64_t seed = 1;
};

struct SimulatedCampaign {
  std::vector<qc::PackageSubmission> submissions;
  qc::ControlSpecs controls;
  std::string bad_rater;
};

SimulatedCampaign simulate_campaign(const SimulationConfig& cfg);

// Screening plus conversion to score-analytics vote rows; the clip ref
// "model/clip" is split into its parts.
std::vector<analytics::RatingVote> screened_votes(const SimulatedCampaign& sim,
                                                  qc::ScreeningResult* screening = nullptr);

}  // namespace sigc::testing
