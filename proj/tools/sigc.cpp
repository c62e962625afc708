// sigc: operator entry point. Exit codes: 0 success, 1 invalid input,
// 2 runtime failure.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sigc/analytics/score_table.hpp"
#include "sigc/analytics/wer.hpp"
#include "sigc/common/csv.hpp"
#include "sigc/common/errors.hpp"
#include "sigc/compliance/latency.hpp"
#include "sigc/report/analyze.hpp"
#include "sigc/service/http_api.hpp"
#include "sigc/service/manifest.hpp"
#include "sigc/stimulus/generators.hpp"
#include "sigc/stimulus/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 2023;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sigc::ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sigc::Error("cannot write '" + path.string() + "'");
  out << text;
}

int gen_stimuli(const std::string& base_path, const std::string& out_dir, std::uint64_t seed, double snr) {
  if (!fs::exists(base_path)) throw sigc::ValidationError("base clip '" + base_path + "' does not exist");
  const auto base = sigc::stimulus::read_wav(base_path);
  const auto battery = sigc::stimulus::gen_bandwidth_battery(base, seed, snr);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < battery.samples.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "bandwidth_%zu.wav", i + 1);
    sigc::stimulus::write_wav(battery.samples[i].audio, (fs::path(out_dir) / name).string());
  }
  write_text(fs::path(out_dir) / "bandwidth_key.json", sigc::stimulus::battery_key_json(battery.key));
  std::cout << "wrote " << battery.samples.size() << " samples and bandwidth_key.json to " << out_dir << "\n";
  return 0;
}

int package(const std::string& manifest_path, int votes_per_clip, std::optional<std::uint64_t> seed,
            const std::string& out) {
  auto m = sigc::service::ingest_manifest_file(manifest_path);
  if (votes_per_clip > 0) m.votes_per_clip = votes_per_clip;
  if (seed) m.seed = *seed;
  json plan = json::array();
  for (const auto& p : sigc::service::plan_packages(m)) {
    json items = json::array();
    for (const auto& it : p.items) {
      items.push_back({{"clip_ref", it.clip_ref}, {"kind", std::string(sigc::session::to_string(it.kind))}});
    }
    plan.push_back({{"id", p.id}, {"items", items}});
  }
  const json doc{{"campaign_id", m.campaign_id},
                 {"seed", m.seed},
                 {"votes_per_clip", m.votes_per_clip},
                 {"packages", plan}};
  write_text(out, doc.dump(2) + "\n");
  std::cout << "wrote " << plan.size() << " packages to " << out << "\n";
  return 0;
}

sigc::service::HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int serve(const std::string& host, int port, std::string data_dir, const std::string& manifest) {
  if (data_dir.empty()) {
    const char* env = std::getenv("SIGC_DATA_DIR");
    data_dir = env ? env : "sigc-data";
  }
  sigc::service::Service service({data_dir});
  if (!manifest.empty()) {
    const auto m = sigc::service::ingest_manifest_file(manifest);
    try {
      std::cout << service.create_campaign(manifest).dump() << "\n";
    } catch (const sigc::ConflictError&) {
      std::cout << "campaign '" << m.campaign_id << "' already present in " << data_dir << "\n";
    }
  }
  sigc::service::HttpServer server(service);
  if (!server.bind(host, port)) {
    std::cerr << "error: cannot bind " << host << ":" << port << " (port busy?)\n";
    return 2;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << host << ":" << server.port() << ", data in " << data_dir << std::endl;
  server.serve();
  g_server = nullptr;
  service.snapshot();
  std::cout << "stopped; " << service.last_seq() << " events durable" << std::endl;
  return 0;
}

int analyze(const std::string& votes_path, sigc::report::AnalyzeOptions opt, const std::string& out_dir,
            const std::string& objective_path, const std::string& objective_level) {
  const auto votes = sigc::analytics::read_votes_csv(votes_path);
  if (!objective_path.empty()) {
    opt.objective = sigc::analytics::read_score_table_csv(objective_path,
                                                          sigc::analytics::level_from_string(objective_level));
  }
  const auto bundle = sigc::report::analyze(votes, opt);
  sigc::report::write_bundle(bundle, out_dir);
  std::cout << bundle.find("summary.txt")->content;
  std::cout << "wrote " << bundle.files.size() << " files to " << out_dir << "\n";
  return 0;
}

int compliance(const std::string& chain_path, std::optional<double> rtf, bool as_json) {
  const auto chain = sigc::compliance::read_chain_file(chain_path);
  const double r = rtf ? *rtf : chain.declared_rtf.value_or(-1.0);
  if (r < 0.0) throw sigc::ValidationError("no RTF: pass --rtf or set declared_rtf in the chain");
  const auto v = sigc::compliance::check_compliance(chain, r);
  if (as_json) {
    json doc{{"algorithmic_ms", v.algorithmic_ms.str()},
             {"buffering_ms", v.buffering_ms.str()},
             {"total_ms", v.total_ms.str()},
             {"rtf", v.rtf},
             {"rtf_ok", v.rtf_ok},
             {"latency_ok", v.latency_ok},
             {"causal", v.causal},
             {"passes", v.passes},
             {"reasons", v.reasons}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << sigc::compliance::verdict_table(chain, v);
  }
  return 0;
}

std::map<std::string, fs::path> transcripts(const std::string& dir) {
  if (!fs::is_directory(dir)) throw sigc::ValidationError("'" + dir + "' is not a directory");
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") out[e.path().stem().string()] = e.path();
  }
  return out;
}

int wer(const std::string& ref_dir, const std::string& hyp_dir, const std::string& out) {
  const auto refs = transcripts(ref_dir);
  const auto hyps = transcripts(hyp_dir);
  std::vector<std::string> issues;
  for (const auto& [id, p] : refs) {
    if (!hyps.contains(id)) issues.push_back("no hypothesis for '" + id + "'");
  }
  for (const auto& [id, p] : hyps) {
    if (!refs.contains(id)) issues.push_back("no reference for '" + id + "'");
  }
  if (refs.empty()) issues.push_back("no .txt transcripts in '" + ref_dir + "'");
  if (!issues.empty()) throw sigc::ValidationError("transcript sets do not match", issues);

  std::ostringstream os;
  sigc::csv::write_row(os, {"file", "reference_words", "substitutions", "deletions", "insertions", "wer"});
  sigc::analytics::WerCounts total;
  for (const auto& [id, ref_path] : refs) {
    const auto ref = sigc::analytics::normalize_words(slurp(ref_path.string()));
    if (ref.empty()) throw sigc::ValidationError("reference '" + id + "' is empty");
    const auto c = sigc::analytics::align_words(ref, sigc::analytics::normalize_words(slurp(hyps.at(id).string())));
    total += c;
    sigc::csv::write_row(os, {id, std::to_string(c.reference_words), std::to_string(c.substitutions),
                              std::to_string(c.deletions), std::to_string(c.insertions),
                              sigc::csv::fixed(c.rate())});
  }
  sigc::csv::write_row(os, {"corpus", std::to_string(total.reference_words), std::to_string(total.substitutions),
                            std::to_string(total.deletions), std::to_string(total.insertions),
                            sigc::csv::fixed(total.rate())});
  if (out.empty()) {
    std::cout << os.str();
  } else {
    write_text(out, os.str());
    std::cout << "corpus WER " << sigc::csv::fixed(total.rate()) << ", " << refs.size() << " files, wrote " << out
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sigc: listening-test campaigns, score analytics and real-time compliance"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;

  auto* gen = app.add_subcommand("gen-stimuli", "Generate the five-sample device bandwidth battery");
  std::string base, gen_out;
  double snr = sigc::stimulus::kDefaultNoiseSnrDb;
  gen->add_option("--base", base, "Base speech clip (48 kHz mono WAV)")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", seed, "Seed")->capture_default_str();
  gen->add_option("--snr", snr, "Noise SNR in dB")->capture_default_str();

  auto* pkg = app.add_subcommand("package", "Build the package plan for a campaign manifest");
  std::string manifest, pkg_out;
  int votes_per_clip = 0;
  std::optional<std::uint64_t> pkg_seed;
  pkg->add_option("--manifest", manifest, "Campaign manifest JSON")->required();
  pkg->add_option("--votes-per-clip", votes_per_clip, "Override the manifest's votes_per_clip");
  pkg->add_option("--seed", pkg_seed, "Override the manifest's seed");
  pkg->add_option("--out", pkg_out, "Output plan JSON")->required();

  auto* srv = app.add_subcommand("serve", "Run the evaluation service");
  std::string host = "127.0.0.1", data_dir, srv_manifest;
  int port = 8080;
  srv->add_option("--host", host)->capture_default_str();
  srv->add_option("--port", port)->capture_default_str();
  srv->add_option("--data-dir", data_dir, "Event log directory (default $SIGC_DATA_DIR or ./sigc-data)");
  srv->add_option("--manifest", srv_manifest, "Ingest this campaign manifest at start-up");

  auto* an = app.add_subcommand("analyze", "Score tables, ranking, significance and dimension models");
  std::string votes, an_out, objective, objective_level = "model";
  sigc::report::AnalyzeOptions opt;
  an->add_option("--votes", votes, "Screened votes CSV")->required();
  an->add_option("--baseline", opt.baseline_model, "Baseline (noisy) model id")->required();
  an->add_option("--out", an_out, "Output directory")->required();
  an->add_option("--seed", seed, "Seed")->capture_default_str();
  an->add_option("--k", opt.clip_folds, "Folds at clip level")->capture_default_str();
  an->add_option("--model-k", opt.model_folds, "Folds at model level")->capture_default_str();
  an->add_option("--factors", opt.factors, "Factors to extract")->capture_default_str();
  an->add_option("--metric", opt.anova_metric, "Per-clip metric for significance: m or a scale")
      ->capture_default_str();
  an->add_flag("--holm", opt.holm, "Holm-adjust pairwise p-values");
  an->add_option("--objective", objective, "Objective score table CSV to correlate with");
  an->add_option("--level", objective_level, "Level of the objective table: clip or model")->capture_default_str();
  bool exclude_baseline = false;
  an->add_flag("--exclude-baseline", exclude_baseline, "Leave the baseline out of correlations");

  auto* cc = app.add_subcommand("compliance", "Latency and RTF verdict for a processing chain");
  std::string chain;
  std::optional<double> rtf;
  bool as_json = false;
  cc->add_option("--chain", chain, "Chain descriptor JSON")->required();
  cc->add_option("--rtf", rtf, "Measured real-time factor (overrides declared_rtf)");
  cc->add_flag("--json", as_json, "Emit JSON instead of a table");

  auto* w = app.add_subcommand("wer", "Per-file and corpus word error rate");
  std::string ref_dir, hyp_dir, wer_out;
  w->add_option("--ref", ref_dir, "Reference transcript directory (*.txt)")->required();
  w->add_option("--hyp", hyp_dir, "Hypothesis transcript directory (*.txt)")->required();
  w->add_option("--out", wer_out, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*gen) return gen_stimuli(base, gen_out, seed, snr);
    if (*pkg) return package(manifest, votes_per_clip, pkg_seed, pkg_out);
    if (*srv) return serve(host, port, data_dir, srv_manifest);
    if (*an) {
      opt.seed = seed;
      opt.include_baseline_in_correlations = !exclude_baseline;
      return analyze(votes, opt, an_out, objective, objective_level);
    }
    if (*cc) return compliance(chain, rtf, as_json);
    if (*w) return wer(ref_dir, hyp_dir, wer_out);
  } catch (const sigc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& issue : e.issues()) std::cerr << "  - " << issue << "\n";
    return 1;
  } catch (const sigc::NotFoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
