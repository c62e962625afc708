#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sigc/analytics/score_table.hpp"
#include "sigc/report/text_table.hpp"

namespace sigc::report {

struct AnalyzeOptions {
  std::string baseline_model;
  std::uint64_t seed = 2023;
  int clip_folds = 5;
  int model_folds = 3;
  int factors = 3;
  double loading_threshold = 0.3;
  bool holm = false;
  std::string anova_metric = "m";
  bool include_baseline_in_correlations = true;
  // Externally produced objective scores to correlate with the subjective
  // table of the same level.
  std::optional<analytics::ScoreTable> objective;
};

struct ReportFile {
  std::string name;
  std::string content;
};

struct ReportBundle {
  std::vector<ReportFile> files;  // emission order; summary.txt last
  const ReportFile* find(const std::string& name) const;
};

// The full analysis of a screened vote set. Deterministic: the same input
// and options give byte-identical files. Throws ValidationError for an
// empty vote set or a baseline without votes.
ReportBundle analyze(const std::vector<analytics::RatingVote>& votes, const AnalyzeOptions& options);

void write_bundle(const ReportBundle& bundle, const std::string& out_dir);

}  // namespace sigc::report
