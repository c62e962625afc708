#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sigc/analytics/correlation.hpp"
#include "sigc/analytics/score_table.hpp"
#include "sigc/analytics/significance.hpp"

namespace sigc::analytics {

// M = ((sig - 1) / 4 + (ovrl - 1) / 4) / 2. Both inputs must lie in [1, 5].
double challenge_metric(double sig_mos, double ovrl_mos);

// Improvement per dimension: model - baseline. Both rows must rate the same
// dimensions.
std::map<Dimension, double> dmos(const DimensionScores& model, const DimensionScores& baseline);

// Distance to "excellent": 5 - mos.
double headroom(double mos);

struct ChallengeResult {
  std::string model_id;
  double m = 0.0;
  double sig = 0.0;
  double ovrl = 0.0;
  double dsig = 0.0;
  bool compliant = false;  // dsig > 0
};

struct ChallengeRanking {
  std::vector<ChallengeResult> ranked;    // compliant models, M descending
  std::vector<ChallengeResult> excluded;  // dsig <= 0, id order
};

// Scores every non-baseline model of a model-level table against the
// baseline row. Ties on M keep id order.
ChallengeRanking rank_challenge(const ScoreTable& model_table, const std::string& baseline_model);

// Fraction of clip rows whose Signal mean is below their Noisiness (BAK) mean.
double sig_lt_bak_fraction(const ScoreTable& clip_table);

// Per-clip quantity fed to the significance tests: the challenge metric or a
// single dimension's mean.
struct Metric {
  bool challenge = true;
  Dimension dimension = Dimension::kOverall;

  static Metric challenge_m() { return {}; }
  static Metric of(Dimension d) { return {false, d}; }
  std::string name() const;
};

// "m" or any dimension name.
Metric parse_metric(const std::string& s);

double metric_value(const DimensionScores& scores, Metric metric);

// model -> source clip id -> metric, skipping models in `exclude`.
PerClipValues per_clip_values(const ScoreTable& clip_table, Metric metric,
                              const std::set<std::string>& exclude = {});

struct DimensionCorrelation {
  Dimension dimension = Dimension::kOverall;
  std::size_t n = 0;
  double pcc = 0.0;
  double srcc = 0.0;
  double tau_b = 0.0;
  double tau_b95 = 0.0;
};

// Correlates two tables over their shared entities, one bundle per requested
// dimension. Tau-b95 ranks table A with its confidence intervals against the
// plain ordering of table B. Both tables must hold the same entity ids.
std::vector<DimensionCorrelation> cross_test_correlation(const ScoreTable& a, const ScoreTable& b,
                                                         const std::vector<Dimension>& dimensions,
                                                         bool include_baseline = true);

}  // namespace sigc::analytics
