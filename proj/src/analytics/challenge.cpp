#include "sigc/analytics/challenge.hpp"

#include <algorithm>
#include <cmath>

#include "sigc/common/errors.hpp"

namespace sigc::analytics {

namespace {

void require_mos(double v, const char* what) {
  if (!(v >= 1.0 && v <= 5.0)) {
    throw ValidationError(std::string(what) + " MOS " + std::to_string(v) + " outside [1, 5]");
  }
}

}  // namespace

double challenge_metric(double sig_mos, double ovrl_mos) {
  require_mos(sig_mos, "SIG");
  require_mos(ovrl_mos, "OVRL");
  return ((sig_mos - 1.0) / 4.0 + (ovrl_mos - 1.0) / 4.0) / 2.0;
}

std::map<Dimension, double> dmos(const DimensionScores& model, const DimensionScores& baseline) {
  std::map<Dimension, double> out;
  for (Dimension d : kAllDimensions) {
    if (model.has(d) != baseline.has(d)) {
      throw ValidationError("dimension '" + std::string(to_string(d)) +
                            "' rated for only one of model and baseline");
    }
    if (model.has(d)) out[d] = model.at(d).mean - baseline.at(d).mean;
  }
  return out;
}

double headroom(double mos) {
  require_mos(mos, "input");
  return 5.0 - mos;
}

ChallengeRanking rank_challenge(const ScoreTable& model_table, const std::string& baseline_model) {
  if (model_table.level != Level::kModel) throw ValidationError("ranking needs a model-level table");
  auto base_it = model_table.rows.find(baseline_model);
  if (base_it == model_table.rows.end()) {
    throw ValidationError("baseline model '" + baseline_model + "' not in score table");
  }
  const DimensionScores& base = base_it->second.scores;

  ChallengeRanking out;
  for (const auto& [id, row] : model_table.rows) {
    if (id == baseline_model) continue;
    ChallengeResult r;
    r.model_id = id;
    r.sig = row.scores.at(Dimension::kSignal).mean;
    r.ovrl = row.scores.at(Dimension::kOverall).mean;
    r.m = challenge_metric(r.sig, r.ovrl);
    r.dsig = r.sig - base.at(Dimension::kSignal).mean;
    r.compliant = r.dsig > 0.0;
    (r.compliant ? out.ranked : out.excluded).push_back(r);
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const ChallengeResult& a, const ChallengeResult& b) { return a.m > b.m; });
  return out;
}

double sig_lt_bak_fraction(const ScoreTable& clip_table) {
  if (clip_table.rows.empty()) throw ValidationError("empty clip table");
  std::size_t below = 0;
  for (const auto& [id, row] : clip_table.rows) {
    if (row.scores.at(Dimension::kSignal).mean < row.scores.at(Dimension::kNoisiness).mean) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(clip_table.rows.size());
}

std::string Metric::name() const {
  return challenge ? std::string("m") : std::string(to_string(dimension));
}

Metric parse_metric(const std::string& s) {
  if (s == "m" || s == "M") return Metric::challenge_m();
  return Metric::of(dimension_from_string(s));
}

double metric_value(const DimensionScores& scores, Metric metric) {
  if (metric.challenge) {
    return challenge_metric(scores.at(Dimension::kSignal).mean, scores.at(Dimension::kOverall).mean);
  }
  return scores.at(metric.dimension).mean;
}

PerClipValues per_clip_values(const ScoreTable& clip_table, Metric metric,
                              const std::set<std::string>& exclude) {
  if (clip_table.level != Level::kClip) throw ValidationError("per-clip values need a clip table");
  PerClipValues out;
  for (const auto& [id, row] : clip_table.rows) {
    if (exclude.count(row.model_id)) continue;
    out[row.model_id][row.clip_id] = metric_value(row.scores, metric);
  }
  return out;
}

std::vector<DimensionCorrelation> cross_test_correlation(const ScoreTable& a, const ScoreTable& b,
                                                         const std::vector<Dimension>& dimensions,
                                                         bool include_baseline) {
  std::vector<std::string> ids;
  std::vector<std::string> missing;
  for (const auto& [id, row] : a.rows) {
    if (!include_baseline && a.baseline_model && row.model_id == *a.baseline_model) continue;
    if (b.rows.count(id)) {
      ids.push_back(id);
    } else {
      missing.push_back("'" + id + "' missing from second table");
    }
  }
  for (const auto& [id, row] : b.rows) {
    if (!include_baseline && a.baseline_model && row.model_id == *a.baseline_model) continue;
    if (!a.rows.count(id)) missing.push_back("'" + id + "' missing from first table");
  }
  if (!missing.empty()) throw PairingError("score tables cover different entities", missing);

  std::vector<DimensionCorrelation> out;
  for (Dimension d : dimensions) {
    std::vector<double> x, y;
    std::vector<ScoreWithCi> with_ci;
    for (const auto& id : ids) {
      const auto& sa = a.rows.at(id).scores.at(d);
      const auto& sb = b.rows.at(id).scores.at(d);
      x.push_back(sa.mean);
      y.push_back(sb.mean);
      with_ci.push_back({sa.mean, sa.ci95});
    }
    DimensionCorrelation c;
    c.dimension = d;
    c.n = ids.size();
    c.pcc = pcc(x, y);
    c.srcc = srcc(x, y);
    c.tau_b = kendall_tau_b(x, y);
    c.tau_b95 = tau_b95(with_ci, descending_ranks(y)).tau;
    out.push_back(c);
  }
  return out;
}

}  // namespace sigc::analytics
