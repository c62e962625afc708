#include "sigc/analytics/score_table.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "sigc/analytics/mos.hpp"
#include "sigc/common/csv.hpp"
#include "sigc/common/errors.hpp"

namespace sigc::analytics {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const DimensionScore& DimensionScores::at(Dimension d) const {
  const auto& s = by_dim[index_of(d)];
  if (!s) throw ValidationError("no scores for dimension '" + std::string(to_string(d)) + "'");
  return *s;
}

std::string to_string(Level level) { return level == Level::kClip ? "clip" : "model"; }

Level level_from_string(const std::string& s) {
  if (s == "clip") return Level::kClip;
  if (s == "model") return Level::kModel;
  throw ValidationError("unknown level '" + s + "' (expected clip or model)");
}

const ScoreRow& ScoreTable::row(const std::string& entity_id) const {
  auto it = rows.find(entity_id);
  if (it == rows.end()) throw NotFoundError("no score row for '" + entity_id + "'");
  return it->second;
}

std::vector<std::string> ScoreTable::model_ids() const {
  std::set<std::string> ids;
  for (const auto& [id, r] : rows) ids.insert(r.model_id);
  return {ids.begin(), ids.end()};
}

std::string clip_entity_id(const std::string& model_id, const std::string& clip_id) {
  return model_id + "/" + clip_id;
}

std::vector<RatingVote> parse_votes_csv(const std::string& text) {
  const csv::Document doc = csv::parse(text);
  const std::size_t c_pid = doc.column("participant_id");
  const std::size_t c_clip = doc.column("clip_id");
  const std::size_t c_model = doc.column("model_id");
  const std::size_t c_dim = doc.column("dimension");
  const std::size_t c_vote = doc.column("vote");

  std::vector<RatingVote> out;
  std::vector<std::string> issues;
  out.reserve(doc.rows.size());
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& r = doc.rows[i];
    const std::string where = "row " + std::to_string(i + 2) + ": ";
    RatingVote v;
    v.participant_id = r[c_pid];
    v.clip_id = r[c_clip];
    v.model_id = r[c_model];
    if (v.clip_id.empty() || v.model_id.empty()) {
      issues.push_back(where + "empty clip_id or model_id");
      continue;
    }
    auto dim = parse_dimension(r[c_dim]);
    if (!dim) {
      issues.push_back(where + "unknown dimension '" + r[c_dim] + "'");
      continue;
    }
    v.dimension = *dim;
    try {
      const long long vote = csv::parse_int(r[c_vote]);
      if (vote < 1 || vote > 5) {
        issues.push_back(where + "vote " + r[c_vote] + " outside 1..5");
        continue;
      }
      v.vote = static_cast<int>(vote);
    } catch (const ValidationError&) {
      issues.push_back(where + "vote '" + r[c_vote] + "' is not an integer");
      continue;
    }
    out.push_back(std::move(v));
  }
  if (!issues.empty()) throw ValidationError("invalid votes CSV", issues);
  return out;
}

std::vector<RatingVote> read_votes_csv(const std::string& path) {
  return parse_votes_csv(slurp(path));
}

std::string votes_csv(const std::vector<RatingVote>& votes) {
  std::ostringstream os;
  csv::write_row(os, {"participant_id", "clip_id", "model_id", "dimension", "vote"});
  for (const auto& v : votes) {
    csv::write_row(os, {v.participant_id, v.clip_id, v.model_id, std::string(to_string(v.dimension)),
                        std::to_string(v.vote)});
  }
  return os.str();
}

ScoreTable build_clip_table(const std::vector<RatingVote>& votes,
                            std::optional<std::string> baseline_model) {
  if (votes.empty()) throw ValidationError("no votes to aggregate");
  // entity -> dimension -> votes
  std::map<std::string, std::array<std::vector<int>, kNumDimensions>> grouped;
  std::map<std::string, std::pair<std::string, std::string>> ids;
  for (const auto& v : votes) {
    const std::string eid = clip_entity_id(v.model_id, v.clip_id);
    grouped[eid][index_of(v.dimension)].push_back(v.vote);
    ids.emplace(eid, std::make_pair(v.model_id, v.clip_id));
  }
  ScoreTable table;
  table.level = Level::kClip;
  for (const auto& [eid, per_dim] : grouped) {
    ScoreRow row;
    row.entity_id = eid;
    row.model_id = ids[eid].first;
    row.clip_id = ids[eid].second;
    for (Dimension d : kAllDimensions) {
      const auto& list = per_dim[index_of(d)];
      if (list.empty()) continue;
      const MosEstimate e = mos(list);
      row.scores.set(d, {e.mean, e.ci95_halfwidth, e.count});
    }
    table.rows.emplace(eid, std::move(row));
  }
  if (baseline_model) {
    bool found = false;
    for (const auto& [eid, r] : table.rows) found = found || r.model_id == *baseline_model;
    if (!found) throw ValidationError("baseline model '" + *baseline_model + "' has no votes");
  }
  table.baseline_model = std::move(baseline_model);
  return table;
}

ScoreTable build_model_table(const ScoreTable& clip_table) {
  if (clip_table.level != Level::kClip) {
    throw ValidationError("model table must be built from a clip-level table");
  }
  struct Acc {
    std::array<std::vector<double>, kNumDimensions> means;
    std::array<std::size_t, kNumDimensions> votes{};
  };
  std::map<std::string, Acc> by_model;
  for (const auto& [eid, r] : clip_table.rows) {
    Acc& acc = by_model[r.model_id];
    for (Dimension d : kAllDimensions) {
      if (!r.scores.has(d)) continue;
      acc.means[index_of(d)].push_back(r.scores.at(d).mean);
      acc.votes[index_of(d)] += r.scores.at(d).vote_count;
    }
  }
  ScoreTable table;
  table.level = Level::kModel;
  table.baseline_model = clip_table.baseline_model;
  for (const auto& [model, acc] : by_model) {
    ScoreRow row;
    row.entity_id = model;
    row.model_id = model;
    for (Dimension d : kAllDimensions) {
      const auto& m = acc.means[index_of(d)];
      if (m.empty()) continue;
      const MosEstimate e = mean_ci95(m);
      row.scores.set(d, {e.mean, e.ci95_halfwidth, acc.votes[index_of(d)]});
    }
    table.rows.emplace(model, std::move(row));
  }
  return table;
}

std::string score_table_csv(const ScoreTable& table) {
  std::ostringstream os;
  csv::Row header{"entity_id", "model_id", "clip_id"};
  for (Dimension d : kAllDimensions) {
    const std::string n(to_string(d));
    header.push_back(n + "_mean");
    header.push_back(n + "_ci95");
    header.push_back(n + "_n");
  }
  header.push_back("m");
  csv::write_row(os, header);
  for (const auto& [eid, r] : table.rows) {
    csv::Row line{eid, r.model_id, r.clip_id};
    for (Dimension d : kAllDimensions) {
      if (r.scores.has(d)) {
        const auto& s = r.scores.at(d);
        line.push_back(csv::fixed(s.mean));
        line.push_back(csv::fixed(s.ci95));
        line.push_back(std::to_string(s.vote_count));
      } else {
        line.insert(line.end(), {"", "", "0"});
      }
    }
    double m = std::numeric_limits<double>::quiet_NaN();
    if (r.scores.has(Dimension::kSignal) && r.scores.has(Dimension::kOverall)) {
      m = ((r.scores.at(Dimension::kSignal).mean - 1.0) / 4.0 +
           (r.scores.at(Dimension::kOverall).mean - 1.0) / 4.0) /
          2.0;
    }
    line.push_back(csv::fixed(m));
    csv::write_row(os, line);
  }
  return os.str();
}

ScoreTable parse_score_table_csv(const std::string& text, Level level) {
  const csv::Document doc = csv::parse(text);
  const bool has_eid = doc.has_column("entity_id");
  const bool has_model = doc.has_column("model_id");
  const bool has_clip = doc.has_column("clip_id");
  if (!has_eid && !has_model) {
    throw ValidationError("score table needs an entity_id or model_id column");
  }

  // Map each header to a (dimension, field) pair.
  struct Col {
    std::size_t index;
    Dimension dim;
    enum { kMean, kCi, kN } field;
  };
  std::vector<Col> cols;
  for (std::size_t i = 0; i < doc.header.size(); ++i) {
    std::string h = doc.header[i];
    auto field = Col::kMean;
    auto strip = [&](const std::string& suffix) {
      if (h.size() > suffix.size() && h.compare(h.size() - suffix.size(), suffix.size(), suffix) == 0) {
        h.resize(h.size() - suffix.size());
        return true;
      }
      return false;
    };
    if (strip("_ci95")) {
      field = Col::kCi;
    } else if (strip("_n")) {
      field = Col::kN;
    } else {
      strip("_mean");
    }
    if (auto d = parse_dimension(h)) cols.push_back({i, *d, field});
  }
  if (cols.empty()) throw ValidationError("score table has no dimension columns");

  ScoreTable table;
  table.level = level;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& r = doc.rows[i];
    ScoreRow row;
    row.model_id = has_model ? r[doc.column("model_id")] : "";
    row.clip_id = has_clip ? r[doc.column("clip_id")] : "";
    if (has_eid) {
      row.entity_id = r[doc.column("entity_id")];
    } else if (level == Level::kClip) {
      if (!has_clip) throw ValidationError("clip-level score table needs clip_id");
      row.entity_id = clip_entity_id(row.model_id, row.clip_id);
    } else {
      row.entity_id = row.model_id;
    }
    if (row.model_id.empty()) row.model_id = level == Level::kModel ? row.entity_id : "";
    std::array<DimensionScore, kNumDimensions> scores{};
    std::array<bool, kNumDimensions> seen{};
    for (const Col& c : cols) {
      const std::string& cell = r[c.index];
      if (cell.empty()) continue;
      const std::size_t di = index_of(c.dim);
      switch (c.field) {
        case Col::kMean:
          scores[di].mean = csv::parse_double(cell);
          seen[di] = true;
          break;
        case Col::kCi:
          scores[di].ci95 = csv::parse_double(cell);
          break;
        case Col::kN:
          scores[di].vote_count = static_cast<std::size_t>(csv::parse_int(cell));
          break;
      }
    }
    for (Dimension d : kAllDimensions) {
      if (seen[index_of(d)]) row.scores.set(d, scores[index_of(d)]);
    }
    if (!table.rows.emplace(row.entity_id, row).second) {
      throw ValidationError("duplicate score row '" + row.entity_id + "'");
    }
  }
  return table;
}

ScoreTable read_score_table_csv(const std::string& path, Level level) {
  return parse_score_table_csv(slurp(path), level);
}

}  // namespace sigc::analytics
