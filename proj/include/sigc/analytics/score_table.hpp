#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigc/common/dimension.hpp"

namespace sigc::analytics {

// One row of the accepted-votes CSV:
// participant_id, clip_id, model_id, dimension, vote.
// clip_id names the source clip, shared across models.
struct RatingVote {
  std::string participant_id;
  std::string clip_id;
  std::string model_id;
  Dimension dimension = Dimension::kOverall;
  int vote = 0;
};

std::vector<RatingVote> parse_votes_csv(const std::string& text);
std::vector<RatingVote> read_votes_csv(const std::string& path);
std::string votes_csv(const std::vector<RatingVote>& votes);

struct DimensionScore {
  double mean = 0.0;
  double ci95 = 0.0;
  std::size_t vote_count = 0;
};

// Scores per dimension; a dimension nobody rated is absent.
struct DimensionScores {
  std::array<std::optional<DimensionScore>, kNumDimensions> by_dim;

  bool has(Dimension d) const { return by_dim[index_of(d)].has_value(); }
  // Throws ValidationError if the dimension is absent.
  const DimensionScore& at(Dimension d) const;
  void set(Dimension d, DimensionScore s) { by_dim[index_of(d)] = s; }
};

enum class Level { kClip, kModel };

std::string to_string(Level level);
Level level_from_string(const std::string& s);

struct ScoreRow {
  std::string entity_id;  // "model/clip" at clip level, model id at model level
  std::string model_id;
  std::string clip_id;    // empty at model level
  DimensionScores scores;
};

struct ScoreTable {
  Level level = Level::kClip;
  std::map<std::string, ScoreRow> rows;  // keyed by entity_id
  std::optional<std::string> baseline_model;

  const ScoreRow& row(const std::string& entity_id) const;
  std::vector<std::string> model_ids() const;
};

std::string clip_entity_id(const std::string& model_id, const std::string& clip_id);

// Clip-level MOS per (model, clip) and dimension.
ScoreTable build_clip_table(const std::vector<RatingVote>& votes,
                            std::optional<std::string> baseline_model = std::nullopt);

// Model-level rows: unweighted mean of the model's clip means, with a
// Student-t interval over those clip means. vote_count is the total votes.
ScoreTable build_model_table(const ScoreTable& clip_table);

// Columns: entity_id, model_id, clip_id, then <dim>_mean, <dim>_ci95, <dim>_n
// for each dimension, then m (challenge metric; "nan" when SIG or OVRL is
// missing). Rows in entity-id order.
std::string score_table_csv(const ScoreTable& table);

// Reads a table produced above or an externally produced objective-score
// table. Needs an entity_id (or model_id / clip_id) column and one column per
// dimension named <dim>_mean or just <dim>; aliases sig / bak / ovrl are
// accepted. Missing ci95 columns read as 0.
ScoreTable parse_score_table_csv(const std::string& text, Level level);
ScoreTable read_score_table_csv(const std::string& path, Level level);

}  // namespace sigc::analytics
