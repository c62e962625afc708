#include "sigc/dimmodels/feature_matrix.hpp"

#include <cmath>

#include "sigc/common/errors.hpp"

namespace sigc::dimmodels {

void FeatureMatrix::validate() const {
  if (x.rows() != y.size() || static_cast<std::size_t>(x.rows()) != row_ids.size()) {
    throw ValidationError("feature matrix rows, targets and ids disagree in length");
  }
  if (static_cast<std::size_t>(x.cols()) != features.size()) {
    throw ValidationError("feature matrix columns and names disagree");
  }
  if (x.rows() < 2) throw ValidationError("feature matrix needs at least 2 rows");
  if (!x.allFinite() || !y.allFinite()) throw ValidationError("feature matrix has non-finite values");
}

FeatureMatrix FeatureMatrix::subset(const std::vector<Eigen::Index>& rows) const {
  FeatureMatrix out;
  out.features = features;
  out.target = target;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(r);
    out.y(static_cast<Eigen::Index>(i)) = y(r);
    out.row_ids.push_back(row_ids[static_cast<std::size_t>(r)]);
  }
  return out;
}

std::vector<Dimension> default_predictors(Dimension target) {
  using D = Dimension;
  switch (target) {
    case D::kOverall:
      return {D::kSignal, D::kNoisiness, D::kColoration, D::kDiscontinuity, D::kLoudness,
              D::kReverberation};
    case D::kSignal:
      return {D::kNoisiness, D::kColoration, D::kDiscontinuity, D::kLoudness, D::kReverberation};
    default:
      throw ValidationError("no default predictors for target '" + std::string(to_string(target)) +
                            "'");
  }
}

FeatureMatrix build_feature_matrix(const analytics::ScoreTable& table, Dimension target,
                                   const std::vector<Dimension>& predictors,
                                   const std::set<std::string>& exclude_models) {
  if (predictors.empty()) throw ValidationError("no predictors given");
  for (Dimension p : predictors) {
    if (p == target) throw ValidationError("target dimension listed as a predictor");
  }
  FeatureMatrix fm;
  fm.features = predictors;
  fm.target = target;
  std::vector<const analytics::ScoreRow*> rows;
  for (const auto& [id, row] : table.rows) {
    if (exclude_models.count(row.model_id)) continue;
    rows.push_back(&row);
  }
  fm.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(predictors.size()));
  fm.y.resize(static_cast<Eigen::Index>(rows.size()));
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = *rows[i];
    fm.row_ids.push_back(r.entity_id);
    const auto ri = static_cast<Eigen::Index>(i);
    if (!r.scores.has(target)) {
      missing.push_back(r.entity_id + ": " + std::string(to_string(target)));
      continue;
    }
    fm.y(ri) = r.scores.at(target).mean;
    for (std::size_t j = 0; j < predictors.size(); ++j) {
      if (!r.scores.has(predictors[j])) {
        missing.push_back(r.entity_id + ": " + std::string(to_string(predictors[j])));
        continue;
      }
      fm.x(ri, static_cast<Eigen::Index>(j)) = r.scores.at(predictors[j]).mean;
    }
  }
  if (!missing.empty()) throw ValidationError("feature matrix has missing values", missing);
  fm.validate();
  return fm;
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data) {
  if (data.rows() < 2) throw ValidationError("correlation matrix needs at least 2 rows");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered;
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < sd.size(); ++i) {
    if (sd(i) == 0.0) {
      throw ValidationError("column " + std::to_string(i) + " is constant; correlation undefined");
    }
  }
  Eigen::MatrixXd r = cov.array() / (sd * sd.transpose()).array();
  r.diagonal().setOnes();
  return r;
}

}  // namespace sigc::dimmodels
