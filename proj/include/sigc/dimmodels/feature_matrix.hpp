#pragma once

#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sigc/analytics/score_table.hpp"

namespace sigc::dimmodels {

struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<Dimension> features;
  Dimension target = Dimension::kOverall;
  Eigen::MatrixXd x;  // rows x features
  Eigen::VectorXd y;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }

  // Throws ValidationError on shape mismatch, < 2 rows or non-finite values.
  void validate() const;
  FeatureMatrix subset(const std::vector<Eigen::Index>& rows) const;
};

// Predictors used for each target: the six sub-dimensions (Signal included)
// for Overall, the five listening dimensions for Signal.
std::vector<Dimension> default_predictors(Dimension target);

FeatureMatrix build_feature_matrix(const analytics::ScoreTable& table, Dimension target,
                                   const std::vector<Dimension>& predictors,
                                   const std::set<std::string>& exclude_models = {});

// Pearson correlation matrix of the columns of a data matrix.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data);

}  // namespace sigc::dimmodels
