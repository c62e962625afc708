#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sigc::dimmodels {

struct ForestParams {
  int trees = 100;
  int min_leaf = 5;
  int features_per_split = 0;  // 0 selects ceil(p / 3)
  std::uint64_t seed = 2023;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

struct RandomForest {
  std::vector<RegressionTree> trees;
  // Total variance reduction per feature, normalized to sum to 1; all zero
  // when no tree ever split (e.g. constant target).
  Eigen::VectorXd importances;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

// Bagged CART regression trees with variance-reduction splits. Throws
// PreconditionError when rows < 2 * min_leaf.
RandomForest random_forest_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const ForestParams& params = {});

}  // namespace sigc::dimmodels
