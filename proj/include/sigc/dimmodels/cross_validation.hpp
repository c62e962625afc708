#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sigc/dimmodels/forest.hpp"

namespace sigc::dimmodels {

// Trains on (x_train, y_train) and predicts x_test. `fold` lets stochastic
// regressors derive a per-fold seed.
using FitPredict = std::function<Eigen::VectorXd(const Eigen::MatrixXd& x_train,
                                                 const Eigen::VectorXd& y_train,
                                                 const Eigen::MatrixXd& x_test, int fold)>;

struct FoldMetrics {
  std::size_t test_rows = 0;
  double pcc = 0.0;   // NaN when undefined (fewer than 2 rows or constant side)
  double rmse = 0.0;
  double r2 = 0.0;    // NaN when the fold's target is constant
};

struct CVReport {
  std::vector<FoldMetrics> folds;
  std::vector<std::vector<Eigen::Index>> assignment;  // test rows per fold
  // Means over the folds where each metric is defined.
  double mean_pcc = 0.0;
  double mean_rmse = 0.0;
  double mean_r2 = 0.0;
  // Metrics over all out-of-fold predictions pooled together.
  double pooled_pcc = 0.0;
  double pooled_rmse = 0.0;
  double pooled_r2 = 0.0;
  Eigen::VectorXd out_of_fold;
};

// Seeded shuffle then k near-equal folds (sizes differ by at most one).
std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index rows, int k, std::uint64_t seed);

CVReport kfold_cv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitPredict& regressor,
                  int k, std::uint64_t seed);

FitPredict ols_regressor();
FitPredict polynomial_regressor(int degree = 4);
FitPredict forest_regressor(ForestParams params);

FoldMetrics score_predictions(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

}  // namespace sigc::dimmodels
