#include "sigc/dimmodels/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"
#include "sigc/dimmodels/linear.hpp"

namespace sigc::dimmodels {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double nan_mean(const std::vector<double>& v) {
  double s = 0.0;
  int n = 0;
  for (double x : v) {
    if (std::isnan(x)) continue;
    s += x;
    ++n;
  }
  return n == 0 ? kNaN : s / n;
}

}  // namespace

FoldMetrics score_predictions(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  if (truth.size() != predicted.size()) throw ValidationError("prediction length mismatch");
  FoldMetrics m;
  m.test_rows = static_cast<std::size_t>(truth.size());
  if (truth.size() == 0) throw ValidationError("cannot score an empty fold");
  const double sse = (truth - predicted).squaredNorm();
  m.rmse = std::sqrt(sse / static_cast<double>(truth.size()));
  const double sst = (truth.array() - truth.mean()).square().sum();
  m.r2 = sst > 0.0 ? 1.0 - sse / sst : kNaN;
  m.pcc = kNaN;
  if (truth.size() >= 2) {
    const Eigen::ArrayXd a = truth.array() - truth.mean();
    const Eigen::ArrayXd b = predicted.array() - predicted.mean();
    const double den = std::sqrt(a.square().sum() * b.square().sum());
    if (den > 0.0) m.pcc = std::clamp((a * b).sum() / den, -1.0, 1.0);
  }
  return m;
}

std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index rows, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold needs k >= 2");
  if (rows < k) {
    throw ValidationError("k-fold needs at least k rows (" + std::to_string(rows) + " < " +
                          std::to_string(k) + ")");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "kfold"));
  rng.shuffle(order);
  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < order.size(); ++i) folds[i % folds.size()].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

CVReport kfold_cv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitPredict& regressor,
                  int k, std::uint64_t seed) {
  if (x.rows() != y.size()) throw ValidationError("k-fold: X and y differ in length");
  CVReport report;
  report.assignment = make_folds(x.rows(), k, seed);
  report.out_of_fold = Eigen::VectorXd::Zero(y.size());

  std::vector<bool> in_test(static_cast<std::size_t>(x.rows()));
  std::vector<double> pccs, rmses, r2s;
  for (std::size_t f = 0; f < report.assignment.size(); ++f) {
    const auto& test = report.assignment[f];
    std::fill(in_test.begin(), in_test.end(), false);
    for (auto r : test) in_test[static_cast<std::size_t>(r)] = true;

    const Eigen::Index n_test = static_cast<Eigen::Index>(test.size());
    Eigen::MatrixXd xtr(x.rows() - n_test, x.cols()), xte(n_test, x.cols());
    Eigen::VectorXd ytr(x.rows() - n_test), yte(n_test);
    Eigen::Index a = 0, b = 0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (in_test[static_cast<std::size_t>(r)]) {
        xte.row(b) = x.row(r);
        yte(b++) = y(r);
      } else {
        xtr.row(a) = x.row(r);
        ytr(a++) = y(r);
      }
    }
    const Eigen::VectorXd pred = regressor(xtr, ytr, xte, static_cast<int>(f));
    if (pred.size() != n_test) throw Error("regressor returned the wrong number of predictions");
    for (Eigen::Index i = 0; i < n_test; ++i) report.out_of_fold(test[static_cast<std::size_t>(i)]) = pred(i);

    FoldMetrics m = score_predictions(yte, pred);
    pccs.push_back(m.pcc);
    rmses.push_back(m.rmse);
    r2s.push_back(m.r2);
    report.folds.push_back(m);
  }
  report.mean_pcc = nan_mean(pccs);
  report.mean_rmse = nan_mean(rmses);
  report.mean_r2 = nan_mean(r2s);
  const FoldMetrics pooled = score_predictions(y, report.out_of_fold);
  report.pooled_pcc = pooled.pcc;
  report.pooled_rmse = pooled.rmse;
  report.pooled_r2 = pooled.r2;
  return report;
}

FitPredict ols_regressor() {
  return [](const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr, const Eigen::MatrixXd& xte,
            int) { return ols_fit(xtr, ytr).predict(xte); };
}

FitPredict polynomial_regressor(int degree) {
  return [degree](const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr,
                  const Eigen::MatrixXd& xte, int) {
    return polynomial_fit(xtr, ytr, degree).predict(xte);
  };
}

FitPredict forest_regressor(ForestParams params) {
  return [params](const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr,
                  const Eigen::MatrixXd& xte, int fold) {
    ForestParams p = params;
    p.seed = derive_seed(params.seed, static_cast<std::uint64_t>(fold));
    return random_forest_fit(xtr, ytr, p).predict(xte);
  };
}

}  // namespace sigc::dimmodels
