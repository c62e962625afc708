#include "sigc/dimmodels/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"

namespace sigc::dimmodels {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_count = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int min_leaf, int mtry, Rng& rng,
              Eigen::VectorXd& importance)
      : x_(x), y_(y), min_leaf_(static_cast<std::size_t>(min_leaf)), mtry_(mtry), rng_(rng),
        importance_(importance) {}

  RegressionTree build(std::vector<Eigen::Index> sample) {
    tree_.nodes.clear();
    grow(sample);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<Eigen::Index>& idx) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double sum = 0.0;
    for (auto i : idx) sum += y_(i);
    tree_.nodes[static_cast<std::size_t>(id)].value = sum / static_cast<double>(idx.size());

    if (idx.size() < 2 * min_leaf_) return id;
    const Split best = find_split(idx);
    if (best.feature < 0) return id;

    importance_(best.feature) += best.gain;
    std::vector<Eigen::Index> left, right;
    for (auto i : idx) (x_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    const int l = grow(left);
    const int r = grow(right);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  // Samples mtry candidate features; if none of them admits a valid split the
  // search continues through the remaining features in the same random order.
  Split find_split(const std::vector<Eigen::Index>& idx) {
    std::vector<int> features(static_cast<std::size_t>(x_.cols()));
    std::iota(features.begin(), features.end(), 0);
    rng_.shuffle(features);

    const std::size_t n = idx.size();
    double total = 0.0, total_sq = 0.0;
    for (auto i : idx) {
      total += y_(i);
      total_sq += y_(i) * y_(i);
    }
    const double parent_sse = total_sq - total * total / static_cast<double>(n);
    Split best;
    if (parent_sse <= 1e-12) return best;

    std::vector<Eigen::Index> order(idx);
    for (std::size_t k = 0; k < features.size(); ++k) {
      if (k >= static_cast<std::size_t>(mtry_) && best.feature >= 0) break;
      const int f = features[k];
      std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return x_(a, f) < x_(b, f);
      });
      double ls = 0.0, lsq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double v = y_(order[i]);
        ls += v;
        lsq += v * v;
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < min_leaf_) continue;
        if (nr < min_leaf_) break;
        const double xa = x_(order[i], f), xb = x_(order[i + 1], f);
        if (!(xa < xb)) continue;
        const double rs = total - ls, rsq = total_sq - lsq;
        const double sse = (lsq - ls * ls / static_cast<double>(nl)) +
                           (rsq - rs * rs / static_cast<double>(nr));
        const double gain = parent_sse - sse;
        if (gain > best.gain + 1e-12) {
          best.feature = f;
          best.gain = gain;
          best.threshold = 0.5 * (xa + xb);
          best.left_count = nl;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  std::size_t min_leaf_;
  int mtry_;
  Rng& rng_;
  Eigen::VectorXd& importance_;
  RegressionTree tree_;
};

}  // namespace

double RegressionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    const auto& n = nodes[at];
    at = static_cast<std::size_t>(row(n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes[at].value;
}

Eigen::VectorXd RandomForest::predict(const Eigen::MatrixXd& x) const {
  if (trees.empty()) throw ValidationError("forest has no trees");
  if (x.cols() != importances.size()) throw ValidationError("predict: feature count mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict_row(x.row(r));
    out(r) = s / static_cast<double>(trees.size());
  }
  return out;
}

RandomForest random_forest_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               const ForestParams& params) {
  if (x.rows() != y.size()) throw ValidationError("forest: X and y differ in length");
  if (x.cols() < 1) throw ValidationError("forest: no features");
  if (params.trees < 1 || params.min_leaf < 1) {
    throw ValidationError("forest: trees and min_leaf must be >= 1");
  }
  if (x.rows() < 2 * params.min_leaf) {
    throw PreconditionError("forest needs at least " + std::to_string(2 * params.min_leaf) +
                            " rows, got " + std::to_string(x.rows()));
  }
  const int p = static_cast<int>(x.cols());
  const int mtry = params.features_per_split > 0 ? std::min(params.features_per_split, p)
                                                 : (p + 2) / 3;

  RandomForest forest;
  forest.importances = Eigen::VectorXd::Zero(p);
  for (int t = 0; t < params.trees; ++t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<Eigen::Index> sample(static_cast<std::size_t>(x.rows()));
    for (auto& s : sample) s = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(x.rows())));
    TreeBuilder builder(x, y, params.min_leaf, mtry, rng, forest.importances);
    forest.trees.push_back(builder.build(std::move(sample)));
  }
  const double total = forest.importances.sum();
  if (total > 0.0) forest.importances /= total;
  return forest;
}

}  // namespace sigc::dimmodels
