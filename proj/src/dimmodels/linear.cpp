#include "sigc/dimmodels/linear.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "sigc/common/errors.hpp"

namespace sigc::dimmodels {

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != coefficients.size()) {
    throw ValidationError("predict: expected " + std::to_string(coefficients.size()) +
                          " features, got " + std::to_string(x.cols()));
  }
  return (x * coefficients).array() + intercept;
}

LinearModel ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw ValidationError("ols: X and y differ in length");
  if (x.rows() == 0) throw ValidationError("ols: no rows");
  const Eigen::Index n = x.rows(), p = x.cols();
  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = x;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  // Relative threshold against the largest pivot, tighter than Eigen's
  // default so nearly collinear designs are still reported.
  qr.setThreshold(1e-10);
  if (qr.rank() < p + 1) {
    throw SingularityError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                           " of " + std::to_string(p + 1) + ")");
  }
  const Eigen::VectorXd beta = qr.solve(y);

  LinearModel model;
  model.intercept = beta(0);
  model.coefficients = beta.tail(p);

  const Eigen::Index dof = n - p - 1;
  if (dof > 0) {
    const Eigen::VectorXd resid = y - design * beta;
    const double sigma2 = resid.squaredNorm() / static_cast<double>(dof);
    const Eigen::MatrixXd xtx = design.transpose() * design;
    const Eigen::MatrixXd inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
    model.standard_errors = (sigma2 * inv.diagonal().tail(p)).cwiseSqrt();
  }
  return model;
}

std::vector<std::vector<int>> monomial_exponents(int num_features, int degree) {
  if (num_features < 1) throw ValidationError("polynomial: need at least one feature");
  if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> current(static_cast<std::size_t>(num_features), 0);
  std::function<void(int, int)> fill = [&](int var, int remaining) {
    if (var == num_features - 1) {
      current[static_cast<std::size_t>(var)] = remaining;
      out.push_back(current);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[static_cast<std::size_t>(var)] = e;
      fill(var + 1, remaining - e);
    }
  };
  for (int d = 1; d <= degree; ++d) fill(0, d);
  return out;
}

Eigen::MatrixXd polynomial_features(const Eigen::MatrixXd& x,
                                    const std::vector<std::vector<int>>& exponents) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(exponents.size()));
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    const auto& e = exponents[k];
    if (static_cast<Eigen::Index>(e.size()) != x.cols()) {
      throw ValidationError("polynomial: exponent vector does not match feature count");
    }
    Eigen::VectorXd col = Eigen::VectorXd::Ones(x.rows());
    for (std::size_t j = 0; j < e.size(); ++j) {
      for (int r = 0; r < e[j]; ++r) col.array() *= x.col(static_cast<Eigen::Index>(j)).array();
    }
    out.col(static_cast<Eigen::Index>(k)) = col;
  }
  return out;
}

Eigen::VectorXd PolynomialModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != center.size()) throw ValidationError("predict: feature count mismatch");
  const Eigen::MatrixXd z = (x.rowwise() - center).array().rowwise() / scale.array();
  return linear.predict(polynomial_features(z, exponents));
}

PolynomialModel polynomial_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int degree) {
  if (x.rows() < 2) throw ValidationError("polynomial fit needs at least 2 rows");
  PolynomialModel model;
  model.degree = degree;
  model.center = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - model.center;
  model.scale = (centered.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
  for (Eigen::Index j = 0; j < model.scale.size(); ++j) {
    if (model.scale(j) == 0.0) {
      throw SingularityError("feature " + std::to_string(j) + " is constant");
    }
  }
  model.exponents = monomial_exponents(static_cast<int>(x.cols()), degree);
  const Eigen::MatrixXd z = centered.array().rowwise() / model.scale.array();
  model.linear = ols_fit(polynomial_features(z, model.exponents), y);
  return model;
}

}  // namespace sigc::dimmodels
