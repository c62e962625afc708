#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sigc::dimmodels {

struct LinearModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  // Classical standard errors of the coefficients; empty when there are no
  // residual degrees of freedom.
  Eigen::VectorXd standard_errors;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

// Least squares with an intercept. Throws SingularityError when [1 X] is
// rank deficient.
LinearModel ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Exponent vectors of every monomial with total degree 1..degree over p
// variables, ordered by degree, then lexicographically (highest exponent of
// the first variable first).
std::vector<std::vector<int>> monomial_exponents(int num_features, int degree);

Eigen::MatrixXd polynomial_features(const Eigen::MatrixXd& x,
                                    const std::vector<std::vector<int>>& exponents);

struct PolynomialModel {
  int degree = 1;
  // Inputs are centred and scaled before expansion to keep the design well
  // conditioned; the fitted function is the same polynomial either way.
  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;
  std::vector<std::vector<int>> exponents;
  LinearModel linear;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

// OLS on all monomials up to total degree `degree` (default 4). Throws
// SingularityError when the expansion is rank deficient.
PolynomialModel polynomial_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int degree = 4);

}  // namespace sigc::dimmodels
