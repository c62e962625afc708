#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sigc::dimmodels {

struct KmoResult {
  double overall = 0.0;
  Eigen::VectorXd per_variable;  // measure of sampling adequacy per variable
};

// Kaiser-Meyer-Olkin statistic with partial correlations from the
// anti-image (inverse) of R. Throws SingularityError if R is not positive
// definite.
KmoResult kmo(const Eigen::MatrixXd& r);

struct BartlettResult {
  double chi2 = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Throws PreconditionError unless n > number of variables.
BartlettResult bartlett_sphericity(const Eigen::MatrixXd& r, long n);

// Eigenvalues of the symmetric matrix R in descending order.
Eigen::VectorXd scree_eigenvalues(const Eigen::MatrixXd& r);

struct EfaOptions {
  int max_iter = 500;
  double tol = 1e-8;
  double lower_bound = 0.005;
};

struct EfaIteration {
  double objective = 0.0;
  double reconstruction_error = 0.0;  // max |R - (LL' + diag(u))|
};

struct FactorSolution {
  Eigen::MatrixXd loadings;       // variables x factors
  Eigen::VectorXd uniquenesses;
  Eigen::VectorXd communalities;  // row sums of squared loadings
  Eigen::VectorXd variance_explained;  // per factor, fraction of total variance
  double total_variance_explained = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<int> heywood;  // variables clamped at the lower bound
  std::vector<std::string> warnings;
  std::vector<EfaIteration> history;

  double reconstruction_error(const Eigen::MatrixXd& r) const;
};

// Maximum-likelihood factor extraction. Minimizes the discrepancy
//   F(psi) = sum_{j > k} (e_j - ln e_j - 1)
// over uniquenesses psi, where e are the eigenvalues of
// Psi^-1/2 R Psi^-1/2, by projected BFGS within [lower_bound, 1]. Loadings
// come from the leading k eigenvectors. Unrotated; each column's sign makes
// its sum non-negative.
FactorSolution efa_ml(const Eigen::MatrixXd& r, int n_factors, const EfaOptions& options = {});

struct VarimaxResult {
  Eigen::MatrixXd loadings;
  Eigen::MatrixXd rotation;  // loadings = input * rotation
  std::vector<double> criterion;  // per sweep, on Kaiser-normalized loadings
  int sweeps = 0;
};

// Kaiser's varimax by pairwise plane rotations with Kaiser row
// normalization. Columns of the result are ordered by sum of squared
// loadings and signed so each column sum is non-negative.
VarimaxResult varimax(const Eigen::MatrixXd& loadings, double tol = 1e-10, int max_sweeps = 1000);

// The raw varimax criterion: sum over factors of the variance of squared
// loadings.
double varimax_criterion(const Eigen::MatrixXd& loadings);

// Applies a rotation to a solution, recomputing per-factor variance.
FactorSolution rotate(const FactorSolution& solution, const VarimaxResult& rotation);

struct LoadingReport {
  std::vector<std::string> variables;
  std::vector<std::vector<std::optional<double>>> cells;  // blank when |loading| <= threshold
  Eigen::VectorXd variance_explained;
  double total_variance_explained = 0.0;
  double threshold = 0.3;
};

LoadingReport loading_report(const FactorSolution& solution,
                             const std::vector<std::string>& variables, double threshold = 0.3);

}  // namespace sigc::dimmodels
