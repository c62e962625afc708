#include "sigc/dimmodels/factor_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "sigc/common/errors.hpp"

namespace sigc::dimmodels {

namespace {

void require_square_symmetric(const Eigen::MatrixXd& r, const char* what) {
  if (r.rows() != r.cols() || r.rows() < 2) {
    throw ValidationError(std::string(what) + ": need a square matrix of size >= 2");
  }
  if (!r.allFinite()) throw ValidationError(std::string(what) + ": non-finite entries");
  const double asym = (r - r.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9) throw ValidationError(std::string(what) + ": matrix is not symmetric");
}

Eigen::LLT<Eigen::MatrixXd> require_pd(const Eigen::MatrixXd& r, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) {
    throw SingularityError(std::string(what) + ": matrix is not positive definite");
  }
  // LLT succeeds on matrices that are numerically singular; check the pivots.
  const Eigen::VectorXd d = llt.matrixL().toDenseMatrix().diagonal();
  if (d.minCoeff() <= 1e-7 * d.maxCoeff()) {
    throw SingularityError(std::string(what) + ": matrix is numerically singular");
  }
  return llt;
}

// Leading eigenpairs of the rescaled matrix, descending.
struct ScaledEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // matching columns
};

ScaledEigen scaled_eigen(const Eigen::MatrixXd& r, const Eigen::VectorXd& psi) {
  const Eigen::VectorXd sc = psi.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd s = sc.asDiagonal() * r * sc.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw Error("eigen decomposition failed");
  ScaledEigen out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

Eigen::MatrixXd loadings_for(const ScaledEigen& e, const Eigen::VectorXd& psi, int k) {
  Eigen::VectorXd scale(k);
  for (int j = 0; j < k; ++j) scale(j) = std::sqrt(std::max(e.values(j) - 1.0, 0.0));
  Eigen::MatrixXd l = e.vectors.leftCols(k) * scale.asDiagonal();
  return psi.cwiseSqrt().asDiagonal() * l;
}

double objective(const ScaledEigen& e, int k) {
  double f = 0.0;
  for (Eigen::Index j = k; j < e.values.size(); ++j) {
    f += e.values(j) - std::log(e.values(j)) - 1.0;
  }
  return f;
}

struct Eval {
  double f = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd loadings;
};

Eval evaluate(const Eigen::MatrixXd& r, const Eigen::VectorXd& psi, int k) {
  const ScaledEigen e = scaled_eigen(r, psi);
  Eval out;
  out.f = objective(e, k);
  out.loadings = loadings_for(e, psi, k);
  const Eigen::MatrixXd resid =
      out.loadings * out.loadings.transpose() + Eigen::MatrixXd(psi.asDiagonal()) - r;
  out.grad = resid.diagonal().array() / psi.array().square();
  return out;
}

double reconstruction(const Eigen::MatrixXd& r, const Eigen::MatrixXd& l, const Eigen::VectorXd& u) {
  return (r - (l * l.transpose() + Eigen::MatrixXd(u.asDiagonal()))).cwiseAbs().maxCoeff();
}

// Flips columns so each sums to a non-negative value.
void sign_columns(Eigen::MatrixXd& l, Eigen::MatrixXd* companion = nullptr) {
  for (Eigen::Index j = 0; j < l.cols(); ++j) {
    if (l.col(j).sum() < 0.0) {
      l.col(j) *= -1.0;
      if (companion) companion->col(j) *= -1.0;
    }
  }
}

}  // namespace

KmoResult kmo(const Eigen::MatrixXd& r) {
  require_square_symmetric(r, "KMO");
  const auto llt = require_pd(r, "KMO");
  const Eigen::Index v = r.rows();
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(v, v));

  KmoResult out;
  out.per_variable.resize(v);
  double sum_r2 = 0.0, sum_p2 = 0.0;
  for (Eigen::Index i = 0; i < v; ++i) {
    double ri = 0.0, pi = 0.0;
    for (Eigen::Index j = 0; j < v; ++j) {
      if (i == j) continue;
      const double partial = -inv(i, j) / std::sqrt(inv(i, i) * inv(j, j));
      ri += r(i, j) * r(i, j);
      pi += partial * partial;
    }
    out.per_variable(i) = ri / (ri + pi);
    sum_r2 += ri;
    sum_p2 += pi;
  }
  out.overall = sum_r2 / (sum_r2 + sum_p2);
  return out;
}

BartlettResult bartlett_sphericity(const Eigen::MatrixXd& r, long n) {
  require_square_symmetric(r, "Bartlett");
  const long v = static_cast<long>(r.rows());
  if (n <= v) {
    throw PreconditionError("Bartlett's test needs more observations than variables (n=" +
                            std::to_string(n) + ", v=" + std::to_string(v) + ")");
  }
  const auto llt = require_pd(r, "Bartlett");
  const Eigen::MatrixXd l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  BartlettResult out;
  out.df = static_cast<double>(v * (v - 1)) / 2.0;
  out.chi2 = -(static_cast<double>(n) - 1.0 - (2.0 * static_cast<double>(v) + 5.0) / 6.0) * log_det;
  if (std::abs(out.chi2) < 1e-12) out.chi2 = 0.0;
  boost::math::chi_squared dist(out.df);
  out.p = boost::math::cdf(boost::math::complement(dist, std::max(out.chi2, 0.0)));
  return out;
}

Eigen::VectorXd scree_eigenvalues(const Eigen::MatrixXd& r) {
  require_square_symmetric(r, "scree");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("eigen decomposition failed");
  return es.eigenvalues().reverse();
}

double FactorSolution::reconstruction_error(const Eigen::MatrixXd& r) const {
  return reconstruction(r, loadings, uniquenesses);
}

FactorSolution efa_ml(const Eigen::MatrixXd& r, int n_factors, const EfaOptions& options) {
  require_square_symmetric(r, "EFA");
  const auto llt = require_pd(r, "EFA");
  const Eigen::Index v = r.rows();
  if (n_factors < 1 || n_factors >= v) {
    throw ValidationError("EFA: factor count must be in [1, " + std::to_string(v - 1) + "]");
  }
  const double lb = options.lower_bound, ub = 1.0;
  auto project = [&](Eigen::VectorXd x) { return x.cwiseMax(lb).cwiseMin(ub); };

  // Start from 1 - SMC = 1 / diag(R^-1). For R = I this is already the
  // optimum with zero loadings, which avoids drifting into one of the
  // equivalent single-variable factors.
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(v, v));
  Eigen::VectorXd psi = project(inv.diagonal().cwiseInverse());

  FactorSolution sol;
  Eval cur = evaluate(r, psi, n_factors);
  sol.history.push_back({cur.f, reconstruction(r, cur.loadings, psi)});

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(v, v);
  bool fresh_h = true;
  auto active = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    std::vector<bool> a(static_cast<std::size_t>(v));
    for (Eigen::Index i = 0; i < v; ++i) {
      a[static_cast<std::size_t>(i)] = (x(i) <= lb + 1e-12 && g(i) > 0.0) || (x(i) >= ub - 1e-12 && g(i) < 0.0);
    }
    return a;
  };

  for (int it = 0; it < options.max_iter; ++it) {
    const auto act = active(psi, cur.grad);
    Eigen::VectorXd pg = cur.grad;
    for (Eigen::Index i = 0; i < v; ++i) {
      if (act[static_cast<std::size_t>(i)]) pg(i) = 0.0;
    }
    if (pg.cwiseAbs().maxCoeff() < options.tol) {
      sol.converged = true;
      break;
    }
    Eigen::MatrixXd hf = h;
    for (Eigen::Index i = 0; i < v; ++i) {
      if (!act[static_cast<std::size_t>(i)]) continue;
      hf.row(i).setZero();
      hf.col(i).setZero();
    }
    Eigen::VectorXd d = -hf * pg;
    if (pg.dot(d) >= 0.0) {
      h.setIdentity();
      fresh_h = true;
      d = -pg;
    }

    double t = 1.0;
    Eigen::VectorXd next;
    Eval trial;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next = project(psi + t * d);
      trial = evaluate(r, next, n_factors);
      if (trial.f <= cur.f + 1e-4 * cur.grad.dot(next - psi)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!fresh_h) {
        h.setIdentity();
        fresh_h = true;
        continue;
      }
      // No descent possible at machine precision.
      sol.converged = pg.cwiseAbs().maxCoeff() < std::sqrt(options.tol);
      break;
    }

    const Eigen::VectorXd s = next - psi;
    const Eigen::VectorXd y = trial.grad - cur.grad;
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      if (fresh_h) h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(v, v);
      h = (id - rho * s * y.transpose()) * h * (id - rho * y * s.transpose()) + rho * s * s.transpose();
      fresh_h = false;
    }
    psi = next;
    cur = std::move(trial);
    sol.iterations = it + 1;
    sol.history.push_back({cur.f, reconstruction(r, cur.loadings, psi)});
    if (s.cwiseAbs().maxCoeff() < 1e-14) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) {
    sol.warnings.push_back("maximum-likelihood extraction did not converge in " +
                           std::to_string(options.max_iter) + " iterations");
  }

  sol.uniquenesses = psi;
  sol.loadings = cur.loadings;
  sign_columns(sol.loadings);
  for (Eigen::Index i = 0; i < v; ++i) {
    if (psi(i) <= lb + 1e-9) {
      sol.heywood.push_back(static_cast<int>(i));
      sol.warnings.push_back("variable " + std::to_string(i) +
                             ": uniqueness clamped at lower bound (Heywood case)");
    }
  }
  sol.communalities = sol.loadings.rowwise().squaredNorm();
  sol.variance_explained = sol.loadings.colwise().squaredNorm().transpose() / static_cast<double>(v);
  sol.total_variance_explained = sol.communalities.sum() / static_cast<double>(v);
  return sol;
}

double varimax_criterion(const Eigen::MatrixXd& l) {
  const double p = static_cast<double>(l.rows());
  double total = 0.0;
  for (Eigen::Index j = 0; j < l.cols(); ++j) {
    const Eigen::ArrayXd sq = l.col(j).array().square();
    total += sq.square().sum() / p - std::pow(sq.sum() / p, 2);
  }
  return total;
}

VarimaxResult varimax(const Eigen::MatrixXd& loadings, double tol, int max_sweeps) {
  const Eigen::Index p = loadings.rows(), k = loadings.cols();
  if (k < 2) throw ValidationError("varimax needs at least 2 factors");
  if (p < 2) throw ValidationError("varimax needs at least 2 variables");

  Eigen::VectorXd h = loadings.rowwise().norm();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (h(i) == 0.0) h(i) = 1.0;
  }
  Eigen::MatrixXd x = h.cwiseInverse().asDiagonal() * loadings;
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(k, k);

  VarimaxResult out;
  out.criterion.push_back(varimax_criterion(x));
  const double n = static_cast<double>(p);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index a = 0; a < k - 1; ++a) {
      for (Eigen::Index b = a + 1; b < k; ++b) {
        const Eigen::ArrayXd xa = x.col(a).array(), xb = x.col(b).array();
        const Eigen::ArrayXd u = xa.square() - xb.square();
        const Eigen::ArrayXd w = 2.0 * xa * xb;
        const double A = u.sum(), B = w.sum();
        const double C = (u.square() - w.square()).sum();
        const double D = 2.0 * (u * w).sum();
        const double num = D - 2.0 * A * B / n;
        const double den = C - (A * A - B * B) / n;
        if (std::abs(num) < 1e-15 && den >= 0.0) continue;
        const double phi = 0.25 * std::atan2(num, den);
        const double c = std::cos(phi), s = std::sin(phi);
        const Eigen::VectorXd na = c * x.col(a) + s * x.col(b);
        const Eigen::VectorXd nb = -s * x.col(a) + c * x.col(b);
        x.col(a) = na;
        x.col(b) = nb;
        const Eigen::VectorXd ra = c * rot.col(a) + s * rot.col(b);
        const Eigen::VectorXd rb = -s * rot.col(a) + c * rot.col(b);
        rot.col(a) = ra;
        rot.col(b) = rb;
      }
    }
    out.sweeps = sweep + 1;
    const double v = varimax_criterion(x);
    const double gain = v - out.criterion.back();
    out.criterion.push_back(v);
    if (gain < tol) break;
  }

  Eigen::MatrixXd rotated = loadings * rot;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd ss = rotated.colwise().squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ss(a) > ss(b); });
  out.loadings.resize(p, k);
  out.rotation.resize(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    out.loadings.col(j) = rotated.col(order[static_cast<std::size_t>(j)]);
    out.rotation.col(j) = rot.col(order[static_cast<std::size_t>(j)]);
  }
  sign_columns(out.loadings, &out.rotation);
  return out;
}

FactorSolution rotate(const FactorSolution& solution, const VarimaxResult& rotation) {
  FactorSolution out = solution;
  out.loadings = rotation.loadings;
  const double v = static_cast<double>(out.loadings.rows());
  out.communalities = out.loadings.rowwise().squaredNorm();
  out.variance_explained = out.loadings.colwise().squaredNorm().transpose() / v;
  out.total_variance_explained = out.communalities.sum() / v;
  return out;
}

LoadingReport loading_report(const FactorSolution& solution,
                             const std::vector<std::string>& variables, double threshold) {
  if (static_cast<Eigen::Index>(variables.size()) != solution.loadings.rows()) {
    throw ValidationError("loading report: variable names do not match loadings");
  }
  LoadingReport rep;
  rep.variables = variables;
  rep.threshold = threshold;
  rep.variance_explained = solution.variance_explained;
  rep.total_variance_explained = solution.total_variance_explained;
  for (Eigen::Index i = 0; i < solution.loadings.rows(); ++i) {
    std::vector<std::optional<double>> row;
    for (Eigen::Index j = 0; j < solution.loadings.cols(); ++j) {
      const double l = solution.loadings(i, j);
      row.push_back(std::abs(l) > threshold ? std::optional<double>(l) : std::nullopt);
    }
    rep.cells.push_back(std::move(row));
  }
  return rep;
}

}  // namespace sigc::dimmodels
