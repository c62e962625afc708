#include "sigc/analytics/mos.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "sigc/common/errors.hpp"

namespace sigc::analytics {

double t_critical_975(double degrees_of_freedom) {
  boost::math::students_t dist(degrees_of_freedom);
  return boost::math::quantile(dist, 0.975);
}

MosEstimate mean_ci95(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot average an empty vote list");
  MosEstimate est;
  est.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return est;
  double ss = 0.0;
  for (double v : values) ss += (v - est.mean) * (v - est.mean);
  const double n = static_cast<double>(values.size());
  const double sd = std::sqrt(ss / (n - 1.0));
  est.ci95_halfwidth = t_critical_975(n - 1.0) * sd / std::sqrt(n);
  return est;
}

MosEstimate mos(std::span<const int> votes) {
  std::vector<double> values;
  values.reserve(votes.size());
  for (int v : votes) {
    if (v < 1 || v > 5) throw ValidationError("vote " + std::to_string(v) + " outside 1..5");
    values.push_back(v);
  }
  return mean_ci95(values);
}

}  // namespace sigc::analytics
