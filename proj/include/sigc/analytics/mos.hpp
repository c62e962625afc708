#pragma once

#include <cstddef>
#include <span>

namespace sigc::analytics {

struct MosEstimate {
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  std::size_t count = 0;
};

// Arithmetic mean with a Student-t 95% confidence half-width on n - 1
// degrees of freedom (zero for a single vote). Votes must be in 1..5.
MosEstimate mos(std::span<const int> votes);

// Same estimator over real values (used for model-level rows built from
// clip means).
MosEstimate mean_ci95(std::span<const double> values);

// Two-sided 97.5% quantile of Student's t.
double t_critical_975(double degrees_of_freedom);

}  // namespace sigc::analytics
