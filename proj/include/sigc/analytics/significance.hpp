#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace sigc::analytics {

struct PairedTTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
  double mean_difference = 0.0;
};

// Two-sided paired t-test on a - b. Identical vectors give t = 0, p = 1.
PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

struct OmnibusTest {
  double f = 0.0;
  double df_between = 0.0;
  double df_error = 0.0;
  double p = 1.0;
};

// One-way repeated-measures ANOVA: rows are subjects (clips), columns are
// treatments (models). values[model][clip].
OmnibusTest repeated_measures_anova(const std::vector<std::vector<double>>& values);

struct PairwiseSignificance {
  std::vector<std::string> models;            // sorted ids
  std::vector<std::vector<double>> p;         // symmetric, diagonal 1
  std::vector<std::vector<double>> t;         // t(i, j) for model i - model j
  OmnibusTest omnibus;
  bool holm_adjusted = false;
};

// Per-model per-clip metric: model id -> clip id -> value. Every model must
// carry exactly the same clip ids (paired design) or PairingError is thrown.
using PerClipValues = std::map<std::string, std::map<std::string, double>>;

PairwiseSignificance pairwise_significance(const PerClipValues& values, bool holm = false);

// Holm step-down adjustment; result parallel to input.
std::vector<double> holm_adjust(std::span<const double> p_values);

}  // namespace sigc::analytics
