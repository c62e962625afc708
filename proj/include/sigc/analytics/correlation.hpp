#pragma once

#include <span>
#include <vector>

namespace sigc::analytics {

// Pearson correlation. Throws ValidationError on length mismatch, n < 2, or
// constant input.
double pcc(std::span<const double> x, std::span<const double> y);

// 1-based ranks; ties get the average of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> x);

// Spearman rank correlation (Pearson on fractional ranks).
double srcc(std::span<const double> x, std::span<const double> y);

// Kendall tau-b with tie correction, O(n log n) (Knight's merge-sort
// counting). Returns 0 when either input is entirely tied.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct ScoreWithCi {
  double mean = 0.0;
  double ci95 = 0.0;
};

struct TauB95Result {
  double tau = 0.0;
  // Corrected rank per input entry (1 = best group), parallel to the input.
  std::vector<double> corrected_ranks;
  // Group membership as input indices, best group first.
  std::vector<std::vector<std::size_t>> groups;
};

// Groups entries greedily from the top: the best unassigned entry leads a
// group and every lower-ranked unassigned entry whose 95% interval overlaps
// the leader's joins it with a tied rank. Returns Kendall tau-b between the
// corrected ranks and `reference_ranks` (1 = best).
TauB95Result tau_b95(std::span<const ScoreWithCi> scores, std::span<const double> reference_ranks);

// Rank vector (1 = highest mean) used as a reference ordering.
std::vector<double> descending_ranks(std::span<const double> values);

}  // namespace sigc::analytics
