#include "sigc/analytics/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "sigc/common/errors.hpp"

namespace sigc::analytics {

namespace {

void require_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("correlation inputs differ in length (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw ValidationError("correlation needs at least 2 observations");
}

// Number of tied pairs, sum over runs of t * (t - 1) / 2, in a sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    It run_end = std::next(first);
    while (run_end != last && eq(*first, *run_end)) ++run_end;
    const std::int64_t t = std::distance(first, run_end);
    total += t * (t - 1) / 2;
    first = run_end;
  }
  return total;
}

// Sorts v ascending, returning the number of inversions (swaps).
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

}  // namespace

double pcc(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ValidationError("pearson correlation undefined for constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double srcc(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pcc(rx, ry);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t tx = tied_pairs(xs.begin(), xs.end(), std::equal_to<>());

  // Pairs tied in both x and y.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const std::int64_t txy = tied_pairs(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return xs[a] == xs[b] && ys[a] == ys[b];
  });

  std::vector<double> buf(n);
  const std::int64_t swaps = merge_count(ys, buf, 0, n);
  const std::int64_t ty = tied_pairs(ys.begin(), ys.end(), std::equal_to<>());

  const double s = static_cast<double>(n0 - tx - ty + txy - 2 * swaps);
  const double denom =
      std::sqrt(static_cast<double>(n0 - tx)) * std::sqrt(static_cast<double>(n0 - ty));
  if (denom == 0.0) return 0.0;
  return std::clamp(s / denom, -1.0, 1.0);
}

std::vector<double> descending_ranks(std::span<const double> values) {
  std::vector<double> neg(values.begin(), values.end());
  for (double& v : neg) v = -v;
  return fractional_ranks(neg);
}

TauB95Result tau_b95(std::span<const ScoreWithCi> scores, std::span<const double> reference_ranks) {
  if (scores.size() != reference_ranks.size()) {
    throw ValidationError("tau-b95: scores and reference ranks differ in length");
  }
  if (scores.size() < 2) throw ValidationError("tau-b95 needs at least 2 entries");
  for (const auto& s : scores) {
    if (s.ci95 < 0.0) throw ValidationError("tau-b95: negative confidence half-width");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a].mean > scores[b].mean;
  });

  TauB95Result out;
  out.corrected_ranks.assign(scores.size(), 0.0);
  std::vector<bool> assigned(scores.size(), false);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t leader = order[pos];
    if (assigned[leader]) continue;
    std::vector<std::size_t> group{leader};
    assigned[leader] = true;
    for (std::size_t next = pos + 1; next < order.size(); ++next) {
      const std::size_t cand = order[next];
      if (assigned[cand]) continue;
      const double gap = std::abs(scores[leader].mean - scores[cand].mean);
      if (gap <= scores[leader].ci95 + scores[cand].ci95) {
        group.push_back(cand);
        assigned[cand] = true;
      }
    }
    const double rank = static_cast<double>(out.groups.size() + 1);
    for (std::size_t m : group) out.corrected_ranks[m] = rank;
    out.groups.push_back(std::move(group));
  }
  out.tau = kendall_tau_b(out.corrected_ranks, reference_ranks);
  return out;
}

}  // namespace sigc::analytics
