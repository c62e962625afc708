#include "sigc/analytics/significance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "sigc/common/errors.hpp"

namespace sigc::analytics {

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PairingError("paired t-test: vectors differ in length");
  if (a.size() < 2) throw ValidationError("paired t-test needs at least 2 pairs");
  const double n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  PairedTTest out;
  out.df = n - 1.0;
  out.mean_difference = mean;
  const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  if (se == 0.0) {
    // Constant difference: zero means no evidence, non-zero is certain.
    out.t = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
    out.p = mean == 0.0 ? 1.0 : 0.0;
    return out;
  }
  out.t = mean / se;
  boost::math::students_t dist(out.df);
  out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
  out.p = std::min(1.0, out.p);
  return out;
}

OmnibusTest repeated_measures_anova(const std::vector<std::vector<double>>& values) {
  const std::size_t k = values.size();
  if (k < 2) throw ValidationError("ANOVA needs at least 2 models");
  const std::size_t n = values.front().size();
  if (n < 2) throw ValidationError("ANOVA needs at least 2 clips");
  for (const auto& col : values) {
    if (col.size() != n) throw PairingError("ANOVA: models scored on different clip counts");
  }
  double grand = 0.0;
  for (const auto& col : values) grand += std::accumulate(col.begin(), col.end(), 0.0);
  grand /= static_cast<double>(k * n);

  double ss_total = 0.0, ss_models = 0.0, ss_clips = 0.0;
  for (const auto& col : values) {
    const double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    ss_models += static_cast<double>(n) * (m - grand) * (m - grand);
    for (double v : col) ss_total += (v - grand) * (v - grand);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (const auto& col : values) m += col[i];
    m /= static_cast<double>(k);
    ss_clips += static_cast<double>(k) * (m - grand) * (m - grand);
  }
  const double ss_error = std::max(0.0, ss_total - ss_models - ss_clips);

  OmnibusTest out;
  out.df_between = static_cast<double>(k - 1);
  out.df_error = static_cast<double>((k - 1) * (n - 1));
  const double ms_between = ss_models / out.df_between;
  const double ms_error = ss_error / out.df_error;
  if (ms_error <= 1e-300) {
    out.f = ms_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    out.p = ms_between > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.f = ms_between / ms_error;
  boost::math::fisher_f dist(out.df_between, out.df_error);
  out.p = boost::math::cdf(boost::math::complement(dist, out.f));
  return out;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double v = std::min(1.0, static_cast<double>(m - r) * p_values[order[r]]);
    running = std::max(running, v);
    adjusted[order[r]] = running;
  }
  return adjusted;
}

PairwiseSignificance pairwise_significance(const PerClipValues& values, bool holm) {
  if (values.size() < 2) throw ValidationError("pairwise significance needs at least 2 models");
  const auto& reference = values.begin()->second;
  for (const auto& [model, clips] : values) {
    if (clips.size() != reference.size() ||
        !std::equal(clips.begin(), clips.end(), reference.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw PairingError("model '" + model + "' was not scored on the shared clip set");
    }
  }

  PairwiseSignificance out;
  std::vector<std::vector<double>> columns;
  for (const auto& [model, clips] : values) {
    out.models.push_back(model);
    std::vector<double> col;
    col.reserve(clips.size());
    for (const auto& [clip, v] : clips) col.push_back(v);
    columns.push_back(std::move(col));
  }
  const std::size_t k = columns.size();
  out.omnibus = repeated_measures_anova(columns);
  out.p.assign(k, std::vector<double>(k, 1.0));
  out.t.assign(k, std::vector<double>(k, 0.0));

  std::vector<double> raw;
  std::vector<std::pair<std::size_t, std::size_t>> where;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto test = paired_t_test(columns[i], columns[j]);
      out.t[i][j] = test.t;
      out.t[j][i] = -test.t;
      raw.push_back(test.p);
      where.emplace_back(i, j);
    }
  }
  if (holm) {
    raw = holm_adjust(raw);
    out.holm_adjusted = true;
  }
  for (std::size_t r = 0; r < raw.size(); ++r) {
    const auto [i, j] = where[r];
    out.p[i][j] = raw[r];
    out.p[j][i] = raw[r];
  }
  return out;
}

}  // namespace sigc::analytics
