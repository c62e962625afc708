#include "sigc/report/analyze.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/core.h>

#include "sigc/analytics/challenge.hpp"
#include "sigc/common/csv.hpp"
#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"
#include "sigc/dimmodels/cross_validation.hpp"
#include "sigc/dimmodels/factor_analysis.hpp"
#include "sigc/dimmodels/feature_matrix.hpp"
#include "sigc/dimmodels/linear.hpp"

namespace sigc::report {

namespace {

using analytics::Level;
using analytics::ScoreTable;
using csv::fixed;

constexpr int kPrecision = 6;

std::string num(double v) { return fixed(v, kPrecision); }

std::string dname(Dimension d) { return std::string(display_name(d)); }

struct Builder {
  ReportBundle bundle;
  std::string summary;

  void table(const std::string& file, const TextTable& t) {
    bundle.files.push_back({file, t.csv()});
    summary += t.render() + "\n";
  }
  void note(const std::string& text) { summary += text + "\n\n"; }
};

TextTable mos_table(const ScoreTable& t, const std::string& title) {
  TextTable out;
  out.title = title;
  out.header = {"entity_id"};
  for (Dimension d : kAllDimensions) {
    out.header.push_back(std::string(to_string(d)));
    out.header.push_back(std::string(to_string(d)) + "_ci95");
  }
  out.header.push_back("m");
  for (const auto& [id, row] : t.rows) {
    std::vector<std::string> r{id};
    for (Dimension d : kAllDimensions) {
      if (row.scores.has(d)) {
        r.push_back(num(row.scores.at(d).mean));
        r.push_back(num(row.scores.at(d).ci95));
      } else {
        r.insert(r.end(), {"", ""});
      }
    }
    const bool has_m = row.scores.has(Dimension::kSignal) && row.scores.has(Dimension::kOverall);
    r.push_back(has_m ? num(analytics::metric_value(row.scores, analytics::Metric::challenge_m())) : "");
    out.rows.push_back(std::move(r));
  }
  return out;
}

void ranking_section(Builder& b, const analytics::ChallengeRanking& ranking) {
  TextTable t;
  t.title = "Ranking by M (models with DSIG <= 0 are excluded)";
  t.header = {"model_id", "rank", "m", "sig", "ovrl", "dsig", "compliant"};
  int rank = 1;
  for (const auto& r : ranking.ranked) {
    t.rows.push_back({r.model_id, std::to_string(rank++), num(r.m), num(r.sig), num(r.ovrl), num(r.dsig), "yes"});
  }
  for (const auto& r : ranking.excluded) {
    t.rows.push_back({r.model_id, "", num(r.m), num(r.sig), num(r.ovrl), num(r.dsig), "no"});
  }
  b.table("ranking.csv", t);
}

void significance_section(Builder& b, const ScoreTable& clip_table, const AnalyzeOptions& opt) {
  const auto metric = analytics::parse_metric(opt.anova_metric);
  const auto values = analytics::per_clip_values(clip_table, metric);
  if (values.size() < 2) {
    b.note("Pairwise significance: n/a (fewer than two models)");
    return;
  }
  analytics::PairwiseSignificance sig;
  try {
    sig = analytics::pairwise_significance(values, opt.holm);
  } catch (const ValidationError& e) {
    b.note(std::string("Pairwise significance: n/a (") + e.what() + ")");
    return;
  }
  TextTable t;
  t.title = fmt::format("Pairwise paired t-test p-values on {}{}", metric.name(),
                        sig.holm_adjusted ? " (Holm adjusted)" : "");
  t.header = {"model_id"};
  for (const auto& m : sig.models) t.header.push_back(m);
  for (std::size_t i = 0; i < sig.models.size(); ++i) {
    std::vector<std::string> r{sig.models[i]};
    for (std::size_t j = 0; j < sig.models.size(); ++j) r.push_back(j < i ? num(sig.p[i][j]) : "");
    t.rows.push_back(std::move(r));
  }
  b.table("pvalues.csv", t);

  TextTable omni;
  omni.title = "Repeated-measures ANOVA on " + metric.name();
  omni.header = {"statistic", "value"};
  omni.rows = {{"f", num(sig.omnibus.f)},
               {"df_between", num(sig.omnibus.df_between)},
               {"df_error", num(sig.omnibus.df_error)},
               {"p", num(sig.omnibus.p)}};
  b.table("anova.csv", omni);
}

// Pearson matrix over the seven scales at clip level.
void dimension_correlation_section(Builder& b, const ScoreTable& clip_table) {
  std::vector<const analytics::ScoreRow*> rows;
  for (const auto& [id, row] : clip_table.rows) {
    bool all = true;
    for (Dimension d : kAllDimensions) all = all && row.scores.has(d);
    if (all) rows.push_back(&row);
  }
  TextTable t;
  t.title = fmt::format("Pearson correlation between scales (clip level, n={})", rows.size());
  t.header = {"scale"};
  for (Dimension d : kAllDimensions) t.header.push_back(std::string(to_string(d)));
  std::vector<std::vector<double>> cols(kNumDimensions);
  for (const auto* r : rows) {
    for (Dimension d : kAllDimensions) cols[index_of(d)].push_back(r->scores.at(d).mean);
  }
  for (Dimension a : kAllDimensions) {
    std::vector<std::string> r{std::string(to_string(a))};
    for (Dimension c : kAllDimensions) {
      double v = std::nan("");
      try {
        v = analytics::pcc(cols[index_of(a)], cols[index_of(c)]);
      } catch (const ValidationError&) {
      }
      r.push_back(num(v));
    }
    t.rows.push_back(std::move(r));
  }
  b.table("scale_correlations.csv", t);
}

void objective_section(Builder& b, const ScoreTable& subjective, const AnalyzeOptions& opt) {
  const auto& obj = *opt.objective;
  std::vector<Dimension> dims;
  for (Dimension d : kAllDimensions) {
    bool both = !obj.rows.empty() && !subjective.rows.empty();
    for (const auto& [id, r] : obj.rows) both = both && r.scores.has(d);
    for (const auto& [id, r] : subjective.rows) both = both && r.scores.has(d);
    if (both) dims.push_back(d);
  }
  if (dims.empty()) {
    b.note("Subjective vs objective correlation: n/a (no shared scales)");
    return;
  }
  std::vector<analytics::DimensionCorrelation> corr;
  try {
    corr = analytics::cross_test_correlation(subjective, obj, dims, opt.include_baseline_in_correlations);
  } catch (const ValidationError& e) {
    b.note(std::string("Subjective vs objective correlation: n/a (") + e.what() + ")");
    return;
  }
  TextTable t;
  t.title = "Subjective vs objective correlation (" + analytics::to_string(subjective.level) + " level)";
  t.header = {"scale", "n", "pcc", "srcc", "tau_b", "tau_b95"};
  for (const auto& c : corr) {
    t.rows.push_back({std::string(to_string(c.dimension)), std::to_string(c.n), num(c.pcc), num(c.srcc),
                      num(c.tau_b), num(c.tau_b95)});
  }
  b.table("objective_correlation.csv", t);
}

const std::vector<Dimension> kEfaVariables = {Dimension::kSignal,        Dimension::kNoisiness,
                                              Dimension::kColoration,    Dimension::kDiscontinuity,
                                              Dimension::kLoudness,      Dimension::kReverberation};

void efa_section(Builder& b, const ScoreTable& clip_table, const AnalyzeOptions& opt) {
  std::vector<std::vector<double>> data;
  for (const auto& [id, row] : clip_table.rows) {
    std::vector<double> r;
    for (Dimension d : kEfaVariables) {
      if (!row.scores.has(d)) break;
      r.push_back(row.scores.at(d).mean);
    }
    if (r.size() == kEfaVariables.size()) data.push_back(std::move(r));
  }
  const auto v = static_cast<Eigen::Index>(kEfaVariables.size());
  if (static_cast<Eigen::Index>(data.size()) <= v) {
    b.note(fmt::format("Factor analysis: n/a ({} complete clips, need more than {})", data.size(), v));
    return;
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), v);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < v; ++j) x(i, j) = data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  try {
    const Eigen::MatrixXd r = dimmodels::correlation_matrix(x);
    const auto k = dimmodels::kmo(r);
    const auto bart = dimmodels::bartlett_sphericity(r, static_cast<long>(x.rows()));
    const Eigen::VectorXd scree = dimmodels::scree_eigenvalues(r);

    TextTable adequacy;
    adequacy.title = fmt::format("Factor analysis adequacy (clip level, n={})", x.rows());
    adequacy.header = {"statistic", "value"};
    adequacy.rows = {{"kmo", num(k.overall)},
                     {"bartlett_chi2", num(bart.chi2)},
                     {"bartlett_df", num(bart.df)},
                     {"bartlett_p", num(bart.p)}};
    for (Eigen::Index i = 0; i < v; ++i) {
      adequacy.rows.push_back({"msa_" + std::string(to_string(kEfaVariables[static_cast<std::size_t>(i)])),
                               num(k.per_variable(i))});
    }
    b.table("efa_adequacy.csv", adequacy);

    TextTable sc;
    sc.title = "Scree eigenvalues";
    sc.header = {"component", "eigenvalue"};
    for (Eigen::Index i = 0; i < scree.size(); ++i) sc.rows.push_back({std::to_string(i + 1), num(scree(i))});
    b.table("efa_scree.csv", sc);

    const auto sol = dimmodels::efa_ml(r, opt.factors);
    const auto rotated = opt.factors >= 2 ? dimmodels::rotate(sol, dimmodels::varimax(sol.loadings)) : sol;
    std::vector<std::string> names;
    for (Dimension d : kEfaVariables) names.push_back(dname(d));
    const auto rep = dimmodels::loading_report(rotated, names, opt.loading_threshold);

    TextTable lt;
    lt.title = fmt::format("Varimax-rotated ML loadings (|loading| > {}; {}% of variance explained)",
                           fixed(opt.loading_threshold, 2), fixed(100.0 * rep.total_variance_explained, 1));
    lt.header = {"scale"};
    for (int f = 0; f < opt.factors; ++f) lt.header.push_back(fmt::format("factor_{}", f + 1));
    lt.header.push_back("uniqueness");
    for (std::size_t i = 0; i < rep.variables.size(); ++i) {
      std::vector<std::string> row{rep.variables[i]};
      for (const auto& cell : rep.cells[i]) row.push_back(cell ? num(*cell) : "");
      row.push_back(num(rotated.uniquenesses(static_cast<Eigen::Index>(i))));
      lt.rows.push_back(std::move(row));
    }
    std::vector<std::string> var_row{"variance_explained"};
    for (Eigen::Index f = 0; f < rep.variance_explained.size(); ++f) var_row.push_back(num(rep.variance_explained(f)));
    var_row.push_back("");
    lt.rows.push_back(std::move(var_row));
    b.table("efa_loadings.csv", lt);
    for (const auto& w : sol.warnings) b.note("warning: " + w);
    if (!sol.converged) b.note("warning: factor extraction did not converge");
  } catch (const Error& e) {
    b.note(std::string("Factor analysis: n/a (") + e.what() + ")");
  }
}

struct RegressionRun {
  std::optional<dimmodels::CVReport> report;
  std::string failure;
  Eigen::VectorXd mean_weights;  // fold-averaged coefficients or importances
};

RegressionRun run_cv(const dimmodels::FeatureMatrix& fm, int k, std::uint64_t seed, const std::string& kind) {
  RegressionRun run;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(fm.cols());
  int fits = 0;
  dimmodels::FitPredict fp;
  if (kind == "linear") {
    fp = [&](const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr, const Eigen::MatrixXd& xte, int) {
      const auto m = dimmodels::ols_fit(xtr, ytr);
      sum += m.coefficients;
      ++fits;
      return m.predict(xte);
    };
  } else if (kind == "polynomial") {
    fp = dimmodels::polynomial_regressor(4);
  } else {
    dimmodels::ForestParams params;
    params.seed = derive_seed(seed, "forest");
    fp = [&, params](const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr, const Eigen::MatrixXd& xte, int fold) {
      auto p = params;
      p.seed = derive_seed(params.seed, static_cast<std::uint64_t>(fold));
      const auto f = dimmodels::random_forest_fit(xtr, ytr, p);
      sum += f.importances;
      ++fits;
      return f.predict(xte);
    };
  }
  try {
    run.report = dimmodels::kfold_cv(fm.x, fm.y, fp, k, seed);
    if (fits > 0) run.mean_weights = sum / fits;
  } catch (const Error& e) {
    run.failure = e.what();
  }
  return run;
}

void regression_section(Builder& b, const ScoreTable& clip_table, const ScoreTable& model_table,
                        Dimension target, const AnalyzeOptions& opt) {
  const auto predictors = dimmodels::default_predictors(target);
  const std::string tag = std::string(to_string(target));
  const std::vector<std::string> kinds = {"linear", "polynomial", "forest"};
  const std::vector<std::string> labels = {"Linear regression", "Polynomial (n=4)", "Random forest"};

  TextTable perf;
  perf.title = fmt::format("Predicting {} from {} scales: k-fold CV (clip k={}, model k={})", dname(target),
                           predictors.size(), opt.clip_folds, opt.model_folds);
  perf.header = {"regressor", "clip_pcc", "clip_rmse", "clip_r2", "model_pcc", "model_rmse", "model_r2"};
  std::vector<std::vector<RegressionRun>> runs(2);
  const std::array<const ScoreTable*, 2> tables = {&clip_table, &model_table};
  const std::array<int, 2> folds = {opt.clip_folds, opt.model_folds};
  std::vector<std::string> failures;
  for (std::size_t lvl = 0; lvl < 2; ++lvl) {
    std::optional<dimmodels::FeatureMatrix> fm;
    std::string why;
    try {
      fm = dimmodels::build_feature_matrix(*tables[lvl], target, predictors);
      fm->validate();
    } catch (const Error& e) {
      fm.reset();
      why = e.what();
    }
    for (const auto& kind : kinds) {
      if (fm) {
        runs[lvl].push_back(run_cv(*fm, folds[lvl], derive_seed(opt.seed, tag + ":" + kind), kind));
      } else {
        runs[lvl].push_back({std::nullopt, why, {}});
      }
      if (!runs[lvl].back().report) {
        failures.push_back(fmt::format("{} level {}: {}", lvl == 0 ? "clip" : "model", kind,
                                       runs[lvl].back().failure));
      }
    }
  }
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    std::vector<std::string> row{labels[i]};
    for (std::size_t lvl = 0; lvl < 2; ++lvl) {
      const auto& r = runs[lvl][i].report;
      if (r) {
        row.insert(row.end(), {num(r->mean_pcc), num(r->mean_rmse), num(r->mean_r2)});
      } else {
        row.insert(row.end(), {"n/a", "n/a", "n/a"});
      }
    }
    perf.rows.push_back(std::move(row));
  }
  b.table("regression_" + tag + ".csv", perf);

  TextTable w;
  w.title = fmt::format("Fold-averaged linear coefficients and forest importances predicting {}", dname(target));
  w.header = {"feature", "clip_linear_coef", "clip_forest_imp", "model_linear_coef", "model_forest_imp"};
  for (std::size_t f = 0; f < predictors.size(); ++f) {
    std::vector<std::string> row{dname(predictors[f])};
    for (std::size_t lvl = 0; lvl < 2; ++lvl) {
      for (std::size_t kind : {std::size_t{0}, std::size_t{2}}) {
        const auto& run = runs[lvl][kind];
        row.push_back(run.report && run.mean_weights.size() > 0
                          ? num(run.mean_weights(static_cast<Eigen::Index>(f)))
                          : "n/a");
      }
    }
    w.rows.push_back(std::move(row));
  }
  b.table("importance_" + tag + ".csv", w);
  for (const auto& f : failures) b.note("n/a " + f);
}

void headroom_section(Builder& b, const ScoreTable& model_table, const analytics::ChallengeRanking& ranking) {
  if (ranking.ranked.empty()) {
    b.note("Headroom: n/a (no model passed the DSIG > 0 rule)");
    return;
  }
  const auto& top = model_table.row(ranking.ranked.front().model_id);
  const std::vector<std::pair<std::string, Dimension>> areas = {
      {"Overall", Dimension::kOverall},       {"Signal", Dimension::kSignal},
      {"Background", Dimension::kNoisiness},  {"Coloration", Dimension::kColoration},
      {"Loudness", Dimension::kLoudness},     {"Discontinuity", Dimension::kDiscontinuity},
      {"Reverberation", Dimension::kReverberation}};
  TextTable t;
  t.title = "Headroom to excellent (5 - MOS) for the top model " + top.model_id;
  t.header = {"area", "mos", "headroom"};
  for (const auto& [label, d] : areas) {
    if (!top.scores.has(d)) continue;
    const double mos = top.scores.at(d).mean;
    t.rows.push_back({label, num(mos), num(analytics::headroom(mos))});
  }
  b.table("headroom.csv", t);
}

}  // namespace

const ReportFile* ReportBundle::find(const std::string& name) const {
  for (const auto& f : files) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

ReportBundle analyze(const std::vector<analytics::RatingVote>& votes, const AnalyzeOptions& opt) {
  if (votes.empty()) throw ValidationError("no votes to analyze (empty input)");
  if (opt.baseline_model.empty()) throw ValidationError("a baseline model id is required");
  const ScoreTable clip_table = analytics::build_clip_table(votes, opt.baseline_model);
  const ScoreTable model_table = analytics::build_model_table(clip_table);

  Builder b;
  b.bundle.files.push_back({"mos_clip.csv", analytics::score_table_csv(clip_table)});
  b.bundle.files.push_back({"mos_model.csv", analytics::score_table_csv(model_table)});
  b.summary += fmt::format("{} votes, {} clip rows, {} models, baseline {}\n\n", votes.size(),
                           clip_table.rows.size(), model_table.rows.size(), opt.baseline_model);
  b.summary += mos_table(model_table, "Model MOS (mean and 95% CI over clips)").render() + "\n";

  const auto ranking = analytics::rank_challenge(model_table, opt.baseline_model);
  ranking_section(b, ranking);
  significance_section(b, clip_table, opt);
  dimension_correlation_section(b, clip_table);
  if (opt.objective) {
    objective_section(b, opt.objective->level == Level::kClip ? clip_table : model_table, opt);
  }
  efa_section(b, clip_table, opt);
  regression_section(b, clip_table, model_table, Dimension::kOverall, opt);
  regression_section(b, clip_table, model_table, Dimension::kSignal, opt);
  headroom_section(b, model_table, ranking);

  try {
    const double frac = analytics::sig_lt_bak_fraction(clip_table);
    TextTable t;
    t.title = "Clips with Signal MOS below Background (Noisiness) MOS";
    t.header = {"statistic", "value"};
    t.rows = {{"sig_lt_bak_fraction", num(frac)}};
    b.table("sig_lt_bak.csv", t);
  } catch (const ValidationError& e) {
    b.note(std::string("SIG < BAK fraction: n/a (") + e.what() + ")");
  }

  b.bundle.files.push_back({"summary.txt", b.summary});
  return b.bundle;
}

void write_bundle(const ReportBundle& bundle, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& f : bundle.files) {
    const auto path = std::filesystem::path(out_dir) / f.name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << f.content;
  }
}

}  // namespace sigc::report
