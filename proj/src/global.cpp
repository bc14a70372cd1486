#include "chronocast/global.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <span>

#include "chronocast/parallel.hpp"

namespace chronocast {

const char* global_strategy_name(GlobalStrategy s) {
  return s == GlobalStrategy::Recursive ? "Recursive" : "Direct";
}

std::vector<int> GlobalModelSpec::default_lags(int season, std::size_t min_series_length) {
  std::set<int> lags;
  for (int j = 1; j <= std::min(12, 2 * season); ++j) lags.insert(j);
  lags.insert(season);
  lags.insert(2 * season);
  std::vector<int> out;
  for (int lag : lags)
    if (static_cast<std::size_t>(lag) < min_series_length) out.push_back(lag);
  return out;
}

namespace {

int calendar_cardinality(Frequency f) {
  switch (f) {
    case Frequency::Monthly:
    case Frequency::Quarterly: return 12;  // month of year
    case Frequency::Daily: return 7;       // day of week
    case Frequency::Hourly: return 24;     // hour of day
    default: return 0;
  }
}

int calendar_slot(const DateTime& t, Frequency f) {
  switch (f) {
    case Frequency::Monthly:
    case Frequency::Quarterly: return t.month - 1;
    case Frequency::Daily: {
      std::int64_t days = epoch_seconds(t) / 86400;
      return static_cast<int>(((days % 7) + 7) % 7);
    }
    case Frequency::Hourly: return t.hour;
    default: return -1;
  }
}

}  // namespace

std::size_t FeatureSchema::columns() const {
  std::size_t n = lags.size() * (1 + past_covariates.size()) + known_covariates.size() +
                  static_cast<std::size_t>(calendar_cardinality) + static_numeric.size();
  for (const auto& [_, cats] : static_categories) n += cats.size();
  return n;
}

FeatureSchema build_schema(const TimeSeriesFrame& frame, const std::vector<int>& lags) {
  if (lags.empty()) fail(ErrorCode::InvalidArgument, "lag list must be non-empty");
  FeatureSchema schema;
  schema.lags = lags;
  std::sort(schema.lags.begin(), schema.lags.end());
  schema.lags.erase(std::unique(schema.lags.begin(), schema.lags.end()), schema.lags.end());
  if (schema.lags.front() < 1) fail(ErrorCode::InvalidArgument, "lags must be >= 1");

  if (frame.empty()) fail(ErrorCode::InvalidArgument, "cannot build a schema from an empty frame");
  const Series& first = frame.at(0);
  for (const auto& [name, _] : first.past_covariates) schema.past_covariates.push_back(name);
  for (const auto& [name, _] : first.known_covariates) schema.known_covariates.push_back(name);
  schema.calendar_cardinality = calendar_cardinality(frame.frequency());

  for (const auto& [name, value] : first.static_covariates) {
    if (std::holds_alternative<double>(value)) {
      schema.static_numeric.push_back(name);
    } else {
      schema.static_categories.emplace_back(name, std::vector<std::string>{});
    }
  }
  // Category order fixed by first appearance over series in id order.
  for (auto& [name, cats] : schema.static_categories) {
    for (std::size_t i = 0; i < frame.size(); ++i) {
      auto it = frame.at(i).static_covariates.find(name);
      if (it == frame.at(i).static_covariates.end() ||
          !std::holds_alternative<std::string>(it->second))
        fail(ErrorCode::InvalidArgument,
             "static covariate '" + name + "' missing or mistyped in series '" + frame.id(i) + "'");
      const std::string& cat = std::get<std::string>(it->second);
      if (std::find(cats.begin(), cats.end(), cat) == cats.end()) cats.push_back(cat);
    }
  }
  return schema;
}

namespace {

// Writes one feature row. `target_ext` is the target extended by earlier
// predictions during recursive inference; past covariates saturate at their
// last observed value once the anchor moves beyond them.
void fill_row(const TimeSeriesFrame& frame, std::size_t si, std::span<const double> target_ext,
              std::int64_t anchor, std::int64_t target_idx, const FeatureSchema& schema,
              double* row) {
  const Series& s = frame.at(si);
  std::size_t c = 0;
  for (int lag : schema.lags) row[c++] = target_ext[anchor + 1 - lag];
  for (const auto& name : schema.past_covariates) {
    const auto& col = s.past_covariates.at(name);
    for (int lag : schema.lags) {
      const std::int64_t idx = anchor + 1 - lag;
      row[c++] = col[std::min<std::int64_t>(idx, static_cast<std::int64_t>(col.size()) - 1)];
    }
  }
  for (const auto& name : schema.known_covariates) {
    const auto& col = s.known_covariates.at(name);
    if (target_idx >= static_cast<std::int64_t>(col.size()))
      fail(ErrorCode::MissingKnownCovariates,
           "known covariate '" + name + "' does not cover step " + std::to_string(target_idx) +
               " of series '" + frame.id(si) + "'");
    row[c++] = col[target_idx];
  }
  if (schema.calendar_cardinality > 0) {
    const int slot = calendar_slot(add_steps(s.start, frame.frequency(), target_idx),
                                   frame.frequency());
    for (int j = 0; j < schema.calendar_cardinality; ++j) row[c++] = j == slot ? 1.0 : 0.0;
  }
  for (const auto& [name, cats] : schema.static_categories) {
    auto it = s.static_covariates.find(name);
    const std::string* cat = nullptr;
    if (it != s.static_covariates.end() && std::holds_alternative<std::string>(it->second))
      cat = &std::get<std::string>(it->second);
    for (const auto& c_name : cats) row[c++] = (cat && *cat == c_name) ? 1.0 : 0.0;
  }
  for (const auto& name : schema.static_numeric) {
    auto it = s.static_covariates.find(name);
    row[c++] = (it != s.static_covariates.end() && std::holds_alternative<double>(it->second))
                   ? std::get<double>(it->second)
                   : 0.0;
  }
}

}  // namespace

FeatureMatrix build_features(const TimeSeriesFrame& frame, const FeatureSchema& schema,
                             int horizon, GlobalStrategy strategy) {
  const int max_lag = schema.max_lag();
  for (std::size_t i = 0; i < frame.size(); ++i)
    if (frame.at(i).length() <= static_cast<std::size_t>(max_lag))
      fail(ErrorCode::LagExceedsLength,
           "series '" + frame.id(i) + "' has " + std::to_string(frame.at(i).length()) +
               " points, not enough for lag " + std::to_string(max_lag));

  const std::size_t cols = schema.columns();
  const int kmax = strategy == GlobalStrategy::Direct ? horizon : 1;

  FeatureMatrix fm;
  fm.schema = schema;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const auto& target = frame.at(i).target;
    const std::int64_t n = static_cast<std::int64_t>(target.size());
    for (std::int64_t anchor = max_lag - 1; anchor < n - 1; ++anchor) {
      for (int k = 1; k <= kmax && anchor + k < n; ++k) {
        fm.x.resize(fm.x.size() + cols);
        fill_row(frame, i, target, anchor, anchor + k, schema,
                 fm.x.data() + fm.rows * cols);
        fm.y.push_back(target[anchor + k]);
        fm.step.push_back(k);
        fm.series.push_back(i);
        ++fm.rows;
      }
    }
  }
  return fm;
}

namespace {

double pinball(double level, double actual, double pred) {
  const double d = actual - pred;
  return d >= 0.0 ? level * d : (level - 1.0) * d;
}

struct HeadProblem {
  const FeatureMatrix* fm;
  std::vector<std::size_t> rows;  // row subset for this step group
  std::span<const double> yz;     // standardized targets (all rows)
};

LinearHead solve_mean_head(const HeadProblem& p, double l2) {
  const std::size_t f = p.fm->schema.columns();
  const std::size_t n = p.rows.size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(f + 1, f + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(f + 1);
  Eigen::VectorXd xi(f + 1);
  for (std::size_t r : p.rows) {
    const double* row = p.fm->row(r);
    for (std::size_t j = 0; j < f; ++j) xi[j] = row[j];
    xi[f] = 1.0;
    gram.noalias() += xi * xi.transpose();
    rhs.noalias() += p.yz[r] * xi;
  }
  gram /= static_cast<double>(n);
  rhs /= static_cast<double>(n);
  for (std::size_t j = 0; j < f; ++j) gram(j, j) += l2;  // intercept unpenalized
  Eigen::VectorXd w = gram.ldlt().solve(rhs);
  LinearHead head;
  head.coef.assign(w.data(), w.data() + f);
  head.intercept = w[f];
  return head;
}

// Deterministic full-batch projected-subgradient descent on mean pinball
// loss with L2 on the coefficients. Initialized at the mean head shifted to
// the empirical residual quantile; the best iterate (by regularized loss)
// is returned.
LinearHead solve_quantile_head(const HeadProblem& p, const LinearHead& mean_head, double level,
                               const QrHyperParams& hp, const Budget& budget,
                               double* loss_out) {
  const std::size_t f = p.fm->schema.columns();
  const std::size_t n = p.rows.size();
  std::vector<double> w = mean_head.coef;
  double b = mean_head.intercept;

  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = p.fm->row(p.rows[i]);
    double pred = b;
    for (std::size_t j = 0; j < f; ++j) pred += w[j] * row[j];
    resid[i] = p.yz[p.rows[i]] - pred;
  }
  std::sort(resid.begin(), resid.end());
  const std::size_t qi = std::min(
      n - 1, static_cast<std::size_t>(std::max(0.0, std::ceil(level * n) - 1.0)));
  b += resid[qi];

  auto evaluate = [&](const std::vector<double>& wv, double bv, std::vector<double>* grad_w,
                      double* grad_b) {
    double loss = 0.0;
    if (grad_w) {
      std::fill(grad_w->begin(), grad_w->end(), 0.0);
      *grad_b = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = p.fm->row(p.rows[i]);
      double pred = bv;
      for (std::size_t j = 0; j < f; ++j) pred += wv[j] * row[j];
      const double actual = p.yz[p.rows[i]];
      loss += pinball(level, actual, pred);
      if (grad_w) {
        const double g = pred > actual ? (1.0 - level) : (pred < actual ? -level : 0.0);
        if (g != 0.0) {
          for (std::size_t j = 0; j < f; ++j) (*grad_w)[j] += g * row[j];
          *grad_b += g;
        }
      }
    }
    loss /= static_cast<double>(n);
    double penalty = 0.0;
    for (double v : wv) penalty += v * v;
    return loss + 0.5 * hp.l2 * penalty;
  };

  std::vector<double> grad(f);
  double grad_b = 0.0;
  std::vector<double> best_w = w;
  double best_b = b;
  double best_loss = evaluate(w, b, nullptr, nullptr);
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    if ((epoch & 15) == 0) budget.check();
    const double loss = evaluate(w, b, &grad, &grad_b);
    if (loss < best_loss) {
      best_loss = loss;
      best_w = w;
      best_b = b;
    }
    const double lr = hp.learning_rate / std::sqrt(epoch + 1.0);
    for (std::size_t j = 0; j < f; ++j)
      w[j] -= lr * (grad[j] / static_cast<double>(n) + hp.l2 * w[j]);
    b -= lr * grad_b / static_cast<double>(n);
  }
  const double final_loss = evaluate(w, b, nullptr, nullptr);
  if (final_loss < best_loss) {
    best_loss = final_loss;
    best_w = w;
    best_b = b;
  }
  if (loss_out) *loss_out = best_loss;
  LinearHead head;
  head.coef = std::move(best_w);
  head.intercept = best_b;
  return head;
}

}  // namespace

TrainedGlobalModel fit_global(const GlobalModelSpec& spec, const TimeSeriesFrame& train,
                              int horizon, const QuantileLevels& levels, const Budget& budget) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  const FeatureSchema schema = build_schema(train, spec.lags);
  FeatureMatrix fm = build_features(train, schema, horizon, spec.strategy);
  if (fm.rows == 0) fail(ErrorCode::DegenerateFeatures, "feature build produced no rows");
  budget.check();

  TrainedGlobalModel model;
  model.spec = spec;
  model.spec.lags = schema.lags;
  model.schema = schema;
  model.frequency = train.frequency();
  model.horizon = horizon;
  model.levels = levels.values();

  // Column standardization; zero-variance columns are centered only.
  const std::size_t f = schema.columns();
  model.feature_mean.assign(f, 0.0);
  model.feature_scale.assign(f, 1.0);
  for (std::size_t r = 0; r < fm.rows; ++r) {
    const double* row = fm.row(r);
    for (std::size_t j = 0; j < f; ++j) model.feature_mean[j] += row[j];
  }
  for (std::size_t j = 0; j < f; ++j) model.feature_mean[j] /= static_cast<double>(fm.rows);
  std::vector<double> var(f, 0.0);
  for (std::size_t r = 0; r < fm.rows; ++r) {
    const double* row = fm.row(r);
    for (std::size_t j = 0; j < f; ++j) {
      const double d = row[j] - model.feature_mean[j];
      var[j] += d * d;
    }
  }
  bool any_informative = false;
  for (std::size_t j = 0; j < f; ++j) {
    var[j] /= static_cast<double>(fm.rows);
    if (var[j] > 0.0) {
      model.feature_scale[j] = std::sqrt(var[j]);
      any_informative = true;
    }
  }
  if (!any_informative)
    fail(ErrorCode::DegenerateFeatures, "every feature column has zero variance");

  double ymu = 0.0;
  for (double v : fm.y) ymu += v;
  ymu /= static_cast<double>(fm.rows);
  double yvar = 0.0;
  for (double v : fm.y) yvar += (v - ymu) * (v - ymu);
  yvar /= static_cast<double>(fm.rows);
  model.target_mean = ymu;
  model.target_scale = yvar > 0.0 ? std::sqrt(yvar) : 1.0;

  // Standardize in place; heads live entirely in standardized space.
  for (std::size_t r = 0; r < fm.rows; ++r) {
    double* row = fm.x.data() + r * f;
    for (std::size_t j = 0; j < f; ++j)
      row[j] = (row[j] - model.feature_mean[j]) / model.feature_scale[j];
  }
  std::vector<double> yz(fm.rows);
  for (std::size_t r = 0; r < fm.rows; ++r)
    yz[r] = (fm.y[r] - model.target_mean) / model.target_scale;

  const int groups = spec.strategy == GlobalStrategy::Direct ? horizon : 1;
  model.heads.resize(groups);
  double total_loss = 0.0;
  for (int g = 0; g < groups; ++g) {
    HeadProblem problem;
    problem.fm = &fm;
    problem.yz = yz;
    for (std::size_t r = 0; r < fm.rows; ++r)
      if (fm.step[r] == g + 1) problem.rows.push_back(r);
    if (problem.rows.empty())
      fail(ErrorCode::DegenerateFeatures,
           "no training rows for horizon step " + std::to_string(g + 1));
    budget.check();
    model.heads[g].resize(1 + levels.size());
    model.heads[g][0] = solve_mean_head(problem, spec.hp.l2);
    for (std::size_t li = 0; li < levels.size(); ++li) {
      double loss = 0.0;
      model.heads[g][1 + li] =
          solve_quantile_head(problem, model.heads[g][0], levels[li], spec.hp, budget, &loss);
      total_loss += loss;
    }
  }
  model.final_loss = total_loss / static_cast<double>(groups * levels.size());
  if (!std::isfinite(model.final_loss))
    fail(ErrorCode::NonFiniteLoss, "training loss is not finite");
  for (const auto& group : model.heads)
    for (const auto& head : group) {
      if (!std::isfinite(head.intercept)) fail(ErrorCode::NonFiniteLoss, "non-finite intercept");
      for (double c : head.coef)
        if (!std::isfinite(c)) fail(ErrorCode::NonFiniteLoss, "non-finite coefficient");
    }
  model.fitted = true;
  return model;
}

namespace {

double apply_head(const LinearHead& head, const std::vector<double>& zrow) {
  double v = head.intercept;
  for (std::size_t j = 0; j < zrow.size(); ++j) v += head.coef[j] * zrow[j];
  return v;
}

}  // namespace

ForecastFrame predict_global(const TrainedGlobalModel& model, const TimeSeriesFrame& frame,
                             const Budget& budget) {
  if (!model.fitted) fail(ErrorCode::NotFitted, "global model is not fitted");
  if (frame.frequency() != model.frequency)
    fail(ErrorCode::FrequencyMismatch, "frame frequency differs from the fitted model");
  const FeatureSchema& schema = model.schema;
  const std::size_t f = schema.columns();
  const int h = model.horizon;
  const int max_lag = schema.max_lag();

  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.at(i).length() < static_cast<std::size_t>(max_lag))
      fail(ErrorCode::SeriesTooShortForLags,
           "series '" + frame.id(i) + "' is shorter than lag " + std::to_string(max_lag));
    for (const auto& name : schema.past_covariates)
      if (!frame.at(i).past_covariates.count(name))
        fail(ErrorCode::IndexMismatch, "series '" + frame.id(i) + "' lacks covariate '" + name + "'");
    for (const auto& name : schema.known_covariates) {
      auto it = frame.at(i).known_covariates.find(name);
      if (it == frame.at(i).known_covariates.end() ||
          it->second.size() < frame.at(i).length() + static_cast<std::size_t>(h))
        fail(ErrorCode::MissingKnownCovariates,
             "known covariate '" + name + "' must cover " + std::to_string(h) +
                 " future steps of series '" + frame.id(i) + "'");
    }
  }

  ForecastFrame out;
  out.frequency = model.frequency;
  out.levels = model.levels;
  out.blocks.resize(frame.size());

  parallel_for(frame.size(), [&](std::size_t i) {
    budget.check();
    const auto& target = frame.at(i).target;
    const std::int64_t n = static_cast<std::int64_t>(target.size());
    ForecastFrame::Block block;
    block.id = frame.id(i);
    block.start = frame.forecast_start(i);
    block.mean.resize(h);
    block.quantiles.assign(model.levels.size(), std::vector<double>(h));

    std::vector<double> extended(target.begin(), target.end());
    std::vector<double> raw(f), zrow(f);
    for (int k = 1; k <= h; ++k) {
      const std::int64_t target_idx = n - 1 + k;
      const std::int64_t anchor =
          model.spec.strategy == GlobalStrategy::Recursive ? target_idx - 1 : n - 1;
      fill_row(frame, i, extended, anchor, target_idx, schema, raw.data());
      for (std::size_t j = 0; j < f; ++j)
        zrow[j] = (raw[j] - model.feature_mean[j]) / model.feature_scale[j];
      const auto& group =
          model.heads[model.spec.strategy == GlobalStrategy::Direct ? k - 1 : 0];
      const double mean_pred = model.target_mean + model.target_scale * apply_head(group[0], zrow);
      block.mean[k - 1] = mean_pred;
      for (std::size_t li = 0; li < model.levels.size(); ++li)
        block.quantiles[li][k - 1] =
            model.target_mean + model.target_scale * apply_head(group[1 + li], zrow);
      extended.push_back(mean_pred);  // recursion feeds the mean path forward
    }
    // Per-step crossing repair.
    for (int k = 0; k < h; ++k) {
      for (std::size_t li = 1; li < model.levels.size(); ++li) {
        if (block.quantiles[li][k] < block.quantiles[li - 1][k]) {
          std::vector<double> column(model.levels.size());
          for (std::size_t l = 0; l < model.levels.size(); ++l) column[l] = block.quantiles[l][k];
          std::sort(column.begin(), column.end());
          for (std::size_t l = 0; l < model.levels.size(); ++l) block.quantiles[l][k] = column[l];
          break;
        }
      }
    }
    out.blocks[i] = std::move(block);
  });
  return out;
}

}  // namespace chronocast
