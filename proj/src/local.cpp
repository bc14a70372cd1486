#include "chronocast/local.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chronocast/normal.hpp"
#include "chronocast/parallel.hpp"

namespace chronocast {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// sqrt(sum e^2 / m): the residual-scale convention shared by every family
// so that structurally equivalent fits produce bit-identical sigmas.
double rms(const std::vector<double>& e) {
  if (e.empty()) return 0.0;
  double s = 0.0;
  for (double x : e) s += x * x;
  return std::sqrt(s / static_cast<double>(e.size()));
}

// Deterministic golden-section minimization on [lo, hi].
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 40) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// ---------------------------------------------------------------------------
// ETS: additive error, optional (damped) additive trend, optional additive
// seasonality. Linear state-space form, SSE-optimized smoothing weights,
// AICc candidate selection.
// ---------------------------------------------------------------------------

struct EtsParams {
  double alpha = 0.5, beta = 0.0, gamma = 0.0, phi = 1.0;
};

struct EtsRun {
  double sse = 0.0;
  double level = 0.0, trend = 0.0;
  std::vector<double> season;
  std::vector<double> residuals;  // one-step errors for t >= 1
};

EtsRun ets_run(std::span<const double> y, const EtsComponents& c, int season_len,
               const EtsParams& p, bool want_states) {
  const std::size_t n = y.size();
  const int m = c.seasonal ? season_len : 1;
  double level, trend = 0.0;
  std::vector<double> seas(static_cast<std::size_t>(m), 0.0);
  if (c.seasonal) {
    const double m1 = mean_of(y.subspan(0, m));
    level = m1;
    if (c.trend) trend = (mean_of(y.subspan(m, m)) - m1) / m;
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      seas[i] = y[i] - m1;
      total += seas[i];
    }
    for (int i = 0; i < m; ++i) seas[i] -= total / m;
  } else {
    level = y[0];
    if (c.trend) trend = y[1] - y[0];
  }

  const double phi = c.damped ? p.phi : 1.0;
  EtsRun run;
  if (want_states) run.residuals.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t idx = t % m;
    const double base = level + phi * trend;
    const double se = c.seasonal ? seas[idx] : 0.0;
    const double e = y[t] - (base + se);
    run.sse += e * e;
    if (want_states && t >= 1) run.residuals.push_back(e);
    // alpha == 1 reduces the level update to an exact pass-through of the
    // observation; keep it exact so forced-alpha fits match Naive bitwise.
    level = p.alpha == 1.0 ? y[t] - se : base + p.alpha * e;
    if (c.trend) trend = phi * trend + p.beta * e;
    if (c.seasonal) seas[idx] = se + p.gamma * e;
  }
  run.level = level;
  run.trend = trend;
  run.season = std::move(seas);
  return run;
}

// Free parameters use a box domain: alpha in (0,1), beta = rb*alpha,
// gamma = rg*(1-alpha), phi in [0.8, 0.98].
struct EtsSearchSpace {
  bool free_alpha, free_beta, free_gamma, free_phi;
};

EtsParams resolve(const EtsComponents& c, double alpha, double rb, double rg, double phi) {
  EtsParams p;
  p.alpha = alpha;
  p.beta = c.trend ? rb * alpha : 0.0;
  p.gamma = c.seasonal ? rg * (1.0 - alpha) : 0.0;
  p.phi = c.damped ? phi : 1.0;
  return p;
}

EtsParams optimize_ets(std::span<const double> y, const EtsComponents& c, int season_len,
                       std::optional<double> fixed_alpha) {
  const EtsSearchSpace space{!fixed_alpha.has_value(), c.trend, c.seasonal, c.damped};
  auto sse_at = [&](double a, double rb, double rg, double ph) {
    return ets_run(y, c, season_len, resolve(c, a, rb, rg, ph), false).sse;
  };

  const std::vector<double> alpha_grid =
      space.free_alpha ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}
                       : std::vector<double>{*fixed_alpha};
  const std::vector<double> ratio_grid = {0.1, 0.4, 0.7, 0.95};
  const std::vector<double> beta_grid = space.free_beta ? ratio_grid : std::vector<double>{0.5};
  const std::vector<double> gamma_grid = space.free_gamma ? ratio_grid : std::vector<double>{0.5};
  const std::vector<double> phi_grid =
      space.free_phi ? std::vector<double>{0.85, 0.9, 0.95, 0.98} : std::vector<double>{0.95};

  double best_sse = kInf;
  double a = alpha_grid[0], rb = beta_grid[0], rg = gamma_grid[0], ph = phi_grid[0];
  for (double ga : alpha_grid) {
    for (double grb : beta_grid) {
      for (double grg : gamma_grid) {
        for (double gph : phi_grid) {
          const double s = sse_at(ga, grb, grg, gph);
          if (s < best_sse) {
            best_sse = s;
            a = ga;
            rb = grb;
            rg = grg;
            ph = gph;
          }
        }
      }
    }
  }
  // Coordinate refinement around the best grid point.
  for (int round = 0; round < 2; ++round) {
    if (space.free_alpha)
      a = golden_min([&](double v) { return sse_at(v, rb, rg, ph); }, 0.0001, 0.9999);
    if (space.free_beta)
      rb = golden_min([&](double v) { return sse_at(a, v, rg, ph); }, 0.0001, 0.9999);
    if (space.free_gamma)
      rg = golden_min([&](double v) { return sse_at(a, rb, v, ph); }, 0.0001, 0.9999);
    if (space.free_phi)
      ph = golden_min([&](double v) { return sse_at(a, rb, rg, v); }, 0.8, 0.98);
  }
  return resolve(c, a, rb, rg, ph);
}

int ets_param_count(const EtsComponents& c, int season_len, bool alpha_fixed) {
  int smoothing = (alpha_fixed ? 0 : 1) + (c.trend ? 1 : 0) + (c.seasonal ? 1 : 0) +
                  (c.damped ? 1 : 0);
  int states = 1 + (c.trend ? 1 : 0) + (c.seasonal ? season_len : 0);
  return smoothing + states + 1;  // +1 for the residual variance
}

double aicc(double sse, int n, int k) {
  if (n - k - 1 <= 0) return kInf;
  const double lik = n * std::log(std::max(sse, 1e-300) / n);
  return lik + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0);
}

EtsState fit_ets_series(std::span<const double> y, const LocalModelSpec& spec, int season_len,
                        std::vector<double>& residuals_out) {
  std::vector<EtsComponents> grid = spec.ets_grid;
  if (grid.empty()) {
    grid = {{false, false, false}, {true, false, false}};
    if (spec.damping) grid.push_back({true, true, false});
    if (season_len > 1) {
      grid.push_back({false, false, true});
      grid.push_back({true, false, true});
      if (spec.damping) grid.push_back({true, true, true});
    }
  }
  // Seasonal candidates need s > 1 and two full cycles; drop them per series.
  std::vector<EtsComponents> usable;
  for (const auto& c : grid) {
    if (c.seasonal &&
        (season_len <= 1 || y.size() < 2 * static_cast<std::size_t>(season_len)))
      continue;
    usable.push_back(c);
  }
  if (usable.empty()) usable.push_back({false, false, false});

  EtsState best;
  double best_aicc = kInf;
  bool first = true;
  std::vector<double> best_resid;
  for (const auto& c : usable) {
    const EtsParams p = optimize_ets(y, c, season_len, spec.fixed_alpha);
    EtsRun run = ets_run(y, c, season_len, p, true);
    const int k = ets_param_count(c, season_len, spec.fixed_alpha.has_value());
    const double score = aicc(run.sse, static_cast<int>(y.size()), k);
    if (first || score < best_aicc) {
      first = false;
      best_aicc = score;
      best.components = c;
      best.alpha = p.alpha;
      best.beta = p.beta;
      best.gamma = p.gamma;
      best.phi = c.damped ? p.phi : 1.0;
      best.level = run.level;
      best.trend = run.trend;
      best.season = c.seasonal ? run.season : std::vector<double>{};
      best.steps_seen = static_cast<int>(y.size());
      best.aicc = score;
      best_resid = std::move(run.residuals);
    }
  }
  residuals_out = std::move(best_resid);
  return best;
}

// Forecast-variance multipliers 1 + sum_{j<h} c_j^2 from the linear
// state-space form; c_j = w F^{j-1} g.
std::vector<double> ets_variance_multipliers(const EtsState& st, int horizon) {
  const bool trend = st.components.trend;
  const bool seasonal = st.components.seasonal;
  const int m = seasonal ? static_cast<int>(st.season.size()) : 0;
  const int dim = 1 + (trend ? 1 : 0) + m;
  const double phi = st.phi;

  std::vector<double> w(dim, 0.0), g(dim, 0.0);
  std::vector<std::vector<double>> F(dim, std::vector<double>(dim, 0.0));
  w[0] = 1.0;
  g[0] = st.alpha;
  F[0][0] = 1.0;
  if (trend) {
    w[1] = phi;
    g[1] = st.beta;
    F[0][1] = phi;
    F[1][1] = phi;
  }
  if (seasonal) {
    const int s0 = 1 + (trend ? 1 : 0);  // first seasonal slot
    w[s0 + m - 1] = 1.0;                 // observation reads s_{t-m+1}
    g[s0] = st.gamma;
    F[s0][s0 + m - 1] = 1.0;             // new seasonal state recycles the oldest
    for (int j = 1; j < m; ++j) F[s0 + j][s0 + j - 1] = 1.0;
  }

  std::vector<double> mult(horizon, 1.0);
  std::vector<double> u = w, next(dim);
  double acc = 0.0;
  for (int h = 2; h <= horizon; ++h) {
    double c = 0.0;
    for (int i = 0; i < dim; ++i) c += u[i] * g[i];
    acc += c * c;
    mult[h - 1] = 1.0 + acc;
    for (int j = 0; j < dim; ++j) {
      double v = 0.0;
      for (int i = 0; i < dim; ++i) v += u[i] * F[i][j];
      next[j] = v;
    }
    u.swap(next);
  }
  return mult;
}

// ---------------------------------------------------------------------------
// Theta: OLS trend line (theta=0) plus SES on the theta=2 line, averaged,
// with an additive b/2 drift correction so exactly linear series continue
// their line. Seasonal series are handled by multiplicative classical
// decomposition when the lag-s autocorrelation test fires.
// ---------------------------------------------------------------------------

double lag_autocorrelation(std::span<const double> y, int lag) {
  const std::size_t n = y.size();
  const double mu = mean_of(y);
  double denom = 0.0;
  for (double v : y) denom += (v - mu) * (v - mu);
  if (denom == 0.0) return 0.0;
  double num = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) num += (y[t] - mu) * (y[t + lag] - mu);
  return num / denom;
}

std::vector<double> seasonal_indices(std::span<const double> y, int s) {
  const std::size_t n = y.size();
  std::vector<double> sums(s, 0.0);
  std::vector<int> counts(s, 0);
  const int half = s / 2;
  for (std::size_t t = half; t + half < n; ++t) {
    double ma;
    if (s % 2 == 0) {
      double acc = 0.5 * y[t - half] + 0.5 * y[t + half];
      for (int j = -half + 1; j <= half - 1; ++j) acc += y[t + j];
      ma = acc / s;
    } else {
      double acc = 0.0;
      for (int j = -half; j <= half; ++j) acc += y[t + j];
      ma = acc / s;
    }
    if (ma <= 0.0) return {};
    sums[t % s] += y[t] / ma;
    counts[t % s] += 1;
  }
  std::vector<double> idx(s);
  double total = 0.0;
  for (int p = 0; p < s; ++p) {
    if (counts[p] == 0) return {};
    idx[p] = sums[p] / counts[p];
    total += idx[p];
  }
  if (total <= 0.0) return {};
  for (auto& v : idx) v *= s / total;
  for (double v : idx)
    if (v < 1e-10) return {};
  return idx;
}

struct SesFit {
  double alpha = 1.0;
  double level = 0.0;
};

// SES with the boundary alpha=1 admitted exactly (pure pass-through).
SesFit ses_fit(std::span<const double> z) {
  auto sse_at = [&](double alpha) {
    double level = z[0], sse = 0.0;
    for (std::size_t t = 1; t < z.size(); ++t) {
      const double e = z[t] - level;
      sse += e * e;
      level = alpha == 1.0 ? z[t] : level + alpha * e;
    }
    return sse;
  };
  double alpha = golden_min(sse_at, 0.01, 0.9999);
  if (sse_at(1.0) < sse_at(alpha)) alpha = 1.0;
  double level = z[0];
  for (std::size_t t = 1; t < z.size(); ++t)
    level = alpha == 1.0 ? z[t] : level + alpha * (z[t] - level);
  return {alpha, level};
}

ThetaState fit_theta_series(std::span<const double> y, int season_len,
                            std::vector<double>& residuals_out) {
  const std::size_t n = y.size();
  ThetaState st;
  st.length = static_cast<int>(n);

  if (season_len > 1 && n >= 2 * static_cast<std::size_t>(season_len) &&
      std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; })) {
    const double r = lag_autocorrelation(y, season_len);
    if (r > 1.645 / std::sqrt(static_cast<double>(n)))
      st.seasonal_index = seasonal_indices(y, season_len);
  }

  std::vector<double> x(y.begin(), y.end());
  if (!st.seasonal_index.empty())
    for (std::size_t t = 0; t < n; ++t) x[t] /= st.seasonal_index[t % season_len];

  // OLS of the deseasonalized series on t = 0..n-1.
  const double tbar = (n - 1) / 2.0;
  const double xbar = mean_of(x);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    sxx += (t - tbar) * (t - tbar);
    sxy += (t - tbar) * (x[t] - xbar);
  }
  st.slope = sxx == 0.0 ? 0.0 : sxy / sxx;
  st.intercept = xbar - st.slope * tbar;

  std::vector<double> z(n);
  for (std::size_t t = 0; t < n; ++t) z[t] = 2.0 * x[t] - (st.intercept + st.slope * t);
  const SesFit ses = ses_fit(z);
  st.ses_alpha = ses.alpha;
  st.ses_level = ses.level;

  // One-step in-sample residuals of the combined forecast.
  residuals_out.clear();
  residuals_out.reserve(n - 1);
  double level = z[0];
  for (std::size_t t = 1; t < n; ++t) {
    double fitted = 0.5 * (st.intercept + st.slope * t) + 0.5 * level + 0.5 * st.slope;
    if (!st.seasonal_index.empty()) fitted *= st.seasonal_index[t % season_len];
    residuals_out.push_back(y[t] - fitted);
    level = ses.alpha == 1.0 ? z[t] : level + ses.alpha * (z[t] - level);
  }
  return st;
}

}  // namespace

const char* local_kind_name(LocalKind k) {
  switch (k) {
    case LocalKind::Naive: return "Naive";
    case LocalKind::SeasonalNaive: return "SeasonalNaive";
    case LocalKind::Ets: return "ETS";
    case LocalKind::Theta: return "Theta";
  }
  return "?";
}

LocalModelSpec LocalModelSpec::ets(bool damping) {
  LocalModelSpec spec;
  spec.kind = LocalKind::Ets;
  spec.damping = damping;
  return spec;  // empty grid = default grid, resolved per fit
}

TrainedLocalModel fit_local(const LocalModelSpec& spec, const TimeSeriesFrame& train,
                            const Budget& budget) {
  std::string offenders;
  for (std::size_t i = 0; i < train.size(); ++i)
    if (train.at(i).length() < 2) offenders += (offenders.empty() ? "" : ", ") + train.id(i);
  if (!offenders.empty())
    fail(ErrorCode::SeriesTooShort, "series too short to fit (need >= 2 points): " + offenders);

  TrainedLocalModel model;
  model.spec = spec;
  model.frequency = train.frequency();
  model.season = train.season();
  model.ids = train.ids();
  model.forecast_starts.resize(train.size());
  model.states.resize(train.size());

  const int s = model.season;
  parallel_for(train.size(), [&](std::size_t i) {
    budget.check();
    const std::vector<double>& y = train.at(i).target;
    const std::size_t n = y.size();
    LocalSeriesState state;
    std::vector<double> resid;
    switch (spec.kind) {
      case LocalKind::Naive: {
        resid.reserve(n - 1);
        for (std::size_t t = 1; t < n; ++t) resid.push_back(y[t] - y[t - 1]);
        state.params = NaiveState{y[n - 1]};
        break;
      }
      case LocalKind::SeasonalNaive: {
        const int used = (s > 1 && n >= 2 * static_cast<std::size_t>(s)) ? s : 1;
        resid.reserve(n - used);
        for (std::size_t t = used; t < n; ++t) resid.push_back(y[t] - y[t - used]);
        SeasonalNaiveState sn;
        sn.season_used = used;
        sn.last_season.assign(y.end() - used, y.end());
        state.params = std::move(sn);
        break;
      }
      case LocalKind::Ets: {
        state.params = fit_ets_series(y, spec, s, resid);
        break;
      }
      case LocalKind::Theta: {
        state.params = fit_theta_series(y, s, resid);
        break;
      }
    }
    state.sigma = rms(resid);
    model.states[i] = std::move(state);
    model.forecast_starts[i] = train.forecast_start(i);
  });
  return model;
}

ForecastFrame predict_local(const TrainedLocalModel& model, int horizon,
                            const QuantileLevels& levels) {
  if (model.states.empty() || model.states.size() != model.ids.size())
    fail(ErrorCode::NotFitted, "local model has no fitted states");
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");

  std::vector<double> z(levels.size());
  for (std::size_t li = 0; li < levels.size(); ++li) z[li] = normal_quantile(levels[li]);

  ForecastFrame out;
  out.frequency = model.frequency;
  out.levels = levels.values();
  out.blocks.resize(model.ids.size());

  parallel_for(model.ids.size(), [&](std::size_t i) {
    const LocalSeriesState& st = model.states[i];
    ForecastFrame::Block block;
    block.id = model.ids[i];
    block.start = model.forecast_starts[i];
    block.mean.resize(horizon);
    std::vector<double> mult(horizon, 1.0);  // variance multiplier per step

    if (const auto* naive = std::get_if<NaiveState>(&st.params)) {
      for (int h = 1; h <= horizon; ++h) {
        block.mean[h - 1] = naive->last;
        mult[h - 1] = static_cast<double>(h);
      }
    } else if (const auto* sn = std::get_if<SeasonalNaiveState>(&st.params)) {
      const int used = sn->season_used;
      for (int h = 1; h <= horizon; ++h) {
        block.mean[h - 1] = sn->last_season[(h - 1) % used];
        mult[h - 1] = static_cast<double>((h + used - 1) / used);
      }
    } else if (const auto* ets = std::get_if<EtsState>(&st.params)) {
      double phisum = 0.0, phipow = 1.0;
      const int m = ets->components.seasonal ? static_cast<int>(ets->season.size()) : 1;
      for (int h = 1; h <= horizon; ++h) {
        phipow *= ets->components.damped ? ets->phi : 1.0;
        phisum += phipow;
        double v = ets->level + (ets->components.trend ? phisum * ets->trend : 0.0);
        if (ets->components.seasonal) v += ets->season[(ets->steps_seen + h - 1) % m];
        block.mean[h - 1] = v;
      }
      mult = ets_variance_multipliers(*ets, horizon);
    } else if (const auto* theta = std::get_if<ThetaState>(&st.params)) {
      const int n = theta->length;
      const int s = model.season;
      for (int h = 1; h <= horizon; ++h) {
        double v = 0.5 * (theta->intercept + theta->slope * (n - 1 + h)) +
                   0.5 * theta->ses_level + 0.5 * theta->slope * h;
        if (!theta->seasonal_index.empty()) v *= theta->seasonal_index[(n - 1 + h) % s];
        block.mean[h - 1] = v;
        mult[h - 1] = static_cast<double>(h);
      }
    }

    block.quantiles.assign(levels.size(), std::vector<double>(horizon));
    for (std::size_t li = 0; li < levels.size(); ++li)
      for (int h = 0; h < horizon; ++h)
        block.quantiles[li][h] = block.mean[h] + z[li] * st.sigma * std::sqrt(mult[h]);
    out.blocks[i] = std::move(block);
  });
  return out;
}

}  // namespace chronocast
