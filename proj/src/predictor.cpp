#include "chronocast/predictor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chronocast/textio.hpp"

namespace chronocast {

using nlohmann::json;

std::optional<Preset> preset_from_string(const std::string& name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "fast") return Preset::Fast;
  if (lower == "medium") return Preset::Medium;
  if (lower == "best") return Preset::Best;
  return std::nullopt;
}

const char* preset_name(Preset p) {
  switch (p) {
    case Preset::Fast: return "fast";
    case Preset::Medium: return "medium";
    case Preset::Best: return "best";
  }
  return "?";
}

std::vector<CandidateSpec> preset_candidates(const TaskConfig& task,
                                             const TimeSeriesFrame& train) {
  const int s = train.season();
  // Shortest training slice any validation window will see; the default lag
  // list must stay below it or the global candidates cannot fit at all.
  const std::size_t need = static_cast<std::size_t>(task.prediction_length) * task.num_windows;
  const std::size_t min_train = train.min_length() > need ? train.min_length() - need : 0;

  std::vector<CandidateSpec> out;
  out.push_back(local_candidate("SeasonalNaive", LocalModelSpec::seasonal_naive()));
  out.push_back(local_candidate("Naive", LocalModelSpec::naive()));
  out.push_back(local_candidate("Theta", LocalModelSpec::theta()));
  if (task.preset == Preset::Fast) return out;

  out.push_back(local_candidate("ETS", LocalModelSpec::ets(false)));
  GlobalModelSpec recursive;
  recursive.strategy = GlobalStrategy::Recursive;
  recursive.lags = GlobalModelSpec::default_lags(s, min_train);
  recursive.hp.seed = static_cast<std::uint64_t>(task.seed);
  out.push_back(global_candidate("GlobalLinear-Recursive", recursive));
  if (task.preset == Preset::Medium) return out;

  GlobalModelSpec direct = recursive;
  direct.strategy = GlobalStrategy::Direct;
  out.push_back(global_candidate("GlobalLinear-Direct", direct));
  out.push_back(local_candidate("ETS-Damped", LocalModelSpec::ets(true)));
  return out;
}

namespace {

void validate_task(const TaskConfig& task, const TimeSeriesFrame& train) {
  if (task.prediction_length < 1)
    fail(ErrorCode::InvalidArgument, "prediction length must be >= 1");
  if (!(task.time_limit_seconds > 0))
    fail(ErrorCode::InvalidArgument, "time limit must be positive");
  if (task.num_windows < 1) fail(ErrorCode::InvalidArgument, "num_windows must be >= 1");
  if (task.eval_metric == EvalMetric::MASE && !task.quantile_levels.contains(0.5))
    fail(ErrorCode::MissingLevel, "MASE scoring needs the 0.5 quantile level");
  if (train.empty()) fail(ErrorCode::EmptyData, "training frame has no series");
  std::string offenders;
  for (std::size_t i = 0; i < train.size(); ++i)
    if (train.at(i).length() <= static_cast<std::size_t>(task.prediction_length))
      offenders += (offenders.empty() ? "" : ", ") + train.id(i);
  if (!offenders.empty())
    fail(ErrorCode::SeriesTooShort,
         "series not longer than the prediction length: " + offenders);
}

LeaderboardRow row_from_outcome(const CandidateOutcome& c) {
  LeaderboardRow row;
  row.model = c.name;
  row.score = c.status == CandidateStatus::Ok ? c.score
                                              : std::numeric_limits<double>::quiet_NaN();
  row.fit_seconds = c.fit_seconds;
  row.predict_seconds = c.predict_seconds;
  row.status = candidate_status_name(c.status);
  row.detail = c.detail;
  return row;
}

}  // namespace

PredictorArtifact fit(const TaskConfig& task, const TimeSeriesFrame& train) {
  return fit(task, train, preset_candidates(task, train));
}

PredictorArtifact fit(const TaskConfig& task, const TimeSeriesFrame& train,
                      const std::vector<CandidateSpec>& candidates) {
  validate_task(task, train);
  const Budget total_budget(task.time_limit_seconds);
  // 5% of the limit is reserved for ensembling and the full-data refits.
  const Budget eval_budget(task.time_limit_seconds * 0.95);

  ValidationReport report =
      evaluate_candidates(candidates, train, task.prediction_length, task.num_windows,
                          task.eval_metric, task.quantile_levels, eval_budget);

  const auto t_ens = std::chrono::steady_clock::now();
  EnsembleWeights weights = forward_select(report.successful_oof(), report.windows,
                                           task.eval_metric, task.quantile_levels, 100);
  const double ensemble_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_ens).count();

  PredictorArtifact artifact;
  artifact.task = task;
  artifact.frequency = train.frequency();
  artifact.season = train.season();
  if (!train.empty()) {
    for (const auto& [name, _] : train.at(0).past_covariates)
      artifact.past_covariate_names.push_back(name);
    for (const auto& [name, _] : train.at(0).static_covariates)
      artifact.static_covariate_names.push_back(name);
  }
  artifact.ensemble_fit_seconds = ensemble_seconds;
  for (const auto& c : report.candidates) artifact.validation.push_back(row_from_outcome(c));

  // Refit every supported member on the full training data. A member that
  // cannot be refit under what is left of the budget is dropped and the
  // remaining weights renormalized.
  std::map<std::string, double> kept;
  int remaining = static_cast<int>(weights.weights.size());
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    auto it = weights.weights.find(candidates[ci].name);
    if (it == weights.weights.end()) continue;
    Budget refit_budget;  // first candidate refits uncapped, like validation
    if (ci > 0 && total_budget.limited())
      refit_budget = Budget(allocate_budget(total_budget.remaining_seconds(), remaining));
    --remaining;
    try {
      artifact.members.push_back(candidates[ci].fit(train, task.prediction_length,
                                                    task.quantile_levels, refit_budget));
      kept[it->first] = it->second;
    } catch (const std::exception&) {
      // dropped; weight mass reassigned below
    }
  }
  if (artifact.members.empty()) {
    // Last resort: refit successful candidates uncapped, best score first.
    std::vector<const CandidateOutcome*> ok;
    for (const auto& c : report.candidates)
      if (c.status == CandidateStatus::Ok) ok.push_back(&c);
    std::stable_sort(ok.begin(), ok.end(),
                     [](const auto* a, const auto* b) { return a->score < b->score; });
    for (const auto* c : ok) {
      for (const auto& spec : candidates) {
        if (spec.name != c->name) continue;
        try {
          artifact.members.push_back(
              spec.fit(train, task.prediction_length, task.quantile_levels, Budget()));
          kept[c->name] = 1.0;
        } catch (const std::exception&) {
        }
        break;
      }
      if (!artifact.members.empty()) break;
    }
    if (artifact.members.empty())
      fail(ErrorCode::AllModelsFailed, "no supported member could be refit on the full data");
  }
  double mass = 0.0;
  for (const auto& [_, w] : kept) mass += w;
  artifact.weights.step_count = weights.step_count;
  artifact.weights.score = weights.score;
  for (const auto& [name, w] : kept) artifact.weights.weights[name] = w / mass;
  return artifact;
}

ForecastFrame predict(const PredictorArtifact& artifact, const TimeSeriesFrame& frame) {
  if (frame.frequency() != artifact.frequency)
    fail(ErrorCode::FrequencyMismatch,
         std::string("frame frequency ") + frequency_code(frame.frequency()) +
             " does not match artifact frequency " + frequency_code(artifact.frequency));
  std::map<std::string, ForecastFrame> forecasts;
  for (const auto& member : artifact.members) {
    if (artifact.weights.weight_of(member.name) <= 0.0) continue;
    forecasts[member.name] = forecast_frame(member, frame, artifact.task.prediction_length,
                                            artifact.task.quantile_levels);
  }
  return combine(artifact.weights, forecasts);
}

std::vector<LeaderboardRow> leaderboard(const PredictorArtifact& artifact) {
  std::vector<LeaderboardRow> rows = artifact.validation;
  LeaderboardRow ens;
  ens.model = "WeightedEnsemble";
  ens.score = artifact.weights.score;
  ens.fit_seconds = artifact.ensemble_fit_seconds;
  ens.predict_seconds = 0.0;
  ens.status = "ok";
  rows.push_back(ens);

  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const std::size_t ens_index = rows.size() - 1;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double sa = std::isnan(rows[a].score) ? std::numeric_limits<double>::infinity()
                                                : rows[a].score;
    const double sb = std::isnan(rows[b].score) ? std::numeric_limits<double>::infinity()
                                                : rows[b].score;
    if (sa != sb) return sa < sb;
    return (a == ens_index) > (b == ens_index);  // ensemble wins exact ties
  });
  std::vector<LeaderboardRow> sorted;
  for (std::size_t i : idx) sorted.push_back(rows[i]);
  return sorted;
}

double evaluate(const PredictorArtifact& artifact, const TimeSeriesFrame& data,
                std::optional<EvalMetric> metric) {
  auto [train, holdout] = split_last(data, artifact.task.prediction_length);
  ForecastFrame fc = predict(artifact, train);
  return metric_score(metric.value_or(artifact.task.eval_metric), artifact.task.quantile_levels,
                      holdout, fc, train, artifact.season);
}

// ---------------------------------------------------------------------------
// Persistence: manifest.json plus one JSON state file per member.
// ---------------------------------------------------------------------------

namespace {

json timestamp_to_json(const DateTime& t) { return format_timestamp(t, Frequency::Hourly); }

DateTime timestamp_from_json(const json& j) { return parse_timestamp(j.get<std::string>()); }

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json local_state_to_json(const LocalSeriesState& st) {
  json out;
  out["sigma"] = st.sigma;
  if (const auto* naive = std::get_if<NaiveState>(&st.params)) {
    out["family"] = "naive";
    out["last"] = naive->last;
  } else if (const auto* sn = std::get_if<SeasonalNaiveState>(&st.params)) {
    out["family"] = "seasonal_naive";
    out["season_used"] = sn->season_used;
    out["last_season"] = sn->last_season;
  } else if (const auto* ets = std::get_if<EtsState>(&st.params)) {
    out["family"] = "ets";
    out["trend"] = ets->components.trend;
    out["damped"] = ets->components.damped;
    out["seasonal"] = ets->components.seasonal;
    out["alpha"] = ets->alpha;
    out["beta"] = ets->beta;
    out["gamma"] = ets->gamma;
    out["phi"] = ets->phi;
    out["level"] = ets->level;
    out["trend_state"] = ets->trend;
    out["season"] = ets->season;
    out["steps_seen"] = ets->steps_seen;
    out["aicc"] = number_or_null(ets->aicc);
  } else if (const auto* theta = std::get_if<ThetaState>(&st.params)) {
    out["family"] = "theta";
    out["intercept"] = theta->intercept;
    out["slope"] = theta->slope;
    out["ses_level"] = theta->ses_level;
    out["ses_alpha"] = theta->ses_alpha;
    out["length"] = theta->length;
    out["seasonal_index"] = theta->seasonal_index;
  }
  return out;
}

LocalSeriesState local_state_from_json(const json& j) {
  LocalSeriesState st;
  st.sigma = j.at("sigma").get<double>();
  const std::string family = j.at("family").get<std::string>();
  if (family == "naive") {
    st.params = NaiveState{j.at("last").get<double>()};
  } else if (family == "seasonal_naive") {
    SeasonalNaiveState sn;
    sn.season_used = j.at("season_used").get<int>();
    sn.last_season = j.at("last_season").get<std::vector<double>>();
    st.params = std::move(sn);
  } else if (family == "ets") {
    EtsState ets;
    ets.components.trend = j.at("trend").get<bool>();
    ets.components.damped = j.at("damped").get<bool>();
    ets.components.seasonal = j.at("seasonal").get<bool>();
    ets.alpha = j.at("alpha").get<double>();
    ets.beta = j.at("beta").get<double>();
    ets.gamma = j.at("gamma").get<double>();
    ets.phi = j.at("phi").get<double>();
    ets.level = j.at("level").get<double>();
    ets.trend = j.at("trend_state").get<double>();
    ets.season = j.at("season").get<std::vector<double>>();
    ets.steps_seen = j.at("steps_seen").get<int>();
    ets.aicc = number_from(j.at("aicc"));
    st.params = std::move(ets);
  } else if (family == "theta") {
    ThetaState theta;
    theta.intercept = j.at("intercept").get<double>();
    theta.slope = j.at("slope").get<double>();
    theta.ses_level = j.at("ses_level").get<double>();
    theta.ses_alpha = j.at("ses_alpha").get<double>();
    theta.length = j.at("length").get<int>();
    theta.seasonal_index = j.at("seasonal_index").get<std::vector<double>>();
    st.params = std::move(theta);
  } else {
    fail(ErrorCode::ArtifactCorrupt, "unknown local state family '" + family + "'");
  }
  return st;
}

json member_to_json(const MemberModel& member) {
  json out;
  out["format_version"] = 1;
  out["name"] = member.name;
  if (const auto* local = std::get_if<TrainedLocalModel>(&member.state)) {
    out["type"] = "local";
    out["kind"] = local_kind_name(local->spec.kind);
    out["damping"] = local->spec.damping;
    if (local->spec.fixed_alpha) out["fixed_alpha"] = *local->spec.fixed_alpha;
    else out["fixed_alpha"] = nullptr;
    json grid = json::array();
    for (const auto& c : local->spec.ets_grid)
      grid.push_back({{"trend", c.trend}, {"damped", c.damped}, {"seasonal", c.seasonal}});
    out["ets_grid"] = grid;
    out["frequency"] = std::string(1, frequency_code(local->frequency));
    out["season"] = local->season;
    json series = json::array();
    for (std::size_t i = 0; i < local->ids.size(); ++i) {
      json s = local_state_to_json(local->states[i]);
      s["id"] = local->ids[i];
      s["forecast_start"] = timestamp_to_json(local->forecast_starts[i]);
      series.push_back(std::move(s));
    }
    out["series"] = std::move(series);
  } else {
    const auto& g = std::get<TrainedGlobalModel>(member.state);
    out["type"] = "global";
    out["strategy"] = global_strategy_name(g.spec.strategy);
    out["lags"] = g.spec.lags;
    out["hp"] = {{"epochs", g.spec.hp.epochs},
                 {"learning_rate", g.spec.hp.learning_rate},
                 {"l2", g.spec.hp.l2},
                 {"seed", g.spec.hp.seed}};
    out["frequency"] = std::string(1, frequency_code(g.frequency));
    out["horizon"] = g.horizon;
    out["levels"] = g.levels;
    json schema;
    schema["lags"] = g.schema.lags;
    schema["past_covariates"] = g.schema.past_covariates;
    schema["known_covariates"] = g.schema.known_covariates;
    schema["calendar_cardinality"] = g.schema.calendar_cardinality;
    json cats = json::array();
    for (const auto& [name, values] : g.schema.static_categories)
      cats.push_back({{"name", name}, {"categories", values}});
    schema["static_categories"] = cats;
    schema["static_numeric"] = g.schema.static_numeric;
    out["schema"] = schema;
    out["feature_mean"] = g.feature_mean;
    out["feature_scale"] = g.feature_scale;
    out["target_mean"] = g.target_mean;
    out["target_scale"] = g.target_scale;
    json heads = json::array();
    for (const auto& group : g.heads) {
      json jg = json::array();
      for (const auto& head : group)
        jg.push_back({{"coef", head.coef}, {"intercept", head.intercept}});
      heads.push_back(std::move(jg));
    }
    out["heads"] = std::move(heads);
    out["final_loss"] = g.final_loss;
  }
  return out;
}

MemberModel member_from_json(const json& j) {
  MemberModel member;
  member.name = j.at("name").get<std::string>();
  const std::string type = j.at("type").get<std::string>();
  if (type == "local") {
    TrainedLocalModel local;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "Naive") local.spec.kind = LocalKind::Naive;
    else if (kind == "SeasonalNaive") local.spec.kind = LocalKind::SeasonalNaive;
    else if (kind == "ETS") local.spec.kind = LocalKind::Ets;
    else if (kind == "Theta") local.spec.kind = LocalKind::Theta;
    else fail(ErrorCode::ArtifactCorrupt, "unknown local kind '" + kind + "'");
    local.spec.damping = j.at("damping").get<bool>();
    if (!j.at("fixed_alpha").is_null()) local.spec.fixed_alpha = j.at("fixed_alpha").get<double>();
    for (const auto& c : j.at("ets_grid"))
      local.spec.ets_grid.push_back({c.at("trend").get<bool>(), c.at("damped").get<bool>(),
                                     c.at("seasonal").get<bool>()});
    auto freq = frequency_from_string(j.at("frequency").get<std::string>());
    if (!freq) fail(ErrorCode::ArtifactCorrupt, "bad frequency in member state");
    local.frequency = *freq;
    local.season = j.at("season").get<int>();
    for (const auto& s : j.at("series")) {
      local.ids.push_back(s.at("id").get<std::string>());
      local.forecast_starts.push_back(timestamp_from_json(s.at("forecast_start")));
      local.states.push_back(local_state_from_json(s));
    }
    member.state = std::move(local);
  } else if (type == "global") {
    TrainedGlobalModel g;
    g.spec.strategy = j.at("strategy").get<std::string>() == "Direct" ? GlobalStrategy::Direct
                                                                      : GlobalStrategy::Recursive;
    g.spec.lags = j.at("lags").get<std::vector<int>>();
    g.spec.hp.epochs = j.at("hp").at("epochs").get<int>();
    g.spec.hp.learning_rate = j.at("hp").at("learning_rate").get<double>();
    g.spec.hp.l2 = j.at("hp").at("l2").get<double>();
    g.spec.hp.seed = j.at("hp").at("seed").get<std::uint64_t>();
    auto freq = frequency_from_string(j.at("frequency").get<std::string>());
    if (!freq) fail(ErrorCode::ArtifactCorrupt, "bad frequency in member state");
    g.frequency = *freq;
    g.horizon = j.at("horizon").get<int>();
    g.levels = j.at("levels").get<std::vector<double>>();
    const json& schema = j.at("schema");
    g.schema.lags = schema.at("lags").get<std::vector<int>>();
    g.schema.past_covariates = schema.at("past_covariates").get<std::vector<std::string>>();
    g.schema.known_covariates = schema.at("known_covariates").get<std::vector<std::string>>();
    g.schema.calendar_cardinality = schema.at("calendar_cardinality").get<int>();
    for (const auto& c : schema.at("static_categories"))
      g.schema.static_categories.emplace_back(
          c.at("name").get<std::string>(), c.at("categories").get<std::vector<std::string>>());
    g.schema.static_numeric = schema.at("static_numeric").get<std::vector<std::string>>();
    g.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    g.feature_scale = j.at("feature_scale").get<std::vector<double>>();
    g.target_mean = j.at("target_mean").get<double>();
    g.target_scale = j.at("target_scale").get<double>();
    for (const auto& jg : j.at("heads")) {
      std::vector<LinearHead> group;
      for (const auto& jh : jg) {
        LinearHead head;
        head.coef = jh.at("coef").get<std::vector<double>>();
        head.intercept = jh.at("intercept").get<double>();
        group.push_back(std::move(head));
      }
      g.heads.push_back(std::move(group));
    }
    g.final_loss = j.at("final_loss").get<double>();
    g.fitted = true;
    member.state = std::move(g);
  } else {
    fail(ErrorCode::ArtifactCorrupt, "unknown member type '" + type + "'");
  }
  return member;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

void save_artifact(const PredictorArtifact& artifact, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "models", ec);
  if (ec) fail(ErrorCode::IoError, "cannot create artifact directory '" + dir + "'");

  json manifest;
  manifest["format_version"] = artifact.format_version;
  manifest["frequency"] = std::string(1, frequency_code(artifact.frequency));
  manifest["season"] = artifact.season;
  manifest["task"] = {{"prediction_length", artifact.task.prediction_length},
                      {"quantile_levels", artifact.task.quantile_levels.values()},
                      {"eval_metric", metric_name(artifact.task.eval_metric)},
                      {"time_limit_seconds", artifact.task.time_limit_seconds},
                      {"preset", preset_name(artifact.task.preset)},
                      {"known_covariates", artifact.task.known_covariate_names},
                      {"num_windows", artifact.task.num_windows},
                      {"seed", artifact.task.seed}};
  manifest["covariates"] = {{"past", artifact.past_covariate_names},
                            {"static", artifact.static_covariate_names}};
  manifest["ensemble"] = {{"weights", artifact.weights.weights},
                          {"step_count", artifact.weights.step_count},
                          {"score", number_or_null(artifact.weights.score)},
                          {"fit_seconds", artifact.ensemble_fit_seconds}};
  json rows = json::array();
  for (const auto& r : artifact.validation)
    rows.push_back({{"model", r.model},
                    {"score", number_or_null(r.score)},
                    {"fit_seconds", r.fit_seconds},
                    {"predict_seconds", r.predict_seconds},
                    {"status", r.status},
                    {"detail", r.detail}});
  manifest["leaderboard"] = rows;
  json member_names = json::array();
  for (const auto& m : artifact.members) member_names.push_back(m.name);
  manifest["members"] = member_names;

  write_text(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
  for (const auto& m : artifact.members)
    write_text(fs::path(dir) / "models" / (m.name + ".json"),
               member_to_json(m).dump(2) + "\n");
}

PredictorArtifact load_artifact(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::ArtifactCorrupt, "cannot open artifact manifest '" +
                                                manifest_path.string() + "'");
  json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    fail(ErrorCode::ArtifactCorrupt,
         "cannot parse '" + manifest_path.string() + "': " + e.what());
  }
  PredictorArtifact artifact;
  try {
    artifact.format_version = manifest.at("format_version").get<int>();
    auto freq = frequency_from_string(manifest.at("frequency").get<std::string>());
    if (!freq) fail(ErrorCode::ArtifactCorrupt, "bad frequency in manifest");
    artifact.frequency = *freq;
    artifact.season = manifest.at("season").get<int>();
    const json& task = manifest.at("task");
    artifact.task.prediction_length = task.at("prediction_length").get<int>();
    artifact.task.quantile_levels =
        QuantileLevels(task.at("quantile_levels").get<std::vector<double>>());
    auto metric = metric_from_string(task.at("eval_metric").get<std::string>());
    if (!metric) fail(ErrorCode::ArtifactCorrupt, "bad metric in manifest");
    artifact.task.eval_metric = *metric;
    artifact.task.time_limit_seconds = task.at("time_limit_seconds").get<double>();
    auto preset = preset_from_string(task.at("preset").get<std::string>());
    if (!preset) fail(ErrorCode::ArtifactCorrupt, "bad preset in manifest");
    artifact.task.preset = *preset;
    artifact.task.known_covariate_names =
        task.at("known_covariates").get<std::vector<std::string>>();
    artifact.task.num_windows = task.at("num_windows").get<int>();
    artifact.task.seed = task.at("seed").get<std::int64_t>();
    artifact.past_covariate_names =
        manifest.at("covariates").at("past").get<std::vector<std::string>>();
    artifact.static_covariate_names =
        manifest.at("covariates").at("static").get<std::vector<std::string>>();
    const json& ens = manifest.at("ensemble");
    for (const auto& [name, w] : ens.at("weights").items())
      artifact.weights.weights[name] = w.get<double>();
    artifact.weights.step_count = ens.at("step_count").get<int>();
    artifact.weights.score = number_from(ens.at("score"));
    artifact.ensemble_fit_seconds = ens.at("fit_seconds").get<double>();
    for (const auto& r : manifest.at("leaderboard")) {
      LeaderboardRow row;
      row.model = r.at("model").get<std::string>();
      row.score = number_from(r.at("score"));
      row.fit_seconds = r.at("fit_seconds").get<double>();
      row.predict_seconds = r.at("predict_seconds").get<double>();
      row.status = r.at("status").get<std::string>();
      row.detail = r.at("detail").get<std::string>();
      artifact.validation.push_back(std::move(row));
    }
    for (const auto& name : manifest.at("members")) {
      const fs::path member_path =
          fs::path(dir) / "models" / (name.get<std::string>() + ".json");
      std::ifstream min(member_path);
      if (!min)
        fail(ErrorCode::ArtifactCorrupt, "missing member state '" + member_path.string() + "'");
      json mj;
      min >> mj;
      artifact.members.push_back(member_from_json(mj));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::ArtifactCorrupt, "malformed artifact at '" + dir + "': " + e.what());
  }
  return artifact;
}

TimeSeriesFrame merge_known_covariates(const TimeSeriesFrame& frame,
                                       const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::EmptyData, "covariate file has no header");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "item_id" || header[1] != "timestamp")
    fail(ErrorCode::MissingColumn,
         "covariate file must start with item_id,timestamp followed by covariate columns");
  const std::vector<std::string> names(header.begin() + 2, header.end());

  struct FutureRow {
    std::int64_t eps;
    DateTime stamp;
    std::vector<double> values;
  };
  std::map<std::string, std::vector<FutureRow>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      fail(ErrorCode::InvalidArgument, "covariate row has wrong field count");
    FutureRow row;
    row.stamp = parse_timestamp(fields[1]);
    row.eps = epoch_seconds(row.stamp);
    for (std::size_t c = 2; c < fields.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(fields[c].c_str(), &end);
      if (fields[c].empty() || end == fields[c].c_str() || *end != '\0')
        fail(ErrorCode::InvalidArgument,
             "cannot parse covariate value '" + fields[c] + "'");
      row.values.push_back(v);
    }
    rows[fields[0]].push_back(std::move(row));
  }

  TimeSeriesFrame out = frame;
  for (auto& [id, futures] : rows) {
    const Series* base = frame.find(id);
    if (!base) fail(ErrorCode::IndexMismatch, "covariate file names unknown series '" + id + "'");
    std::size_t si = 0;
    for (; si < frame.size(); ++si)
      if (frame.id(si) == id) break;
    std::stable_sort(futures.begin(), futures.end(),
                     [](const FutureRow& a, const FutureRow& b) { return a.eps < b.eps; });
    Series& target = out.at(si);
    for (std::size_t j = 0; j < futures.size(); ++j) {
      const DateTime expected = add_steps(
          base->start, frame.frequency(), static_cast<std::int64_t>(base->length() + j));
      if (futures[j].eps != epoch_seconds(expected))
        fail(ErrorCode::IrregularSpacing,
             "covariate rows for series '" + id + "' must continue its grid; expected " +
                 format_timestamp(expected, frame.frequency()));
      for (std::size_t c = 0; c < names.size(); ++c) {
        auto it = target.known_covariates.find(names[c]);
        if (it == target.known_covariates.end()) continue;  // not a known covariate
        if (it->second.size() != base->length() + j)
          fail(ErrorCode::LengthMismatch,
               "known covariate '" + names[c] + "' of series '" + id +
                   "' is not contiguous with the provided future rows");
        it->second.push_back(futures[j].values[c]);
      }
    }
  }
  return out;
}

void write_forecast_csv(const ForecastFrame& forecast, std::ostream& out) {
  std::vector<std::string> header = {"item_id", "timestamp", "mean"};
  for (double level : forecast.levels) header.push_back(level_label(level));
  out << join_csv_line(header) << '\n';
  for (const auto& block : forecast.blocks) {
    for (std::size_t h = 0; h < block.mean.size(); ++h) {
      std::vector<std::string> row = {
          block.id,
          format_timestamp(add_steps(block.start, forecast.frequency, static_cast<std::int64_t>(h)),
                           forecast.frequency),
          format_number(block.mean[h])};
      for (std::size_t li = 0; li < block.quantiles.size(); ++li)
        row.push_back(format_number(block.quantiles[li][h]));
      out << join_csv_line(row) << '\n';
    }
  }
}

void write_forecast_csv(const ForecastFrame& forecast, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  write_forecast_csv(forecast, out);
}

}  // namespace chronocast
