#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chronocast/predictor.hpp"
#include "chronocast/textio.hpp"

namespace {

using namespace chronocast;
using nlohmann::json;

struct CommonDataFlags {
  std::string id_column = "item_id";
  std::string timestamp_column = "timestamp";
  std::string target_column = "target";
  std::string frequency;
  bool fill_missing = false;
  bool regularize = false;
};

void add_data_flags(CLI::App* cmd, CommonDataFlags& flags) {
  cmd->add_option("--id-column", flags.id_column, "Series id column name");
  cmd->add_option("--timestamp-column", flags.timestamp_column, "Timestamp column name");
  cmd->add_option("--target-column", flags.target_column, "Target column name");
  cmd->add_option("--frequency", flags.frequency, "Frequency alias (Y/Q/M/W/D/H); inferred if omitted");
  cmd->add_flag("--fill-missing", flags.fill_missing,
                "Forward-fill interior missing targets, drop leading gaps");
  cmd->add_flag("--regularize", flags.regularize,
                "Reindex irregular timestamps to the inferred grid with forward-fill");
}

LoadOptions to_load_options(const CommonDataFlags& flags,
                            const std::vector<std::string>& known,
                            const std::vector<std::string>& statics) {
  LoadOptions opt;
  opt.id_column = flags.id_column;
  opt.timestamp_column = flags.timestamp_column;
  opt.target_column = flags.target_column;
  opt.known_covariates = known;
  opt.static_covariates = statics;
  opt.fill_missing = flags.fill_missing;
  opt.regularize = flags.regularize;
  if (!flags.frequency.empty()) {
    auto f = frequency_from_string(flags.frequency);
    if (!f) fail(ErrorCode::InvalidArgument, "unknown frequency alias '" + flags.frequency + "'");
    opt.frequency = f;
  }
  return opt;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) out.push_back(part);
  return out;
}

void print_leaderboard(const std::vector<LeaderboardRow>& rows, bool as_json) {
  if (as_json) {
    for (const auto& r : rows) {
      json j = {{"model", r.model},
                {"score", std::isfinite(r.score) ? json(r.score) : json(nullptr)},
                {"fit_seconds", r.fit_seconds},
                {"predict_seconds", r.predict_seconds},
                {"status", r.status}};
      if (!r.detail.empty()) j["detail"] = r.detail;
      std::cout << j.dump() << '\n';
    }
    return;
  }
  std::printf("%-24s %12s %10s %12s  %s\n", "model", "score", "fit_s", "predict_s", "status");
  for (const auto& r : rows) {
    std::string score = std::isfinite(r.score) ? format_number(r.score) : "";
    std::string status = r.status + (r.detail.empty() ? "" : " (" + r.detail + ")");
    std::printf("%-24s %12s %10.2f %12.2f  %s\n", r.model.c_str(), score.c_str(), r.fit_seconds,
                r.predict_seconds, status.c_str());
  }
}

int run(int argc, char** argv) {
  CLI::App app{"chronocast: probabilistic time-series forecasting on panels of univariate series"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Emit single-line structured records instead of tables");

  // ---- fit ----
  auto* fit_cmd = app.add_subcommand("fit", "Train a predictor on a long-format CSV");
  std::string fit_data, fit_out, fit_metric = "WQL", fit_quantiles, fit_preset = "medium";
  std::string fit_known, fit_statics;
  int fit_h = 0, fit_windows = 1;
  double fit_time_limit = 3600.0;
  std::int64_t fit_seed = 0;
  CommonDataFlags fit_flags;
  fit_cmd->add_option("--data", fit_data, "Training data CSV")->required();
  fit_cmd->add_option("--prediction-length", fit_h, "Forecast horizon H")->required();
  fit_cmd->add_option("--metric", fit_metric, "Evaluation metric: MASE or WQL");
  fit_cmd->add_option("--quantiles", fit_quantiles, "Comma-separated quantile levels");
  fit_cmd->add_option("--preset", fit_preset, "fast, medium, or best");
  fit_cmd->add_option("--time-limit", fit_time_limit, "Training time limit in seconds");
  fit_cmd->add_option("--num-windows", fit_windows, "Validation windows");
  fit_cmd->add_option("--known-covariates", fit_known,
                      "Comma-separated columns known in the future");
  fit_cmd->add_option("--static-covariates", fit_statics, "Comma-separated static columns");
  fit_cmd->add_option("--seed", fit_seed, "Random seed recorded in the artifact");
  fit_cmd->add_option("--out", fit_out, "Artifact output directory")->required();
  add_data_flags(fit_cmd, fit_flags);

  // ---- predict ----
  auto* predict_cmd = app.add_subcommand("predict", "Forecast H steps for every series");
  std::string predict_model, predict_data, predict_out, predict_kc_file;
  CommonDataFlags predict_flags;
  predict_cmd->add_option("--model", predict_model, "Artifact directory")->required();
  predict_cmd->add_option("--data", predict_data, "Input CSV")->required();
  predict_cmd->add_option("--known-covariates-file", predict_kc_file,
                          "CSV with future known-covariate rows");
  predict_cmd->add_option("--out", predict_out, "Forecast CSV path")->required();
  add_data_flags(predict_cmd, predict_flags);

  // ---- evaluate ----
  auto* eval_cmd = app.add_subcommand("evaluate", "Score the predictor on held-out data");
  std::string eval_model, eval_data, eval_metric;
  CommonDataFlags eval_flags;
  eval_cmd->add_option("--model", eval_model, "Artifact directory")->required();
  eval_cmd->add_option("--data", eval_data, "CSV with at least H+1 steps per series")->required();
  eval_cmd->add_option("--metric", eval_metric, "Override the artifact's metric");
  add_data_flags(eval_cmd, eval_flags);

  // ---- leaderboard ----
  auto* lb_cmd = app.add_subcommand("leaderboard", "Print the validation leaderboard");
  std::string lb_model;
  lb_cmd->add_option("--model", lb_model, "Artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (fit_cmd->parsed()) {
    TaskConfig task;
    task.prediction_length = fit_h;
    if (!fit_quantiles.empty()) {
      std::vector<double> levels;
      for (const auto& part : split_names(fit_quantiles)) levels.push_back(std::stod(part));
      task.quantile_levels = QuantileLevels(levels);
    }
    auto metric = metric_from_string(fit_metric);
    if (!metric) fail(ErrorCode::InvalidArgument, "unknown metric '" + fit_metric + "'");
    task.eval_metric = *metric;
    auto preset = preset_from_string(fit_preset);
    if (!preset) fail(ErrorCode::InvalidArgument, "unknown preset '" + fit_preset + "'");
    task.preset = *preset;
    task.time_limit_seconds = fit_time_limit;
    task.num_windows = fit_windows;
    task.known_covariate_names = split_names(fit_known);
    task.seed = fit_seed;

    TimeSeriesFrame train = load_csv(
        fit_data, to_load_options(fit_flags, task.known_covariate_names, split_names(fit_statics)));
    PredictorArtifact artifact = fit(task, train);
    save_artifact(artifact, fit_out);
    print_leaderboard(leaderboard(artifact), as_json);
    return 0;
  }

  if (predict_cmd->parsed()) {
    PredictorArtifact artifact = load_artifact(predict_model);
    TimeSeriesFrame frame =
        load_csv(predict_data, to_load_options(predict_flags, artifact.task.known_covariate_names,
                                               artifact.static_covariate_names));
    if (!predict_kc_file.empty()) frame = merge_known_covariates(frame, predict_kc_file);
    ForecastFrame forecast = predict(artifact, frame);
    write_forecast_csv(forecast, predict_out);
    std::size_t rows = 0;
    for (const auto& b : forecast.blocks) rows += b.mean.size();
    if (as_json)
      std::cout << json{{"out", predict_out}, {"rows", rows}}.dump() << '\n';
    else
      std::cout << "wrote " << predict_out << " (" << rows << " rows)\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    PredictorArtifact artifact = load_artifact(eval_model);
    TimeSeriesFrame data =
        load_csv(eval_data, to_load_options(eval_flags, artifact.task.known_covariate_names,
                                            artifact.static_covariate_names));
    std::optional<EvalMetric> metric;
    if (!eval_metric.empty()) {
      metric = metric_from_string(eval_metric);
      if (!metric) fail(ErrorCode::InvalidArgument, "unknown metric '" + eval_metric + "'");
    }
    const double value = evaluate(artifact, data, metric);
    const char* name = metric_name(metric.value_or(artifact.task.eval_metric));
    if (as_json)
      std::cout << json{{"metric", name}, {"value", value}}.dump() << '\n';
    else
      std::cout << "metric=" << name << " value=" << format_number(value) << '\n';
    return 0;
  }

  if (lb_cmd->parsed()) {
    PredictorArtifact artifact = load_artifact(lb_model);
    print_leaderboard(leaderboard(artifact), as_json);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const chronocast::Error& e) {
    std::cerr << "error code=" << chronocast::error_code_name(e.code()) << " message=\"" << e.what()
              << "\"\n";
    return e.code() == chronocast::ErrorCode::AllModelsFailed ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error code=Internal message=\"" << e.what() << "\"\n";
    return 2;
  }
}
