#include "fairlr/commands.hpp"

#include <fstream>
#include <future>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include "fairlr/error.hpp"

namespace fs = std::filesystem;

namespace fairlr {

namespace {

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

fs::path output_dir(const RunConfig& config, const CommandOptions& options) {
  return options.out_dir ? *options.out_dir : config.output_dir;
}

std::optional<std::uint64_t> effective_seed(const RunConfig& config,
                                            const CommandOptions& options) {
  if (options.seed) return options.seed;
  if (config.seed) return config.seed;
  if (config.generator && config.generator->contains("seed"))
    return config.generator->at("seed").get<std::uint64_t>();
  return std::nullopt;
}

std::uint64_t require_seed(const RunConfig& config, const CommandOptions& options,
                           const char* purpose) {
  const auto seed = effective_seed(config, options);
  if (!seed) {
    throw ConfigError(std::string("an explicit seed is required for ") + purpose +
                      " (set \"seed\" in the config or pass --seed)");
  }
  return *seed;
}

// The dataset a train/compare run works on, with the schema that reads its
// persisted splits back.
struct LoadedData {
  Dataset dataset;
  CsvSchema schema;
};

LoadedData load_dataset(const RunConfig& config, const CommandOptions& options) {
  if (config.data_path) {
    const auto path = config.data_path->is_absolute()
                          ? *config.data_path
                          : config.base_dir / *config.data_path;
    return {load_csv(path, config.schema), config.schema};
  }
  if (config.generator) {
    const auto spec = generator_from_json(*config.generator, effective_seed(config, options));
    CsvSchema schema;
    schema.include_sensitive_as_feature = spec.include_sensitive_as_feature;
    return {generate(spec).dataset, schema};
  }
  throw ConfigError("config needs a \"data\" section or a \"generator\" section");
}

void emit(const CommandOptions& options, const Json& json, const std::string& text) {
  if (!options.console) return;
  if (options.format != OutputFormat::json) *options.console << text;
  if (options.format == OutputFormat::json) *options.console << json.dump(2) << '\n';
}

void write_outputs(const fs::path& stem, const Json& json, const std::string& text,
                   OutputFormat format) {
  if (format != OutputFormat::text) write_file_atomic(stem.string() + ".json", json.dump(2) + "\n");
  if (format != OutputFormat::json) write_file_atomic(stem.string() + ".txt", text);
}

std::string csv_text(const Dataset& dataset, const CsvSchema& schema) {
  std::ostringstream out;
  write_csv(out, dataset, schema.sensitive_column, schema.label_column);
  return out.str();
}

ModelArtifact train_one(const CandidateSpec& candidate, const Dataset& train,
                        const RunConfig& config, const CsvSchema& schema) {
  ModelArtifact model;
  model.name = candidate.name;
  model.penalty = candidate.penalty;
  model.constraints = candidate.constraints;
  model.schema = schema;
  model.policy = config.policy;
  model.audit = config.audit;
  try {
    model.fit = fit_constrained(train, candidate.penalty, candidate.constraints,
                                config.solver);
    model.status = model.fit->converged ? "ok" : "not_converged";
  } catch (const InfeasibleError& e) {
    model.status = "infeasible";
    model.error = e.what();
  }
  return model;
}

std::vector<ModelArtifact> train_all(const RunConfig& config, const Dataset& train,
                                     const CsvSchema& schema) {
  std::vector<ModelArtifact> models;
  if (config.parallel && config.candidates.size() > 1) {
    std::vector<std::future<ModelArtifact>> jobs;
    for (const auto& c : config.candidates) {
      jobs.push_back(std::async(std::launch::async, [&, c] {
        return train_one(c, train, config, schema);
      }));
    }
    for (auto& job : jobs) models.push_back(job.get());
  } else {
    for (const auto& c : config.candidates)
      models.push_back(train_one(c, train, config, schema));
  }
  return models;
}

std::string predictions_csv(const Dataset& data, const RiskScores& scores,
                            const Predictions& predictions) {
  std::ostringstream out;
  out << "row,s,y,score,yhat\n";
  const auto s = data.sensitive();
  const auto y = data.labels();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << i << ',' << s[i] << ',' << y[i] << ',' << format_double(scores[i])
        << ',' << predictions.labels[i] << '\n';
  }
  return out.str();
}

}  // namespace

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "text") return OutputFormat::text;
  if (name == "both") return OutputFormat::both;
  throw ConfigError("--format must be json, text or both");
}

RunConfig parse_run_config(const Json& j, const fs::path& base_dir) {
  check_keys(j, {"seed", "generator", "data", "split", "candidates", "threshold",
                 "solver", "audit", "selection", "output", "parallel"},
             "config");
  RunConfig c;
  c.base_dir = base_dir;
  if (j.contains("seed")) c.seed = get_or<std::uint64_t>(j, "seed", 0, "config");
  if (j.contains("generator")) {
    c.generator = j.at("generator");
    // Validate the section now; the seed may still come from --seed.
    (void)generator_from_json(*c.generator, std::uint64_t{0});
  }
  if (j.contains("data")) {
    const auto& data = j.at("data");
    c.schema = schema_from_json(data);
    if (!data.contains("path")) throw ConfigError("data: missing required key 'path'");
    c.data_path = get_or<std::string>(data, "path", "", "data");
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    check_keys(s, {"test_fraction", "stratify"}, "split");
    c.test_fraction = get_or<double>(s, "test_fraction", c.test_fraction, "split");
    c.stratify = get_or<bool>(s, "stratify", c.stratify, "split");
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0))
      throw ConfigError("split.test_fraction must lie in (0, 1)");
  }
  if (j.contains("candidates")) {
    const auto& list = j.at("candidates");
    if (!list.is_array()) throw ConfigError("candidates: expected an array");
    const std::regex safe_name("[A-Za-z0-9_.-]+");
    std::set<std::string> names;
    for (const auto& entry : list) {
      check_keys(entry, {"name", "penalty", "constraints"}, "candidate");
      CandidateSpec cand;
      cand.name = get_or<std::string>(entry, "name", "", "candidate");
      if (!std::regex_match(cand.name, safe_name))
        throw ConfigError("candidate name '" + cand.name +
                          "' must match [A-Za-z0-9_.-]+");
      if (!names.insert(cand.name).second)
        throw ConfigError("duplicate candidate name '" + cand.name + "'");
      if (entry.contains("penalty")) cand.penalty = penalty_from_json(entry.at("penalty"));
      if (entry.contains("constraints")) {
        for (const auto& k : entry.at("constraints")) {
          cand.constraints.push_back(constraint_from_json(k));
          if (cand.constraints.back().kind == ConstraintKind::statistical_parity_prob)
            throw ConfigError("candidate '" + cand.name +
                              "': statistical_parity_prob is audit-only");
        }
      }
      c.candidates.push_back(std::move(cand));
    }
  }
  if (j.contains("threshold")) c.policy = policy_from_json(j.at("threshold"));
  if (j.contains("solver")) c.solver = solver_config_from_json(j.at("solver"));
  if (j.contains("audit")) c.audit = audit_options_from_json(j.at("audit"));
  if (j.contains("selection")) {
    const auto& s = j.at("selection");
    check_keys(s, {"fairness_floor"}, "selection");
    c.fairness_floor = get_or<double>(s, "fairness_floor", c.fairness_floor, "selection");
    if (!(c.fairness_floor >= 0.0 && c.fairness_floor <= 1.0))
      throw ConfigError("selection.fairness_floor must lie in [0, 1]");
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    check_keys(o, {"dir"}, "output");
    c.output_dir = get_or<std::string>(o, "dir", c.output_dir.string(), "output");
  }
  c.parallel = get_or<bool>(j, "parallel", c.parallel, "config");
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path().empty()
                                                    ? fs::path(".")
                                                    : path.parent_path());
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw DataError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

GenerateResult cmd_generate(const RunConfig& config, const CommandOptions& options) {
  if (!config.generator)
    throw ConfigError("generate needs a \"generator\" section in the config");
  const auto seed = require_seed(config, options, "data generation");
  const auto spec = generator_from_json(*config.generator, seed);
  const auto data = generate(spec);

  const auto dir = output_dir(config, options);
  GenerateResult result;
  result.csv_path = dir / "data.csv";
  result.sidecar_path = dir / "data.generator.json";
  result.rows = data.dataset.rows();
  write_file_atomic(result.csv_path, csv_text(data.dataset, CsvSchema{}));
  Json sidecar = {{"generator", to_json(spec)},
                  {"rows", result.rows},
                  {"protected_rows", data.dataset.group_size(1)},
                  {"label_column", "y"},
                  {"sensitive_column", "s"}};
  write_file_atomic(result.sidecar_path, sidecar.dump(2) + "\n");
  if (options.console) {
    *options.console << "wrote " << result.rows << " rows to "
                     << result.csv_path.string() << '\n';
  }
  return result;
}

TrainResult cmd_train(const RunConfig& config, const CommandOptions& options) {
  if (config.candidates.empty())
    throw ConfigError("config lists no candidates");
  const auto seed = require_seed(config, options, "the train/test split");
  const auto loaded = load_dataset(config, options);
  const auto parts = split(loaded.dataset, config.test_fraction, seed, config.stratify);

  const auto dir = output_dir(config, options);
  TrainResult result;
  result.train_path = dir / "train.csv";
  result.test_path = dir / "test.csv";
  write_file_atomic(result.train_path, csv_text(parts.train, loaded.schema));
  write_file_atomic(result.test_path, csv_text(parts.test, loaded.schema));

  result.models = train_all(config, parts.train, loaded.schema);
  for (const auto& model : result.models) {
    const auto path = dir / "models" / (model.name + ".json");
    write_file_atomic(path, to_json(model).dump(2) + "\n");
    result.model_paths.push_back(path);
    if (model.status == "infeasible") result.exit_code = ExitCode::infeasible;
    if (options.console) {
      *options.console << "candidate " << model.name << ": " << model.status;
      if (model.fit) *options.console << " after " << model.fit->iterations << " iterations";
      if (!model.error.empty()) *options.console << " (" << model.error << ")";
      *options.console << " -> " << path.string() << '\n';
    }
  }
  return result;
}

AuditResult cmd_audit(const fs::path& model_path, const fs::path& data_path,
                      const std::optional<ThresholdPolicy>& policy,
                      const CommandOptions& options) {
  const auto model = model_from_json(read_json_file(model_path));
  const auto data = load_csv(data_path, model.schema);
  AuditResult result;
  result.report = audit_model(model, data, policy.value_or(model.policy), model.audit);
  result.json = to_json(result.report);
  result.text = render_text(result.report, "audit of " + model.name + " on " +
                                               data_path.filename().string());
  if (options.out_dir)
    write_outputs(*options.out_dir / ("audit_" + model.name), result.json,
                  result.text, options.format);
  emit(options, result.json, result.text);
  return result;
}

CompareResult cmd_compare(const RunConfig& config, const CommandOptions& options) {
  CommandOptions quiet = options;
  quiet.console = nullptr;
  CompareResult result;
  result.training = cmd_train(config, quiet);
  result.exit_code = result.training.exit_code;
  const auto dir = output_dir(config, options);
  // Audit against the persisted held-out file so the report is exactly what
  // `audit` reproduces from the artifacts.
  const auto& schema = result.training.models.front().schema;
  const auto test = load_csv(result.training.test_path, schema);

  for (const auto& model : result.training.models) {
    CandidateOutcome outcome{model, std::nullopt};
    if (model.fit) {
      outcome.report = audit_model(model, test, config.policy, config.audit);
      const auto scores = score(model.fit->weights, test);
      const auto predictions = predict(scores, config.policy);
      write_file_atomic(dir / "predictions" / (model.name + ".csv"),
                        predictions_csv(test, scores, predictions));
      write_outputs(dir / "audits" / model.name, to_json(*outcome.report),
                    render_text(*outcome.report, "audit of " + model.name +
                                                     " on test.csv"),
                    OutputFormat::both);
    }
    result.report.candidates.push_back(std::move(outcome));
  }
  result.report.selection =
      select_candidate(result.report.candidates, config.fairness_floor);

  const auto json = to_json(result.report);
  const auto text = render_text(result.report);
  result.report_path = dir / "comparison.json";
  write_outputs(dir / "comparison", json, text, OutputFormat::both);
  emit(options, json, text);
  return result;
}

PredictionRecord read_predictions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "row,s,y,score,yhat")
    throw DataError(path.string() + ": unexpected predictions header");
  PredictionRecord rec;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::istringstream cells(line);
    std::string idx, s, y, r, yhat;
    if (!std::getline(cells, idx, ',') || !std::getline(cells, s, ',') ||
        !std::getline(cells, y, ',') || !std::getline(cells, r, ',') ||
        !std::getline(cells, yhat, ','))
      throw DataError(path.string() + ": malformed data row " + std::to_string(row));
    rec.sensitive.push_back(std::stoi(s));
    rec.labels.push_back(std::stoi(y));
    rec.scores.push_back(std::stod(r));
    rec.predicted.push_back(std::stoi(yhat));
  }
  return rec;
}

ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return ExitCode::config_error;
  if (dynamic_cast<const InfeasibleError*>(&e)) return ExitCode::infeasible;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const DimensionError*>(&e))
    return ExitCode::data_error;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return ExitCode::data_error;
  return ExitCode::internal_error;
}

}  // namespace fairlr
