#include "fairlr/report.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "fairlr/error.hpp"

namespace fairlr {

namespace {

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
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

template <typename T>
T get_required(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(where + ": missing required key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json counts_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

std::string fmt6(std::optional<double> v) {
  if (!v) return "-";
  std::ostringstream out;
  out << std::setprecision(6) << *v;
  return out.str();
}

std::string fmt_bool(std::optional<bool> v) {
  if (!v) return "-";
  return *v ? "pass" : "fail";
}

void metric_row(std::ostream& out, const MetricValue& m) {
  out << std::left << std::setw(28) << m.name << std::right
      << std::setw(13) << fmt6(m.per_group[0]) << std::setw(13)
      << fmt6(m.per_group[1]) << std::setw(13) << fmt6(m.difference)
      << std::setw(13) << fmt6(m.ratio) << std::setw(6)
      << fmt_bool(m.passes_80pct) << "  " << to_string(m.flag) << '\n';
}

}  // namespace

Json to_json(const PenaltySpec& penalty) {
  return {{"kind", to_string(penalty.kind)},
          {"lambda", penalty.lambda},
          {"alpha", penalty.alpha}};
}

PenaltySpec penalty_from_json(const Json& j) {
  const std::string where = "penalty";
  check_keys(j, {"kind", "lambda", "alpha"}, where);
  PenaltySpec p;
  p.kind = penalty_kind_from_string(get_or<std::string>(j, "kind", "none", where));
  p.lambda = get_or<double>(j, "lambda", p.kind == PenaltyKind::none ? 0.0 : 0.01,
                            where);
  p.alpha = get_or<double>(j, "alpha", 0.5, where);
  p.validate();
  return p;
}

Json to_json(const FairnessConstraint& constraint) {
  return {{"kind", to_string(constraint.kind)},
          {"c", constraint.c},
          {"symmetric", constraint.symmetric}};
}

FairnessConstraint constraint_from_json(const Json& j) {
  const std::string where = "constraint";
  check_keys(j, {"kind", "c", "symmetric"}, where);
  FairnessConstraint c;
  c.kind = constraint_kind_from_string(get_required<std::string>(j, "kind", where));
  c.c = get_or<double>(j, "c", kDefaultConstraintBound, where);
  c.symmetric = get_or<bool>(j, "symmetric", true, where);
  c.validate();
  return c;
}

Json to_json(const ThresholdPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedThreshold>(&policy))
    return {{"policy", "fixed"}, {"value", fixed->threshold}};
  return {{"policy", "top_fraction"},
          {"value", std::get<TopFraction>(policy).fraction}};
}

ThresholdPolicy policy_from_json(const Json& j) {
  const std::string where = "threshold";
  check_keys(j, {"policy", "value"}, where);
  const auto kind = get_required<std::string>(j, "policy", where);
  const auto value = get_required<double>(j, "value", where);
  ThresholdPolicy policy;
  if (kind == "fixed") policy = FixedThreshold{value};
  else if (kind == "top_fraction") policy = TopFraction{value};
  else throw ConfigError(where + ": unknown policy '" + kind + "'");
  validate(policy);
  return policy;
}

Json to_json(const SolverConfig& config) {
  Json j = {{"max_iterations", config.max_iterations},
            {"tolerance", config.tolerance},
            {"constraint_feasibility_tol", config.constraint_feasibility_tol},
            {"seed", config.seed},
            {"standardize", config.standardize}};
  if (config.initial_weights) j["initial_weights"] = vector_json(*config.initial_weights);
  return j;
}

SolverConfig solver_config_from_json(const Json& j) {
  const std::string where = "solver";
  check_keys(j, {"max_iterations", "tolerance", "constraint_feasibility_tol",
                 "seed", "standardize", "initial_weights"},
             where);
  SolverConfig c;
  c.max_iterations = get_or<int>(j, "max_iterations", c.max_iterations, where);
  c.tolerance = get_or<double>(j, "tolerance", c.tolerance, where);
  c.constraint_feasibility_tol = get_or<double>(
      j, "constraint_feasibility_tol", c.constraint_feasibility_tol, where);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed, where);
  c.standardize = get_or<bool>(j, "standardize", c.standardize, where);
  if (j.contains("initial_weights"))
    c.initial_weights = vector_from(j.at("initial_weights"), where + ".initial_weights");
  c.validate();
  return c;
}

Json to_json(const AuditOptions& options) {
  return {{"equalized_odds_tol", options.equalized_odds_tol},
          {"calibration_bins", options.calibration_bins}};
}

AuditOptions audit_options_from_json(const Json& j) {
  const std::string where = "audit";
  check_keys(j, {"equalized_odds_tol", "calibration_bins"}, where);
  AuditOptions o;
  o.equalized_odds_tol =
      get_or<double>(j, "equalized_odds_tol", o.equalized_odds_tol, where);
  o.calibration_bins = get_or<int>(j, "calibration_bins", o.calibration_bins, where);
  if (!(o.equalized_odds_tol >= 0.0 && o.equalized_odds_tol <= 1.0))
    throw ConfigError("audit.equalized_odds_tol must lie in [0, 1]");
  if (o.calibration_bins < 2)
    throw ConfigError("audit.calibration_bins must be at least 2");
  return o;
}

Json to_json(const CsvSchema& schema) {
  return {{"label_column", schema.label_column},
          {"sensitive_column", schema.sensitive_column},
          {"feature_columns", schema.feature_columns},
          {"include_sensitive_as_feature", schema.include_sensitive_as_feature}};
}

CsvSchema schema_from_json(const Json& j) {
  const std::string where = "schema";
  check_keys(j, {"path", "label_column", "sensitive_column", "feature_columns",
                 "include_sensitive_as_feature", "has_header"},
             where);
  CsvSchema s;
  s.label_column = get_or<std::string>(j, "label_column", s.label_column, where);
  s.sensitive_column =
      get_or<std::string>(j, "sensitive_column", s.sensitive_column, where);
  s.feature_columns = get_or<std::vector<std::string>>(j, "feature_columns", {}, where);
  s.include_sensitive_as_feature = get_or<bool>(
      j, "include_sensitive_as_feature", s.include_sensitive_as_feature, where);
  s.has_header = get_or<bool>(j, "has_header", true, where);
  if (!s.has_header) throw ConfigError("schema.has_header must be true");
  return s;
}

Json to_json(const GeneratorSpec& spec) {
  return {{"n", spec.n},
          {"d", spec.d},
          {"protected_fraction", spec.protected_fraction},
          {"true_weights", vector_json(spec.true_weights)},
          {"group_mean_shift", vector_json(spec.group_mean_shift)},
          {"base_rate_shift", spec.base_rate_shift},
          {"label_bias", spec.label_bias},
          {"seed", spec.seed},
          {"include_sensitive_as_feature", spec.include_sensitive_as_feature}};
}

GeneratorSpec generator_from_json(const Json& j,
                                  std::optional<std::uint64_t> seed) {
  const std::string where = "generator";
  check_keys(j, {"n", "d", "protected_fraction", "true_weights",
                 "group_mean_shift", "base_rate_shift", "label_bias", "seed",
                 "include_sensitive_as_feature"},
             where);
  GeneratorSpec spec;
  spec.n = get_required<std::int64_t>(j, "n", where);
  spec.d = get_required<int>(j, "d", where);
  spec.protected_fraction = get_required<double>(j, "protected_fraction", where);
  spec.true_weights = vector_from(j.value("true_weights", Json::array()),
                                  where + ".true_weights");
  spec.group_mean_shift =
      j.contains("group_mean_shift")
          ? vector_from(j.at("group_mean_shift"), where + ".group_mean_shift")
          : Vector::Zero(spec.d);
  spec.base_rate_shift = get_or<double>(j, "base_rate_shift", 0.0, where);
  spec.label_bias = get_or<double>(j, "label_bias", 0.0, where);
  spec.include_sensitive_as_feature =
      get_or<bool>(j, "include_sensitive_as_feature", true, where);
  if (seed) {
    spec.seed = *seed;
  } else if (j.contains("seed")) {
    spec.seed = get_required<std::uint64_t>(j, "seed", where);
  } else {
    throw ConfigError(
        "generator: an explicit seed is required (set \"seed\" or pass --seed)");
  }
  spec.validate();
  return spec;
}

Json to_json(const MetricValue& metric) {
  Json j = {{"name", metric.name},
            {"s0", optional_number(metric.per_group[0])},
            {"s1", optional_number(metric.per_group[1])},
            {"difference", optional_number(metric.difference)},
            {"ratio", optional_number(metric.ratio)},
            {"flag", to_string(metric.flag)}};
  j["passes_80pct"] =
      metric.passes_80pct ? Json(*metric.passes_80pct) : Json(nullptr);
  return j;
}

Json to_json(const FitResult& fit) {
  Json rows = Json::array();
  for (const auto& c : fit.constraints) {
    rows.push_back({{"label", c.label},
                    {"kind", to_string(c.kind)},
                    {"mirrored", c.mirrored},
                    {"value", c.value},
                    {"bound", c.bound},
                    {"multiplier", c.multiplier},
                    {"active", c.active}});
  }
  return {{"feature_names", fit.weights.feature_names()},
          {"weights", vector_json(fit.weights.values())},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"final_loss", fit.final_loss},
          {"data_loss", fit.data_loss},
          {"kkt",
           {{"stationarity", fit.kkt.stationarity},
            {"primal_infeasibility", fit.kkt.primal_infeasibility},
            {"complementary_slackness", fit.kkt.complementary_slackness},
            {"dual_infeasibility", fit.kkt.dual_infeasibility}}},
          {"constraints", rows}};
}

namespace {

FitResult fit_from_json(const Json& j) {
  const std::string where = "model.fit";
  FitResult fit;
  fit.weights = WeightVector(
      vector_from(j.at("weights"), where + ".weights"),
      get_required<std::vector<std::string>>(j, "feature_names", where));
  fit.converged = get_required<bool>(j, "converged", where);
  fit.iterations = get_required<int>(j, "iterations", where);
  fit.final_loss = get_required<double>(j, "final_loss", where);
  fit.data_loss = get_required<double>(j, "data_loss", where);
  const auto& kkt = j.at("kkt");
  fit.kkt.stationarity = kkt.at("stationarity").get<double>();
  fit.kkt.primal_infeasibility = kkt.at("primal_infeasibility").get<double>();
  fit.kkt.complementary_slackness = kkt.at("complementary_slackness").get<double>();
  fit.kkt.dual_infeasibility = kkt.at("dual_infeasibility").get<double>();
  for (const auto& row : j.at("constraints")) {
    ConstraintReport c;
    c.label = row.at("label").get<std::string>();
    c.kind = constraint_kind_from_string(row.at("kind").get<std::string>());
    c.mirrored = row.at("mirrored").get<bool>();
    c.value = row.at("value").get<double>();
    c.bound = row.at("bound").get<double>();
    c.multiplier = row.at("multiplier").get<double>();
    c.active = row.at("active").get<bool>();
    fit.constraints.push_back(std::move(c));
  }
  return fit;
}

}  // namespace

Json to_json(const FairnessReport& r) {
  Json bins = Json::array();
  for (const auto& b : r.calibration.bins) {
    Json groups = Json::object();
    for (int g = 0; g < 2; ++g) {
      const auto& cell = b.groups[static_cast<std::size_t>(g)];
      groups[g == 0 ? "s0" : "s1"] = {
          {"count", cell.count},
          {"mean_score", optional_number(cell.mean_score)},
          {"positive_rate", optional_number(cell.positive_rate)}};
    }
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"skipped", b.skipped},
                    {"gap", optional_number(b.gap)},
                    {"groups", groups}});
  }
  return {
      {"format", kAuditFormat},
      {"threshold", to_json(r.policy)},
      {"group_sizes", {{"s0", r.group_sizes[0]}, {"s1", r.group_sizes[1]}}},
      {"confusion",
       {{"s0", counts_json(r.confusion[0])}, {"s1", counts_json(r.confusion[1])}}},
      {"metrics",
       {{"statistical_parity", to_json(r.statistical_parity)},
        {"predictive_parity", to_json(r.predictive_parity)},
        {"predictive_equality", to_json(r.predictive_equality)},
        {"equal_opportunity_class1", to_json(r.equal_opportunity_positive)},
        {"equal_opportunity_class0", to_json(r.equal_opportunity_negative)},
        {"false_negative_rate_parity", to_json(r.false_negative_rate_parity)},
        {"accuracy_equity_auc", to_json(r.accuracy_equity.auc)},
        {"accuracy_equity_accuracy", to_json(r.accuracy_equity.accuracy)}}},
      {"equalized_odds",
       {{"verdict", to_string(r.equalized_odds.verdict)},
        {"tolerance", r.equalized_odds.tolerance}}},
      {"calibration",
       {{"bins", bins},
        {"skipped_bins", r.calibration.skipped_bins},
        {"max_gap", optional_number(r.calibration.max_gap)}}},
      {"score_parity", r.score_parity},
      {"overall_accuracy", r.overall_accuracy},
      {"overall_auc", optional_number(r.overall_auc)}};
}

Json to_json(const ModelArtifact& model) {
  Json constraints = Json::array();
  for (const auto& c : model.constraints) constraints.push_back(to_json(c));
  Json j = {{"format", kModelFormat},
            {"name", model.name},
            {"status", model.status},
            {"penalty", to_json(model.penalty)},
            {"constraints", constraints},
            {"schema", to_json(model.schema)},
            {"threshold", to_json(model.policy)},
            {"audit", to_json(model.audit)}};
  if (!model.error.empty()) j["error"] = model.error;
  j["fit"] = model.fit ? to_json(*model.fit) : Json(nullptr);
  return j;
}

ModelArtifact model_from_json(const Json& j) {
  const std::string where = "model";
  if (get_required<std::string>(j, "format", where) != kModelFormat)
    throw ConfigError("model: unsupported format (expected " +
                      std::string(kModelFormat) + ")");
  ModelArtifact m;
  m.name = get_required<std::string>(j, "name", where);
  m.status = get_required<std::string>(j, "status", where);
  m.error = get_or<std::string>(j, "error", "", where);
  m.penalty = penalty_from_json(j.at("penalty"));
  for (const auto& c : j.at("constraints")) m.constraints.push_back(constraint_from_json(c));
  m.schema = schema_from_json(j.at("schema"));
  m.policy = policy_from_json(j.at("threshold"));
  m.audit = audit_options_from_json(j.at("audit"));
  try {
    if (j.contains("fit") && !j.at("fit").is_null()) m.fit = fit_from_json(j.at("fit"));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("model.fit: ") + e.what());
  }
  return m;
}

FairnessReport audit_model(const ModelArtifact& model, const Dataset& dataset,
                           const ThresholdPolicy& policy,
                           const AuditOptions& options) {
  if (!model.fit)
    throw DataError("model '" + model.name + "' has no weights (status " +
                    model.status + ")");
  const auto& weights = model.fit->weights;
  if (weights.feature_names() != dataset.feature_names()) {
    std::ostringstream msg;
    msg << "model '" << model.name << "' expects features [";
    for (std::size_t i = 0; i < weights.feature_names().size(); ++i)
      msg << (i ? ", " : "") << weights.feature_names()[i];
    msg << "] but the dataset has [";
    for (std::size_t i = 0; i < dataset.feature_names().size(); ++i)
      msg << (i ? ", " : "") << dataset.feature_names()[i];
    msg << "]";
    throw DataError(msg.str());
  }
  dataset.require_both_groups();
  const auto scores = score(weights, dataset);
  return audit(scores, predict(scores, policy), dataset, options);
}

std::string render_text(const FairnessReport& r, const std::string& title) {
  std::ostringstream out;
  out << "== " << title << " ==\n";
  out << "threshold: " << describe(r.policy) << '\n';
  out << "group sizes: s=0 " << r.group_sizes[0] << ", s=1 " << r.group_sizes[1]
      << '\n';
  for (int g = 0; g < 2; ++g) {
    const auto& c = r.confusion[g];
    out << "confusion s=" << g << ": tp " << c.tp << ", fp " << c.fp << ", tn "
        << c.tn << ", fn " << c.fn << '\n';
  }
  out << '\n'
      << std::left << std::setw(28) << "metric" << std::right << std::setw(13)
      << "s=0" << std::setw(13) << "s=1" << std::setw(13) << "difference"
      << std::setw(13) << "ratio" << std::setw(6) << "80%"
      << "  flag\n";
  for (const auto* m :
       {&r.statistical_parity, &r.predictive_parity, &r.predictive_equality,
        &r.equal_opportunity_positive, &r.equal_opportunity_negative,
        &r.false_negative_rate_parity, &r.accuracy_equity.auc,
        &r.accuracy_equity.accuracy}) {
    metric_row(out, *m);
  }
  out << '\n'
      << "equalized odds: " << to_string(r.equalized_odds.verdict)
      << " (tolerance " << fmt6(r.equalized_odds.tolerance) << ")\n";
  out << "score parity: " << fmt6(r.score_parity) << '\n';
  out << "overall accuracy: " << fmt6(r.overall_accuracy) << '\n';
  out << "overall AUC: " << fmt6(r.overall_auc) << '\n';
  out << "\ncalibration (skipped bins " << r.calibration.skipped_bins
      << ", max gap " << fmt6(r.calibration.max_gap) << ")\n";
  out << std::setw(21) << "bin" << std::setw(8) << "n s=0" << std::setw(13)
      << "score s=0" << std::setw(13) << "rate s=0" << std::setw(8) << "n s=1"
      << std::setw(13) << "score s=1" << std::setw(13) << "rate s=1"
      << std::setw(13) << "gap" << '\n';
  for (const auto& b : r.calibration.bins) {
    std::ostringstream range;
    range << (b.lower == 0.0 ? "[" : "(") << fmt6(b.lower) << ", "
          << fmt6(b.upper) << "]";
    out << std::setw(21) << range.str();
    for (const auto& cell : b.groups) {
      out << std::setw(8) << cell.count << std::setw(13) << fmt6(cell.mean_score)
          << std::setw(13) << fmt6(cell.positive_rate);
    }
    out << std::setw(13) << (b.skipped ? std::string("skipped") : fmt6(b.gap))
        << '\n';
  }
  return out.str();
}

std::string Selection::rule_text(double floor) {
  std::ostringstream out;
  out << "among candidates whose statistical-parity ratio and both "
         "equal-opportunity ratios are >= "
      << floor
      << ", choose the highest held-out AUC; if none qualifies, choose the "
         "highest minimum fairness ratio (flagged as fallback); ties go to "
         "the earlier candidate";
  return out.str();
}

std::optional<double> min_fairness_ratio(const FairnessReport& r) {
  const auto& a = r.statistical_parity.ratio;
  const auto& b = r.equal_opportunity_positive.ratio;
  const auto& c = r.equal_opportunity_negative.ratio;
  if (!a || !b || !c) return std::nullopt;
  return std::min({*a, *b, *c});
}

Selection select_candidate(const std::vector<CandidateOutcome>& candidates,
                           double fairness_floor) {
  Selection sel;
  sel.fairness_floor = fairness_floor;
  sel.qualifies.assign(candidates.size(), false);
  constexpr double kLowest = -std::numeric_limits<double>::infinity();

  std::vector<std::size_t> qualifying;
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& report = candidates[i].report;
    if (!report) continue;
    const auto floor_ratio = min_fairness_ratio(*report);
    sel.qualifies[i] = floor_ratio && *floor_ratio >= fairness_floor;
    (sel.qualifies[i] ? qualifying : others).push_back(i);
  }
  auto auc_of = [&](std::size_t i) {
    return candidates[i].report->overall_auc.value_or(kLowest);
  };
  auto ratio_of = [&](std::size_t i) {
    return min_fairness_ratio(*candidates[i].report).value_or(kLowest);
  };
  std::stable_sort(qualifying.begin(), qualifying.end(),
                   [&](std::size_t a, std::size_t b) { return auc_of(a) > auc_of(b); });
  std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
    return ratio_of(a) > ratio_of(b);
  });
  sel.ranking = qualifying;
  sel.ranking.insert(sel.ranking.end(), others.begin(), others.end());
  if (!sel.ranking.empty()) {
    sel.chosen = sel.ranking.front();
    sel.fallback = qualifying.empty();
  }
  return sel;
}

Json to_json(const ComparisonReport& report) {
  const auto& sel = report.selection;
  Json ranking = Json::array();
  for (std::size_t rank = 0; rank < sel.ranking.size(); ++rank) {
    const auto i = sel.ranking[rank];
    const auto& r = *report.candidates[i].report;
    ranking.push_back(
        {{"rank", rank + 1},
         {"index", i},
         {"name", report.candidates[i].model.name},
         {"qualifies", static_cast<bool>(sel.qualifies[i])},
         {"auc", optional_number(r.overall_auc)},
         {"min_fairness_ratio", optional_number(min_fairness_ratio(r))},
         {"statistical_parity_ratio", optional_number(r.statistical_parity.ratio)},
         {"equal_opportunity_class1_ratio",
          optional_number(r.equal_opportunity_positive.ratio)},
         {"equal_opportunity_class0_ratio",
          optional_number(r.equal_opportunity_negative.ratio)}});
  }
  Json candidates = Json::array();
  for (const auto& c : report.candidates) {
    Json entry = {{"name", c.model.name},
                  {"status", c.model.status},
                  {"penalty", to_json(c.model.penalty)}};
    Json constraints = Json::array();
    for (const auto& k : c.model.constraints) constraints.push_back(to_json(k));
    entry["constraints"] = constraints;
    if (!c.model.error.empty()) entry["error"] = c.model.error;
    entry["fit"] = c.model.fit ? to_json(*c.model.fit) : Json(nullptr);
    entry["audit"] = c.report ? to_json(*c.report) : Json(nullptr);
    candidates.push_back(std::move(entry));
  }
  Json selection = {{"rule", Selection::rule_text(sel.fairness_floor)},
                    {"fairness_floor", sel.fairness_floor},
                    {"fallback", sel.fallback},
                    {"ranking", ranking}};
  if (sel.chosen) {
    selection["chosen"] = report.candidates[*sel.chosen].model.name;
    selection["chosen_index"] = *sel.chosen;
  } else {
    selection["chosen"] = nullptr;
    selection["chosen_index"] = nullptr;
  }
  return {{"format", kComparisonFormat},
          {"selection", selection},
          {"candidates", candidates}};
}

std::string render_text(const ComparisonReport& report) {
  const auto& sel = report.selection;
  std::ostringstream out;
  out << "== model comparison ==\n";
  out << "rule: " << Selection::rule_text(sel.fairness_floor) << '\n';
  out << "chosen: "
      << (sel.chosen ? report.candidates[*sel.chosen].model.name : std::string("none"))
      << (sel.fallback ? " (fallback: no candidate met the floor)" : "") << "\n\n";
  out << std::setw(5) << "rank" << "  " << std::left << std::setw(24) << "candidate"
      << std::right << std::setw(10) << "qualifies" << std::setw(13) << "AUC"
      << std::setw(13) << "min ratio" << std::setw(13) << "SP ratio"
      << std::setw(13) << "EO1 ratio" << std::setw(13) << "EO0 ratio" << '\n';
  for (std::size_t rank = 0; rank < sel.ranking.size(); ++rank) {
    const auto i = sel.ranking[rank];
    const auto& r = *report.candidates[i].report;
    out << std::setw(5) << rank + 1 << "  " << std::left << std::setw(24)
        << report.candidates[i].model.name << std::right << std::setw(10)
        << (sel.qualifies[i] ? "yes" : "no") << std::setw(13) << fmt6(r.overall_auc)
        << std::setw(13) << fmt6(min_fairness_ratio(r)) << std::setw(13)
        << fmt6(r.statistical_parity.ratio) << std::setw(13)
        << fmt6(r.equal_opportunity_positive.ratio) << std::setw(13)
        << fmt6(r.equal_opportunity_negative.ratio) << '\n';
  }
  for (const auto& c : report.candidates) {
    if (!c.report) {
      out << "not ranked: " << c.model.name << " (" << c.model.status
          << (c.model.error.empty() ? "" : ": " + c.model.error) << ")\n";
    }
  }
  out << "\ncandidate fits\n";
  for (const auto& c : report.candidates) {
    out << "  " << std::left << std::setw(24) << c.model.name << std::right
        << " status " << c.model.status;
    if (c.model.fit) {
      out << ", iterations " << c.model.fit->iterations << ", loss "
          << fmt6(c.model.fit->final_loss) << ", KKT stationarity "
          << fmt6(c.model.fit->kkt.stationarity);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace fairlr
