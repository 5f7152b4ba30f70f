#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fairlr/commands.hpp"
#include "fairlr/error.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;

namespace fairlr {
namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("fairlr_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Json small_generator() {
  return {{"n", 600},
          {"d", 2},
          {"protected_fraction", 0.4},
          {"true_weights", {-0.5, 1.0, -0.5}},
          {"group_mean_shift", {0.8, 0.0}},
          {"label_bias", 0.2}};
}

Json small_config() {
  return {{"seed", 5},
          {"generator", small_generator()},
          {"threshold", {{"policy", "top_fraction"}, {"value", 0.1}}},
          {"parallel", false},
          {"candidates",
           {{{"name", "baseline"}},
            {{"name", "fair"},
             {"constraints",
              {{{"kind", "statistical_parity_linear"}, {"c", -0.02}},
               {{"kind", "equalized_odds_linear"}, {"c", -0.02}}}}}}}};
}

CommandOptions in(const fs::path& dir) {
  CommandOptions o;
  o.out_dir = dir;
  return o;
}

TEST(RunConfig, Defaults) {
  const auto c = parse_run_config(Json::object(), ".");
  EXPECT_FALSE(c.seed);
  EXPECT_EQ(c.test_fraction, 0.3);
  EXPECT_TRUE(c.stratify);
  EXPECT_EQ(c.fairness_floor, 0.8);
  EXPECT_TRUE(std::holds_alternative<TopFraction>(c.policy));
}

TEST(RunConfig, RejectsBadDocuments) {
  auto bad = [](Json j) { return [j] { (void)parse_run_config(j, "."); }; };
  EXPECT_THROW(bad({{"sead", 1}})(), ConfigError);
  EXPECT_THROW(bad({{"candidates", {{{"name", "a/b"}}}}})(), ConfigError);
  EXPECT_THROW(bad({{"candidates", {{{"name", "a"}}, {{"name", "a"}}}}})(), ConfigError);
  EXPECT_THROW(bad({{"candidates",
                     {{{"name", "a"},
                       {"constraints", {{{"kind", "statistical_parity_prob"}}}}}}}})(),
               ConfigError);
  EXPECT_THROW(bad({{"split", {{"test_fraction", 1.5}}}})(), ConfigError);
  EXPECT_THROW(bad({{"selection", {{"fairness_floor", 2}}}})(), ConfigError);
  EXPECT_THROW(bad({{"data", {{"label_column", "y"}}}})(), ConfigError);
  EXPECT_THROW(bad({{"generator", {{"n", 10}}}})(), ConfigError);
}

TEST(Generate, RequiresSeed) {
  TempDir tmp;
  Json j = {{"generator", small_generator()}};
  const auto config = parse_run_config(j, ".");
  try {
    (void)cmd_generate(config, in(tmp.path()));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
  }
  auto opts = in(tmp.path());
  opts.seed = 3;
  EXPECT_EQ(cmd_generate(config, opts).rows, 600);
}

TEST(Generate, ByteIdenticalAcrossRuns) {
  TempDir a, b;
  const auto config = parse_run_config(small_config(), ".");
  const auto ra = cmd_generate(config, in(a.path()));
  const auto rb = cmd_generate(config, in(b.path()));
  EXPECT_EQ(slurp(ra.csv_path), slurp(rb.csv_path));
  EXPECT_EQ(slurp(ra.sidecar_path), slurp(rb.sidecar_path));
  const auto sidecar = Json::parse(slurp(ra.sidecar_path));
  EXPECT_EQ(sidecar.at("generator").at("seed"), 5);
  EXPECT_EQ(sidecar.at("rows"), 600);
}

TEST(Generate, ScenarioBSize) {
  TempDir tmp;
  Json j = {{"seed", 42}, {"generator", to_json(scenario_b())}};
  const auto r = cmd_generate(parse_run_config(j, "."), in(tmp.path()));
  const auto text = slurp(r.csv_path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 20001);
}

TEST(Train, WritesModelsAndSplits) {
  TempDir tmp;
  const auto config = parse_run_config(small_config(), ".");
  const auto r = cmd_train(config, in(tmp.path()));
  EXPECT_EQ(r.exit_code, ExitCode::ok);
  ASSERT_EQ(r.model_paths.size(), 2u);
  for (const auto& p : r.model_paths) EXPECT_TRUE(fs::exists(p));
  const auto train = load_csv(r.train_path, {});
  const auto test = load_csv(r.test_path, {});
  EXPECT_EQ(train.rows() + test.rows(), 600);
  EXPECT_EQ(test.rows(), 180);
  const auto fair = model_from_json(Json::parse(slurp(r.model_paths[1])));
  ASSERT_TRUE(fair.fit);
  for (const auto& row : fair.fit->constraints)
    EXPECT_GE(row.value, row.bound - 1e-6);
}

TEST(Train, BaselineOnly) {
  TempDir tmp;
  auto j = small_config();
  j["candidates"] = {{{"name", "only"}, {"penalty", {{"kind", "ridge"}, {"lambda", 0.1}}}}};
  const auto r = cmd_train(parse_run_config(j, "."), in(tmp.path()));
  EXPECT_EQ(r.models.size(), 1u);
  EXPECT_EQ(fs::directory_iterator(tmp.path() / "models")->path().filename(), "only.json");
}

TEST(Train, InfeasibleCandidateDoesNotStopTheBatch) {
  TempDir tmp;
  auto j = small_config();
  j["candidates"].push_back(
      {{"name", "impossible"},
       {"constraints",
        {{{"kind", "statistical_parity_linear"}, {"c", 0.0}, {"symmetric", true}},
         {{"kind", "statistical_parity_linear"}, {"c", 0.1}, {"symmetric", false}}}}});
  j["candidates"].push_back({{"name", "after"}, {"penalty", {{"kind", "lasso"}}}});
  const auto r = cmd_train(parse_run_config(j, "."), in(tmp.path()));
  EXPECT_EQ(r.exit_code, ExitCode::infeasible);
  ASSERT_EQ(r.models.size(), 4u);
  EXPECT_EQ(r.models[2].status, "infeasible");
  EXPECT_FALSE(r.models[2].has_weights());
  EXPECT_TRUE(r.models[3].has_weights());
  const auto stored = Json::parse(slurp(tmp.path() / "models" / "impossible.json"));
  EXPECT_EQ(stored.at("status"), "infeasible");
  EXPECT_TRUE(stored.at("fit").is_null());
}

TEST(Train, RerunGivesIdenticalModels) {
  TempDir a, b;
  auto j = small_config();
  j["parallel"] = true;
  const auto config = parse_run_config(j, ".");
  const auto ra = cmd_train(config, in(a.path()));
  const auto rb = cmd_train(config, in(b.path()));
  for (std::size_t i = 0; i < ra.model_paths.size(); ++i)
    EXPECT_EQ(slurp(ra.model_paths[i]), slurp(rb.model_paths[i]));
}

TEST(Train, ReadsDataFromCsvRelativeToConfig) {
  TempDir tmp;
  std::vector<int> s, y;
  Matrix raw(40, 1);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    s.push_back(i % 3 == 0);
    y.push_back(i % 2);
    raw(i, 0) = normal(rng) + y.back();
  }
  save_csv(tmp.path() / "in.csv", Dataset::with_intercept(raw, s, y, {"x"}));
  std::ofstream(tmp.path() / "run.json")
      << Json{{"seed", 1},
              {"data", {{"path", "in.csv"}}},
              {"candidates", {{{"name", "m"}}}},
              {"output", {{"dir", "out"}}}}
             .dump();
  const auto config = load_run_config(tmp.path() / "run.json");
  CommandOptions opts;
  opts.out_dir = tmp.path() / "out";
  const auto r = cmd_train(config, opts);
  EXPECT_EQ(r.models[0].fit->weights.feature_names(),
            (std::vector<std::string>{"(intercept)", "x", "s"}));
}

TEST(Audit, R8FromFiles) {
  TempDir tmp;
  save_csv(tmp.path() / "r8.csv", testing::r8_dataset());
  ModelArtifact m;
  m.name = "threshold";
  m.schema.include_sensitive_as_feature = false;
  m.policy = FixedThreshold{0.5};
  FitResult fit;
  Vector w(2);
  w << 0.0, 0.0;
  fit.weights = WeightVector(w, {"(intercept)", "x1"});
  m.fit = fit;
  // Zero weights score every row 0.5, which the strict threshold rejects.
  write_file_atomic(tmp.path() / "model.json", to_json(m).dump(2));
  auto opts = in(tmp.path() / "audit");
  const auto r = cmd_audit(tmp.path() / "model.json", tmp.path() / "r8.csv", std::nullopt,
                           opts);
  EXPECT_EQ(r.report.statistical_parity.flag, MetricFlag::both_rates_zero);
  EXPECT_EQ(*r.report.overall_auc, 0.5);
  EXPECT_TRUE(fs::exists(tmp.path() / "audit" / "audit_threshold.json"));
  EXPECT_TRUE(fs::exists(tmp.path() / "audit" / "audit_threshold.txt"));

  const auto top = cmd_audit(tmp.path() / "model.json", tmp.path() / "r8.csv",
                             ThresholdPolicy{TopFraction{0.25}}, {});
  EXPECT_EQ(top.report.confusion[1].tp + top.report.confusion[1].fp, 2);
}

TEST(Audit, RefusesSingleGroupAndFeatureMismatch) {
  TempDir tmp;
  const auto base = tmp.path();
  std::ofstream(base / "one.csv") << "x1,s,y\n1,1,0\n2,1,1\n";
  std::ofstream(base / "other.csv") << "z,s,y\n1,0,0\n2,1,1\n";
  ModelArtifact m;
  m.name = "m";
  m.schema.include_sensitive_as_feature = false;
  FitResult fit;
  fit.weights = WeightVector(Vector::Zero(2), {"(intercept)", "x1"});
  m.fit = fit;
  write_file_atomic(base / "m.json", to_json(m).dump());
  EXPECT_THROW((void)cmd_audit(base / "m.json", base / "one.csv", std::nullopt, {}),
               DataError);
  EXPECT_THROW((void)cmd_audit(base / "m.json", base / "other.csv", std::nullopt, {}),
               DataError);
}

TEST(Compare, ArtifactsReproduceTheReport) {
  TempDir tmp;
  const auto config = parse_run_config(small_config(), ".");
  const auto r = cmd_compare(config, in(tmp.path()));
  EXPECT_EQ(r.exit_code, ExitCode::ok);
  EXPECT_TRUE(fs::exists(tmp.path() / "comparison.json"));
  EXPECT_TRUE(fs::exists(tmp.path() / "comparison.txt"));
  const auto comparison = Json::parse(slurp(tmp.path() / "comparison.json"));
  ASSERT_TRUE(r.report.selection.chosen);
  EXPECT_EQ(comparison.at("selection").at("chosen"),
            r.report.candidates[*r.report.selection.chosen].model.name);

  for (const auto& name : {"baseline", "fair"}) {
    const auto audit_json = slurp(tmp.path() / "audits" / (std::string(name) + ".json"));
    auto opts = in(tmp.path() / "again");
    (void)cmd_audit(tmp.path() / "models" / (std::string(name) + ".json"),
                    tmp.path() / "test.csv", std::nullopt, opts);
    EXPECT_EQ(slurp(tmp.path() / "again" / ("audit_" + std::string(name) + ".json")),
              audit_json);

    const auto rec = read_predictions(tmp.path() / "predictions" / (std::string(name) + ".csv"));
    const auto parsed = Json::parse(audit_json);
    std::int64_t selected = 0;
    for (auto p : rec.predicted) selected += p;
    const auto& c = parsed.at("confusion");
    EXPECT_EQ(selected, c.at("s0").at("tp").get<std::int64_t>() +
                            c.at("s0").at("fp").get<std::int64_t>() +
                            c.at("s1").at("tp").get<std::int64_t>() +
                            c.at("s1").at("fp").get<std::int64_t>());
    EXPECT_EQ(*auc(rec.scores, rec.labels), parsed.at("overall_auc").get<double>());
  }
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), ExitCode::config_error);
  EXPECT_EQ(exit_code_for(DataError("x")), ExitCode::data_error);
  EXPECT_EQ(exit_code_for(DimensionError("x")), ExitCode::data_error);
  EXPECT_EQ(exit_code_for(InfeasibleError("x")), ExitCode::infeasible);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), ExitCode::internal_error);
  EXPECT_EQ(static_cast<int>(ExitCode::ok), 0);
  EXPECT_EQ(output_format_from_string("text"), OutputFormat::text);
  EXPECT_THROW((void)output_format_from_string("xml"), ConfigError);
}

TEST(WriteFileAtomic, CreatesDirectoriesAndReplaces) {
  TempDir tmp;
  const auto p = tmp.path() / "a" / "b" / "f.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  EXPECT_EQ(slurp(p), "two");
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
}

}  // namespace
}  // namespace fairlr
