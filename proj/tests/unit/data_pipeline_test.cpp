#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "fairlr/data_pipeline.hpp"
#include "fairlr/error.hpp"
#include "fairlr/metrics.hpp"
#include "support/fixtures.hpp"

namespace fairlr {
namespace {

Dataset parse(const std::string& text, const CsvSchema& schema = {}) {
  std::istringstream in(text);
  return read_csv(in, schema, "test.csv");
}

std::string error_of(const std::string& text, const CsvSchema& schema = {}) {
  try {
    (void)parse(text, schema);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

GeneratorSpec fair_world(std::int64_t n, std::uint64_t seed) {
  GeneratorSpec g;
  g.n = n;
  g.d = 3;
  g.protected_fraction = 0.3;
  g.true_weights = Vector(4);
  g.true_weights << -0.5, 1.0, -0.7, 0.4;
  g.group_mean_shift = Vector::Zero(3);
  g.seed = seed;
  return g;
}

TEST(Csv, ReadsWellFormedFile) {
  const auto ds = parse("x1,x2,s,y\n0.5,1,0,1\n-2,3e2,1,0\n7,+8,1,1\n");
  EXPECT_EQ(ds.rows(), 3);
  EXPECT_TRUE((ds.features().col(0).array() == 1.0).all());
  EXPECT_EQ(ds.feature_names(),
            (std::vector<std::string>{"(intercept)", "x1", "x2", "s"}));
  EXPECT_EQ(ds.features()(1, 2), 300.0);
  EXPECT_EQ(ds.features()(2, 2), 8.0);
  EXPECT_EQ(ds.labels()[1], 0);
  EXPECT_EQ(ds.sensitive()[2], 1);
}

TEST(Csv, SensitiveColumnCanBeLeftOut) {
  CsvSchema schema;
  schema.include_sensitive_as_feature = false;
  const auto ds = parse("x1,s,y\n1,0,1\n2,1,0\n", schema);
  EXPECT_EQ(ds.cols(), 2);
}

TEST(Csv, BadLabelNamesRowAndColumn) {
  std::string text = "x1,s,y\n";
  for (int row = 1; row <= 8; ++row)
    text += std::to_string(row) + ",0," + (row == 7 ? "2" : "1") + "\n";
  const auto message = error_of(text);
  EXPECT_NE(message.find("data row 7"), std::string::npos) << message;
  EXPECT_NE(message.find("'y'"), std::string::npos) << message;
}

TEST(Csv, ExplicitFeatureListIgnoresExtras) {
  CsvSchema schema;
  schema.feature_columns = {"b", "a"};
  const auto ds = parse("a,junk,b,s,y,notes\n1,zzz,2,0,1,hello\n3,,4,1,0,x\n", schema);
  EXPECT_EQ(ds.feature_names(), (std::vector<std::string>{"(intercept)", "b", "a"}));
  EXPECT_EQ(ds.features()(1, 1), 4.0);
  EXPECT_EQ(ds.features()(1, 2), 3.0);
}

TEST(Csv, ValidationErrors) {
  EXPECT_NE(error_of("x1,s\n1,0\n2,1\n").find("missing column 'y'"), std::string::npos);
  EXPECT_NE(error_of("x1,s,y\nabc,0,1\n1,1,0\n").find("not a finite number"),
            std::string::npos);
  EXPECT_NE(error_of("x1,s,y\nnan,0,1\n1,1,0\n").find("not a finite number"),
            std::string::npos);
  EXPECT_NE(error_of("x1,s,y\n1,0,1.0\n1,1,0\n").find("not 0 or 1"), std::string::npos);
  EXPECT_NE(error_of("").find("empty file"), std::string::npos);
  EXPECT_NE(error_of("x1,s,y\n").find("no data rows"), std::string::npos);
  EXPECT_NE(error_of("x1,s,y\n1,0\n").find("cells"), std::string::npos);
  EXPECT_NE(error_of("x1,s,y\n1,0,1\n\n2,1,0\n").find("blank line"), std::string::npos);
  EXPECT_NE(error_of("x1,x1,s,y\n1,1,0,1\n").find("duplicate"), std::string::npos);
  EXPECT_THROW(load_csv("/nonexistent/data.csv", {}), DataError);
  CsvSchema no_header;
  no_header.has_header = false;
  EXPECT_THROW((void)parse("1,0,1\n", no_header), ConfigError);
}

TEST(Csv, AcceptsCrlfAndTrailingNewlineAbsence) {
  const auto ds = parse("x1,s,y\r\n1,0,1\r\n2,1,0");
  EXPECT_EQ(ds.rows(), 2);
}

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = testing::random_dataset(rng, 30, 3, 1e3);
    std::ostringstream out;
    write_csv(out, ds);
    std::istringstream in(out.str());
    CsvSchema schema;
    schema.include_sensitive_as_feature = false;
    const auto back = read_csv(in, schema);
    EXPECT_EQ(back.features(), ds.features());
    EXPECT_EQ(back.feature_names(), ds.feature_names());
    EXPECT_TRUE(std::equal(back.labels().begin(), back.labels().end(), ds.labels().begin()));
    EXPECT_TRUE(std::equal(back.sensitive().begin(), back.sensitive().end(),
                           ds.sensitive().begin()));
  }
}

TEST(Csv, RoundTripWithSensitiveFeature) {
  const auto g = generate(fair_world(50, 3));
  std::ostringstream out;
  write_csv(out, g.dataset);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "x1,x2,x3,s,y");
  std::istringstream in(out.str());
  const auto back = read_csv(in, {});
  EXPECT_EQ(back.features(), g.dataset.features());
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Split, SizesAndPartition) {
  std::mt19937_64 rng(53);
  const auto ds = testing::random_dataset(rng, 100, 2);
  const auto parts = split(ds, 0.2, 9, false);
  EXPECT_EQ(parts.train.rows(), 80);
  EXPECT_EQ(parts.test.rows(), 20);
  std::set<Eigen::Index> seen(parts.train_rows.begin(), parts.train_rows.end());
  for (auto r : parts.test_rows) EXPECT_TRUE(seen.insert(r).second);
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_TRUE(std::is_sorted(parts.test_rows.begin(), parts.test_rows.end()));
  for (std::size_t k = 0; k < parts.test_rows.size(); ++k)
    EXPECT_EQ(parts.test.features().row(static_cast<Eigen::Index>(k)),
              ds.features().row(parts.test_rows[k]));
}

TEST(Split, StratifiedR8IsOneAndOne) {
  const auto ds = testing::r8_dataset();
  const auto parts = split(ds, 0.5, 1, true);
  for (const auto* side : {&parts.train, &parts.test}) {
    const auto c = confusion(std::vector<int>(4, 0), side->sensitive(), side->labels());
    for (int g = 0; g < 2; ++g) {
      EXPECT_EQ(c[g].positives(), 1);
      EXPECT_EQ(c[g].negatives(), 1);
    }
  }
}

TEST(Split, StratifiedCellsKeepProportions) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = testing::random_dataset(rng, 97 + trial, 2);
    const double f = 0.1 + 0.04 * trial;
    const auto parts = split(ds, f, static_cast<std::uint64_t>(trial), true);
    std::array<int, 4> all{}, test{};
    for (Eigen::Index i = 0; i < ds.rows(); ++i) ++all[2 * ds.sensitive()[i] + ds.labels()[i]];
    for (auto r : parts.test_rows) ++test[2 * ds.sensitive()[r] + ds.labels()[r]];
    for (int c = 0; c < 4; ++c) EXPECT_LE(std::abs(test[c] - f * all[c]), 1.0);
  }
}

TEST(Split, Deterministic) {
  std::mt19937_64 rng(55);
  const auto ds = testing::random_dataset(rng, 200, 2);
  EXPECT_EQ(split(ds, 0.3, 77, true).test_rows, split(ds, 0.3, 77, true).test_rows);
  EXPECT_NE(split(ds, 0.3, 77, true).test_rows, split(ds, 0.3, 78, true).test_rows);
}

TEST(Split, Errors) {
  const auto ds = testing::r8_dataset();
  EXPECT_THROW((void)split(ds, 0.0, 1, false), ConfigError);
  EXPECT_THROW((void)split(ds, 1.0, 1, false), ConfigError);
  Matrix raw = Matrix::Zero(5, 1);
  const auto thin = Dataset::with_intercept(raw, {1, 0, 0, 0, 1}, {1, 0, 1, 0, 0}, {"x"});
  EXPECT_THROW((void)split(thin, 0.5, 1, true), DataError);
}

TEST(Generator, Validation) {
  auto g = fair_world(100, 1);
  g.label_bias = 0.5;
  EXPECT_THROW(g.validate(), ConfigError);
  g = fair_world(100, 1);
  g.protected_fraction = 1.0;
  EXPECT_THROW(g.validate(), ConfigError);
  g = fair_world(100, 1);
  g.true_weights = Vector::Zero(3);
  EXPECT_THROW(g.validate(), ConfigError);
  g = fair_world(100, 1);
  g.group_mean_shift = Vector::Zero(4);
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Generator, DeterministicAndSeedSensitive) {
  const auto a = generate(fair_world(500, 11));
  const auto b = generate(fair_world(500, 11));
  const auto c = generate(fair_world(500, 12));
  EXPECT_EQ(a.dataset.features(), b.dataset.features());
  EXPECT_TRUE(std::equal(a.dataset.labels().begin(), a.dataset.labels().end(),
                         b.dataset.labels().begin()));
  EXPECT_NE(a.dataset.features(), c.dataset.features());
  EXPECT_EQ(a.dataset.feature_names(),
            (std::vector<std::string>{"(intercept)", "x1", "x2", "x3", "s"}));
}

TEST(Generator, FairWorldHasEqualLabelRates) {
  const auto g = generate(fair_world(20000, 5));
  const auto c = confusion(std::vector<int>(20000, 0), g.dataset.sensitive(),
                           g.dataset.labels());
  const double n0 = static_cast<double>(c[0].total());
  const double n1 = static_cast<double>(c[1].total());
  const double p0 = static_cast<double>(c[0].positives()) / n0;
  const double p1 = static_cast<double>(c[1].positives()) / n1;
  const double pooled = (p0 * n0 + p1 * n1) / (n0 + n1);
  const double sigma = std::sqrt(pooled * (1 - pooled) * (1 / n0 + 1 / n1));
  EXPECT_LT(std::abs(p1 - p0), 3 * sigma);
}

TEST(Generator, FlipsRaiseProtectedRateAsExpected) {
  auto spec = fair_world(50000, 6);
  const auto clean = generate(spec);
  spec.label_bias = 0.2;
  const auto biased = generate(spec);
  EXPECT_EQ(clean.dataset.features(), biased.dataset.features());

  std::int64_t n1 = 0, clean_pos = 0, biased_pos = 0;
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    if (biased.dataset.sensitive()[i] != 1) {
      EXPECT_EQ(biased.dataset.labels()[i], clean.dataset.labels()[i]);
      continue;
    }
    ++n1;
    clean_pos += clean.dataset.labels()[i];
    biased_pos += biased.dataset.labels()[i];
    EXPECT_GE(biased.dataset.labels()[i], clean.dataset.labels()[i]);
  }
  const double p1 = static_cast<double>(clean_pos) / static_cast<double>(n1);
  const double q = 0.2 * (1 - p1);
  const double lift = static_cast<double>(biased_pos - clean_pos) / static_cast<double>(n1);
  const double sigma = std::sqrt(q * (1 - q) / static_cast<double>(n1));
  EXPECT_LT(std::abs(lift - q), 3 * sigma);
}

TEST(Generator, GroundTruthIsReturned) {
  auto spec = fair_world(1000, 7);
  spec.label_bias = 0.3;
  spec.base_rate_shift = 0.5;
  const auto g = generate(spec);
  ASSERT_EQ(g.true_probabilities.size(), 1000u);
  for (Eigen::Index i = 0; i < 1000; ++i) {
    const auto& x = g.dataset.features().row(i);
    const double z = spec.true_weights.dot(x.head(4)) +
                     spec.base_rate_shift * g.dataset.sensitive()[i];
    EXPECT_NEAR(g.true_probabilities[static_cast<std::size_t>(i)], sigmoid(z), 1e-15);
    if (g.dataset.sensitive()[i] == 0)
      EXPECT_EQ(g.dataset.labels()[i], g.unbiased_labels[static_cast<std::size_t>(i)]);
  }
}

TEST(Generator, MeanShiftMovesProtectedFeatures) {
  auto spec = fair_world(20000, 8);
  spec.group_mean_shift << 0.5, 0.0, 0.0;
  const auto g = generate(spec);
  double m0 = 0, m1 = 0;
  const auto n1 = g.dataset.group_size(1), n0 = g.dataset.group_size(0);
  for (Eigen::Index i = 0; i < spec.n; ++i)
    (g.dataset.sensitive()[i] ? m1 : m0) += g.dataset.features()(i, 1);
  const double gap = m1 / static_cast<double>(n1) - m0 / static_cast<double>(n0);
  EXPECT_NEAR(gap, 0.5, 3 * std::sqrt(1.0 / n0 + 1.0 / n1));
}

TEST(Generator, BayesScorerHasEqualizedOddsInFairWorld) {
  const auto g = generate(fair_world(100000, 9));
  const auto preds = predict(RiskScores(g.true_probabilities), FixedThreshold{0.5});
  const auto c = confusion(preds, g.dataset);
  const auto tpr = equal_opportunity(c, 1);
  const auto tnr = equal_opportunity(c, 0);
  EXPECT_LT(std::abs(*tpr.difference), 0.02);
  EXPECT_LT(std::abs(*tnr.difference), 0.02);
}

TEST(Generator, ScenarioB) {
  const auto spec = scenario_b();
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(spec.n, 20000);
  EXPECT_EQ(spec.seed, 42u);
  const auto g = generate(spec);
  EXPECT_EQ(g.dataset.rows(), 20000);
  const double share = static_cast<double>(g.dataset.group_size(1)) / 20000.0;
  EXPECT_NEAR(share, 0.3, 0.02);
}

}  // namespace
}  // namespace fairlr
