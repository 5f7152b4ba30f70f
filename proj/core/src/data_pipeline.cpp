#include "fairlr/data_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fairlr/error.hpp"

namespace fairlr {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string cell_location(std::size_t data_row, const std::string& column,
                          const std::string& source) {
  return source + ": data row " + std::to_string(data_row) + ", column '" +
         column + "'";
}

int parse_binary(const std::string& cell, std::size_t data_row,
                 const std::string& column, const std::string& source) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  throw DataError(cell_location(data_row, column, source) + ": value '" +
                  cell + "' is not 0 or 1");
}

double parse_real(const std::string& cell, std::size_t data_row,
                  const std::string& column, const std::string& source) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw DataError(cell_location(data_row, column, source) + ": value '" +
                    cell + "' is not a finite number");
  }
  return value;
}

// Independent generator stream per purpose, so that e.g. the label flips do
// not shift the draws that produce features or clean labels.
std::mt19937_64 stream(std::uint64_t seed, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), purpose};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void sort_rows(std::vector<Eigen::Index>& rows) {
  std::sort(rows.begin(), rows.end());
}

}  // namespace

Dataset read_csv(std::istream& in, const CsvSchema& schema,
                 const std::string& source) {
  if (!schema.has_header)
    throw ConfigError("CSV input must have a header row");
  std::string line;
  if (!std::getline(in, line))
    throw DataError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);

  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!index.emplace(header[j], j).second)
      throw DataError(source + ": duplicate column '" + header[j] + "'");
  }
  auto column = [&](const std::string& name) {
    const auto it = index.find(name);
    if (it == index.end())
      throw DataError(source + ": missing column '" + name + "'");
    return it->second;
  };
  const auto label_col = column(schema.label_column);
  const auto sensitive_col = column(schema.sensitive_column);

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  if (!schema.feature_columns.empty()) {
    for (const auto& name : schema.feature_columns) {
      if (name == schema.label_column)
        throw ConfigError("the label column cannot also be a feature");
      feature_cols.push_back(column(name));
      feature_names.push_back(name);
    }
  } else {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == label_col) continue;
      if (j == sensitive_col && !schema.include_sensitive_as_feature) continue;
      feature_cols.push_back(j);
      feature_names.push_back(header[j]);
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> sensitive;
  std::vector<int> labels;
  std::size_t data_row = 0;
  bool seen_blank = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      seen_blank = true;
      continue;
    }
    ++data_row;
    if (seen_blank)
      throw DataError(source + ": blank line before data row " +
                      std::to_string(data_row));
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError(source + ": data row " + std::to_string(data_row) +
                      " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    }
    labels.push_back(parse_binary(cells[label_col], data_row,
                                  header[label_col], source));
    sensitive.push_back(parse_binary(cells[sensitive_col], data_row,
                                     header[sensitive_col], source));
    std::vector<double> x;
    x.reserve(feature_cols.size());
    for (const auto j : feature_cols)
      x.push_back(parse_real(cells[j], data_row, header[j], source));
    rows.push_back(std::move(x));
  }
  if (rows.empty()) throw DataError(source + ": no data rows");

  Matrix raw(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
      raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return Dataset::with_intercept(raw, std::move(sensitive), std::move(labels),
                                 std::move(feature_names));
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(in, schema, path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& dataset,
               const std::string& sensitive_column,
               const std::string& label_column) {
  const auto& names = dataset.feature_names();
  const bool s_is_feature =
      std::find(names.begin() + 1, names.end(), sensitive_column) != names.end();
  for (std::size_t j = 1; j < names.size(); ++j) out << names[j] << ',';
  if (!s_is_feature) out << sensitive_column << ',';
  out << label_column << '\n';
  const auto s = dataset.sensitive();
  const auto y = dataset.labels();
  const auto& x = dataset.features();
  for (Eigen::Index i = 0; i < dataset.rows(); ++i) {
    for (Eigen::Index j = 1; j < dataset.cols(); ++j)
      out << format_double(x(i, j)) << ',';
    if (!s_is_feature) out << s[i] << ',';
    out << y[i] << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& dataset,
              const std::string& sensitive_column,
              const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(out, dataset, sensitive_column, label_column);
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

TrainTestSplit split(const Dataset& dataset, double test_fraction,
                     std::uint64_t seed, bool stratify) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("test_fraction must lie in (0, 1)");
  auto rng = stream(seed, 7);
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;

  auto take = [&](std::vector<Eigen::Index> cell) {
    std::shuffle(cell.begin(), cell.end(), rng);
    const auto k = static_cast<double>(cell.size());
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * k));
    test_rows.insert(test_rows.end(), cell.begin(),
                     cell.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_rows.insert(train_rows.end(),
                      cell.begin() + static_cast<std::ptrdiff_t>(n_test),
                      cell.end());
  };

  if (stratify) {
    std::array<std::vector<Eigen::Index>, 4> cells;
    const auto s = dataset.sensitive();
    const auto y = dataset.labels();
    for (Eigen::Index i = 0; i < dataset.rows(); ++i)
      cells[static_cast<std::size_t>(2 * s[i] + y[i])].push_back(i);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].size() < 2) {
        throw DataError("stratified split: cell (s=" + std::to_string(c / 2) +
                        ", y=" + std::to_string(c % 2) + ") has " +
                        std::to_string(cells[c].size()) +
                        " rows; at least 2 are needed");
      }
    }
    for (auto& cell : cells) take(std::move(cell));
  } else {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(dataset.rows()));
    for (Eigen::Index i = 0; i < dataset.rows(); ++i) all[i] = i;
    take(std::move(all));
  }
  sort_rows(train_rows);
  sort_rows(test_rows);
  if (train_rows.size() < 2 || test_rows.size() < 2)
    throw DataError("split leaves fewer than 2 rows on one side");
  return TrainTestSplit{dataset.subset(train_rows), dataset.subset(test_rows),
                        std::move(train_rows), std::move(test_rows)};
}

void GeneratorSpec::validate() const {
  if (n < 2) throw ConfigError("generator: n must be at least 2");
  if (d < 0) throw ConfigError("generator: d must be non-negative");
  if (!(protected_fraction > 0.0 && protected_fraction < 1.0))
    throw ConfigError("generator: protected_fraction must lie in (0, 1)");
  if (true_weights.size() != d + 1)
    throw ConfigError("generator: true_weights needs d + 1 entries "
                      "(intercept first)");
  if (group_mean_shift.size() != d)
    throw ConfigError("generator: group_mean_shift needs d entries");
  if (!true_weights.allFinite() || !group_mean_shift.allFinite() ||
      !std::isfinite(base_rate_shift))
    throw ConfigError("generator: parameters must be finite");
  if (!(label_bias >= 0.0 && label_bias < 0.5))
    throw ConfigError("generator: label_bias must lie in [0, 0.5)");
}

GeneratedData generate(const GeneratorSpec& spec) {
  spec.validate();
  const auto n = spec.n;
  const auto d = static_cast<Eigen::Index>(spec.d);

  auto group_rng = stream(spec.seed, 1);
  auto feature_rng = stream(spec.seed, 2);
  auto label_rng = stream(spec.seed, 3);
  auto flip_rng = stream(spec.seed, 4);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<int> s(static_cast<std::size_t>(n));
  for (auto& v : s) v = uniform01(group_rng) < spec.protected_fraction ? 1 : 0;

  const auto extra = spec.include_sensitive_as_feature ? 1 : 0;
  Matrix raw(n, d + extra);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      raw(i, j) = normal(feature_rng);
      if (s[i] != 0) raw(i, j) += spec.group_mean_shift[j];
    }
    if (extra) raw(i, d) = s[i];
  }

  std::vector<double> probabilities(static_cast<std::size_t>(n));
  std::vector<int> unbiased(static_cast<std::size_t>(n));
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = spec.true_weights[0] +
                     raw.row(i).head(d).dot(spec.true_weights.tail(d)) +
                     spec.base_rate_shift * s[i];
    probabilities[i] = sigmoid(z);
    unbiased[i] = uniform01(label_rng) < probabilities[i] ? 1 : 0;
    y[i] = unbiased[i];
    // One draw per protected row regardless of the label, so the flip
    // pattern depends only on the seed.
    if (s[i] != 0) {
      const double u = uniform01(flip_rng);
      if (y[i] == 0 && u < spec.label_bias) y[i] = 1;
    }
  }

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  if (extra) names.emplace_back("s");
  return GeneratedData{Dataset::with_intercept(raw, std::move(s), std::move(y),
                                              std::move(names)),
                       std::move(unbiased), std::move(probabilities), spec};
}

GeneratorSpec scenario_b() {
  GeneratorSpec spec;
  spec.n = 20000;
  spec.d = 5;
  spec.protected_fraction = 0.3;
  spec.true_weights = Vector(6);
  spec.true_weights << -0.8, 0.2, 0.1, 1.0, -0.8, 0.6;
  spec.group_mean_shift = Vector(5);
  spec.group_mean_shift << 0.5, 0.5, 0.0, 0.0, 0.0;
  spec.base_rate_shift = 0.4;
  spec.label_bias = 0.15;
  spec.seed = 42;
  spec.include_sensitive_as_feature = true;
  return spec;
}

}  // namespace fairlr
