#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairlr/dataset.hpp"

namespace fairlr {

/// Column roles of a CSV file. The file must have a header row; cells are
/// comma separated, numbers use '.' as the decimal point and are not quoted,
/// label and sensitive cells are the literals 0 or 1.
struct CsvSchema {
  std::string label_column = "y";
  std::string sensitive_column = "s";
  /// Feature columns in the order they should appear; empty selects every
  /// column except the label (and the sensitive column, unless
  /// include_sensitive_as_feature is set), in file order.
  std::vector<std::string> feature_columns;
  /// Only consulted when feature_columns is empty.
  bool include_sensitive_as_feature = true;
  bool has_header = true;
};

/// Reads and validates a CSV file. Any malformed cell aborts with a
/// DataError naming the data row (1-based) and the column.
[[nodiscard]] Dataset load_csv(const std::filesystem::path& path,
                               const CsvSchema& schema);
[[nodiscard]] Dataset read_csv(std::istream& in, const CsvSchema& schema,
                               const std::string& source = "<stream>");

/// Writes features (without the intercept), then the sensitive column unless
/// a feature already carries that name, then the label. Numbers are written
/// in shortest round-trip form, so reading the file back with a matching
/// schema reproduces the dataset exactly.
void write_csv(std::ostream& out, const Dataset& dataset,
               const std::string& sensitive_column = "s",
               const std::string& label_column = "y");
void save_csv(const std::filesystem::path& path, const Dataset& dataset,
              const std::string& sensitive_column = "s",
              const std::string& label_column = "y");

/// Shortest decimal string that parses back to exactly `value`.
[[nodiscard]] std::string format_double(double value);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  std::vector<Eigen::Index> train_rows;  ///< ascending source row indices
  std::vector<Eigen::Index> test_rows;
};

/// Seeded random split. Stratified mode splits every (s, y) cell separately
/// so that each cell keeps its share within one row; it requires at least
/// two rows per cell.
[[nodiscard]] TrainTestSplit split(const Dataset& dataset, double test_fraction,
                                   std::uint64_t seed, bool stratify);

/// Parameters of the synthetic administrative-data generator.
///
/// Features are standard normal, with `group_mean_shift` added to protected
/// rows (a proxy correlated with group membership). Labels are drawn from
/// sigmoid(true_weights^T [1, x] + base_rate_shift * s); afterwards every
/// protected row with y = 0 is flipped to 1 with probability `label_bias`
/// (over-recording of the outcome for a more heavily scrutinised group).
struct GeneratorSpec {
  std::int64_t n = 1000;
  int d = 5;
  double protected_fraction = 0.3;
  /// Intercept followed by d feature weights.
  Vector true_weights;
  /// One shift per feature.
  Vector group_mean_shift;
  double base_rate_shift = 0.0;
  double label_bias = 0.0;
  std::uint64_t seed = 0;
  /// Append s as a feature column named "s".
  bool include_sensitive_as_feature = true;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct GeneratedData {
  Dataset dataset;
  /// Labels before the protected-group flips.
  std::vector<int> unbiased_labels;
  /// sigmoid(true_weights^T x + base_rate_shift * s) per row.
  std::vector<double> true_probabilities;
  GeneratorSpec spec;
};

[[nodiscard]] GeneratedData generate(const GeneratorSpec& spec);

/// The reference biased scenario: n = 20000, five features, 30% protected,
/// a 0.5 mean shift on the first two features, base-rate shift 0.4, label
/// bias 0.15, seed 42. The shifted features carry little true signal
/// (weights 0.2 and 0.1), so most of their fitted weight comes from the
/// flipped labels.
[[nodiscard]] GeneratorSpec scenario_b();

}  // namespace fairlr
