#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "selint/dataset.hpp"

namespace selint {

struct CsvSchema {
  std::string outcome_column;
  std::string selection_column;
  std::vector<std::string> x_columns;
  std::vector<std::string> z_columns;
  std::optional<std::string> group_column;

  void validate() const;
};

/// Variable layout of the Malaysian Family Life Survey extract.
CsvSchema mfls2_schema();

struct GroupedDatasets {
  Dataset group0;
  Dataset group1;
};

using LoadedData = std::variant<Dataset, GroupedDatasets>;

/// Headered, comma-separated input. Rows with unparseable or missing
/// required fields are rejected (the error lists their 1-based data-row
/// numbers); nothing is imputed. Columns outside the schema are ignored.
LoadedData load_csv(const std::filesystem::path& path, const CsvSchema& schema);
LoadedData read_csv(std::istream& in, const CsvSchema& schema);

/// Writes the dataset under the schema's column names with 17 significant
/// digits, so that read_csv reproduces every value exactly.
void write_csv(std::ostream& out, const Dataset& data, const CsvSchema& schema);
void write_csv(const std::filesystem::path& path, const Dataset& data, const CsvSchema& schema);

// Schema with columns y, d, x1..xk, z1..zl.
CsvSchema default_schema(std::size_t k, std::size_t l);

}  // namespace selint
