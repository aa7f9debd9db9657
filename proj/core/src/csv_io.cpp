#include "selint/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "selint/error.hpp"

namespace selint {

void CsvSchema::validate() const {
  if (outcome_column.empty() || selection_column.empty())
    fail(ErrorKind::InvalidArgument, "schema needs outcome and selection columns");
  if (z_columns.empty()) fail(ErrorKind::InvalidArgument, "schema needs at least one selection covariate");
  auto unique_within = [](const std::vector<std::string>& names, const char* what) {
    std::set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second)
        fail(ErrorKind::InvalidArgument, std::string("duplicate ") + what + " column: " + n);
  };
  unique_within(x_columns, "outcome covariate");
  unique_within(z_columns, "selection covariate");
  std::vector<std::string> roles{outcome_column, selection_column};
  if (group_column) roles.push_back(*group_column);
  unique_within(roles, "role");
  for (const auto& r : roles) {
    for (const auto& n : x_columns)
      if (n == r) fail(ErrorKind::InvalidArgument, "column " + r + " used both as covariate and as " + "role column");
    for (const auto& n : z_columns)
      if (n == r) fail(ErrorKind::InvalidArgument, "column " + r + " used both as covariate and as " + "role column");
  }
}

CsvSchema mfls2_schema() {
  CsvSchema s;
  s.outcome_column = "LWAGE";
  s.selection_column = "PAIDWORK";
  s.x_columns = {"AGE", "AGESQ", "YPRIM", "YSEC"};
  s.z_columns = {"UNEARN", "HOUSEH", "AMTLAND", "AGE", "AGESQ", "YPRIM", "YSEC"};
  return s;
}

CsvSchema default_schema(std::size_t k, std::size_t l) {
  CsvSchema s;
  s.outcome_column = "y";
  s.selection_column = "d";
  for (std::size_t j = 1; j <= k; ++j) s.x_columns.push_back("x" + std::to_string(j));
  for (std::size_t j = 1; j <= l; ++j) s.z_columns.push_back("z" + std::to_string(j));
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

bool parse_double(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && std::isfinite(value);
}

struct Row {
  std::size_t number;
  std::vector<double> values;  // in column-slot order
};

}  // namespace

LoadedData read_csv(std::istream& in, const CsvSchema& schema) {
  schema.validate();
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) fail(ErrorKind::Parse, "empty file (no header row)");
  const auto header = split_fields(line);
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);

  // Distinct columns to read, in a fixed slot order.
  std::vector<std::string> slots{schema.outcome_column, schema.selection_column};
  if (schema.group_column) slots.push_back(*schema.group_column);
  std::map<std::string, std::size_t> slot_of;
  for (std::size_t i = 0; i < slots.size(); ++i) slot_of[slots[i]] = i;
  for (const auto* list : {&schema.x_columns, &schema.z_columns})
    for (const auto& name : *list)
      if (slot_of.emplace(name, slots.size()).second) slots.push_back(name);
  std::vector<std::size_t> source(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto it = position.find(slots[i]);
    if (it == position.end()) fail(ErrorKind::MissingColumn, slots[i]);
    source[i] = it->second;
  }

  std::vector<Row> rows;
  std::vector<std::string> rejected;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++number;
    const auto fields = split_fields(line);
    Row row{number, std::vector<double>(slots.size())};
    std::string problem;
    for (std::size_t i = 0; i < slots.size() && problem.empty(); ++i) {
      if (source[i] >= fields.size()) {
        problem = "missing field " + slots[i];
      } else if (!parse_double(fields[source[i]], row.values[i])) {
        problem = "unparseable " + slots[i] + " '" + fields[source[i]] + "'";
      }
    }
    if (problem.empty() && row.values[1] != 0.0 && row.values[1] != 1.0)
      problem = "selection value " + fields[source[1]] + " not in {0, 1}";
    if (problem.empty() && schema.group_column && row.values[2] != 0.0 && row.values[2] != 1.0)
      problem = "group value " + fields[source[2]] + " not in {0, 1}";
    if (!problem.empty()) {
      rejected.push_back("row " + std::to_string(number) + " (" + problem + ")");
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (!rejected.empty()) {
    std::string msg = "rejected " + std::to_string(rejected.size()) + " data row(s): ";
    for (std::size_t i = 0; i < rejected.size(); ++i) msg += (i ? "; " : "") + rejected[i];
    fail(ErrorKind::Parse, msg);
  }
  if (rows.empty()) fail(ErrorKind::Parse, "empty file (no data rows)");

  auto build = [&](int group) {
    std::vector<const Row*> picked;
    for (const Row& r : rows)
      if (group < 0 || r.values[2] == static_cast<double>(group)) picked.push_back(&r);
    const auto n = static_cast<Eigen::Index>(picked.size());
    const auto k = static_cast<Eigen::Index>(schema.x_columns.size());
    const auto l = static_cast<Eigen::Index>(schema.z_columns.size());
    Dataset data;
    data.y.resize(n);
    data.d.resize(n);
    data.X.resize(n, k);
    data.Z.resize(n, l);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& v = picked[static_cast<std::size_t>(i)]->values;
      data.y[i] = v[0];
      data.d[i] = v[1];
      for (Eigen::Index j = 0; j < k; ++j) data.X(i, j) = v[slot_of.at(schema.x_columns[static_cast<std::size_t>(j)])];
      for (Eigen::Index j = 0; j < l; ++j) data.Z(i, j) = v[slot_of.at(schema.z_columns[static_cast<std::size_t>(j)])];
    }
    return data;
  };

  if (!schema.group_column) return build(-1);
  GroupedDatasets grouped{build(0), build(1)};
  return grouped;
}

LoadedData load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return read_csv(in, schema);
}

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& data, const CsvSchema& schema) {
  schema.validate();
  if (static_cast<Eigen::Index>(schema.x_columns.size()) != data.X.cols() ||
      static_cast<Eigen::Index>(schema.z_columns.size()) != data.Z.cols())
    fail(ErrorKind::InvalidArgument, "schema does not match the dataset dimensions");
  struct Column {
    std::string name;
    const Matrix* block;
    Eigen::Index col;
  };
  std::vector<Column> columns;
  std::set<std::string> seen{schema.outcome_column, schema.selection_column};
  for (std::size_t j = 0; j < schema.x_columns.size(); ++j)
    if (seen.insert(schema.x_columns[j]).second)
      columns.push_back({schema.x_columns[j], &data.X, static_cast<Eigen::Index>(j)});
  for (std::size_t j = 0; j < schema.z_columns.size(); ++j)
    if (seen.insert(schema.z_columns[j]).second)
      columns.push_back({schema.z_columns[j], &data.Z, static_cast<Eigen::Index>(j)});

  out << schema.outcome_column << ',' << schema.selection_column;
  for (const auto& c : columns) out << ',' << c.name;
  out << '\n';
  for (Eigen::Index i = 0; i < data.d.size(); ++i) {
    out << exact(data.y[i]) << ',' << exact(data.d[i]);
    for (const auto& c : columns) out << ',' << exact((*c.block)(i, c.col));
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data, const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  write_csv(out, data, schema);
}

}  // namespace selint
