#pragma once

#include <deque>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace layergraph::app {

enum class Format { csv, machine };

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add(std::vector<nlohmann::json> row);
};

/// Ordered collection of tables plus metadata. CSV output prints every table
/// as a block whose header line is "table,<columns>" and whose rows start
/// with the table name; blocks are separated by blank lines. The machine
/// form is one JSON document.
class Report {
 public:
  Table& table(const std::string& name, std::vector<std::string> columns);
  const Table* find(const std::string& name) const;
  void meta(const std::string& key, nlohmann::json value) { meta_[key] = std::move(value); }
  const nlohmann::json& meta() const { return meta_; }

  void write(std::ostream& os, Format format) const;
  /// One <table>.csv per table plus meta.json, or report.json.
  void write_dir(const std::filesystem::path& dir, Format format) const;
  nlohmann::json to_json() const;

 private:
  nlohmann::json meta_ = nlohmann::json::object();
  std::deque<Table> tables_;  // table() hands out references that must stay valid
};

/// Shortest text that reads back to the same double; "nan" and "inf" for
/// non-finite values.
std::string format_number(double v);
std::string csv_cell(const nlohmann::json& v);

}  // namespace layergraph::app
