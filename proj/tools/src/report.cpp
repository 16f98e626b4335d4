#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace layergraph::app {

void Table::add(std::vector<nlohmann::json> row) {
  if (row.size() != columns.size()) throw std::logic_error("table " + name + ": row width mismatch");
  rows.push_back(std::move(row));
}

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
  for (auto& t : tables_) {
    if (t.name == name) return t;
  }
  tables_.push_back({name, std::move(columns), {}});
  return tables_.back();
}

const Table* Report::find(const std::string& name) const {
  for (const auto& t : tables_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  return v.dump();
}

namespace {

// NaN does not exist in JSON; emit it as null.
nlohmann::json machine_cell(const nlohmann::json& v) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) return nullptr;
  return v;
}

void write_table_csv(std::ostream& os, const Table& t) {
  os << "table";
  for (const auto& c : t.columns) os << ',' << c;
  os << '\n';
  for (const auto& row : t.rows) {
    os << t.name;
    for (const auto& cell : row) os << ',' << csv_cell(cell);
    os << '\n';
  }
}

}  // namespace

nlohmann::json Report::to_json() const {
  nlohmann::json doc;
  doc["meta"] = meta_;
  auto& tables = doc["tables"] = nlohmann::json::object();
  for (const auto& t : tables_) {
    auto& arr = tables[t.name] = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json rec = nlohmann::json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) rec[t.columns[i]] = machine_cell(row[i]);
      arr.push_back(std::move(rec));
    }
  }
  return doc;
}

void Report::write(std::ostream& os, Format format) const {
  if (format == Format::machine) {
    os << to_json().dump(2) << '\n';
    return;
  }
  Table meta{"meta", {"key", "value"}, {}};
  for (const auto& [k, v] : meta_.items()) meta.rows.push_back({k, v.is_string() ? v : nlohmann::json(v.dump())});
  write_table_csv(os, meta);
  for (const auto& t : tables_) {
    os << '\n';
    write_table_csv(os, t);
  }
}

void Report::write_dir(const std::filesystem::path& dir, Format format) const {
  std::filesystem::create_directories(dir);
  if (format == Format::machine) {
    std::ofstream os(dir / "report.json");
    os << to_json().dump(2) << '\n';
    if (!os) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    return;
  }
  {
    std::ofstream os(dir / "meta.json");
    os << meta_.dump(2) << '\n';
  }
  for (const auto& t : tables_) {
    std::ofstream os(dir / (t.name + ".csv"));
    write_table_csv(os, t);
    if (!os) throw std::runtime_error("cannot write " + (dir / (t.name + ".csv")).string());
  }
}

}  // namespace layergraph::app
