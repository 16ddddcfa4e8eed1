#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fairrelay/experiments.hpp"

namespace fairrelay::experiments {

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  return std::numeric_limits<double>::quiet_NaN();
}

const Table& RunOutput::table(const std::string& suffix) const {
  for (const auto& f : files) {
    if (f.suffix == suffix) return f.table;
  }
  throw std::out_of_range("no output table '" + suffix + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  // Shortest text that parses back to the same double.
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  if (suffix.empty()) return path;
  const std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / (p.stem().string() + "_" + suffix + p.extension().string());
  return out.string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

void write_csv(const Table& table, std::ostream& os) {
  for (const auto& c : table.comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
}

void write_outputs(const RunOutput& out, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    for (const auto& f : out.files) {
      if (!f.suffix.empty()) fallback << "# table: " << f.suffix << '\n';
      write_csv(f.table, fallback);
    }
    return;
  }
  for (const auto& f : out.files) {
    std::ostringstream os;
    write_csv(f.table, os);
    write_file(sibling_path(path, f.suffix), os.str());
  }
  write_file(path + ".json", out.sidecar.dump(2) + "\n");
}

}  // namespace fairrelay::experiments
