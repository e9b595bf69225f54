#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace csv {

/// Header plus rows, each row a column-name → cell map.
struct Table {
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;

  double num(std::size_t row, const std::string& col) const { return std::stod(rows.at(row).at(col)); }
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Table parse(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv");
  t.header = split(line);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw std::runtime_error("ragged csv row: " + line);
    auto& row = t.rows.emplace_back();
    for (std::size_t i = 0; i < cells.size(); ++i) row[t.header[i]] = cells[i];
  }
  return t;
}

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace csv
