#include "sigc/report/text_table.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/core.h>

#include "sigc/common/csv.hpp"

namespace sigc::report {

std::string TextTable::render() const {
  std::vector<std::size_t> width(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  };
  widen(header);
  for (const auto& r : rows) widen(r);

  std::string out;
  if (!title.empty()) out += title + "\n";
  auto line = [&](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < row.size() ? row[i] : "";
      if (i > 0) s += "  ";
      s += i == 0 ? fmt::format("{:<{}}", cell, width[i]) : fmt::format("{:>{}}", cell, width[i]);
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out += s + "\n";
  };
  line(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  total += width.empty() ? 0 : 2 * (width.size() - 1);
  out += std::string(total, '-') + "\n";
  for (const auto& r : rows) line(r);
  return out;
}

std::string TextTable::csv() const {
  std::ostringstream os;
  csv::write_row(os, header);
  for (const auto& r : rows) csv::write_row(os, r);
  return os.str();
}

}  // namespace sigc::report
