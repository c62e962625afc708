#pragma once

#include <string>
#include <vector>

namespace sigc::report {

// Fixed-width text rendering: first column left-aligned, the rest
// right-aligned, columns separated by two spaces.
struct TextTable {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
  // The same content as CSV (title omitted).
  std::string csv() const;
};

}  // namespace sigc::report
