#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sigc::csv {

using Row = std::vector<std::string>;

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
// The first row is returned as the header.
struct Document {
  Row header;
  std::vector<Row> rows;

  // Column index by name; throws ValidationError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

Document parse(std::string_view text);
Document read_file(const std::string& path);

std::string escape(std::string_view field);
void write_row(std::ostream& os, const Row& row);

// Fixed-point rendering used by every emitted table so reruns are
// byte-identical. NaN renders as "nan".
std::string fixed(double value, int precision = 6);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

}  // namespace sigc::csv
