#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crowder::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// Blank lines are skipped.
std::vector<Row> parse(std::istream& in);
std::vector<Row> read_file(const std::string& path);

std::string escape(const std::string& field);
void write_row(std::ostream& out, const Row& row);

}  // namespace crowder::csv
