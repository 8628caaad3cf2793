#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "igl/interval_data.hpp"

namespace igl::csv {

using Row = std::vector<std::string>;

/// RFC-4180 field quoting: quotes fields containing comma, quote, CR or LF.
std::string escape(std::string_view field);
/// Joined and escaped fields followed by "\n".
std::string format_row(const Row& fields);

/// Parses RFC-4180 text (quoted fields, embedded newlines, CRLF). Blank
/// lines are skipped. Throws MalformedRow on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Shortest round-trip decimal form of a double.
std::string number(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

struct LabeledMatrix {
  std::vector<std::string> labels;
  Matrix values;
};

/// Header row of names, then one numeric row per observation.
/// Throws MalformedRow / InputError.
LabeledMatrix parse_matrix(std::string_view text);
LabeledMatrix read_matrix(const std::string& path);
std::string format_matrix(const Matrix& m, const std::vector<std::string>& labels = {});

/// Two files with identical headers.
IntervalMatrix read_interval_pair(const std::string& lower_path, const std::string& upper_path);
/// One file holding <name>_l / <name>_u column pairs.
IntervalMatrix parse_interval_columns(std::string_view text);
IntervalMatrix read_interval_columns(const std::string& path);

}  // namespace igl::csv
