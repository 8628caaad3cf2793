#include "igl/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "igl/errors.hpp"

namespace igl::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_row(const Row& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += escape(fields[i]);
  }
  line += '\n';
  return line;
}

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t quote_line = 0;

  auto end_row = [&] {
    if (field_started || !row.empty()) {
      row.push_back(field);
      rows.push_back(std::move(row));
    }
    row.clear();
    field.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        quote_line = line;
        break;
      case ',':
        row.push_back(field);
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw MalformedRow(quote_line, "unterminated quoted field");
  end_row();
  return rows;
}

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw InputError("write failed for " + path);
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  if (b == e) throw MalformedRow(line, "empty numeric field");
  double v = 0.0;
  const char* first = s.data() + b;
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + e, v);
  if (res.ec != std::errc() || res.ptr != s.data() + e) {
    throw MalformedRow(line, "not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

LabeledMatrix parse_matrix(std::string_view text) {
  const auto rows = parse(text);
  if (rows.empty()) throw InputError("matrix CSV is empty");
  LabeledMatrix out;
  out.labels = rows.front();
  const auto p = static_cast<Eigen::Index>(out.labels.size());
  const auto n = static_cast<Eigen::Index>(rows.size() - 1);
  out.values.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i + 1)];
    const std::size_t line = static_cast<std::size_t>(i) + 2;
    if (static_cast<Eigen::Index>(r.size()) != p) {
      throw MalformedRow(line, "expected " + std::to_string(p) + " fields, got " +
                                   std::to_string(r.size()));
    }
    for (Eigen::Index j = 0; j < p; ++j) out.values(i, j) = parse_double(r[static_cast<std::size_t>(j)], line);
  }
  return out;
}

LabeledMatrix read_matrix(const std::string& path) { return parse_matrix(read_file(path)); }

std::string format_matrix(const Matrix& m, const std::vector<std::string>& labels) {
  std::string out;
  Row header;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    header.push_back(static_cast<std::size_t>(j) < labels.size() ? labels[static_cast<std::size_t>(j)]
                                                                 : "V" + std::to_string(j + 1));
  }
  out += format_row(header);
  Row r(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = number(m(i, j));
    out += format_row(r);
  }
  return out;
}

IntervalMatrix read_interval_pair(const std::string& lower_path, const std::string& upper_path) {
  LabeledMatrix lo = read_matrix(lower_path);
  LabeledMatrix up = read_matrix(upper_path);
  if (lo.labels != up.labels) throw ShapeMismatch("lower and upper CSV headers differ");
  return validate_intervals(std::move(lo.values), std::move(up.values), std::move(lo.labels));
}

IntervalMatrix parse_interval_columns(std::string_view text) {
  LabeledMatrix all = parse_matrix(text);
  std::vector<std::string> names;
  std::map<std::string, std::pair<int, int>> cols;  // name -> (lower col, upper col)
  for (std::size_t j = 0; j < all.labels.size(); ++j) {
    const std::string& h = all.labels[j];
    if (h.size() < 3 || h[h.size() - 2] != '_' || (h.back() != 'l' && h.back() != 'u')) {
      throw InputError("interval column '" + h + "' lacks an _l/_u suffix");
    }
    const std::string name = h.substr(0, h.size() - 2);
    auto [it, inserted] = cols.try_emplace(name, -1, -1);
    if (inserted) names.push_back(name);
    int& slot = h.back() == 'l' ? it->second.first : it->second.second;
    if (slot >= 0) throw InputError("duplicate interval column '" + h + "'");
    slot = static_cast<int>(j);
  }
  const auto n = all.values.rows();
  const auto p = static_cast<Eigen::Index>(names.size());
  Matrix lower(n, p);
  Matrix upper(n, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const auto [lc, uc] = cols.at(names[static_cast<std::size_t>(k)]);
    if (lc < 0 || uc < 0) throw ShapeMismatch("variable '" + names[static_cast<std::size_t>(k)] + "' lacks a bound column");
    lower.col(k) = all.values.col(lc);
    upper.col(k) = all.values.col(uc);
  }
  return validate_intervals(std::move(lower), std::move(upper), std::move(names));
}

IntervalMatrix read_interval_columns(const std::string& path) {
  return parse_interval_columns(read_file(path));
}

}  // namespace igl::csv
