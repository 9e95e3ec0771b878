#include "geodesy/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "geodesy/error.hpp"

namespace geodesy {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::size_t parse_index(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) invalid_input("not a nonnegative integer: '" + s + "'");
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid_input("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) invalid_input("cannot write " + path);
  return out;
}

bool numeric_row(const std::vector<std::string>& fields) {
  double v = 0.0;
  for (const auto& f : fields) {
    if (!parse_double(f, v)) return false;
  }
  return true;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud, bool header) {
  std::vector<std::string> names;
  if (header) {
    for (int c = 0; c < cloud.ambient_dim(); ++c) names.push_back("x" + std::to_string(c));
  }
  write_matrix_csv(out, cloud.coords(), names);
}

PointCloud read_cloud_csv(std::istream& in, int intrinsic_dim) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (rows.empty() && line_no == 1 && !numeric_row(fields)) continue;
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], row[c])) invalid_input("line " + std::to_string(line_no) + ": bad number '" + fields[c] + "'");
    }
    if (!rows.empty() && row.size() != rows.front().size()) invalid_input("line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) invalid_input("point cloud file has no rows");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return PointCloud(std::move(m), intrinsic_dim);
}

void save_cloud(const std::string& path, const PointCloud& cloud, bool header) {
  auto out = open_out(path);
  write_cloud_csv(out, cloud, header);
}

PointCloud load_cloud(const std::string& path, int intrinsic_dim) {
  auto in = open_in(path);
  return read_cloud_csv(in, intrinsic_dim);
}

void write_matrix_csv(std::ostream& out, const Mat& m, const std::vector<std::string>& header) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  if (!header.empty()) out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

void write_indices_csv(std::ostream& out, const std::vector<std::size_t>& indices) {
  for (std::size_t i : indices) out << i << '\n';
}

std::vector<std::size_t> read_indices_csv(std::istream& in) {
  std::vector<std::size_t> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split_csv_line(t);
    if (first && !numeric_row(fields)) {
      first = false;
      continue;
    }
    first = false;
    out.push_back(parse_index(fields.front()));
  }
  return out;
}

std::vector<std::size_t> load_indices(const std::string& path) {
  auto in = open_in(path);
  return read_indices_csv(in);
}

std::vector<std::pair<std::size_t, std::size_t>> read_pairs_csv(std::istream& in) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split_csv_line(t);
    if (first && !numeric_row(fields)) {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() < 2) invalid_input("pair rows need two columns");
    out.emplace_back(parse_index(fields[0]), parse_index(fields[1]));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> load_pairs(const std::string& path) {
  auto in = open_in(path);
  return read_pairs_csv(in);
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) invalid_input("row width does not match the table schema");
  rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
}

void CsvTable::save(const std::string& path) const {
  auto out = open_out(path);
  write(out);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  invalid_input("no column named " + name);
}

CsvTable CsvTable::read(std::istream& in) {
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (t.columns.empty()) {
      t.columns = split_csv_line(line);
    } else {
      t.add(split_csv_line(line));
    }
  }
  return t;
}

CsvTable CsvTable::load(const std::string& path) {
  auto in = open_in(path);
  return read(in);
}

}  // namespace geodesy
