#pragma once

// CSV readers and writers for point clouds, index lists, pairs and tables.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "geodesy/distance_matrix.hpp"
#include "geodesy/point_cloud.hpp"

namespace geodesy {

/// Shortest decimal form that round-trips (17 significant digits at most); "inf" and "nan" for
/// non-finite values.
std::string format_double(double x);

/// One row per point, d columns. With `header`, a first line `x0,...,x{d-1}`.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud, bool header = false);
/// Reads rows of equal width; a non-numeric first line is taken as a header and skipped.
PointCloud read_cloud_csv(std::istream& in, int intrinsic_dim);

void save_cloud(const std::string& path, const PointCloud& cloud, bool header = false);
PointCloud load_cloud(const std::string& path, int intrinsic_dim);

/// Matrix rows with an optional header line.
void write_matrix_csv(std::ostream& out, const Mat& m, const std::vector<std::string>& header = {});

void write_indices_csv(std::ostream& out, const std::vector<std::size_t>& indices);
std::vector<std::size_t> read_indices_csv(std::istream& in);
std::vector<std::size_t> load_indices(const std::string& path);

/// Two integer columns per row.
std::vector<std::pair<std::size_t, std::size_t>> read_pairs_csv(std::istream& in);
std::vector<std::pair<std::size_t, std::size_t>> load_pairs(const std::string& path);

/// Fixed-schema table of already formatted cells.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  void write(std::ostream& out) const;
  void save(const std::string& path) const;
  /// Index of a column; throws InvalidInput when absent.
  std::size_t column(const std::string& name) const;
  static CsvTable read(std::istream& in);
  static CsvTable load(const std::string& path);
};

/// Splits one CSV line on commas and trims surrounding blanks from each field.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace geodesy
