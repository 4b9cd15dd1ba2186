#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ratfit/polybasis.hpp"

namespace ratfit {

// Scientific notation, 17 significant digits, '.' decimal separator.
std::string format_float(double x);

// CSV schema: one header row; coordinate columns x1..xd (real) or
// x1_re,x1_im,... (complex), then y_re[,y_im] when responses are present.
// Lines starting with '#' are comments. ParseError messages carry the
// offending line number.
PointSet read_points_csv(std::istream& in);
PointSet read_points_csv_file(const std::string& path);
void write_points_csv(std::ostream& out, const PointSet& points,
                      const std::vector<std::string>& comments = {});
void write_points_csv_file(const std::string& path, const PointSet& points,
                           const std::vector<std::string>& comments = {});

struct GridAxis {
  double lo;
  double hi;
  Eigen::Index n;
};

// Parses "lo:hi:n[,lo:hi:n]...". Throws ParseError.
std::vector<GridAxis> parse_grid_spec(const std::string& spec);

// Flattened tensor product of the axes; the first axis varies fastest.
Eigen::MatrixXcd tensor_grid(const std::vector<GridAxis>& axes);

}  // namespace ratfit
