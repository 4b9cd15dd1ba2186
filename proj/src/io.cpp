#include "ratfit/io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ratfit/errors.hpp"

namespace ratfit {

std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no,
                  std::size_t column) {
  // strtod instead of stod: stod throws on subnormals (underflow sets
  // ERANGE), but e.g. exp decay data legitimately contains them. strtod
  // returns the rounded subnormal; only overflow and garbage are errors.
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  const bool overflow = errno == ERANGE && std::abs(value) == HUGE_VAL;
  if (cell.empty() || end != begin + cell.size() || overflow)
    throw ParseError("line " + std::to_string(line_no),
                     "cannot parse \"" + cell + "\" in column " +
                         std::to_string(column + 1));
  return value;
}

struct Header {
  int dim = 0;
  bool complex_points = false;
  bool has_y = false;
  bool complex_y = false;
  std::size_t columns = 0;
};

Header parse_header(const std::vector<std::string>& names,
                    std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no);
  Header h;
  std::size_t pos = 0;
  while (pos < names.size() && names[pos].rfind("x", 0) == 0) {
    const int coord = h.dim + 1;
    const std::string base = "x" + std::to_string(coord);
    if (names[pos] == base) {
      if (h.dim > 0 && h.complex_points)
        throw ParseError(where, "mixed real and complex coordinate columns");
      ++h.dim;
      ++pos;
    } else if (names[pos] == base + "_re") {
      if (h.dim > 0 && !h.complex_points)
        throw ParseError(where, "mixed real and complex coordinate columns");
      if (pos + 1 >= names.size() || names[pos + 1] != base + "_im")
        throw ParseError(where, "expected " + base + "_im after " + names[pos]);
      h.complex_points = true;
      ++h.dim;
      pos += 2;
    } else {
      throw ParseError(where, "unexpected column \"" + names[pos] + "\"");
    }
  }
  if (h.dim == 0) throw ParseError(where, "no coordinate columns");

  if (pos < names.size()) {
    if (names[pos] == "y" || names[pos] == "y_re") {
      h.has_y = true;
      ++pos;
      if (pos < names.size() && names[pos] == "y_im") {
        h.complex_y = true;
        ++pos;
      }
    } else {
      throw ParseError(where, "unexpected column \"" + names[pos] + "\"");
    }
  }
  if (pos != names.size())
    throw ParseError(where, "trailing column \"" + names[pos] + "\"");
  h.columns = static_cast<std::size_t>(h.dim) * (h.complex_points ? 2 : 1) +
              (h.has_y ? (h.complex_y ? 2 : 1) : 0);
  return h;
}

}  // namespace

PointSet read_points_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  Header header;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::vector<std::string> cells = split(line, ',');
    if (!have_header) {
      header = parse_header(cells, line_no);
      have_header = true;
      continue;
    }
    if (cells.size() != header.columns)
      throw ParseError("line " + std::to_string(line_no),
                       "expected " + std::to_string(header.columns) +
                           " columns, got " + std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      row[c] = parse_cell(cells[c], line_no, c);
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("line 1", "missing header row");
  if (rows.empty()) throw ParseError("line " + std::to_string(line_no),
                                     "no data rows");

  PointSet points;
  const Eigen::Index M = static_cast<Eigen::Index>(rows.size());
  points.X.resize(M, header.dim);
  if (header.has_y) points.y.resize(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    const std::vector<double>& row = rows[static_cast<std::size_t>(i)];
    std::size_t c = 0;
    for (int j = 0; j < header.dim; ++j) {
      if (header.complex_points) {
        points.X(i, j) = Complex(row[c], row[c + 1]);
        c += 2;
      } else {
        points.X(i, j) = Complex(row[c], 0.0);
        c += 1;
      }
    }
    if (header.has_y) {
      points.y(i) = header.complex_y ? Complex(row[c], row[c + 1])
                                     : Complex(row[c], 0.0);
    }
  }
  return points;
}

PointSet read_points_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  return read_points_csv(in);
}

void write_points_csv(std::ostream& out, const PointSet& points,
                      const std::vector<std::string>& comments) {
  const bool complex_points =
      points.X.size() > 0 && points.X.imag().cwiseAbs().maxCoeff() != 0.0;
  const bool complex_y = points.has_responses() &&
                         points.y.imag().cwiseAbs().maxCoeff() != 0.0;
  for (const std::string& c : comments) out << "# " << c << '\n';
  for (int j = 1; j <= points.dim(); ++j) {
    if (j > 1) out << ',';
    if (complex_points)
      out << 'x' << j << "_re,x" << j << "_im";
    else
      out << 'x' << j;
  }
  if (points.has_responses()) out << (complex_y ? ",y_re,y_im" : ",y_re");
  out << '\n';

  for (Eigen::Index i = 0; i < points.count(); ++i) {
    for (int j = 0; j < points.dim(); ++j) {
      if (j > 0) out << ',';
      out << format_float(points.X(i, j).real());
      if (complex_points) out << ',' << format_float(points.X(i, j).imag());
    }
    if (points.has_responses()) {
      out << ',' << format_float(points.y(i).real());
      if (complex_y) out << ',' << format_float(points.y(i).imag());
    }
    out << '\n';
  }
}

void write_points_csv_file(const std::string& path, const PointSet& points,
                           const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, "cannot open file for writing");
  write_points_csv(out, points, comments);
}

std::vector<GridAxis> parse_grid_spec(const std::string& spec) {
  std::vector<GridAxis> axes;
  for (const std::string& part : split(spec, ',')) {
    const std::vector<std::string> f = split(part, ':');
    if (f.size() != 3)
      throw ParseError("grid \"" + part + "\"", "expected lo:hi:n");
    GridAxis axis{};
    try {
      std::size_t used = 0;
      axis.lo = std::stod(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument(f[0]);
      axis.hi = std::stod(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument(f[1]);
      axis.n = std::stoll(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument(f[2]);
    } catch (const std::exception&) {
      throw ParseError("grid \"" + part + "\"", "cannot parse lo:hi:n");
    }
    if (axis.n < 1)
      throw ParseError("grid \"" + part + "\"", "need at least one point");
    axes.push_back(axis);
  }
  if (axes.empty()) throw ParseError("grid", "empty specification");
  return axes;
}

Eigen::MatrixXcd tensor_grid(const std::vector<GridAxis>& axes) {
  Eigen::Index total = 1;
  for (const GridAxis& axis : axes) total *= axis.n;
  Eigen::MatrixXcd X(total, static_cast<Eigen::Index>(axes.size()));
  for (Eigen::Index row = 0; row < total; ++row) {
    Eigen::Index rem = row;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      const GridAxis& axis = axes[j];
      const Eigen::Index idx = rem % axis.n;
      rem /= axis.n;
      const double v =
          axis.n == 1
              ? axis.lo
              : axis.lo + (axis.hi - axis.lo) *
                              static_cast<double>(idx) /
                              static_cast<double>(axis.n - 1);
      X(row, static_cast<Eigen::Index>(j)) = Complex(v, 0.0);
    }
  }
  return X;
}

}  // namespace ratfit
