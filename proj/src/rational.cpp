#include "ratfit/rational.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ratfit/errors.hpp"

namespace ratfit {

Eigen::MatrixXcd DomainMap::apply(const Eigen::MatrixXcd& Z) const {
  if (Z.cols() != center.size())
    throw std::invalid_argument("domain map dimension does not match points");
  Eigen::MatrixXcd out(Z.rows(), Z.cols());
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    out.col(j) = (Z.col(j).array() - center(j)) / halfwidth(j);
  return out;
}

DomainMap DomainMap::from_points(const Eigen::MatrixXcd& X) {
  if (X.imag().cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("domain map requires real coordinates");
  DomainMap map;
  const Eigen::MatrixXd Xr = X.real();
  const Eigen::VectorXd lo = Xr.colwise().minCoeff();
  const Eigen::VectorXd hi = Xr.colwise().maxCoeff();
  map.center = 0.5 * (lo + hi);
  map.halfwidth = 0.5 * (hi - lo);
  for (Eigen::Index j = 0; j < map.halfwidth.size(); ++j)
    if (map.halfwidth(j) == 0.0) map.halfwidth(j) = 1.0;
  return map;
}

Eigen::VectorXcd evaluate(const RationalFit& fit, const Eigen::MatrixXcd& Z,
                          EvalInfo* info) {
  const Eigen::MatrixXcd Zm = fit.domain_map ? fit.domain_map->apply(Z) : Z;
  const Eigen::VectorXcd num =
      eval_arnoldi(fit.num_R, fit.num_indices, Zm) * fit.a;
  const Eigen::VectorXcd den =
      eval_arnoldi(fit.den_R, fit.den_indices, Zm) * fit.b;

  const double dmax = den.size() > 0 ? den.cwiseAbs().maxCoeff() : 0.0;
  const double floor = 1e-30 * dmax;
  Eigen::VectorXcd r(den.size());
  for (Eigen::Index j = 0; j < den.size(); ++j) {
    if (dmax == 0.0 || std::abs(den(j)) < floor) {
      r(j) = Complex(std::numeric_limits<double>::infinity(), 0.0);
      if (info) info->pole_hits.push_back(j);
    } else {
      r(j) = num(j) / den(j);
    }
  }
  return r;
}

Eigen::VectorXcd denominator_values(const RationalFit& fit,
                                    const Eigen::MatrixXcd& Z) {
  const Eigen::MatrixXcd Zm = fit.domain_map ? fit.domain_map->apply(Z) : Z;
  return eval_arnoldi(fit.den_R, fit.den_indices, Zm) * fit.b;
}

double residual_norm(const RationalFit& fit, const PointSet& points,
                     std::size_t* excluded_poles) {
  if (!points.has_responses()) throw MissingResponsesError();
  EvalInfo info;
  const Eigen::VectorXcd r = evaluate(fit, points.X, &info);
  std::size_t next_hit = 0;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    if (next_hit < info.pole_hits.size() && info.pole_hits[next_hit] == j) {
      ++next_hit;
      continue;
    }
    sum += std::norm(points.y(j) - r(j));
  }
  if (excluded_poles) *excluded_poles = info.pole_hits.size();
  return std::sqrt(sum);
}

namespace {

nlohmann::json complex_array(const Eigen::VectorXcd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

nlohmann::json matrix_row_major(const Eigen::MatrixXcd& A) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      arr.push_back({A(i, j).real(), A(i, j).imag()});
  return arr;
}

Complex parse_complex(const nlohmann::json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() ||
      !node[1].is_number())
    throw ParseError(where, "expected a [re, im] pair");
  return Complex(node[0].get<double>(), node[1].get<double>());
}

Eigen::VectorXcd parse_complex_vector(const nlohmann::json& node,
                                      const std::string& where) {
  if (!node.is_array()) throw ParseError(where, "expected an array");
  Eigen::VectorXcd v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        parse_complex(node[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXcd parse_matrix_row_major(const nlohmann::json& node,
                                        Eigen::Index n,
                                        const std::string& where) {
  if (!node.is_array()) throw ParseError(where, "expected an array");
  if (static_cast<Eigen::Index>(node.size()) != n * n)
    throw ParseError(where, "expected " + std::to_string(n * n) +
                                " entries, got " + std::to_string(node.size()));
  Eigen::MatrixXcd A(n, n);
  std::size_t flat = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j, ++flat)
      A(i, j) = parse_complex(node[flat],
                              where + "[" + std::to_string(flat) + "]");
  return A;
}

Eigen::VectorXd parse_real_vector(const nlohmann::json& node,
                                  const std::string& where) {
  if (!node.is_array()) throw ParseError(where, "expected an array");
  Eigen::VectorXd v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number())
      throw ParseError(where + "[" + std::to_string(i) + "]", "expected a number");
    v(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  return v;
}

}  // namespace

nlohmann::json save(const RationalFit& fit) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["num"] = {{"R", matrix_row_major(fit.num_R)},
                {"indices", fit.num_indices.to_json()}};
  doc["den"] = {{"R", matrix_row_major(fit.den_R)},
                {"indices", fit.den_indices.to_json()}};
  doc["a"] = complex_array(fit.a);
  doc["b"] = complex_array(fit.b);
  doc["meta"] = {{"solver", fit.meta.solver},
                 {"iteration", fit.meta.iteration},
                 {"residual_norm", fit.meta.residual_norm}};
  if (fit.domain_map) {
    std::vector<double> c(fit.domain_map->center.begin(),
                          fit.domain_map->center.end());
    std::vector<double> h(fit.domain_map->halfwidth.begin(),
                          fit.domain_map->halfwidth.end());
    doc["domain_map"] = {{"center", c}, {"halfwidth", h}};
  }
  return doc;
}

RationalFit load(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("$", "expected an object");
  if (!doc.contains("version") || !doc["version"].is_number_integer())
    throw ParseError("version", "missing or not an integer");
  if (doc["version"].get<int>() != 1)
    throw ParseError("version",
                     "unsupported version " + doc["version"].dump());
  for (const char* key : {"num", "den", "a", "b"})
    if (!doc.contains(key))
      throw ParseError(key, "missing");
  for (const char* key : {"num", "den"}) {
    if (!doc[key].is_object() || !doc[key].contains("R") ||
        !doc[key].contains("indices"))
      throw ParseError(key, "expected an object with R and indices");
  }

  MultiIndexSet num_idx = MultiIndexSet::from_json(doc["num"]["indices"]);
  MultiIndexSet den_idx = MultiIndexSet::from_json(doc["den"]["indices"]);
  Eigen::MatrixXcd num_R = parse_matrix_row_major(
      doc["num"]["R"], static_cast<Eigen::Index>(num_idx.size()), "num.R");
  Eigen::MatrixXcd den_R = parse_matrix_row_major(
      doc["den"]["R"], static_cast<Eigen::Index>(den_idx.size()), "den.R");
  Eigen::VectorXcd a = parse_complex_vector(doc["a"], "a");
  Eigen::VectorXcd b = parse_complex_vector(doc["b"], "b");
  if (a.size() != static_cast<Eigen::Index>(num_idx.size()))
    throw ParseError("a", "length does not match numerator basis");
  if (b.size() != static_cast<Eigen::Index>(den_idx.size()))
    throw ParseError("b", "length does not match denominator basis");
  if (b.norm() == 0.0) throw ParseError("b", "must be nonzero");

  FitMeta meta;
  if (doc.contains("meta")) {
    const auto& m = doc["meta"];
    if (!m.is_object()) throw ParseError("meta", "expected an object");
    if (m.contains("solver")) meta.solver = m["solver"].get<std::string>();
    if (m.contains("iteration")) meta.iteration = m["iteration"].get<int>();
    if (m.contains("residual_norm") && m["residual_norm"].is_number())
      meta.residual_norm = m["residual_norm"].get<double>();
  }

  RationalFit fit{std::move(num_R), std::move(num_idx), std::move(den_R),
                  std::move(den_idx), std::move(a),      std::move(b),
                  std::move(meta),   std::nullopt};
  if (doc.contains("domain_map")) {
    const auto& dm = doc["domain_map"];
    if (!dm.is_object() || !dm.contains("center") || !dm.contains("halfwidth"))
      throw ParseError("domain_map", "expected center and halfwidth arrays");
    DomainMap map;
    map.center = parse_real_vector(dm["center"], "domain_map.center");
    map.halfwidth = parse_real_vector(dm["halfwidth"], "domain_map.halfwidth");
    if (map.center.size() != fit.num_indices.dim() ||
        map.halfwidth.size() != fit.num_indices.dim())
      throw ParseError("domain_map", "length does not match dimension");
    fit.domain_map = std::move(map);
  }
  return fit;
}

}  // namespace ratfit
