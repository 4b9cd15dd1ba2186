#include "ratfit/multiindex.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "ratfit/errors.hpp"

namespace ratfit {

int total_degree(const MultiIndex& alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

namespace {

void emit_degree_slice(int dim, int degree, MultiIndex& prefix,
                       std::vector<MultiIndex>& out) {
  if (dim == 1) {
    prefix.push_back(degree);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int a = degree; a >= 0; --a) {
    prefix.push_back(a);
    emit_degree_slice(dim - 1, degree - a, prefix, out);
    prefix.pop_back();
  }
}

std::vector<MultiIndexSet::Predecessor> link_predecessors(
    const std::vector<MultiIndex>& indices) {
  std::map<MultiIndex, std::size_t> position;
  for (std::size_t i = 0; i < indices.size(); ++i) position.emplace(indices[i], i);

  std::vector<MultiIndexSet::Predecessor> pred;
  pred.reserve(indices.size() > 0 ? indices.size() - 1 : 0);
  const int d = indices.empty() ? 0 : static_cast<int>(indices[0].size());
  for (std::size_t ell = 1; ell < indices.size(); ++ell) {
    MultiIndexSet::Predecessor best{indices.size(), -1};
    MultiIndex candidate = indices[ell];
    for (int j = 0; j < d; ++j) {
      if (candidate[j] == 0) continue;
      candidate[j] -= 1;
      auto it = position.find(candidate);
      candidate[j] += 1;
      if (it == position.end() || it->second >= ell) continue;
      if (it->second < best.k) best = {it->second, j};
    }
    if (best.j < 0) throw NoPredecessorError(ell + 1);
    pred.push_back(best);
  }
  return pred;
}

}  // namespace

MultiIndexSet::MultiIndexSet(Kind kind, int dim, std::vector<int> degrees,
                             std::vector<MultiIndex> indices)
    : kind_(kind),
      dim_(dim),
      degrees_(std::move(degrees)),
      indices_(std::move(indices)),
      predecessors_(link_predecessors(indices_)) {}

const MultiIndexSet::Predecessor& MultiIndexSet::predecessor(
    std::size_t ell) const {
  if (ell < 1 || ell >= indices_.size())
    throw std::out_of_range("predecessor position out of range");
  return predecessors_[ell - 1];
}

MultiIndexSet total_degree_indices(int dim, int degree) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  std::vector<MultiIndex> indices;
  MultiIndex prefix;
  for (int k = 0; k <= degree; ++k) emit_degree_slice(dim, k, prefix, indices);
  return MultiIndexSet(MultiIndexSet::Kind::total, dim, {degree},
                       std::move(indices));
}

MultiIndexSet max_degree_indices(const std::vector<int>& degrees) {
  if (degrees.empty()) throw std::invalid_argument("dimension must be >= 1");
  for (int m : degrees)
    if (m < 0) throw std::invalid_argument("degrees must be >= 0");
  const int d = static_cast<int>(degrees.size());
  std::vector<MultiIndex> indices;
  MultiIndex alpha(d, 0);
  while (true) {
    indices.push_back(alpha);
    int pos = d - 1;
    while (pos >= 0 && alpha[pos] == degrees[pos]) {
      alpha[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    alpha[pos] += 1;
  }
  return MultiIndexSet(MultiIndexSet::Kind::max, d, degrees,
                       std::move(indices));
}

nlohmann::json MultiIndexSet::to_json() const {
  nlohmann::json doc;
  doc["kind"] = kind_ == Kind::total ? "total" : "max";
  doc["dim"] = dim_;
  if (kind_ == Kind::total)
    doc["degree"] = degrees_[0];
  else
    doc["degree"] = degrees_;
  return doc;
}

MultiIndexSet MultiIndexSet::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("indices", "expected an object");
  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw ParseError("indices.kind", "missing or not a string");
  const std::string kind = doc["kind"].get<std::string>();
  if (!doc.contains("dim") || !doc["dim"].is_number_integer())
    throw ParseError("indices.dim", "missing or not an integer");
  const int dim = doc["dim"].get<int>();
  if (dim < 1) throw ParseError("indices.dim", "must be >= 1");
  if (!doc.contains("degree")) throw ParseError("indices.degree", "missing");

  if (kind == "total") {
    if (!doc["degree"].is_number_integer())
      throw ParseError("indices.degree", "total kind needs a single integer");
    return total_degree_indices(dim, doc["degree"].get<int>());
  }
  if (kind == "max") {
    if (!doc["degree"].is_array())
      throw ParseError("indices.degree", "max kind needs an integer array");
    std::vector<int> degrees = doc["degree"].get<std::vector<int>>();
    if (static_cast<int>(degrees.size()) != dim)
      throw ParseError("indices.degree", "length does not match dim");
    return max_degree_indices(degrees);
  }
  throw ParseError("indices.kind", "unknown kind \"" + kind + "\"");
}

}  // namespace ratfit
