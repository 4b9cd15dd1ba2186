#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ratfit {

// Exponent tuple alpha of the monomial x^alpha.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& alpha);

// Ordered set of multi-indices spanning a polynomial space. The ordering
// satisfies prefix-closure: every index after the first is an earlier index
// plus one unit index, which is what makes the Arnoldi recurrence possible.
class MultiIndexSet {
public:
  enum class Kind { total, max };

  struct Predecessor {
    std::size_t k;  // earlier position
    int j;          // coordinate, 0-based
  };

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  // total kind: one entry (the bound on |alpha|); max kind: d entries.
  const std::vector<int>& degrees() const { return degrees_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  // Smallest k, then smallest j, with indices[k] + e_j == indices[ell].
  // Requires 1 <= ell < size(). Throws NoPredecessorError otherwise.
  const Predecessor& predecessor(std::size_t ell) const;

  nlohmann::json to_json() const;
  static MultiIndexSet from_json(const nlohmann::json& doc);

  friend MultiIndexSet total_degree_indices(int dim, int degree);
  friend MultiIndexSet max_degree_indices(const std::vector<int>& degrees);

private:
  MultiIndexSet(Kind kind, int dim, std::vector<int> degrees,
                std::vector<MultiIndex> indices);

  Kind kind_;
  int dim_;
  std::vector<int> degrees_;
  std::vector<MultiIndex> indices_;
  std::vector<Predecessor> predecessors_;  // entry i belongs to position i+1
};

// All alpha with |alpha| <= degree, ascending by total degree; within one
// degree, descending lexicographic on (alpha_1, ..., alpha_d).
MultiIndexSet total_degree_indices(int dim, int degree);

// All alpha with alpha <= degrees componentwise, in lexicographic order,
// first coordinate slowest.
MultiIndexSet max_degree_indices(const std::vector<int>& degrees);

}  // namespace ratfit
