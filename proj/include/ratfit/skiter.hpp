#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ratfit/multiindex.hpp"
#include "ratfit/polybasis.hpp"
#include "ratfit/rational.hpp"

namespace ratfit {

// Singular values of the stacked solve plus the standard perturbation
// measure for the smallest right singular vector.
struct SolveDiagnostics {
  Eigen::VectorXd singular_values;  // descending
  double cond = std::numeric_limits<double>::infinity();  // s1/(s_{N-1}-s_N)
  bool rank_deficient = false;  // null space numerically multi-dimensional
};

struct HomogeneousSolution {
  Eigen::VectorXcd v;  // unit norm, largest-modulus entry real positive
  SolveDiagnostics diagnostics;
};

// argmin of ||A v|| over unit vectors, via SVD. Requires M >= N >= 2.
HomogeneousSolution solve_homogeneous(const Eigen::MatrixXcd& A);

struct IterationRecord {
  int iteration = 0;     // 1-based
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  double step_norm = std::numeric_limits<double>::quiet_NaN();  // NaN at l=1
  double cond = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXcd a;
  Eigen::VectorXcd b;
  // Basis diagnostics; NaN unless SolverOptions::collect_basis_diagnostics.
  double num_orthogonality_error = std::numeric_limits<double>::quiet_NaN();
  double num_recurrence_error = std::numeric_limits<double>::quiet_NaN();
  double den_orthogonality_error = std::numeric_limits<double>::quiet_NaN();
  double den_recurrence_error = std::numeric_limits<double>::quiet_NaN();
};

struct FitHistory {
  std::vector<IterationRecord> records;
  int best_iteration = 0;    // iteration number of the minimal residual
  std::string termination;   // "converged" | "maxiter" | "breakdown"

  // Columns: iter, residual_norm, step_norm, cond.
  void write_csv(std::ostream& out) const;
};

struct SolverOptions {
  int maxiter = 20;
  double convergence_tol = 1e-12;  // on ||r^l - r^{l-1}|| relative to ||y||
  std::optional<Eigen::VectorXcd> initial_weight;  // default: all ones
  bool collect_basis_diagnostics = false;
};

// One-shot linearized fit: bases with w = ones, one homogeneous solve on
// [P, -diag(y) Q]. Solve diagnostics are written through when requested.
RationalFit fit_linearized(const PointSet& points,
                           const MultiIndexSet& num_indices,
                           const MultiIndexSet& den_indices,
                           SolveDiagnostics* diagnostics = nullptr);

// Classic SK iteration: bases built once with w = ones, each iteration
// reweights the stacked system by the previous denominator explicitly.
std::pair<RationalFit, FitHistory> fit_sk(const PointSet& points,
                                          const MultiIndexSet& num_indices,
                                          const MultiIndexSet& den_indices,
                                          const SolverOptions& options = {});

// Stabilized SK iteration: the weight is absorbed into freshly built
// Arnoldi bases each iteration, keeping every solve well-conditioned.
std::pair<RationalFit, FitHistory> fit_stabilized_sk(
    const PointSet& points, const MultiIndexSet& num_indices,
    const MultiIndexSet& den_indices, const SolverOptions& options = {});

}  // namespace ratfit
