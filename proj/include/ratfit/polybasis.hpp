#pragma once

#include <complex>

#include <Eigen/Core>

#include "ratfit/multiindex.hpp"

namespace ratfit {

using Complex = std::complex<double>;

// Sample points with optional responses; y of size 0 means "absent".
struct PointSet {
  Eigen::MatrixXcd X;
  Eigen::VectorXcd y;

  Eigen::Index count() const { return X.rows(); }
  int dim() const { return static_cast<int>(X.cols()); }
  bool has_responses() const { return y.size() > 0; }

  // Throws std::invalid_argument on size mismatch or non-finite entries.
  void validate() const;
};

// Discrete orthonormal polynomial basis on a point set, seeded by a weight
// vector w: Q has orthonormal columns spanning diag(w) * span{x^alpha}, and
// R holds the recurrence coefficients needed to evaluate elsewhere.
struct OrthoBasis {
  Eigen::MatrixXcd Q;       // M x N
  Eigen::MatrixXcd R;       // N x N upper triangular
  MultiIndexSet indices;
  Eigen::VectorXcd weight;  // the seed w
};

// Multivariate Vandermonde with Arnoldi. Column ell is built by multiplying
// the predecessor column by the coordinate that advances its multi-index,
// then orthogonalizing with classical Gram-Schmidt in two total passes whose
// coefficients accumulate into R.
//
// Throws BreakdownError when a pivot falls below 1e-14 relative to the
// pre-orthogonalization column norm.
OrthoBasis fit_arnoldi(const PointSet& points, const Eigen::VectorXcd& weight,
                       const MultiIndexSet& indices);

// Replays the recurrence stored in R at new points Z, one subtraction pass
// (R already contains both Gram-Schmidt passes). At the training points the
// result equals diag(1/w) * Q. Throws DegenerateRError on a zero pivot.
Eigen::MatrixXcd eval_arnoldi(const Eigen::MatrixXcd& R,
                              const MultiIndexSet& indices,
                              const Eigen::MatrixXcd& Z);

struct BasisQuality {
  double orthogonality_error;    // ||Q^H Q - I||_F
  double max_recurrence_error;   // worst relative column residual
};

BasisQuality basis_quality(const OrthoBasis& basis, const PointSet& points);

}  // namespace ratfit
