#include "ratfit/polybasis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ratfit/errors.hpp"

namespace ratfit {

void PointSet::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("point set must have M >= 1 and d >= 1");
  if (y.size() > 0 && y.size() != X.rows())
    throw std::invalid_argument("response length does not match point count");
  if (!X.allFinite() || (y.size() > 0 && !y.allFinite()))
    throw std::invalid_argument("point set contains non-finite entries");
}

OrthoBasis fit_arnoldi(const PointSet& points, const Eigen::VectorXcd& weight,
                       const MultiIndexSet& indices) {
  points.validate();
  const Eigen::Index M = points.count();
  const Eigen::Index N = static_cast<Eigen::Index>(indices.size());
  if (indices.dim() != points.dim())
    throw std::invalid_argument("index set dimension does not match points");
  if (weight.size() != M)
    throw std::invalid_argument("weight length does not match point count");
  if (!weight.allFinite())
    throw std::invalid_argument("weight contains non-finite entries");
  if (M < N)
    throw std::invalid_argument("need at least as many points as basis columns");

  Eigen::MatrixXcd Q(M, N);
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(N, N);

  const double wnorm = weight.norm();
  if (wnorm == 0.0) throw std::invalid_argument("weight must be nonzero");
  R(0, 0) = wnorm;
  Q.col(0) = weight / wnorm;

  for (Eigen::Index ell = 1; ell < N; ++ell) {
    const auto& pred = indices.predecessor(static_cast<std::size_t>(ell));
    Eigen::VectorXcd v =
        points.X.col(pred.j).cwiseProduct(Q.col(static_cast<Eigen::Index>(pred.k)));
    const double vnorm0 = v.norm();

    // Classical Gram-Schmidt, two passes, coefficients summed into R.
    auto prev = Q.leftCols(ell);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXcd s = prev.adjoint() * v;
      v.noalias() -= prev * s;
      R.col(ell).head(ell) += s;
    }

    const double pivot = v.norm();
    if (!(pivot > 1e-14 * vnorm0))
      throw BreakdownError(static_cast<std::size_t>(ell) + 1);
    R(ell, ell) = pivot;
    Q.col(ell) = v / pivot;
  }

  return OrthoBasis{std::move(Q), std::move(R), indices, weight};
}

Eigen::MatrixXcd eval_arnoldi(const Eigen::MatrixXcd& R,
                              const MultiIndexSet& indices,
                              const Eigen::MatrixXcd& Z) {
  const Eigen::Index N = static_cast<Eigen::Index>(indices.size());
  if (R.rows() != N || R.cols() != N)
    throw std::invalid_argument("R size does not match index set");
  if (static_cast<int>(Z.cols()) != indices.dim())
    throw std::invalid_argument("point dimension does not match index set");

  const Eigen::Index M = Z.rows();
  Eigen::MatrixXcd W(M, N);
  if (R(0, 0) == Complex(0.0)) throw DegenerateRError(1);
  W.col(0).setConstant(1.0 / R(0, 0));

  for (Eigen::Index ell = 1; ell < N; ++ell) {
    if (R(ell, ell) == Complex(0.0))
      throw DegenerateRError(static_cast<std::size_t>(ell) + 1);
    const auto& pred = indices.predecessor(static_cast<std::size_t>(ell));
    Eigen::VectorXcd v =
        Z.col(pred.j).cwiseProduct(W.col(static_cast<Eigen::Index>(pred.k)));
    v.noalias() -= W.leftCols(ell) * R.col(ell).head(ell);
    W.col(ell) = v / R(ell, ell);
  }
  return W;
}

BasisQuality basis_quality(const OrthoBasis& basis, const PointSet& points) {
  const Eigen::Index N = basis.Q.cols();
  BasisQuality q{};
  q.orthogonality_error =
      (basis.Q.adjoint() * basis.Q - Eigen::MatrixXcd::Identity(N, N)).norm();
  q.max_recurrence_error = 0.0;
  for (Eigen::Index ell = 1; ell < N; ++ell) {
    const auto& pred = basis.indices.predecessor(static_cast<std::size_t>(ell));
    Eigen::VectorXcd lhs = points.X.col(pred.j).cwiseProduct(
        basis.Q.col(static_cast<Eigen::Index>(pred.k)));
    const double scale = lhs.norm();
    lhs.noalias() -= basis.Q.leftCols(ell + 1) * basis.R.col(ell).head(ell + 1);
    const double rel = scale > 0.0 ? lhs.norm() / scale : lhs.norm();
    q.max_recurrence_error = std::max(q.max_recurrence_error, rel);
  }
  return q;
}

}  // namespace ratfit
