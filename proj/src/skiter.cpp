#include "ratfit/skiter.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/SVD>

#include "ratfit/errors.hpp"
#include "ratfit/io.hpp"

namespace ratfit {

HomogeneousSolution solve_homogeneous(const Eigen::MatrixXcd& A) {
  const Eigen::Index N = A.cols();
  if (A.rows() < N || N < 2)
    throw std::invalid_argument("solve_homogeneous needs M >= N >= 2");

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXcd v = svd.matrixV().col(N - 1);

  // When a wide trailing cluster of singular values sits at the noise
  // floor, the divide-and-conquer deflation returns a vector shaped by the
  // deflation tree rather than by the problem. Re-solving with the (slower)
  // Jacobi SVD gives a rotation-balanced representative of the cluster,
  // which behaves far better under the stabilized iteration's reweighting.
  if (sv(N - 1) <= 1e-12 * sv(0)) {
    Eigen::Index cluster = 0;
    while (cluster < N && sv(N - 1 - cluster) <= 1e-8 * sv(0)) ++cluster;
    if (cluster >= 10) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> jac(A, Eigen::ComputeThinV);
      v = jac.matrixV().col(N - 1);
    }
  }

  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const double mag = std::abs(v(imax));
  v *= std::conj(v(imax)) / mag;
  v(imax) = Complex(mag, 0.0);

  SolveDiagnostics diag;
  diag.singular_values = sv;
  const double gap = sv(N - 2) - sv(N - 1);
  diag.cond = gap > 0.0 ? sv(0) / gap
                        : std::numeric_limits<double>::infinity();
  diag.rank_deficient =
      sv(N - 2) < 1e-14 * sv(0) && sv(N - 1) < 1e-14 * sv(0);
  return HomogeneousSolution{std::move(v), std::move(diag)};
}

void FitHistory::write_csv(std::ostream& out) const {
  out << "iter,residual_norm,step_norm,cond\n";
  for (const auto& rec : records)
    out << rec.iteration << ',' << format_float(rec.residual_norm) << ','
        << format_float(rec.step_norm) << ',' << format_float(rec.cond)
        << '\n';
}

namespace {

// Floors near-zero denominator values at 1e-30 * max|den|, keeping phase,
// so a transient degenerate denominator cannot kill the iteration.
Eigen::VectorXcd clamp_denominator(const Eigen::VectorXcd& den) {
  const double dmax = den.cwiseAbs().maxCoeff();
  const double floor =
      dmax > 0.0 ? 1e-30 * dmax : std::numeric_limits<double>::min();
  Eigen::VectorXcd out = den;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const double m = std::abs(out(j));
    if (m < floor) out(j) = (m == 0.0 ? Complex(1.0, 0.0) : out(j) / m) * floor;
  }
  return out;
}

void check_fit_inputs(const PointSet& points, const MultiIndexSet& num_indices,
                      const MultiIndexSet& den_indices) {
  points.validate();
  if (!points.has_responses()) throw MissingResponsesError();
  if (num_indices.dim() != points.dim() || den_indices.dim() != points.dim())
    throw std::invalid_argument("index set dimension does not match points");
  const auto need = static_cast<Eigen::Index>(num_indices.size()) +
                    static_cast<Eigen::Index>(den_indices.size());
  if (points.count() < need)
    throw std::invalid_argument(
        "need at least as many points as total basis size");
}

Eigen::VectorXcd resolve_initial_weight(const PointSet& points,
                                        const SolverOptions& options) {
  if (!options.initial_weight) return Eigen::VectorXcd::Ones(points.count());
  const Eigen::VectorXcd& w = *options.initial_weight;
  if (w.size() != points.count())
    throw std::invalid_argument("initial weight length does not match points");
  if (!w.allFinite() || w.norm() == 0.0)
    throw std::invalid_argument("initial weight must be finite and nonzero");
  return w;
}

void record_basis_diagnostics(IterationRecord& rec, const OrthoBasis& P,
                              const OrthoBasis& Q, const PointSet& points) {
  const BasisQuality qp = basis_quality(P, points);
  const BasisQuality qq = basis_quality(Q, points);
  rec.num_orthogonality_error = qp.orthogonality_error;
  rec.num_recurrence_error = qp.max_recurrence_error;
  rec.den_orthogonality_error = qq.orthogonality_error;
  rec.den_recurrence_error = qq.max_recurrence_error;
}

// Numerator and denominator spaces often coincide (e.g. degree (k, k)
// fits); one Arnoldi build then serves both sides.
bool same_space(const MultiIndexSet& a, const MultiIndexSet& b) {
  return a.indices() == b.indices();
}

}  // namespace

RationalFit fit_linearized(const PointSet& points,
                           const MultiIndexSet& num_indices,
                           const MultiIndexSet& den_indices,
                           SolveDiagnostics* diagnostics) {
  check_fit_inputs(points, num_indices, den_indices);
  const Eigen::Index M = points.count();
  const auto Na = static_cast<Eigen::Index>(num_indices.size());
  const auto Nb = static_cast<Eigen::Index>(den_indices.size());

  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(M);
  const OrthoBasis P = fit_arnoldi(points, ones, num_indices);
  const OrthoBasis Q =
      same_space(num_indices, den_indices) ? P : fit_arnoldi(points, ones, den_indices);

  Eigen::MatrixXcd A(M, Na + Nb);
  A.leftCols(Na) = P.Q;
  A.rightCols(Nb) = -(points.y.asDiagonal() * Q.Q);
  const HomogeneousSolution sol = solve_homogeneous(A);
  if (diagnostics) *diagnostics = sol.diagnostics;

  RationalFit fit{P.R,
                  num_indices,
                  Q.R,
                  den_indices,
                  sol.v.head(Na),
                  sol.v.tail(Nb),
                  FitMeta{"linearized", 1, 0.0},
                  std::nullopt};
  const Eigen::VectorXcd den = clamp_denominator(Q.Q * fit.b);
  const Eigen::VectorXcd r = (P.Q * fit.a).cwiseQuotient(den);
  fit.meta.residual_norm = (points.y - r).norm();
  return fit;
}

std::pair<RationalFit, FitHistory> fit_sk(const PointSet& points,
                                          const MultiIndexSet& num_indices,
                                          const MultiIndexSet& den_indices,
                                          const SolverOptions& options) {
  check_fit_inputs(points, num_indices, den_indices);
  if (options.maxiter < 1)
    throw std::invalid_argument("maxiter must be >= 1");
  const Eigen::Index M = points.count();
  const auto Na = static_cast<Eigen::Index>(num_indices.size());
  const auto Nb = static_cast<Eigen::Index>(den_indices.size());
  const double ynorm = points.y.norm();

  // Bases are built once; only the row weighting changes per iteration.
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(M);
  const OrthoBasis P = fit_arnoldi(points, ones, num_indices);
  const OrthoBasis Q =
      same_space(num_indices, den_indices) ? P : fit_arnoldi(points, ones, den_indices);

  Eigen::MatrixXcd A0(M, Na + Nb);
  A0.leftCols(Na) = P.Q;
  A0.rightCols(Nb) = -(points.y.asDiagonal() * Q.Q);

  double base_orth[2] = {std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN()};
  double base_rec[2] = {base_orth[0], base_orth[1]};
  if (options.collect_basis_diagnostics) {
    const BasisQuality qp = basis_quality(P, points);
    const BasisQuality qq = basis_quality(Q, points);
    base_orth[0] = qp.orthogonality_error;
    base_rec[0] = qp.max_recurrence_error;
    base_orth[1] = qq.orthogonality_error;
    base_rec[1] = qq.max_recurrence_error;
  }

  FitHistory history;
  Eigen::VectorXcd weight = resolve_initial_weight(points, options);
  Eigen::VectorXcd r_prev;
  double best_residual = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd best_a, best_b;

  for (int ell = 1; ell <= options.maxiter; ++ell) {
    const Eigen::MatrixXcd A = weight.asDiagonal() * A0;
    const HomogeneousSolution sol = solve_homogeneous(A);
    const Eigen::VectorXcd a = sol.v.head(Na);
    const Eigen::VectorXcd b = sol.v.tail(Nb);

    const Eigen::VectorXcd den = clamp_denominator(Q.Q * b);
    const Eigen::VectorXcd r = (P.Q * a).cwiseQuotient(den);

    IterationRecord rec;
    rec.iteration = ell;
    rec.residual_norm = (points.y - r).norm();
    if (ell > 1) rec.step_norm = (r - r_prev).norm();
    rec.cond = sol.diagnostics.cond;
    rec.a = a;
    rec.b = b;
    if (options.collect_basis_diagnostics) {
      rec.num_orthogonality_error = base_orth[0];
      rec.num_recurrence_error = base_rec[0];
      rec.den_orthogonality_error = base_orth[1];
      rec.den_recurrence_error = base_rec[1];
    }
    history.records.push_back(std::move(rec));

    if (history.records.back().residual_norm < best_residual) {
      best_residual = history.records.back().residual_norm;
      best_a = a;
      best_b = b;
      history.best_iteration = ell;
    }

    weight = den.cwiseInverse();
    if (ell > 1 && history.records.back().step_norm <=
                       options.convergence_tol * ynorm) {
      history.termination = "converged";
      break;
    }
    r_prev = r;
  }
  if (history.termination.empty()) history.termination = "maxiter";

  RationalFit fit{P.R,
                  num_indices,
                  Q.R,
                  den_indices,
                  std::move(best_a),
                  std::move(best_b),
                  FitMeta{"sk", history.best_iteration, best_residual},
                  std::nullopt};
  return {std::move(fit), std::move(history)};
}

std::pair<RationalFit, FitHistory> fit_stabilized_sk(
    const PointSet& points, const MultiIndexSet& num_indices,
    const MultiIndexSet& den_indices, const SolverOptions& options) {
  check_fit_inputs(points, num_indices, den_indices);
  if (options.maxiter < 1)
    throw std::invalid_argument("maxiter must be >= 1");
  const Eigen::Index M = points.count();
  const auto Na = static_cast<Eigen::Index>(num_indices.size());
  const auto Nb = static_cast<Eigen::Index>(den_indices.size());
  const double ynorm = points.y.norm();

  FitHistory history;
  Eigen::VectorXcd w = resolve_initial_weight(points, options);
  Eigen::VectorXcd r_prev;

  struct Best {
    double residual = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd a, b;
    Eigen::MatrixXcd num_R, den_R;
    int iteration = 0;
  } best;

  for (int ell = 1; ell <= options.maxiter; ++ell) {
    std::optional<OrthoBasis> P, Q;
    try {
      P.emplace(fit_arnoldi(points, w, num_indices));
      if (same_space(num_indices, den_indices))
        Q = P;
      else
        Q.emplace(fit_arnoldi(points, w, den_indices));
    } catch (const BreakdownError&) {
      if (history.records.empty()) throw;
      history.termination = "breakdown";
      break;
    }

    Eigen::MatrixXcd A(M, Na + Nb);
    A.leftCols(Na) = P->Q;
    A.rightCols(Nb) = -(points.y.asDiagonal() * Q->Q);
    const HomogeneousSolution sol = solve_homogeneous(A);
    const Eigen::VectorXcd a = sol.v.head(Na);
    const Eigen::VectorXcd b = sol.v.tail(Nb);

    const Eigen::VectorXcd den = clamp_denominator(Q->Q * b);
    const Eigen::VectorXcd r = (P->Q * a).cwiseQuotient(den);

    IterationRecord rec;
    rec.iteration = ell;
    rec.residual_norm = (points.y - r).norm();
    if (ell > 1) rec.step_norm = (r - r_prev).norm();
    rec.cond = sol.diagnostics.cond;
    rec.a = a;
    rec.b = b;
    if (options.collect_basis_diagnostics)
      record_basis_diagnostics(rec, *P, *Q, points);
    history.records.push_back(std::move(rec));

    if (history.records.back().residual_norm < best.residual) {
      best.residual = history.records.back().residual_norm;
      best.a = a;
      best.b = b;
      best.num_R = P->R;
      best.den_R = Q->R;
      best.iteration = ell;
      history.best_iteration = ell;
    }

    w = w.cwiseQuotient(den);
    if (ell > 1 && history.records.back().step_norm <=
                       options.convergence_tol * ynorm) {
      history.termination = "converged";
      break;
    }
    r_prev = r;
  }
  if (history.termination.empty()) history.termination = "maxiter";

  RationalFit fit{std::move(best.num_R),
                  num_indices,
                  std::move(best.den_R),
                  den_indices,
                  std::move(best.a),
                  std::move(best.b),
                  FitMeta{"ssk", best.iteration, best.residual},
                  std::nullopt};
  return {std::move(fit), std::move(history)};
}

}  // namespace ratfit
