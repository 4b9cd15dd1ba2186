#include "ratfit/refine.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "ratfit/errors.hpp"

namespace ratfit {

namespace {

Eigen::VectorXcd checked_denominator(const Eigen::VectorXcd& b,
                                     const Eigen::MatrixXcd& Q) {
  Eigen::VectorXcd den = Q * b;
  for (Eigen::Index j = 0; j < den.size(); ++j)
    if (den(j) == Complex(0.0))
      throw PoleAtSampleError(static_cast<std::size_t>(j));
  return den;
}

void check_shapes(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                  const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& Q,
                  const Eigen::VectorXcd& y) {
  if (P.cols() != a.size() || Q.cols() != b.size() || P.rows() != Q.rows() ||
      P.rows() != y.size())
    throw std::invalid_argument("residual dimensions do not line up");
}

}  // namespace

Eigen::VectorXcd residual_vector(const Eigen::VectorXcd& a,
                                 const Eigen::VectorXcd& b,
                                 const Eigen::MatrixXcd& P,
                                 const Eigen::MatrixXcd& Q,
                                 const Eigen::VectorXcd& y) {
  check_shapes(a, b, P, Q, y);
  const Eigen::VectorXcd den = checked_denominator(b, Q);
  return y - (P * a).cwiseQuotient(den);
}

Eigen::MatrixXcd jacobian(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                          const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& Q,
                          const Eigen::VectorXcd& y) {
  check_shapes(a, b, P, Q, y);
  const Eigen::VectorXcd den = checked_denominator(b, Q);
  const Eigen::VectorXcd dinv = den.cwiseInverse();
  Eigen::MatrixXcd J(P.rows(), a.size() + b.size());
  J.leftCols(a.size()) = -(dinv.asDiagonal() * P);
  const Eigen::VectorXcd s =
      (P * a).cwiseProduct(dinv).cwiseProduct(dinv);
  J.rightCols(b.size()) = s.asDiagonal() * Q;
  return J;
}

nlohmann::json RefineReport::to_json() const {
  return nlohmann::json{{"iterations", iterations},
                        {"termination", termination},
                        {"final_gradient_norm", final_gradient_norm},
                        {"residual_trace", residual_trace},
                        {"stalled_at_pole", stalled_at_pole}};
}

std::pair<RationalFit, RefineReport> refine_lsq(const RationalFit& fit,
                                                const PointSet& points,
                                                const RefineOptions& options) {
  points.validate();
  if (!points.has_responses()) throw MissingResponsesError();
  if (options.max_iterations < 0)
    throw std::invalid_argument("max_iterations must be >= 0");
  if (options.gradient_tol <= 0.0 || options.step_tol <= 0.0 ||
      options.initial_damping <= 0.0)
    throw std::invalid_argument("refinement tolerances must be > 0");

  const Eigen::MatrixXcd Zm =
      fit.domain_map ? fit.domain_map->apply(points.X) : points.X;
  const Eigen::MatrixXcd P = eval_arnoldi(fit.num_R, fit.num_indices, Zm);
  const Eigen::MatrixXcd Q = eval_arnoldi(fit.den_R, fit.den_indices, Zm);
  const Eigen::VectorXcd& y = points.y;
  const Eigen::Index Na = fit.a.size();
  const Eigen::Index Nb = fit.b.size();

  Eigen::Index frozen = 0;
  fit.b.cwiseAbs().maxCoeff(&frozen);

  const bool real_mode = options.real_coefficients.value_or(
      points.X.imag().isZero(0.0) && y.imag().isZero(0.0) &&
      fit.a.imag().isZero(0.0) && fit.b.imag().isZero(0.0));

  std::vector<Eigen::Index> free_cols;
  free_cols.reserve(static_cast<std::size_t>(Na + Nb - 1));
  for (Eigen::Index k = 0; k < Na + Nb; ++k)
    if (k != Na + frozen) free_cols.push_back(k);
  const Eigen::Index nfree = static_cast<Eigen::Index>(free_cols.size());

  Eigen::VectorXcd a = fit.a;
  Eigen::VectorXcd b = fit.b;
  Eigen::VectorXcd f = residual_vector(a, b, P, Q, y);
  double cost = f.norm();

  RefineReport report;
  report.residual_trace.push_back(cost);
  double lambda = options.initial_damping;
  int accepted = 0;
  std::string termination;

  auto free_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index k : free_cols)
      s += std::norm(k < Na ? a(k) : b(k - Na));
    return std::sqrt(s);
  };
  auto stepped = [&](const Eigen::VectorXcd& delta) {
    std::pair<Eigen::VectorXcd, Eigen::VectorXcd> out{a, b};
    for (Eigen::Index i = 0; i < nfree; ++i) {
      const Eigen::Index k = free_cols[i];
      if (k < Na)
        out.first(k) += delta(i);
      else
        out.second(k - Na) += delta(i);
    }
    return out;
  };
  auto gradient = [&](const Eigen::MatrixXcd& Jf) {
    return (Jf.adjoint() * f).eval();
  };

  for (int it = 1; it <= options.max_iterations; ++it) {
    report.iterations = it;
    const Eigen::MatrixXcd J = jacobian(a, b, P, Q, y);
    Eigen::MatrixXcd Jf(J.rows(), nfree);
    for (Eigen::Index i = 0; i < nfree; ++i) Jf.col(i) = J.col(free_cols[i]);
    if (real_mode) Jf = Jf.real().cast<Complex>();

    const Eigen::VectorXcd g = gradient(Jf);
    report.final_gradient_norm = g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
    bool flat = true;
    for (Eigen::Index i = 0; i < nfree; ++i)
      if (std::abs(g(i)) > options.gradient_tol * cost * Jf.col(i).norm()) {
        flat = false;
        break;
      }
    if (flat) {
      termination = "gradient_tol";
      break;
    }

    Eigen::VectorXcd delta;
    if (real_mode) {
      const Eigen::MatrixXd Jr = Jf.real();
      Eigen::MatrixXd H = Jr.transpose() * Jr;
      H.diagonal().array() += lambda;
      const Eigen::VectorXd d = H.ldlt().solve(-(Jr.transpose() * f.real()));
      delta = d.cast<Complex>();
    } else {
      Eigen::MatrixXcd H = Jf.adjoint() * Jf;
      H.diagonal().array() += lambda;
      delta = H.ldlt().solve(-g);
    }

    const bool small_step =
        delta.norm() <= options.step_tol * (free_norm() + options.step_tol);

    auto [ac, bc] = stepped(delta);
    bool pole = false;
    double candidate_cost = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd fc;
    try {
      fc = residual_vector(ac, bc, P, Q, y);
      if (fc.allFinite())
        candidate_cost = fc.norm();
      else
        pole = true;
    } catch (const PoleAtSampleError&) {
      pole = true;
    }

    if (!pole && candidate_cost < cost) {
      a = std::move(ac);
      b = std::move(bc);
      f = std::move(fc);
      cost = candidate_cost;
      lambda = std::max(lambda * 0.1, 1e-300);
      ++accepted;
      report.residual_trace.push_back(cost);
    } else {
      lambda *= 10.0;
    }

    if (small_step) {
      termination = "step_tol";
      break;
    }
    if (lambda > 1e32) {
      termination = (accepted == 0 && pole) ? "stalled_at_pole" : "stalled";
      break;
    }
  }
  if (termination.empty()) termination = "max_iterations";
  report.termination = termination;
  report.stalled_at_pole = termination == "stalled_at_pole";

  if (report.stalled_at_pole) return {fit, std::move(report)};

  RationalFit out = fit;
  out.a = std::move(a);
  out.b = std::move(b);
  out.meta.solver =
      fit.meta.solver.empty() ? "refine" : fit.meta.solver + "+refine";
  out.meta.residual_norm = cost;
  return {std::move(out), std::move(report)};
}

}  // namespace ratfit
