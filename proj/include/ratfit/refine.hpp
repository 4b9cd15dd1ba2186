#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "ratfit/polybasis.hpp"
#include "ratfit/rational.hpp"

namespace ratfit {

struct RefineOptions {
  int max_iterations = 100;
  double gradient_tol = 1e-10;  // on |J^H f| per column vs ||f||*||column||
  double step_tol = 1e-12;
  double initial_damping = 1e-6;
  // Restrict updates to real coefficients. Defaults to true exactly when
  // points, responses, and coefficients all have zero imaginary part.
  std::optional<bool> real_coefficients;
};

// f(a, b) = y - diag(Qb)^{-1} P a. Throws PoleAtSampleError when the
// denominator vanishes exactly at a sample.
Eigen::VectorXcd residual_vector(const Eigen::VectorXcd& a,
                                 const Eigen::VectorXcd& b,
                                 const Eigen::MatrixXcd& P,
                                 const Eigen::MatrixXcd& Q,
                                 const Eigen::VectorXcd& y);

// Jacobian of f with respect to (a; b): the a-block is -diag(Qb)^{-1} P and
// the b-block is +diag(diag(Qb)^{-2} Pa) Q, i.e. the negative of the model
// term's Jacobian.
Eigen::MatrixXcd jacobian(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                          const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& Q,
                          const Eigen::VectorXcd& y);

struct RefineReport {
  int iterations = 0;
  std::vector<double> residual_trace;  // initial norm, then after each accept
  // "gradient_tol" | "step_tol" | "max_iterations" | "stalled" |
  // "stalled_at_pole"
  std::string termination;
  double final_gradient_norm = std::numeric_limits<double>::quiet_NaN();
  bool stalled_at_pole = false;

  nlohmann::json to_json() const;
};

// Damped Gauss-Newton (Levenberg-Marquardt) on the true nonlinear residual,
// reusing the fit's bases. The largest-modulus entry of b is frozen to fix
// the scaling gauge; steps are accepted only on strict decrease, so the
// output residual never exceeds the input residual.
std::pair<RationalFit, RefineReport> refine_lsq(
    const RationalFit& fit, const PointSet& points,
    const RefineOptions& options = {});

}  // namespace ratfit
