#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "ratfit/multiindex.hpp"
#include "ratfit/polybasis.hpp"

namespace ratfit {

struct FitMeta {
  std::string solver;
  int iteration = 0;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
};

// Affine pullback of each coordinate into [-1, 1], applied before basis
// evaluation when present. Only meaningful for real coordinates.
struct DomainMap {
  Eigen::VectorXd center;
  Eigen::VectorXd halfwidth;

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& Z) const;
  static DomainMap from_points(const Eigen::MatrixXcd& X);
};

// Fitted rational function p/q. Each factor lives in its own recurrence
// basis (R matrix + index set); both bases share one weight seed, which
// cancels in the ratio, so evaluation needs only R.
struct RationalFit {
  Eigen::MatrixXcd num_R;
  MultiIndexSet num_indices;
  Eigen::MatrixXcd den_R;
  MultiIndexSet den_indices;
  Eigen::VectorXcd a;
  Eigen::VectorXcd b;
  FitMeta meta;
  std::optional<DomainMap> domain_map;
};

struct EvalInfo {
  std::vector<Eigen::Index> pole_hits;  // entries reported as infinity
};

// (W_P a) / (W_Q b) elementwise. Entries where |W_Q b| falls below
// 1e-30 * max|W_Q b| are reported as infinity and listed in info.
Eigen::VectorXcd evaluate(const RationalFit& fit, const Eigen::MatrixXcd& Z,
                          EvalInfo* info = nullptr);

// The denominator surrogate W_Q b (unnormalized by the fitting weight).
Eigen::VectorXcd denominator_values(const RationalFit& fit,
                                    const Eigen::MatrixXcd& Z);

// l2 norm of y - r(X); pole-hit entries are excluded from the sum and
// counted in *excluded_poles when given.
double residual_norm(const RationalFit& fit, const PointSet& points,
                     std::size_t* excluded_poles = nullptr);

nlohmann::json save(const RationalFit& fit);
RationalFit load(const nlohmann::json& doc);

}  // namespace ratfit
