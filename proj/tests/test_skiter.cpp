#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>
#include <Eigen/Dense>

#include "ratfit/errors.hpp"
#include "ratfit/problems.hpp"
#include "ratfit/skiter.hpp"

using namespace ratfit;

namespace {

Eigen::MatrixXcd random_complex_matrix(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = Complex(gauss(rng), gauss(rng));
  return A;
}

PointSet rational_samples(Eigen::Index M, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  PointSet p;
  p.X.resize(M, 1);
  p.y.resize(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    const double x = uni(rng);
    p.X(i, 0) = x;
    p.y(i) = (1.0 + x) / (3.0 - x);
  }
  return p;
}

}  // namespace

TEST_CASE("solve_homogeneous on a diagonal example") {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  const HomogeneousSolution sol = solve_homogeneous(A);
  CHECK(std::abs(sol.v(0) - 1.0) < 1e-14);
  CHECK(std::abs(sol.v(1)) < 1e-14);
  CHECK(sol.diagnostics.singular_values(0) == doctest::Approx(2.0));
  CHECK(sol.diagnostics.singular_values(1) == doctest::Approx(1.0));
  CHECK(sol.diagnostics.cond == doctest::Approx(2.0));
  CHECK_FALSE(sol.diagnostics.rank_deficient);
}

TEST_CASE("solve_homogeneous recovers a planted null vector") {
  const Eigen::MatrixXcd B = random_complex_matrix(40, 6, 5);
  Eigen::VectorXcd u = random_complex_matrix(6, 1, 6);
  u.normalize();
  const Eigen::MatrixXcd A =
      B * (Eigen::MatrixXcd::Identity(6, 6) - u * u.adjoint());
  const HomogeneousSolution sol = solve_homogeneous(A);
  const double sigma1 = sol.diagnostics.singular_values(0);
  CHECK((A * sol.v).norm() <= 1e-12 * sigma1);
  CHECK(std::abs(std::abs(u.dot(sol.v)) - 1.0) < 1e-10);
}

TEST_CASE("solve_homogeneous matches the normal-equations oracle") {
  const Eigen::MatrixXcd A = random_complex_matrix(50, 6, 17);
  const HomogeneousSolution sol = solve_homogeneous(A);
  CHECK(std::abs(sol.v.norm() - 1.0) < 1e-13);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A.adjoint() * A);
  const Eigen::VectorXd evals = eig.eigenvalues();  // ascending
  for (int k = 0; k < 6; ++k) {
    const double sigma = std::sqrt(std::max(evals(5 - k), 0.0));
    CHECK(sol.diagnostics.singular_values(k) ==
          doctest::Approx(sigma).epsilon(1e-10));
  }
  const double smallest = sol.diagnostics.singular_values(5);
  CHECK((A * sol.v).norm() == doctest::Approx(smallest).epsilon(1e-12));

  // Phase convention: the largest-modulus entry is real and positive.
  Eigen::Index imax = 0;
  sol.v.cwiseAbs().maxCoeff(&imax);
  CHECK(sol.v(imax).imag() == 0.0);
  CHECK(sol.v(imax).real() > 0.0);

  // Optimality among random unit vectors.
  std::mt19937 rng(23);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXcd w(6);
    for (int i = 0; i < 6; ++i) w(i) = Complex(gauss(rng), gauss(rng));
    w.normalize();
    CHECK((A * sol.v).norm() <=
          (A * w).norm() + 1e-10 * sol.diagnostics.singular_values(0));
  }
}

TEST_CASE("solve_homogeneous flags a two-dimensional null space") {
  const Eigen::MatrixXcd B = random_complex_matrix(30, 5, 29);
  Eigen::MatrixXcd U = random_complex_matrix(5, 2, 31);
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(U);
  U = qr.householderQ() * Eigen::MatrixXcd::Identity(5, 2);
  const Eigen::MatrixXcd A =
      B * (Eigen::MatrixXcd::Identity(5, 5) - U * U.adjoint());
  const HomogeneousSolution sol = solve_homogeneous(A);
  CHECK(sol.diagnostics.rank_deficient);
  CHECK(sol.diagnostics.singular_values(4) <=
        1e-14 * sol.diagnostics.singular_values(0));

  CHECK_THROWS_AS(solve_homogeneous(random_complex_matrix(3, 4, 37)),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_homogeneous(random_complex_matrix(3, 1, 38)),
                  std::invalid_argument);
}

TEST_CASE("linearized fit recovers exactly representable data") {
  const PointSet points = rational_samples(40, 41);
  const RationalFit fit = fit_linearized(points, total_degree_indices(1, 1),
                                         total_degree_indices(1, 1));
  CHECK(fit.meta.residual_norm <= 1e-10 * points.y.norm());
  CHECK(std::abs(fit.a.squaredNorm() + fit.b.squaredNorm() - 1.0) <= 1e-12);
  CHECK(fit.meta.solver == "linearized");
}

TEST_CASE("linearized fit of constant ones is exact") {
  PointSet points = rational_samples(12, 43);
  points.y = Eigen::VectorXcd::Ones(12);
  const RationalFit fit = fit_linearized(points, total_degree_indices(1, 0),
                                         total_degree_indices(1, 0));
  CHECK(fit.meta.residual_norm <= 1e-14 * points.y.norm());
  Eigen::MatrixXcd Z(1, 1);
  Z << Complex(0.37);
  CHECK(std::abs(evaluate(fit, Z)(0) - 1.0) < 1e-12);
}

TEST_CASE("classic SK iteration 1 equals the linearized fit") {
  const PointSet points = rational_samples(60, 47);
  const MultiIndexSet num = total_degree_indices(1, 2);
  const MultiIndexSet den = total_degree_indices(1, 2);
  SolveDiagnostics diag;
  const RationalFit lin = fit_linearized(points, num, den, &diag);
  auto [fit, history] = fit_sk(points, num, den);

  REQUIRE(!history.records.empty());
  const IterationRecord& first = history.records.front();
  CHECK((first.a - lin.a).norm() <= 1e-12);
  CHECK((first.b - lin.b).norm() <= 1e-12);
  CHECK(std::abs(first.residual_norm - lin.meta.residual_norm) <=
        1e-12 * (1.0 + lin.meta.residual_norm));
  CHECK(first.cond == doctest::Approx(diag.cond));
  CHECK(std::isnan(first.step_norm));
}

TEST_CASE("classic SK reaches the exact fit on representable data") {
  const PointSet points = rational_samples(50, 53);
  auto [fit, history] = fit_sk(points, total_degree_indices(1, 1),
                               total_degree_indices(1, 1));
  CHECK(fit.meta.residual_norm <= 1e-8 * points.y.norm());
  CHECK(history.best_iteration >= 1);
  CHECK(static_cast<int>(history.records.size()) <= 20);
}

TEST_CASE("classic SK conditioning blows up on |x| while S-SK stays bounded") {
  const PointSet points = gen_abs(2000);
  const MultiIndexSet num = total_degree_indices(1, 10);
  const MultiIndexSet den = total_degree_indices(1, 10);

  auto [sk_fit, sk_history] = fit_sk(points, num, den);
  double worst_sk = 0.0;
  for (const auto& rec : sk_history.records)
    worst_sk = std::max(worst_sk, rec.cond);
  CHECK(worst_sk > 1e10);

  auto [ssk_fit, ssk_history] = fit_stabilized_sk(points, num, den);
  double worst_ssk = 0.0;
  for (const auto& rec : ssk_history.records)
    worst_ssk = std::max(worst_ssk, rec.cond);
  CHECK(worst_ssk <= 1e8);
  CHECK(ssk_fit.meta.residual_norm <= 1e-3 * points.y.norm());
}

TEST_CASE("S-SK constant fit reproduces constant data") {
  PointSet points = rational_samples(10, 59);
  points.y = Eigen::VectorXcd::Constant(10, Complex(-2.5, 0.0));
  auto [fit, history] = fit_stabilized_sk(points, total_degree_indices(1, 0),
                                          total_degree_indices(1, 0));
  CHECK(fit.meta.residual_norm <= 1e-12 * points.y.norm());
}

TEST_CASE("S-SK recovers an exactly representable bivariate rational") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  PointSet points;
  points.X.resize(300, 2);
  points.y.resize(300);
  for (Eigen::Index i = 0; i < 300; ++i) {
    const double x1 = uni(rng);
    const double x2 = uni(rng);
    points.X(i, 0) = x1;
    points.X(i, 1) = x2;
    points.y(i) = (1.0 + x1 * x2) / (4.0 - x1 - x2);
  }
  auto [fit, history] = fit_stabilized_sk(points, total_degree_indices(2, 2),
                                          total_degree_indices(2, 2));
  CHECK(fit.meta.residual_norm <= 1e-8 * points.y.norm());
  CHECK(history.termination == "converged");
}

TEST_CASE("first S-SK iteration is the linearized fit") {
  const PointSet points = rational_samples(80, 67);
  const MultiIndexSet num = total_degree_indices(1, 3);
  const MultiIndexSet den = total_degree_indices(1, 2);
  const RationalFit lin = fit_linearized(points, num, den);
  auto [fit, history] = fit_stabilized_sk(points, num, den);
  REQUIRE(!history.records.empty());
  CHECK((history.records.front().a - lin.a).norm() <= 1e-12);
  CHECK((history.records.front().b - lin.b).norm() <= 1e-12);
  CHECK(std::abs(history.records.front().residual_norm -
                 lin.meta.residual_norm) <=
        1e-12 * (1.0 + lin.meta.residual_norm));
}

TEST_CASE("a manual replay of the S-SK loop matches the solver") {
  PointSet points = rational_samples(70, 71);
  for (Eigen::Index i = 0; i < points.count(); ++i)
    points.y(i) += 0.05 * std::sin(10.0 * points.X(i, 0).real());
  const MultiIndexSet num = total_degree_indices(1, 2);
  const MultiIndexSet den = total_degree_indices(1, 2);
  SolverOptions options;
  options.maxiter = 6;
  auto [fit, history] = fit_stabilized_sk(points, num, den, options);

  Eigen::VectorXcd w = Eigen::VectorXcd::Ones(70);
  for (const IterationRecord& rec : history.records) {
    const OrthoBasis P = fit_arnoldi(points, w, num);
    const OrthoBasis Q = fit_arnoldi(points, w, den);

    // Each basis is orthonormal, so the stacked solve is well-conditioned.
    Eigen::BDCSVD<Eigen::MatrixXcd> svd_p(P.Q);
    CHECK(svd_p.singularValues()(0) /
              svd_p.singularValues()(svd_p.singularValues().size() - 1) ==
          doctest::Approx(1.0).epsilon(1e-10));

    Eigen::MatrixXcd A(70, P.Q.cols() + Q.Q.cols());
    A.leftCols(P.Q.cols()) = P.Q;
    A.rightCols(Q.Q.cols()) = -(points.y.asDiagonal() * Q.Q);
    const HomogeneousSolution sol = solve_homogeneous(A);
    CHECK((sol.v.head(P.Q.cols()) - rec.a).norm() <= 1e-12);
    CHECK((sol.v.tail(Q.Q.cols()) - rec.b).norm() <= 1e-12);

    // Weight telescoping: w_next * (Q b) / w = 1 entrywise.
    const Eigen::VectorXcd qb = Q.Q * rec.b;
    const Eigen::VectorXcd w_next = w.cwiseQuotient(qb);
    for (Eigen::Index j = 0; j < 70; ++j)
      CHECK(std::abs(w_next(j) * qb(j) / w(j) - 1.0) <= 1e-12);
    w = w_next;
  }
}

TEST_CASE("best iterate contract and history invariants") {
  const PointSet points = gen_abs(500);
  SolverOptions options;
  options.collect_basis_diagnostics = true;
  auto [fit, history] = fit_stabilized_sk(points, total_degree_indices(1, 6),
                                          total_degree_indices(1, 6), options);

  REQUIRE(!history.records.empty());
  CHECK(static_cast<int>(history.records.size()) <= options.maxiter);
  double best = std::numeric_limits<double>::infinity();
  int best_iter = 0;
  for (const auto& rec : history.records)
    if (rec.residual_norm < best) {
      best = rec.residual_norm;
      best_iter = rec.iteration;
    }
  CHECK(history.best_iteration == best_iter);
  CHECK(fit.meta.iteration == best_iter);
  CHECK(std::abs(fit.meta.residual_norm - best) <= 1e-12 * best);
  CHECK(std::abs(residual_norm(fit, points) - best) <= 1e-8 * best);

  const double root_n = std::sqrt(static_cast<double>(7));
  for (const auto& rec : history.records) {
    CHECK(rec.num_orthogonality_error <= 1e-10 * root_n);
    CHECK(rec.den_orthogonality_error <= 1e-10 * root_n);
    CHECK(rec.num_recurrence_error <= 1e-10);
    CHECK(rec.den_recurrence_error <= 1e-10);
    CHECK(std::abs(rec.a.squaredNorm() + rec.b.squaredNorm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("convergence stop reports the step tolerance") {
  const PointSet points = rational_samples(50, 73);
  SolverOptions options;
  options.convergence_tol = 1e-10;
  auto [fit, history] = fit_stabilized_sk(points, total_degree_indices(1, 1),
                                          total_degree_indices(1, 1), options);
  CHECK(history.termination == "converged");
  CHECK(static_cast<int>(history.records.size()) < options.maxiter);
}

TEST_CASE("initial weight override changes the first iterate") {
  const PointSet points = rational_samples(40, 79);
  const MultiIndexSet num = total_degree_indices(1, 1);
  const MultiIndexSet den = total_degree_indices(1, 1);
  SolverOptions options;
  Eigen::VectorXcd w0(40);
  for (Eigen::Index i = 0; i < 40; ++i)
    w0(i) = 1.0 + 0.9 * std::sin(3.0 * static_cast<double>(i));
  options.initial_weight = w0;
  auto [fit, history] = fit_stabilized_sk(points, num, den, options);
  auto [fit_plain, history_plain] = fit_stabilized_sk(points, num, den);
  CHECK((history.records.front().a - history_plain.records.front().a).norm() >
        1e-14);
  // Exactly representable data is still recovered.
  CHECK(fit.meta.residual_norm <= 1e-8 * points.y.norm());

  Eigen::VectorXcd bad = Eigen::VectorXcd::Ones(39);
  SolverOptions bad_options;
  bad_options.initial_weight = bad;
  CHECK_THROWS_AS(fit_stabilized_sk(points, num, den, bad_options),
                  std::invalid_argument);
}

TEST_CASE("history CSV has the documented columns") {
  const PointSet points = rational_samples(30, 83);
  auto [fit, history] = fit_stabilized_sk(points, total_degree_indices(1, 1),
                                          total_degree_indices(1, 1));
  std::ostringstream out;
  history.write_csv(out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "iter,residual_norm,step_norm,cond");
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("1,", 0) == 0);
  CHECK(first.find("nan") != std::string::npos);  // no step at iteration 1
  std::size_t rows = 1;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == history.records.size());
}

TEST_CASE("solver input validation") {
  PointSet points = rational_samples(5, 89);
  CHECK_THROWS_AS(fit_linearized(points, total_degree_indices(1, 2),
                                 total_degree_indices(1, 2)),
                  std::invalid_argument);  // M < Na + Nb
  PointSet no_y;
  no_y.X = points.X;
  CHECK_THROWS_AS(fit_stabilized_sk(no_y, total_degree_indices(1, 1),
                                    total_degree_indices(1, 1)),
                  MissingResponsesError);
  CHECK_THROWS_AS(fit_sk(points, total_degree_indices(2, 1),
                         total_degree_indices(2, 1)),
                  std::invalid_argument);  // dimension mismatch
}
