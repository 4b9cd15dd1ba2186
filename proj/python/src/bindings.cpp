#include <optional>
#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "ratfit/errors.hpp"
#include "ratfit/multiindex.hpp"
#include "ratfit/polybasis.hpp"
#include "ratfit/problems.hpp"
#include "ratfit/rational.hpp"
#include "ratfit/refine.hpp"
#include "ratfit/skiter.hpp"

namespace py = pybind11;
using namespace ratfit;

namespace {

PointSet make_points(const Eigen::MatrixXcd& X,
                     const std::optional<Eigen::VectorXcd>& y) {
  PointSet p;
  p.X = X;
  if (y) p.y = *y;
  p.validate();
  return p;
}

MultiIndexSet indices_from_spec(const py::object& spec, int dim) {
  if (py::isinstance<MultiIndexSet>(spec)) return spec.cast<MultiIndexSet>();
  if (py::isinstance<py::int_>(spec))
    return total_degree_indices(dim, spec.cast<int>());
  return max_degree_indices(spec.cast<std::vector<int>>());
}

py::dict history_to_dict(const FitHistory& history) {
  py::list records;
  for (const IterationRecord& rec : history.records) {
    py::dict d;
    d["iteration"] = rec.iteration;
    d["residual_norm"] = rec.residual_norm;
    d["step_norm"] = rec.step_norm;
    d["cond"] = rec.cond;
    d["num_orthogonality_error"] = rec.num_orthogonality_error;
    d["num_recurrence_error"] = rec.num_recurrence_error;
    d["den_orthogonality_error"] = rec.den_orthogonality_error;
    d["den_recurrence_error"] = rec.den_recurrence_error;
    records.append(d);
  }
  py::dict out;
  out["records"] = records;
  out["best_iteration"] = history.best_iteration;
  out["termination"] = history.termination;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rational approximation via the stabilized Sanathanan-Koerner "
            "iteration on Vandermonde-with-Arnoldi bases";

  py::register_exception<BreakdownError>(m, "BreakdownError");
  py::register_exception<ParseError>(m, "ParseError");

  py::class_<MultiIndexSet>(m, "MultiIndexSet")
      .def_static("total", &total_degree_indices, py::arg("dim"),
                  py::arg("degree"))
      .def_static("max", &max_degree_indices, py::arg("degrees"))
      .def_property_readonly("dim", &MultiIndexSet::dim)
      .def("__len__", &MultiIndexSet::size)
      .def("__getitem__",
           [](const MultiIndexSet& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           })
      .def("__repr__", [](const MultiIndexSet& s) {
        std::ostringstream out;
        out << "MultiIndexSet(dim=" << s.dim() << ", size=" << s.size() << ")";
        return out.str();
      });

  py::class_<RationalFit>(m, "RationalFit")
      .def_property_readonly("a", [](const RationalFit& f) { return f.a; })
      .def_property_readonly("b", [](const RationalFit& f) { return f.b; })
      .def_property_readonly(
          "solver", [](const RationalFit& f) { return f.meta.solver; })
      .def_property_readonly(
          "iteration", [](const RationalFit& f) { return f.meta.iteration; })
      .def_property_readonly(
          "residual_norm",
          [](const RationalFit& f) { return f.meta.residual_norm; })
      .def("__call__",
           [](const RationalFit& f, const Eigen::MatrixXcd& Z) {
             return evaluate(f, Z);
           },
           py::arg("points"))
      .def("denominator",
           [](const RationalFit& f, const Eigen::MatrixXcd& Z) {
             return denominator_values(f, Z);
           },
           py::arg("points"))
      .def("to_json",
           [](const RationalFit& f) { return save(f).dump(2); })
      .def_static("from_json",
                  [](const std::string& text) {
                    return load(nlohmann::json::parse(text));
                  })
      .def("__repr__", [](const RationalFit& f) {
        std::ostringstream out;
        out << "RationalFit(solver=" << f.meta.solver
            << ", residual_norm=" << f.meta.residual_norm << ")";
        return out.str();
      });

  m.def(
      "fit_linearized",
      [](const Eigen::MatrixXcd& X, const Eigen::VectorXcd& y,
         const py::object& num_degree, const py::object& den_degree) {
        const PointSet pts = make_points(X, y);
        return fit_linearized(pts, indices_from_spec(num_degree, pts.dim()),
                              indices_from_spec(den_degree, pts.dim()));
      },
      py::arg("X"), py::arg("y"), py::arg("num_degree"), py::arg("den_degree"));

  auto iterate = [](bool stabilized, const Eigen::MatrixXcd& X,
                    const Eigen::VectorXcd& y, const py::object& num_degree,
                    const py::object& den_degree, int maxiter, double tol,
                    bool refine) {
    const PointSet pts = make_points(X, y);
    SolverOptions options;
    options.maxiter = maxiter;
    options.convergence_tol = tol;
    auto [fit, history] =
        stabilized
            ? fit_stabilized_sk(pts, indices_from_spec(num_degree, pts.dim()),
                                indices_from_spec(den_degree, pts.dim()),
                                options)
            : fit_sk(pts, indices_from_spec(num_degree, pts.dim()),
                     indices_from_spec(den_degree, pts.dim()), options);
    if (refine) {
      auto [refined, report] = refine_lsq(fit, pts);
      fit = std::move(refined);
    }
    return py::make_tuple(fit, history_to_dict(history));
  };

  m.def(
      "fit_stabilized_sk",
      [iterate](const Eigen::MatrixXcd& X, const Eigen::VectorXcd& y,
                const py::object& num_degree, const py::object& den_degree,
                int maxiter, double tol, bool refine) {
        return iterate(true, X, y, num_degree, den_degree, maxiter, tol,
                       refine);
      },
      py::arg("X"), py::arg("y"), py::arg("num_degree"), py::arg("den_degree"),
      py::arg("maxiter") = 20, py::arg("tol") = 1e-12,
      py::arg("refine") = false);

  m.def(
      "fit_sk",
      [iterate](const Eigen::MatrixXcd& X, const Eigen::VectorXcd& y,
                const py::object& num_degree, const py::object& den_degree,
                int maxiter, double tol) {
        return iterate(false, X, y, num_degree, den_degree, maxiter, tol,
                       false);
      },
      py::arg("X"), py::arg("y"), py::arg("num_degree"), py::arg("den_degree"),
      py::arg("maxiter") = 20, py::arg("tol") = 1e-12);

  m.def(
      "arnoldi_basis",
      [](const Eigen::MatrixXcd& X, const py::object& degree,
         const std::optional<Eigen::VectorXcd>& weight) {
        const PointSet pts = make_points(X, std::nullopt);
        const Eigen::VectorXcd w =
            weight ? *weight : Eigen::VectorXcd::Ones(pts.count());
        const OrthoBasis basis =
            fit_arnoldi(pts, w, indices_from_spec(degree, pts.dim()));
        return py::make_tuple(basis.Q, basis.R);
      },
      py::arg("X"), py::arg("degree"), py::arg("weight") = std::nullopt,
      "Discrete orthonormal basis (Q, R) on the points, seeded by weight");

  auto as_tuple = [](const PointSet& p) { return py::make_tuple(p.X, p.y); };
  m.def("gen_abs",
        [as_tuple](Eigen::Index n) { return as_tuple(gen_abs(n)); },
        py::arg("count"));
  m.def("gen_exp",
        [as_tuple](Eigen::Index n) { return as_tuple(gen_exp(n)); },
        py::arg("count"));
  m.def("gen_tan",
        [as_tuple](Eigen::Index n) { return as_tuple(gen_tan(n)); },
        py::arg("count"));
  m.def("gen_exp2d",
        [as_tuple](Eigen::Index n, std::uint64_t seed) {
          return as_tuple(gen_exp2d(n, seed));
        },
        py::arg("count"), py::arg("seed"));
  m.def("gen_penzl1",
        [as_tuple](Eigen::Index nf, Eigen::Index nt) {
          return as_tuple(gen_penzl1(nf, nt));
        },
        py::arg("freq_count"), py::arg("t_count"));
  m.def("gen_penzl2",
        [as_tuple](Eigen::Index nf, Eigen::Index nt, Eigen::Index nu) {
          return as_tuple(gen_penzl2(nf, nt, nu));
        },
        py::arg("freq_count"), py::arg("t_count"), py::arg("u_count"));
}
