#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "star/baselines.hpp"
#include "star/cv.hpp"
#include "star/io.hpp"
#include "star/model.hpp"
#include "star/sensitivity.hpp"
#include "star/sim.hpp"
#include "star/spline.hpp"

namespace py = pybind11;

using InArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

star::RawData to_raw(const InArray& x, const InArray* y)
{
    if (x.ndim() < 3) throw std::invalid_argument("x must have shape (n, p1, ..., pm) with m >= 2");
    if (y && (y->ndim() != 1 || y->shape(0) != x.shape(0))) throw std::invalid_argument("y must have shape (n,)");
    star::RawData data;
    for (py::ssize_t k = 1; k < x.ndim(); ++k) data.shape.push_back(static_cast<std::size_t>(x.shape(k)));
    const auto n = static_cast<Eigen::Index>(x.shape(0));
    const auto P = static_cast<Eigen::Index>(star::shape_size(data.shape));
    data.x = Eigen::Map<const star::RowMatrix>(x.data(), n, P);
    data.y = y ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(y->data(), n)) : Eigen::VectorXd::Zero(n);
    data.validate();
    return data;
}

star::RawData to_raw(const InArray& x, const InArray& y) { return to_raw(x, &y); }

star::RawData to_raw(const InArray& x) { return to_raw(x, nullptr); }

py::array_t<double> to_array(const star::RowMatrix& x, const star::Shape& shape)
{
    std::vector<py::ssize_t> dims{static_cast<py::ssize_t>(x.rows())};
    for (auto p : shape) dims.push_back(static_cast<py::ssize_t>(p));
    py::array_t<double> out(dims);
    std::copy(x.data(), x.data() + x.size(), out.mutable_data());
    return out;
}

star::BasisConfig make_basis(const std::string& kind, int order, int knots, bool drop_constant,
                             const std::string& placement)
{
    star::BasisConfig b;
    b.kind = star::parse_basis_kind(kind);
    b.order = order;
    b.n_internal = knots;
    b.drop_constant = drop_constant;
    if (placement == "uniform") {
        b.knots = star::KnotPlacement::uniform;
    } else if (placement == "quantile") {
        b.knots = star::KnotPlacement::quantile;
    } else {
        throw std::invalid_argument("knot placement must be 'uniform' or 'quantile'");
    }
    return b;
}

star::FitConfig make_fit(std::size_t rank, double lam, int max_sweeps, double tol, double inner_tol,
                         std::uint64_t seed)
{
    star::FitConfig f;
    f.rank = rank;
    f.lambda = lam;
    f.max_sweeps = max_sweeps;
    f.tol = tol;
    f.inner_tol = inner_tol;
    f.seed = seed;
    return f;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Sparse tensor additive regression core";

    py::register_exception<star::DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<star::ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<star::StarModel>(m, "Model")
        .def_property_readonly("shape", [](const star::StarModel& s) { return s.shape; })
        .def_property_readonly("intercept", [](const star::StarModel& s) { return s.fit.intercept; })
        .def_property_readonly("lam", [](const star::StarModel& s) { return s.fit.lambda; })
        .def_property_readonly("rank", [](const star::StarModel& s) { return s.fit.bundle.rank(); })
        .def_property_readonly("basis_count", [](const star::StarModel& s) { return s.basis.size(); })
        .def_property_readonly("converged", [](const star::StarModel& s) { return s.fit.converged; })
        .def_property_readonly("sweeps", [](const star::StarModel& s) { return s.fit.sweeps; })
        .def_property_readonly("objective_trace", [](const star::StarModel& s) { return s.fit.objective_trace; })
        .def_property_readonly("active_sets", [](const star::StarModel& s) { return s.fit.active_sets; })
        .def_property_readonly("factors",
                               [](const star::StarModel& s) {
                                   std::vector<Eigen::VectorXd> out;
                                   for (std::size_t k = 0; k < s.fit.bundle.ways(); ++k) {
                                       out.push_back(s.fit.bundle.factor(k));
                                   }
                                   return out;
                               })
        .def("predict",
             [](const star::StarModel& s, const InArray& x) {
                 const auto data = to_raw(x);
                 py::gil_scoped_release release;
                 return Eigen::VectorXd(star::predict(s, data));
             },
             py::arg("x"))
        .def("save", [](const star::StarModel& s, const std::filesystem::path& path) { star::save_model(path, s); },
             py::arg("path"))
        .def_static("load", [](const std::filesystem::path& path) { return star::load_model(path); },
                    py::arg("path"));

    m.def(
        "simulate",
        [](const std::string& design, std::size_t n, std::size_t p1, double sigma, std::uint64_t seed,
           std::size_t p2, std::size_t p3, double low, double high) {
            star::SimSpec spec;
            spec.design = star::parse_design(design);
            spec.n = n;
            spec.p1 = p1;
            spec.sigma = sigma;
            spec.seed = seed;
            spec.p2 = p2;
            spec.p3 = p3;
            spec.low = low;
            spec.high = high;
            const auto out = star::simulate(spec);
            return py::make_tuple(to_array(out.data.x, out.data.shape), Eigen::VectorXd(out.data.y),
                                  Eigen::VectorXd(out.noiseless));
        },
        py::arg("design") = "general", py::arg("n") = 400, py::arg("p1") = 20, py::arg("sigma") = 0.1,
        py::arg("seed") = 1, py::arg("p2") = 0, py::arg("p3") = 0, py::arg("low") = 0.0, py::arg("high") = 1.0,
        "Simulated (x, y, noiseless) with x of shape (n, p1, ..., pm).");

    m.def(
        "fit",
        [](const InArray& x, const InArray& y, std::size_t rank, double lam, const std::string& basis, int order,
           int knots, bool drop_constant, const std::string& knot_placement, int max_sweeps, double tol,
           double inner_tol, std::uint64_t seed) {
            const auto data = to_raw(x, y);
            const auto b = make_basis(basis, order, knots, drop_constant, knot_placement);
            const auto f = make_fit(rank, lam, max_sweeps, tol, inner_tol, seed);
            py::gil_scoped_release release;
            return star::train(data, b, f);
        },
        py::arg("x"), py::arg("y"), py::arg("rank") = 2, py::arg("lam") = 0.0, py::arg("basis") = "natural",
        py::arg("order") = 4, py::arg("knots") = 4, py::arg("drop_constant") = true,
        py::arg("knot_placement") = "uniform", py::arg("max_sweeps") = 200, py::arg("tol") = 1e-5,
        py::arg("inner_tol") = 1e-8, py::arg("seed") = 1);

    m.def(
        "fit_tlr",
        [](const InArray& x, const InArray& y, std::size_t rank, double lam, int max_sweeps, double tol,
           double inner_tol, std::uint64_t seed) {
            const auto data = to_raw(x, y);
            star::TlrConfig config;
            config.fit = make_fit(rank, lam, max_sweeps, tol, inner_tol, seed);
            py::gil_scoped_release release;
            return star::fit_tlr(data, config);
        },
        py::arg("x"), py::arg("y"), py::arg("rank") = 2, py::arg("lam") = 0.0, py::arg("max_sweeps") = 200,
        py::arg("tol") = 1e-5, py::arg("inner_tol") = 1e-8, py::arg("seed") = 1);

    m.def(
        "lambda_max",
        [](const InArray& x, const InArray& y, std::size_t rank, const std::string& basis, std::uint64_t seed) {
            const auto data = to_raw(x, y);
            star::BasisConfig b;
            b.kind = star::parse_basis_kind(basis);
            if (b.kind == star::BasisKind::identity) b = star::tlr_basis();
            star::FitConfig f;
            f.rank = rank;
            f.seed = seed;
            const auto featurized = star::featurize_training(data, b);
            return star::lambda_max(featurized, star::initialize(featurized, f));
        },
        py::arg("x"), py::arg("y"), py::arg("rank") = 2, py::arg("basis") = "natural", py::arg("seed") = 1,
        "Smallest penalty with the all-zero solution, at the seeded initialization.");

    m.def(
        "cross_validate",
        [](const InArray& x, const InArray& y, std::vector<std::size_t> ranks, std::vector<double> lambdas,
           std::size_t folds, std::uint64_t seed, std::size_t lambda_points, const std::string& basis,
           int max_sweeps, double inner_tol, std::size_t workers) {
            const auto data = to_raw(x, y);
            star::CvConfig config;
            config.basis.kind = star::parse_basis_kind(basis);
            if (config.basis.kind == star::BasisKind::identity) config.basis = star::tlr_basis();
            config.ranks = std::move(ranks);
            config.lambdas = std::move(lambdas);
            config.folds = folds;
            config.seed = seed;
            config.lambda_points = lambda_points;
            config.fit.max_sweeps = max_sweeps;
            config.fit.inner_tol = inner_tol;
            config.workers = workers;
            star::CvReport report;
            {
                py::gil_scoped_release release;
                report = star::cross_validate(data, config);
            }
            py::list cells;
            for (const auto& c : report.cells) {
                py::dict d;
                d["lam"] = c.lambda;
                d["rank"] = c.rank;
                d["mean_mse"] = c.mean_mse;
                d["fold_mse"] = c.fold_mse;
                d["converged"] = c.converged;
                cells.append(d);
            }
            py::dict out;
            out["cells"] = cells;
            out["selected"] = report.selected;
            out["folds"] = report.fold_of;
            out["seed"] = report.seed;
            return out;
        },
        py::arg("x"), py::arg("y"), py::arg("ranks") = std::vector<std::size_t>{1, 2, 3},
        py::arg("lambdas") = std::vector<double>{}, py::arg("folds") = 5, py::arg("seed") = 1,
        py::arg("lambda_points") = 10, py::arg("basis") = "natural", py::arg("max_sweeps") = 200,
        py::arg("inner_tol") = 1e-8, py::arg("workers") = 1);

    m.def(
        "sensitivity",
        [](const star::StarModel& model, const InArray& x, double delta, std::vector<std::size_t> group_by) {
            const auto data = to_raw(x);
            star::SensitivityConfig config;
            config.delta = delta;
            config.group_by = std::move(group_by);
            const auto report = star::sensitivity(model, data, config);
            std::vector<py::ssize_t> dims(report.grid_shape.begin(), report.grid_shape.end());
            py::array_t<double> out(dims);
            std::copy(report.values.begin(), report.values.end(), out.mutable_data());
            return out;
        },
        py::arg("model"), py::arg("x"), py::arg("delta") = 1.0, py::arg("group_by") = std::vector<std::size_t>{},
        "Mean prediction change per cell; group_by lists 0-based ways.");

    m.def(
        "basis_values",
        [](const InArray& points, const std::string& kind, int order, int knots, bool drop_constant) {
            star::SplineBasis basis = star::SplineBasis::identity();
            const auto k = star::parse_basis_kind(kind);
            if (k != star::BasisKind::identity) {
                basis = star::build_basis(order, knots, k == star::BasisKind::natural, drop_constant);
            }
            const auto r = points.unchecked<1>();
            py::array_t<double> out({r.shape(0), static_cast<py::ssize_t>(basis.size())});
            auto w = out.mutable_unchecked<2>();
            std::vector<double> values(basis.size());
            for (py::ssize_t i = 0; i < r.shape(0); ++i) {
                basis.eval(r(i), values);
                for (std::size_t h = 0; h < values.size(); ++h) w(i, static_cast<py::ssize_t>(h)) = values[h];
            }
            return out;
        },
        py::arg("points"), py::arg("kind") = "bspline", py::arg("order") = 4, py::arg("knots") = 4,
        py::arg("drop_constant") = false, "Basis values on [0, 1] with uniform internal knots.");

    m.def(
        "mse", [](const Eigen::VectorXd& p, const Eigen::VectorXd& t) { return star::mse(p, t); },
        py::arg("predictions"), py::arg("targets"));

    m.def(
        "save_dataset",
        [](const std::filesystem::path& path, const InArray& x, const InArray& y) {
            star::save_dataset(path, to_raw(x, y));
        },
        py::arg("path"), py::arg("x"), py::arg("y"));
    m.def(
        "load_dataset",
        [](const std::filesystem::path& path) {
            const auto data = star::load_dataset(path);
            return py::make_tuple(to_array(data.x, data.shape), Eigen::VectorXd(data.y));
        },
        py::arg("path"));
}
