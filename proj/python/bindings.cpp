#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lrtrunc/config.hpp"
#include "lrtrunc/dispersion.hpp"
#include "lrtrunc/experiments.hpp"
#include "lrtrunc/kernel.hpp"
#include "lrtrunc/overlap.hpp"
#include "lrtrunc/pathmeasure.hpp"
#include "lrtrunc/percolation.hpp"
#include "lrtrunc/potts.hpp"
#include "lrtrunc/table.hpp"
#include "lrtrunc/treepaths.hpp"

namespace py = pybind11;
using namespace lrtrunc;

namespace {

py::object fraction(const mpq_class& q) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(py::int_(py::str(q.get_num().get_str())), py::int_(py::str(q.get_den().get_str())));
}

}  // namespace

PYBIND11_MODULE(_lrtrunc, m) {
  m.attr("__version__") = version_string();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_RuntimeError);

  py::enum_<Norm>(m, "Norm")
      .value("LInf", Norm::LInf)
      .value("L2", Norm::L2)
      .value("L1", Norm::L1);

  py::class_<EstimateWithCI>(m, "Estimate")
      .def_readonly("estimate", &EstimateWithCI::estimate)
      .def_readonly("ci_low", &EstimateWithCI::ci_low)
      .def_readonly("ci_high", &EstimateWithCI::ci_high)
      .def("__repr__", [](const EstimateWithCI& e) {
        return "Estimate(" + format_number(e.estimate) + ", [" + format_number(e.ci_low) + ", " +
               format_number(e.ci_high) + "])";
      });

  py::class_<Kernel>(m, "Kernel")
      .def_static("inverse_power", &Kernel::inverse_power, py::arg("dim"), py::arg("scale"),
                  py::arg("exponent"), py::arg("norm") = Norm::LInf,
                  py::arg("cap") = std::nullopt)
      .def_static("flat_box", &Kernel::flat_box, py::arg("dim"), py::arg("value"),
                  py::arg("radius"))
      .def_static("counterexample", &Kernel::counterexample, py::arg("dim"), py::arg("range"),
                  py::arg("epsilon"))
      .def("prob_at", &Kernel::prob_at)
      .def("truncated", &Kernel::truncated, py::arg("radius"), py::arg("norm") = Norm::LInf)
      .def_property_readonly("dimension", &Kernel::dimension)
      .def_property_readonly("support_radius", &Kernel::support_radius)
      .def("__repr__", &Kernel::describe);

  m.def("expected_degree", &expected_degree, py::arg("kernel"), py::arg("radius"));
  m.def("layer_sum", &layer_sum, py::arg("kernel"), py::arg("n"));

  py::class_<BoxRegion>(m, "BoxRegion")
      .def(py::init<std::size_t, std::int64_t, std::int64_t>(), py::arg("dim"),
           py::arg("half_side"), py::arg("shell_width") = 1)
      .def_property_readonly("vertex_count", &BoxRegion::vertex_count);

  py::class_<TruncationCurve>(m, "TruncationCurve")
      .def_readonly("radii", &TruncationCurve::radii)
      .def_readonly("estimates", &TruncationCurve::estimates)
      .def_readonly("containment_violations", &TruncationCurve::containment_violations);

  m.def("estimate_reach", &estimate_reach, py::arg("kernel"), py::arg("region"),
        py::arg("trials"), py::arg("seed"), py::arg("workers") = 1,
        py::arg("vertex_cap") = kDefaultVertexCap);
  m.def("truncation_curve", &truncation_curve, py::arg("kernel"), py::arg("region"),
        py::arg("radii"), py::arg("trials"), py::arg("seed"), py::arg("workers") = 1,
        py::arg("norm") = Norm::LInf, py::arg("vertex_cap") = kDefaultVertexCap);
  m.def(
      "phi_functional",
      [](const Kernel& k, const std::vector<Site>& s, bool exact, std::int64_t radius,
         std::uint64_t trials, std::uint64_t seed) {
        const auto v = phi_functional(k, s, exact ? PhiMode::Exact : PhiMode::MonteCarlo,
                                      radius, trials, seed);
        return py::make_tuple(v.value, v.sigma);
      },
      py::arg("kernel"), py::arg("sites"), py::arg("exact"), py::arg("radius"),
      py::arg("trials") = 0, py::arg("seed") = kDefaultSeed);

  m.def("max_point_mass", [](const std::vector<std::uint64_t>& a) {
    const auto r = max_point_mass(a);
    return py::make_tuple(r.value, r.bound, r.holds);
  });
  m.def("tail_bounds", [](const std::vector<std::uint64_t>& a) {
    const auto r = tail_bounds(a);
    return py::dict(py::arg("p_pos") = r.p_pos, py::arg("p_nonzero") = r.p_nonzero,
                    py::arg("p_nonneg") = r.p_nonneg, py::arg("all_hold") = r.all_hold());
  });
  m.def("cosine_moment", [](std::uint64_t n) { return cosine_moment(n).value; });

  m.def("exact_levelsum", [](unsigned level) {
    const auto d = exact_levelsum(level);
    py::dict out;
    for (std::size_t i = 0; i < d.support.size(); ++i)
      out[py::int_(d.support[i])] = fraction(d.exact_probability(i));
    return out;
  });
  m.def("predictability_bound", &predictability_bound);
  m.def("estimate_predictability", &estimate_predictability, py::arg("k"),
        py::arg("history_length"), py::arg("trials"), py::arg("seed"),
        py::arg("histories") = 1, py::arg("workers") = 1);

  py::class_<PathMeasure>(m, "PathMeasure")
      .def_static(
          "m1",
          [](const Kernel& k, const Site& u, const Site& v, std::int64_t mm, bool strict) {
            return PathMeasure::m1(build_m1(k, u, v, mm, strict));
          },
          py::arg("kernel"), py::arg("u"), py::arg("v"), py::arg("m"), py::arg("strict") = false)
      .def_static(
          "m2",
          [](const Kernel& k, std::optional<std::int64_t> radius, unsigned phase) {
            return PathMeasure::m2(build_m2(k, radius), phase);
          },
          py::arg("kernel"), py::arg("radius") = std::nullopt, py::arg("phase") = 0)
      .def_static(
          "m3",
          [](const Kernel& k, std::optional<std::int64_t> radius) {
            return PathMeasure::m3(build_m3(k, radius));
          },
          py::arg("kernel"), py::arg("radius") = std::nullopt)
      .def_static("directed", &PathMeasure::directed, py::arg("kernel"), py::arg("axis"),
                  py::arg("radius") = std::nullopt)
      .def("sample",
           [](const PathMeasure& pm, std::size_t steps, std::uint64_t seed) {
             return pm.sample(steps, seed).vertices;
           })
      .def("monotone_direction", &PathMeasure::monotone_direction)
      .def("designated_strict", &PathMeasure::designated_strict);

  py::class_<OverlapPoint>(m, "OverlapPoint")
      .def_readonly("horizon", &OverlapPoint::horizon)
      .def_readonly("estimate", &OverlapPoint::estimate)
      .def_readonly("running_max", &OverlapPoint::running_max)
      .def_readonly("implied_lower_bound", &OverlapPoint::implied_lower_bound);

  m.def("overlap_curve", &overlap_curve, py::arg("first"), py::arg("second"),
        py::arg("horizons"), py::arg("trials"), py::arg("seed"), py::arg("workers") = 1);
  m.def("percolation_lower_bound", &percolation_lower_bound);

  m.def("fk_probability", &fk_probability, py::arg("beta_phi"), py::arg("q"));
  m.def("magnetization_lower_bound", &magnetization_lower_bound);
  m.def("theorem_threshold", [](std::size_t d) { return double(theorem_threshold(d)); });

  m.def("run_config", [](const std::string& text) {
    auto config = parse_config(text);
    ResultTable table = [&] {
      py::gil_scoped_release release;
      return run(config);
    }();
    return py::make_tuple(table.columns(), table.rows(), table.provenance());
  });
}
