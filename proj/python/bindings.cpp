// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ldma/codebook.hpp"
#include "ldma/correlation.hpp"
#include "ldma/harness.hpp"
#include "ldma/performance.hpp"

namespace py = pybind11;
using namespace ldma;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Near-field location division multiple access: link-level models and scenarios";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;
  m.attr("NOMINAL_PROPAGATION_SPEED") = kNominalPropagationSpeed;
  m.attr("CSV_HEADER") = kCsvHeader;

  py::class_<ArrayConfig>(m, "ArrayConfig")
      .def(py::init<int, double, double, double>(), py::arg("num_antennas"),
           py::arg("element_spacing"), py::arg("carrier_frequency"),
           py::arg("propagation_speed") = kNominalPropagationSpeed)
      .def_static("half_wavelength", &ArrayConfig::half_wavelength, py::arg("num_antennas"),
                  py::arg("carrier_frequency"), py::arg("propagation_speed") = kNominalPropagationSpeed)
      .def_property_readonly("num_antennas", &ArrayConfig::num_antennas)
      .def_property_readonly("element_spacing", &ArrayConfig::element_spacing)
      .def_property_readonly("carrier_frequency", &ArrayConfig::carrier_frequency)
      .def_property_readonly("wavelength", &ArrayConfig::wavelength)
      .def_property_readonly("aperture", &ArrayConfig::aperture);

  py::class_<Location>(m, "Location")
      .def(py::init<double, double>(), py::arg("distance"), py::arg("angle"))
      .def_static("far_field", &Location::far_field, py::arg("angle"))
      .def_property_readonly("distance", &Location::distance)
      .def_property_readonly("angle", &Location::angle)
      .def_property_readonly("is_far_field", &Location::is_far_field);

  py::enum_<DistanceMode>(m, "DistanceMode")
      .value("exact", DistanceMode::exact)
      .value("second_order", DistanceMode::second_order)
      .value("first_order", DistanceMode::first_order);

  m.def("rayleigh_distance", &rayleigh_distance);
  m.def("steering_vector", &steering_vector, py::arg("cfg"), py::arg("angle"));
  m.def("focusing_vector", &focusing_vector, py::arg("cfg"), py::arg("location"),
        py::arg("mode") = DistanceMode::exact);

  m.def("fresnel", [](double x) {
    const FresnelPair p = fresnel(x);
    return py::make_tuple(p.C, p.S);
  });
  m.def("fresnel_correlation", &fresnel_correlation, py::arg("beta"));
  m.def("fresnel_envelope", [](double beta) { return FresnelEnvelope::instance()(beta); });
  m.def("dirichlet_sinc", &dirichlet_sinc, py::arg("num_antennas"), py::arg("a"));
  m.def("steering_correlation", &steering_correlation);
  m.def("focusing_correlation_exact", &focusing_correlation_exact, py::arg("cfg"), py::arg("l"),
        py::arg("m"), py::arg("mode") = DistanceMode::exact);
  m.def("focusing_correlation_approx", [](const ArrayConfig& cfg, double rl, double rm, double angle) {
    const CorrelationReport r = focusing_correlation_approx(cfg, rl, rm, angle);
    py::dict d;
    d["exact"] = r.exact_geometry;
    d["exact_second_order"] = r.exact;
    d["beta"] = r.approx_beta;
    d["approx"] = r.approx_value;
    d["abs_error"] = r.abs_error_geometry;
    return d;
  });

  m.def("polar_ring_step", &polar_ring_step);
  m.def("build_codebook", [](const std::string& kind, const ArrayConfig& cfg, double min_distance,
                             double coherence_target) {
    if (kind != "dft" && kind != "polar") {
      throw ConfigError("build_codebook: kind must be \"dft\" or \"polar\"");
    }
    const Codebook cb = kind == "dft" ? build_dft_codebook(cfg)
                                      : build_polar_codebook(cfg, min_distance, coherence_target);
    return py::make_tuple(codebook_to_json(cb), cb.codewords);
  }, py::arg("kind"), py::arg("cfg"), py::arg("min_distance") = 4.0, py::arg("coherence_target") = 0.5);

  m.def("lemma7_gamma", [](int num_users, double delta) {
    const SystemConfig sys = SystemConfig::equal_power(num_users, 1.0, 1.0);
    return lemma7_bound(num_users, delta, sys, CVector::Ones(num_users), 1).inverse_gram_diag;
  });

  m.def("validate_config", [](const std::string& text) { return scenario_to_json(parse_scenario(text)); });
  m.def("run_scenario_csv", [](const std::string& text, int workers) {
    const ScenarioConfig cfg = parse_scenario(text);
    py::gil_scoped_release release;
    return to_csv(run_scenario(cfg, {workers}));
  }, py::arg("config_json"), py::arg("workers") = 1);
}
