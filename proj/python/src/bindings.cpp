#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clockaoi/basic_model.hpp"
#include "clockaoi/commands.hpp"
#include "clockaoi/errors.hpp"
#include "clockaoi/extended_model.hpp"
#include "clockaoi/simulator.hpp"

namespace py = pybind11;
using namespace clockaoi;

namespace {

py::object to_fraction(const Rational& q) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(py::str(to_fraction_string(q)));
}

// Accepts int, str, float (via its exact decimal repr) or fractions.Fraction.
Rational from_python(const py::handle& obj) {
  return parse_rational(py::str(obj).cast<std::string>());
}

py::dict distribution_dict(const AoiDistribution& dist) {
  py::dict values;
  for (const auto& [v, c] : dist.values.entries()) values[py::int_(v)] = c;
  py::list progressions;
  for (const auto& ap : dist.progressions) progressions.append(py::make_tuple(ap.start, ap.step, ap.count));
  py::dict out;
  out["values"] = values;
  out["period"] = dist.period;
  out["progressions"] = progressions;
  out["mean"] = to_fraction(dist.mean());
  return out;
}

SystemConfig extended(std::int64_t a_period, std::int64_t b_period, std::int64_t n_period, std::int64_t delta_b,
                      std::int64_t delta_n, const py::object& p) {
  return make_extended_config(decompose(a_period, b_period, n_period), delta_b, delta_n, from_python(p));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Age of information in clocked two-agent systems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnboundedError>(m, "UnboundedError", PyExc_ArithmeticError);

  py::class_<PeriodDecomposition>(m, "PeriodDecomposition")
      .def_readonly("A_prime", &PeriodDecomposition::processing_period)
      .def_readonly("B_prime", &PeriodDecomposition::generation_period)
      .def_readonly("N_prime", &PeriodDecomposition::network_period)
      .def_readonly("A", &PeriodDecomposition::processing_cofactor)
      .def_readonly("B", &PeriodDecomposition::generation_cofactor)
      .def_readonly("N", &PeriodDecomposition::network_cofactor)
      .def_readonly("a", &PeriodDecomposition::gcd_gen_net)
      .def_readonly("b", &PeriodDecomposition::gcd_proc_gen)
      .def_readonly("n", &PeriodDecomposition::gcd_proc_net)
      .def_property_readonly("cycle_period", &PeriodDecomposition::cycle_period)
      .def("__repr__", [](const PeriodDecomposition& d) {
        std::ostringstream os;
        os << "PeriodDecomposition(A'=" << d.processing_period << ", B'=" << d.generation_period
           << ", N'=" << d.network_period << ")";
        return os.str();
      });

  py::class_<SystemConfig>(m, "SystemConfig")
      .def_readonly("periods", &SystemConfig::periods)
      .def_readonly("delta_b", &SystemConfig::delta_b)
      .def_readonly("delta_n", &SystemConfig::delta_n)
      .def_property_readonly("p", [](const SystemConfig& c) { return to_fraction(c.success_probability); })
      .def_property_readonly("model", [](const SystemConfig& c) { return to_string(c.model); });

  m.def("decompose", &decompose, py::arg("a_period"), py::arg("b_period"), py::arg("n_period"));
  m.def("basic_config", [](std::int64_t a, std::int64_t b, std::int64_t n) { return make_basic_config(decompose(a, b, n)); },
        py::arg("a_period"), py::arg("b_period"), py::arg("n_period"));
  m.def("extended_config", &extended, py::arg("a_period"), py::arg("b_period"), py::arg("n_period"),
        py::arg("delta_b") = 0, py::arg("delta_n") = 0, py::arg("p") = py::int_(1));

  m.def("aoi_basic", &aoi_basic, py::arg("d"), py::arg("k"));
  m.def("distribution_basic", [](const PeriodDecomposition& d) { return distribution_dict(distribution_basic(d)); });
  m.def("expected_exact_basic", [](const PeriodDecomposition& d) { return to_fraction(expected_exact_basic(d)); });
  m.def("expected_approx_basic", [](const PeriodDecomposition& d) {
    const auto band = expected_approx_basic(d);
    return py::make_tuple(to_fraction(band.center), to_fraction(band.half_width));
  });
  m.def("rel_error_bound_basic", [](const PeriodDecomposition& d) { return to_fraction(rel_error_bound_basic(d)); });
  m.def("max_bound_basic", &max_bound_basic);

  m.def("aoi_conditional", &aoi_conditional, py::arg("cfg"), py::arg("k"), py::arg("l"));
  m.def("distribution_conditional",
        [](const SystemConfig& c, std::int64_t l) { return distribution_dict(distribution_conditional(c, l)); },
        py::arg("cfg"), py::arg("l"));
  m.def("freshness_offset_K", &freshness_offset_K);
  m.def("expected_approx_extended", [](const SystemConfig& c) {
    const auto band = expected_approx_extended(c);
    return py::make_tuple(to_fraction(band.center), to_fraction(band.half_width));
  });
  m.def(
      "expected_exact_extended",
      [](const SystemConfig& c, const py::object& tol) {
        const auto e = expected_exact_extended(c, from_python(tol));
        return py::make_tuple(to_fraction(e.value), to_fraction(e.tail_bound), e.terms_used);
      },
      py::arg("cfg"), py::arg("tol") = py::str("1/1099511627776"));
  m.def("rel_error_bound_extended", [](const SystemConfig& c) { return to_fraction(rel_error_bound_extended(c)); });
  m.def("max_bound_extended_deterministic", &max_bound_extended_deterministic);
  m.def("max_bound_prob", [](const SystemConfig& c, const py::object& sigma) { return max_bound_prob(c, from_python(sigma)); },
        py::arg("cfg"), py::arg("sigma"));

  m.def(
      "simulate",
      [](const SystemConfig& c, std::int64_t cycles, std::uint64_t seed) {
        const auto tr = c.model == Model::basic ? simulate_basic(c.periods, cycles)
                                                : simulate_extended(c, cycles, RngSpec{seed, "mt19937_64"});
        py::list ages, failures;
        for (const auto& r : tr.records) {
          ages.append(r.age ? py::object(py::int_(*r.age)) : py::object(py::none()));
          failures.append(r.failures_since_success ? py::object(py::int_(*r.failures_since_success))
                                                   : py::object(py::none()));
        }
        return py::make_tuple(ages, failures);
      },
      py::arg("cfg"), py::arg("cycles"), py::arg("seed") = 0,
      "Returns (ages, failures_since_success); None marks warm-up records.");

  m.def(
      "analyze",
      [](const SystemConfig& c, const py::object& sigma) {
        std::optional<Rational> s;
        if (!sigma.is_none()) s = from_python(sigma);
        return analyze_report(c, s).dump();
      },
      py::arg("cfg"), py::arg("sigma") = py::none(), "Analysis report as a JSON string.");
}
