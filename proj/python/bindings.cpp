#include "mbkdv/diophantine.hpp"
#include "mbkdv/harness.hpp"
#include "mbkdv/picard.hpp"
#include "mbkdv/resonance.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mbkdv;

namespace {

Rational q(const std::string& s) { return parse_rational(s); }

py::dict critical_index_py(const std::string& alpha, const std::string& beta, std::int64_t n_max) {
  auto r = critical_index(q(alpha), q(beta), n_max);
  py::dict d;
  d["branch"] = branch_name(r.branch);
  d["s_star"] = r.s_star;
  d["s_star_exact"] = r.s_star_exact ? py::object(py::str(to_string(*r.s_star_exact))) : py::object(py::none());
  d["empirical"] = r.empirical;
  d["nu_c1"] = r.nu_c1;
  d["nu_c2"] = r.nu_c2;
  return d;
}

py::dict estimate_py(const std::string& rho, const std::string& gamma, std::int64_t n_max) {
  auto e = estimate_indices(parse_real(rho), parse_real(gamma), n_max);
  py::dict d;
  d["mu_hat"] = e.mu_hat;
  d["nu_hat"] = e.nu_hat;
  d["exact"] = e.exact;
  py::list zp;
  for (const auto& z : e.zero_pairs) zp.append(py::make_tuple(z.m.convert_to<long long>(), z.n));
  d["zero_pairs"] = zp;
  return d;
}

std::string resonance_H_py(const std::string& alpha, const std::string& beta, const std::string& sigma,
                           const std::string& xi, const std::string& xi1) {
  auto p = DispersionParams::make(q(alpha), q(beta), q(sigma));
  return to_string(resonance_H(p, q(xi), q(xi1)));
}

double growth_py(const std::string& case_name, const std::string& alpha, const std::string& beta, double s,
                 const std::vector<std::int64_t>& N, double T) {
  auto p = DispersionParams::make(q(alpha), q(beta));
  return growth_exponent(parse_witness_case(case_name), p, s, N, T).slope;
}

py::dict run_py(const std::string& command, const std::map<std::string, std::string>& params,
                const std::string& output_path) {
  ExperimentConfig cfg;
  cfg.command = parse_command(command);
  cfg.command_given = true;
  cfg.parameters = params;
  cfg.output_path = output_path;
  auto m = run(cfg);
  py::dict d;
  d["status"] = m.status;
  d["exit_code"] = m.exit_code;
  d["error_kind"] = m.error_kind;
  d["outputs"] = m.outputs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mbkdv, m) {
  m.doc() = "Native core of the mbkdv toolkit";
  m.attr("__version__") = kArtifactVersion;
  py::register_exception<Error>(m, "MbkdvError", PyExc_ValueError);
  m.def("critical_index", &critical_index_py, py::arg("alpha"), py::arg("beta"), py::arg("n_max") = 20000);
  m.def("estimate_indices", &estimate_py, py::arg("rho"), py::arg("gamma"), py::arg("n_max") = 5000);
  m.def("resonance_H", &resonance_H_py, py::arg("alpha"), py::arg("beta"), py::arg("sigma"), py::arg("xi"),
        py::arg("xi1"));
  m.def("growth_exponent", &growth_py, py::arg("case"), py::arg("alpha"), py::arg("beta"), py::arg("s"),
        py::arg("N"), py::arg("T") = 1.0);
  m.def("run", &run_py, py::arg("command"), py::arg("params"), py::arg("output_path") = "out");
}
