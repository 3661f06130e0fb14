#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "itecloak/io.hpp"
#include "itecloak/specfun.hpp"

namespace py = pybind11;
using namespace itecloak;

namespace {

SweepKind sweep_kind(const std::string& s) {
  for (auto k : {SweepKind::Epsilon, SweepKind::Tau, SweepKind::Core})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown sweep kind '" + s + "'");
}

std::string eigenvalues(double R0, double R1, double n, int l, const std::string& pol, double lo, double hi,
                        double step) {
  json out = json::array();
  for (const auto& ev : find_eigenvalues(AnnulusProblem{R0, R1, n}, l, polarization_from_string(pol), lo, hi, step))
    out.push_back(to_json(ev));
  return out.dump();
}

std::string farfield(const std::string& scenario) {
  const Scenario s = scenario_from_json(json::parse(scenario));
  const IncidentField inc = resolve_incident(s);
  const InvisibilityResult r = invisibility_farfield(s, inc);
  json modes = json::array();
  for (const auto& m : r.modes)
    modes.push_back(json{{"l", m.l}, {"pol", to_string(m.pol)}, {"S", json::array({m.S.real(), m.S.imag()})},
                         {"farfield_norm", m.farfield_norm}});
  json j{{"omega", r.omega},
         {"incident_kind", to_string(s.incident.kind)},
         {"incident_norm", r.incident_norm},
         {"farfield_norm", r.farfield_norm},
         {"magnetic_farfield_norm", r.magnetic_farfield_norm},
         {"relative_farfield", r.relative_farfield},
         {"epsilon", r.epsilon},
         {"relative_epsilon", r.relative_epsilon},
         {"modes", modes}};
  if (inc.eigenvalue) j["eigenvalue"] = to_json(*inc.eigenvalue);
  return j.dump();
}

std::string sweep(const std::string& kind_name, const std::string& config, int threads) {
  const SweepKind kind = sweep_kind(kind_name);
  SweepConfig c = sweep_config_from_json(kind, json::parse(config));
  if (threads > 0) c.sweep_options.threads = threads;
  SweepResult result;
  std::vector<SweepVerdict> verdicts;
  json core;
  {
    py::gil_scoped_release release;
    if (kind == SweepKind::Epsilon) {
      result = epsilon_sweep(c.scenario, c.epsilons, c.epsilon_options);
      verdicts = evaluate_sweep(kind, result);
    } else if (kind == SweepKind::Tau) {
      result = tau_sweep(c.scenario, c.taus, c.sweep_options);
      verdicts = evaluate_sweep(kind, result);
    } else {
      const CoreSweepResult cr = core_sweep(c.scenario, c.cores, c.taus, c.sweep_options);
      result = cr.at_fixed_tau;
      verdicts = evaluate_core_sweep(cr);
      json slopes = json::array();
      for (const auto& ts : cr.tau_sweeps) slopes.push_back(ts.slope.slope);
      core = json{{"spread", cr.spread}, {"tau_slopes", slopes}};
    }
  }
  json summary = summary_json(kind, result, verdicts, json::object());
  summary.erase("metadata");
  if (!core.is_null()) summary["core"] = core;
  summary["results_csv"] = results_csv(result);
  summary["modes_csv"] = modes_csv(result);
  return summary.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Interior transmission eigenvalues, Herglotz incidents and near-cloaking sweeps";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("sph_j", &specfun::sph_j, py::arg("l"), py::arg("x"));
  m.def("sph_y", &specfun::sph_y, py::arg("l"), py::arg("x"));
  m.def(
      "ite_det",
      [](double R0, double R1, double n, int l, const std::string& pol, double omega) {
        return ite_det(AnnulusProblem{R0, R1, n}, l, polarization_from_string(pol), omega);
      },
      py::arg("R0"), py::arg("R1"), py::arg("n"), py::arg("l"), py::arg("pol"), py::arg("omega"));
  m.def("_eigenvalues", &eigenvalues, py::arg("R0"), py::arg("R1"), py::arg("n"), py::arg("l"), py::arg("pol"),
        py::arg("wmin"), py::arg("wmax"), py::arg("step"));
  m.def(
      "_mode_scattering_coeff",
      [](const std::string& medium, double omega, int l, const std::string& pol) {
        return mode_scattering_coeff(medium_from_json(json::parse(medium)), omega, l, polarization_from_string(pol));
      },
      py::arg("medium"), py::arg("omega"), py::arg("l"), py::arg("pol"));
  m.def("_farfield", &farfield, py::arg("scenario"));
  m.def("_sweep", &sweep, py::arg("kind"), py::arg("config"), py::arg("threads"));
}
