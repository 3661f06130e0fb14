#include "itecloak/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace itecloak {

namespace {

json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError("complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("vector must have three components");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

CoreMaterial core_from(const json& j) {
  CoreMaterial c;
  c.eps = value_or(j, "eps", c.eps);
  c.mu = value_or(j, "mu", c.mu);
  c.sigma = value_or(j, "sigma", c.sigma);
  return c;
}

json core_to(const CoreMaterial& c) { return json{{"eps", c.eps}, {"mu", c.mu}, {"sigma", c.sigma}}; }

IncidentSpec incident_from(const json& j) {
  IncidentSpec s;
  if (j.contains("kind")) s.kind = incident_kind_from_string(j.at("kind").get<std::string>());
  s.l = value_or(j, "l", s.l);
  if (j.contains("pol")) s.pol = polarization_from_string(j.at("pol").get<std::string>());
  s.m = value_or(j, "m", s.m);
  s.eigen_index = value_or(j, "eigen_index", s.eigen_index);
  s.wmin = value_or(j, "wmin", s.wmin);
  s.wmax = value_or(j, "wmax", s.wmax);
  s.step = value_or(j, "step", s.step);
  s.degree = value_or(j, "degree", s.degree);
  s.lambda = value_or(j, "lambda", s.lambda);
  s.fit.radial_points = value_or(j, "radial_points", s.fit.radial_points);
  s.fit.angular_degree = value_or(j, "angular_degree", s.fit.angular_degree);
  if (j.contains("direction")) s.direction = vec3_from(j.at("direction"));
  if (j.contains("polarization")) {
    const json& p = j.at("polarization");
    if (!p.is_array() || p.size() != 3) throw ConfigError("polarization must have three components");
    for (int c = 0; c < 3; ++c) s.polarization(c) = complex_from(p[std::size_t(c)]);
  }
  s.amplitude = value_or(j, "amplitude", s.amplitude);
  return s;
}

json incident_to(const IncidentSpec& s) {
  json p = json::array();
  for (int c = 0; c < 3; ++c) p.push_back(complex_pair(s.polarization(c)));
  return json{{"kind", to_string(s.kind)},
              {"l", s.l},
              {"pol", to_string(s.pol)},
              {"m", s.m},
              {"eigen_index", s.eigen_index},
              {"wmin", s.wmin},
              {"wmax", s.wmax},
              {"step", s.step},
              {"degree", s.degree},
              {"lambda", s.lambda},
              {"radial_points", s.fit.radial_points},
              {"angular_degree", s.fit.angular_degree},
              {"direction", json::array({s.direction.x(), s.direction.y(), s.direction.z()})},
              {"polarization", p},
              {"amplitude", s.amplitude}};
}

void append_row(std::ostringstream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << "\n";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const CoefficientVector& c) {
  json entries = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const ModeIndex mode = CoefficientVector::mode_at(i);
    entries.push_back(json::array({mode.l, mode.m, to_string(mode.pol), c[i].real(), c[i].imag()}));
  }
  return json{{"L", c.cutoff()}, {"basis", to_string(c.basis())}, {"entries", entries}};
}

CoefficientVector coefficients_from_json(const json& j) {
  try {
    const int L = j.at("L").get<int>();
    if (L < 1) throw ConfigError("coefficient vector needs L >= 1");
    const std::string basis = j.at("basis").get<std::string>();
    Basis b;
    if (basis == "regular")
      b = Basis::Regular;
    else if (basis == "outgoing")
      b = Basis::Outgoing;
    else
      throw ConfigError("unknown basis: " + basis);
    CoefficientVector c(L, b);
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 5) throw ConfigError("entry must be [l, m, pol, re, im]");
      const ModeIndex mode{e[0].get<int>(), e[1].get<int>(), polarization_from_string(e[2].get<std::string>())};
      if (mode.l > L) throw ConfigError("entry degree exceeds L");
      c.at(mode) = {e[3].get<double>(), e[4].get<double>()};
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("coefficient vector: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("coefficient vector: ") + e.what());
  }
}

json to_json(const HerglotzKernel& k) {
  json nodes = json::array(), weights = json::array(), g = json::array();
  for (std::size_t i = 0; i < k.size(); ++i) {
    const Vec3& d = k.quadrature.nodes[i];
    nodes.push_back(json::array({d.x(), d.y(), d.z()}));
    weights.push_back(k.quadrature.weights[i]);
    g.push_back(json::array({complex_pair(k.g[i].x()), complex_pair(k.g[i].y()), complex_pair(k.g[i].z())}));
  }
  return json{{"degree", k.quadrature.degree}, {"nodes", nodes}, {"weights", weights}, {"g", g}};
}

HerglotzKernel kernel_from_json(const json& j) {
  try {
    SphereQuadrature q;
    q.degree = value_or(j, "degree", 0);
    for (const auto& n : j.at("nodes")) q.nodes.push_back(vec3_from(n));
    for (const auto& w : j.at("weights")) q.weights.push_back(w.get<double>());
    std::vector<CVec3> g;
    for (const auto& v : j.at("g")) {
      if (!v.is_array() || v.size() != 3) throw ConfigError("kernel value must have three components");
      g.emplace_back(complex_from(v[0]), complex_from(v[1]), complex_from(v[2]));
    }
    if (q.nodes.size() != q.weights.size() || q.nodes.size() != g.size())
      throw ConfigError("kernel nodes, weights and values differ in length");
    HerglotzKernel k(std::move(q), std::move(g));
    k.validate();
    return k;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
}

json to_json(const LayeredMedium& m) {
  json layers = json::array();
  for (const auto& L : m.layers()) {
    json l{{"r", L.outer_radius}, {"kind", to_string(L.kind)}};
    if (L.kind == LayerKind::Penetrable) {
      l["eps"] = L.eps;
      l["mu"] = L.mu;
      l["sigma"] = L.sigma;
      if (L.lossy) l["lossy"] = true;
    }
    layers.push_back(l);
  }
  return json{{"layers", layers}, {"window", {{"c0", m.window().c0}, {"lambda0", m.window().lambda0}}}};
}

LayeredMedium medium_from_json(const json& j) {
  try {
    RegularityWindow window;
    if (j.contains("window")) {
      window.c0 = value_or(j.at("window"), "c0", window.c0);
      window.lambda0 = value_or(j.at("window"), "lambda0", window.lambda0);
    }
    std::vector<Layer> layers;
    for (const auto& l : j.at("layers")) {
      const LayerKind kind = layer_kind_from_string(value_or<std::string>(l, "kind", "penetrable"));
      const double r = l.at("r").get<double>();
      if (kind == LayerKind::PEC) {
        layers.push_back(Layer::pec(r));
        continue;
      }
      Layer layer{r, value_or(l, "eps", 1.0), value_or(l, "mu", 1.0), value_or(l, "sigma", 0.0)};
      layer.lossy = value_or(l, "lossy", false);
      layers.push_back(layer);
    }
    return LayeredMedium(std::move(layers), window);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("medium: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("medium: ") + e.what());
  }
}

json to_json(const FitReport& r) {
  return json{{"target", r.target_description},
              {"omega", r.omega},
              {"radius", r.radius},
              {"epsilon", r.epsilon},
              {"relative_epsilon", r.relative_epsilon()},
              {"epsilon_exact", r.epsilon_exact},
              {"target_norm", r.target_norm},
              {"lambda", r.lambda},
              {"lambda_escalated", r.lambda_escalated},
              {"data_misfit", r.data_misfit},
              {"kernel_norm", r.kernel_norm},
              {"rank", r.rank},
              {"condition_estimate", r.condition_estimate},
              {"quadrature_degree", r.quadrature_degree},
              {"quadrature_nodes", r.kernel.size()},
              {"radial_points", r.radial_points},
              {"angular_degree", r.angular_degree}};
}

json to_json(const TransmissionEigenvalue& ev) {
  return json{{"R0", ev.problem.R0},
              {"R1", ev.problem.R1},
              {"n", ev.problem.n},
              {"regime", to_string(ev.problem.regime())},
              {"l", ev.l},
              {"pol", to_string(ev.pol)},
              {"omega", ev.omega},
              {"bracket", json::array({ev.bracket.lo, ev.bracket.hi})},
              {"det_residual", ev.det_residual},
              {"bc_residual", ev.bc_residual}};
}

Scenario scenario_from_json(const json& j) {
  try {
    const std::string device = value_or<std::string>(j, "device", "two_layer");
    const double R0 = value_or(j, "R0", 0.5);
    const double R1 = value_or(j, "R1", 1.0);
    const double n = value_or(j, "n", 4.0);
    Scenario s;
    if (device == "two_layer") {
      s = build_two_layer(R0, R1, n);
    } else if (device == "three_layer") {
      LossyParameters lossy;
      if (j.contains("alpha")) {
        const auto& a = j.at("alpha");
        if (!a.is_array() || a.size() != 3) throw ConfigError("alpha must be [a1, a2, a3]");
        lossy.alpha1 = a[0].get<double>();
        lossy.alpha2 = a[1].get<double>();
        lossy.alpha3 = a[2].get<double>();
      }
      lossy.tau = value_or(j, "tau", lossy.tau);
      RegularityWindow window;
      if (j.contains("window")) {
        window.c0 = value_or(j.at("window"), "c0", window.c0);
        window.lambda0 = value_or(j.at("window"), "lambda0", window.lambda0);
      }
      const CoreMaterial core = j.contains("core") ? core_from(j.at("core")) : CoreMaterial{};
      s = build_three_layer(value_or(j, "R_sigma", 0.3), R0, R1, n, lossy, core, window);
    } else if (device == "custom") {
      s.device = DeviceKind::Custom;
      s.name = "custom";
      s.medium = medium_from_json(j.at("medium"));
      s.shell = AnnulusProblem{R0, R1, n};
      s.shell.validate();
      s.flags.push_back(to_string(s.shell.regime()));
    } else {
      throw ConfigError("unknown device: " + device);
    }
    s.name = value_or(j, "name", s.name);
    if (j.contains("incident")) s.incident = incident_from(j.at("incident"));
    s.omega = value_or(j, "omega", 0.0);
    s.L = value_or(j, "L", 0);
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

json to_json(const Scenario& s) {
  json j{{"name", s.name}, {"device", to_string(s.device)}, {"R0", s.shell.R0}, {"R1", s.shell.R1}, {"n", s.shell.n}};
  if (s.device == DeviceKind::ThreeLayer) {
    j["R_sigma"] = s.R_sigma;
    j["alpha"] = json::array({s.lossy.alpha1, s.lossy.alpha2, s.lossy.alpha3});
    j["tau"] = s.lossy.tau;
    j["core"] = core_to(s.core);
  }
  j["window"] = {{"c0", s.medium.window().c0}, {"lambda0", s.medium.window().lambda0}};
  j["medium"] = to_json(s.medium);
  j["incident"] = incident_to(s.incident);
  j["omega"] = s.omega;
  j["L"] = s.L;
  j["regime"] = to_string(s.regime());
  j["flags"] = s.flags;
  return j;
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Epsilon: return "eps-sweep";
    case SweepKind::Tau: return "tau-sweep";
    case SweepKind::Core: return "core-sweep";
  }
  return "eps-sweep";
}

SweepConfig sweep_config_from_json(SweepKind kind, const json& j) {
  SweepConfig c;
  c.kind = kind;
  try {
    if (j.contains("scenario"))
      c.scenario = scenario_from_json(j.at("scenario"));
    else
      c.scenario = kind == SweepKind::Epsilon ? reference_two_layer() : reference_three_layer();
    if (j.contains("epsilons")) c.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (j.contains("degrade")) c.epsilon_options.degrade = epsilon_degrade_from_string(j.at("degrade").get<std::string>());
    c.epsilon_options.seed = value_or(j, "seed", c.epsilon_options.seed);
    c.epsilon_options.min_degree = value_or(j, "min_degree", c.epsilon_options.min_degree);
    c.epsilon_options.max_degree = value_or(j, "max_degree", c.epsilon_options.max_degree);
    if (j.contains("lambdas")) c.epsilon_options.lambdas = j.at("lambdas").get<std::vector<double>>();
    c.epsilon_options.floor_factor = value_or(j, "floor_factor", c.epsilon_options.floor_factor);
    if (j.contains("taus")) c.taus = j.at("taus").get<std::vector<double>>();
    if (j.contains("cores")) {
      c.cores.clear();
      for (const auto& core : j.at("cores")) c.cores.push_back(core_from(core));
    }
    c.sweep_options.threads = value_or(j, "threads", c.sweep_options.threads);
    c.sweep_options.floor = value_or(j, "floor", c.sweep_options.floor);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
  if (kind == SweepKind::Epsilon && c.scenario.device != DeviceKind::TwoLayer)
    throw ConfigError("eps-sweep needs a two_layer scenario");
  if (kind != SweepKind::Epsilon && c.scenario.device != DeviceKind::ThreeLayer)
    throw ConfigError(to_string(kind) + " needs a three_layer scenario");
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string results_csv(const SweepResult& r) {
  std::ostringstream os;
  append_row(os, {"row", "parameter", "label", "farfield_norm", "relative_farfield", "epsilon", "omega", "at_floor",
                  "slope", "slope_residual", "slope_points", "slope_decades"});
  for (const auto& rec : r.records) {
    append_row(os, {"point", format_double(rec.parameter), quoted(rec.label), format_double(rec.farfield_norm),
                    format_double(rec.relative_farfield), format_double(rec.epsilon), format_double(rec.omega),
                    rec.at_floor ? "1" : "0", "", "", "", ""});
  }
  append_row(os, {"summary", "", quoted(r.parameter_name), "", "", "", "", "",
                  r.slope.defined ? format_double(r.slope.slope) : "nan",
                  r.slope.defined ? format_double(r.slope.residual) : "nan", std::to_string(r.slope.points),
                  format_double(r.slope.decades)});
  return os.str();
}

std::string modes_csv(const SweepResult& r) {
  std::ostringstream os;
  append_row(os, {"parameter", "l", "pol", "re_S", "im_S", "farfield_norm"});
  for (const auto& rec : r.records) {
    for (const auto& m : rec.modes) {
      append_row(os, {format_double(rec.parameter), std::to_string(m.l), to_string(m.pol), format_double(m.S.real()),
                      format_double(m.S.imag()), format_double(m.farfield_norm)});
    }
  }
  return os.str();
}

std::string smatrix_csv(const ScatteringSolution& s) {
  std::ostringstream os;
  append_row(os, {"l", "pol", "re_S", "im_S", "abs_1_plus_2S"});
  for (std::size_t i = 0; i < s.S.size(); ++i) {
    append_row(os, {std::to_string(i / 2 + 1), to_string(Polarization(i % 2)), format_double(s.S[i].real()),
                    format_double(s.S[i].imag()), format_double(std::abs(1.0 + 2.0 * s.S[i]))});
  }
  return os.str();
}

std::vector<SweepVerdict> evaluate_sweep(SweepKind kind, const SweepResult& r) {
  std::vector<SweepVerdict> v;
  v.push_back({"slope_defined", r.slope.defined, double(r.slope.points), ">= 4 points over >= 2 decades"});
  if (kind == SweepKind::Epsilon) {
    v.push_back({"epsilon_slope", r.slope.defined && std::abs(r.slope.slope - 1.0) <= 0.2, r.slope.slope,
                 "|slope - 1| <= 0.2"});
  } else {
    v.push_back({"tau_slope", r.slope.defined && r.slope.slope >= 0.4, r.slope.slope, "slope >= 0.4"});
    v.push_back({"monotone", r.monotone_nonincreasing, r.monotone_nonincreasing ? 1.0 : 0.0,
                 "far field nonincreasing as tau decreases"});
  }
  return v;
}

std::vector<SweepVerdict> evaluate_core_sweep(const CoreSweepResult& r) {
  std::vector<SweepVerdict> v;
  v.push_back({"core_spread", r.spread <= 10.0, r.spread, "max/min far field <= 10"});
  for (std::size_t i = 0; i < r.tau_sweeps.size(); ++i) {
    const auto& s = r.tau_sweeps[i];
    v.push_back({"core_" + std::to_string(i) + "_tau_slope", s.slope.defined && s.slope.slope >= 0.4, s.slope.slope,
                 "slope >= 0.4"});
  }
  return v;
}

json summary_json(SweepKind kind, const SweepResult& r, const std::vector<SweepVerdict>& verdicts,
                  const json& metadata) {
  json crit = json::array();
  bool all = true;
  for (const auto& v : verdicts) {
    crit.push_back(json{{"name", v.name}, {"pass", v.pass}, {"value", v.value}, {"rule", v.rule}});
    all = all && v.pass;
  }
  json j{{"sweep", to_string(kind)},
         {"parameter", r.parameter_name},
         {"points", r.records.size()},
         {"slope",
          {{"defined", r.slope.defined},
           {"value", r.slope.slope},
           {"intercept", r.slope.intercept},
           {"residual", r.slope.residual},
           {"points", r.slope.points},
           {"decades", r.slope.decades}}},
         {"monotone_nonincreasing", r.monotone_nonincreasing},
         {"criteria", crit},
         {"pass", all}};
  j["metadata"] = metadata;
  return j;
}

}  // namespace itecloak
