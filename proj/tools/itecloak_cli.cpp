#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

#include "itecloak/io.hpp"

using namespace itecloak;

namespace {

constexpr int kOk = 0;
constexpr int kCriterionFailed = 1;
constexpr int kConfigError = 2;
constexpr const char* kVersion = "0.1.0";

json metadata(const std::string& command, const std::string& input) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return json{{"tool", "itecloak"}, {"version", kVersion}, {"command", command}, {"input", input}, {"generated_at", stamp}};
}

double oracle_root(const AnnulusProblem& p, int l, Polarization pol, Bracket b, double pad) {
  double lo = std::max(b.lo - pad, 1e-6), hi = b.hi + pad;
  double flo = ode_oracle_det(p, l, pol, lo);
  const double fhi = ode_oracle_det(p, l, pol, hi);
  if (!(flo * fhi < 0.0)) return std::numeric_limits<double>::quiet_NaN();
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double fm = ode_oracle_det(p, l, pol, mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

struct IteArgs {
  double R0 = 0.5, R1 = 1.0, n = 4.0;
  int l = 1;
  std::string pol = "TE";
  double wmin = 0.5, wmax = 15.0, step = 1e-2;
  bool no_oracle = false;
};

int run_ite_find(const IteArgs& a) {
  const AnnulusProblem p{a.R0, a.R1, a.n};
  p.validate(true);
  const Polarization pol = polarization_from_string(a.pol);
  const auto evs = find_eigenvalues(p, a.l, pol, a.wmin, a.wmax, a.step);
  std::cout << "R0,R1,n,l,pol,omega,det_residual,bc_residual,oracle_omega,oracle_gap\n";
  bool ok = true;
  for (const auto& ev : evs) {
    double oracle = std::numeric_limits<double>::quiet_NaN();
    if (!a.no_oracle) oracle = oracle_root(p, a.l, pol, ev.bracket, a.step);
    const double gap = std::abs(oracle - ev.omega) / ev.omega;
    if (!a.no_oracle && !(gap <= 1e-6)) ok = false;
    if (!(ev.bc_residual <= 1e-8)) ok = false;
    std::cout << format_double(a.R0) << "," << format_double(a.R1) << "," << format_double(a.n) << "," << a.l << ","
              << to_string(pol) << "," << format_double(ev.omega) << "," << format_double(ev.det_residual) << ","
              << format_double(ev.bc_residual) << "," << format_double(oracle) << "," << format_double(gap) << "\n";
  }
  return ok ? kOk : kCriterionFailed;
}

int run_herglotz_fit(const std::string& scenario_path, int degree, double lambda, const std::string& out) {
  Scenario s = scenario_from_json(read_json_file(scenario_path));
  s.incident.kind = IncidentKind::HerglotzFit;
  if (degree > 0) s.incident.degree = degree;
  if (lambda >= 0.0) s.incident.lambda = lambda;
  const IncidentField inc = resolve_incident(s);
  json report = to_json(*inc.fit);
  report["eigenvalue"] = to_json(*inc.eigenvalue);
  std::cout << report.dump(2) << "\n";
  if (!out.empty()) {
    prepare_dir(out);
    write_text_file(join(out, "fit.json"), report.dump(2) + "\n");
    write_text_file(join(out, "kernel.json"), to_json(inc.fit->kernel).dump() + "\n");
  }
  return kOk;
}

int run_scatter_farfield(const std::string& scenario_path, const std::string& out) {
  const Scenario s = scenario_from_json(read_json_file(scenario_path));
  const IncidentField inc = resolve_incident(s);
  const InvisibilityResult r = invisibility_farfield(s, inc);
  json j{{"scenario", to_json(s)},
         {"omega", r.omega},
         {"incident_kind", to_string(s.incident.kind)},
         {"incident_norm", r.incident_norm},
         {"farfield_norm", r.farfield_norm},
         {"magnetic_farfield_norm", r.magnetic_farfield_norm},
         {"relative_farfield", r.relative_farfield},
         {"epsilon", r.epsilon},
         {"relative_epsilon", r.relative_epsilon}};
  if (inc.eigenvalue) j["eigenvalue"] = to_json(*inc.eigenvalue);
  std::cout << j.dump(2) << "\n";
  if (!out.empty()) {
    prepare_dir(out);
    write_text_file(join(out, "farfield.json"), j.dump(2) + "\n");
    write_text_file(join(out, "smatrix.csv"), smatrix_csv(r.solution));
    write_text_file(join(out, "scattered.json"), to_json(r.solution.scattered).dump() + "\n");
  }
  return kOk;
}

int run_cloak(SweepKind kind, const std::string& config_path, const std::string& out, int threads) {
  SweepConfig c = sweep_config_from_json(kind, read_json_file(config_path));
  if (threads > 0) c.sweep_options.threads = threads;
  prepare_dir(out);
  SweepResult result;
  std::vector<SweepVerdict> verdicts;
  json extra;
  if (kind == SweepKind::Epsilon) {
    result = epsilon_sweep(c.scenario, c.epsilons, c.epsilon_options);
    verdicts = evaluate_sweep(kind, result);
    if (c.epsilon_options.degrade != EpsilonDegrade::Noise) {
      for (auto& v : verdicts) v.rule += " (informational for " + to_string(c.epsilon_options.degrade) + ")";
    }
  } else if (kind == SweepKind::Tau) {
    result = tau_sweep(c.scenario, c.taus, c.sweep_options);
    verdicts = evaluate_sweep(kind, result);
  } else {
    const CoreSweepResult cr = core_sweep(c.scenario, c.cores, c.taus, c.sweep_options);
    result = cr.at_fixed_tau;
    verdicts = evaluate_core_sweep(cr);
    std::ostringstream taus;
    json slopes = json::array();
    for (std::size_t i = 0; i < cr.tau_sweeps.size(); ++i) {
      const auto& ts = cr.tau_sweeps[i];
      slopes.push_back(json{{"core", result.records[i].label}, {"slope", ts.slope.slope},
                            {"monotone_nonincreasing", ts.monotone_nonincreasing}});
      for (const auto& rec : ts.records) {
        taus << i << "," << format_double(rec.parameter) << "," << format_double(rec.farfield_norm) << ","
             << format_double(rec.relative_farfield) << "\n";
      }
    }
    write_text_file(join(out, "core_tau.csv"), "core,tau,farfield_norm,relative_farfield\n" + taus.str());
    extra = json{{"spread", cr.spread}, {"tau", c.scenario.lossy.tau}, {"core_tau_slopes", slopes}};
  }
  write_text_file(join(out, "results.csv"), results_csv(result));
  write_text_file(join(out, "modes.csv"), modes_csv(result));
  json summary = summary_json(kind, result, verdicts, metadata(to_string(kind), config_path));
  if (!extra.is_null()) summary["core"] = extra;
  summary["scenario"] = to_json(c.scenario);
  json meta = summary["metadata"];
  summary.erase("metadata");
  summary["metadata"] = meta;
  write_text_file(join(out, "summary.json"), summary.dump(2) + "\n");
  bool pass = true;
  for (const auto& v : verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << " = " << format_double(v.value) << " (" << v.rule << ")\n";
    pass = pass && v.pass;
  }
  if (kind == SweepKind::Epsilon && c.epsilon_options.degrade != EpsilonDegrade::Noise) return kOk;
  return pass ? kOk : kCriterionFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interior transmission eigenvalues, Herglotz incidents and near-cloaking sweeps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* ite = app.add_subcommand("ite", "Interior transmission eigenvalues of a PEC-cored annulus");
  ite->require_subcommand(1);
  auto* ite_find = ite->add_subcommand("find", "Scan, refine and cross-check eigenvalues for one (l, pol)");
  IteArgs ia;
  ite_find->add_option("--R0", ia.R0, "Inner (PEC) radius")->capture_default_str();
  ite_find->add_option("--R1", ia.R1, "Outer radius")->capture_default_str();
  ite_find->add_option("--n", ia.n, "Shell refractive index")->capture_default_str();
  ite_find->add_option("--l", ia.l, "Multipole degree")->capture_default_str()->check(CLI::PositiveNumber);
  ite_find->add_option("--pol", ia.pol, "TE or TM")->capture_default_str()->check(CLI::IsMember({"TE", "TM"}));
  ite_find->add_option("--wmin", ia.wmin, "Lower frequency")->capture_default_str();
  ite_find->add_option("--wmax", ia.wmax, "Upper frequency")->capture_default_str();
  ite_find->add_option("--step", ia.step, "Scan step")->capture_default_str();
  ite_find->add_flag("--no-oracle", ia.no_oracle, "Skip the ODE oracle cross-check");

  auto* herg = app.add_subcommand("herglotz", "Herglotz kernel fitting");
  herg->require_subcommand(1);
  auto* herg_fit = herg->add_subcommand("fit", "Fit a kernel to the scenario's eigen-incident");
  std::string scenario_path, out;
  int degree = 0;
  double lambda = -1.0;
  herg_fit->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  herg_fit->add_option("--degree", degree, "Sphere quadrature degree");
  herg_fit->add_option("--lambda", lambda, "Tikhonov parameter (relative)");
  herg_fit->add_option("--out", out, "Directory for fit.json and kernel.json");

  auto* scat = app.add_subcommand("scatter", "Layered-sphere scattering");
  scat->require_subcommand(1);
  auto* scat_ff = scat->add_subcommand("farfield", "Far field of the scenario's incident");
  scat_ff->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  scat_ff->add_option("--out", out, "Directory for farfield.json and smatrix.csv");

  auto* cloak = app.add_subcommand("cloak", "Near-cloaking sweeps");
  cloak->require_subcommand(1);
  std::string config_path;
  int threads = 0;
  std::vector<std::pair<CLI::App*, SweepKind>> sweeps;
  for (auto [name, kind] : {std::pair{"eps-sweep", SweepKind::Epsilon}, std::pair{"tau-sweep", SweepKind::Tau},
                            std::pair{"core-sweep", SweepKind::Core}}) {
    auto* sub = cloak->add_subcommand(name, "Run the " + std::string(name));
    sub->add_option("--config", config_path, "Sweep config JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory")->required();
    sub->add_option("--threads", threads, "Worker threads for sweep points");
    sweeps.emplace_back(sub, kind);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (ite_find->parsed()) return run_ite_find(ia);
    if (herg_fit->parsed()) return run_herglotz_fit(scenario_path, degree, lambda, out);
    if (scat_ff->parsed()) return run_scatter_farfield(scenario_path, out);
    for (auto& [sub, kind] : sweeps)
      if (sub->parsed()) return run_cloak(kind, config_path, out, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
