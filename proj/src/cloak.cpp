#include "itecloak/cloak.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace itecloak {

namespace {

constexpr double kNotAsymptoticTau = 0.1;

void run_jobs(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(count, std::size_t(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int scenario_cutoff(const Scenario& s, double omega) {
  return s.L > 0 ? s.L : default_cutoff(omega, s.medium.outer_radius());
}

double hcurl_inner_re(const CurlSamples& a, const CurlSamples& b, const VolumeQuadrature& vq) {
  double s = 0.0;
  for (std::size_t q = 0; q < vq.size(); ++q)
    s += vq.weights[q] * (a.E[q].dot(b.E[q]).real() + a.curlE[q].dot(b.curlE[q]).real());
  return s;
}

CurlSamples difference(const CurlSamples& a, const CurlSamples& b) {
  CurlSamples d;
  d.E.resize(a.E.size());
  d.curlE.resize(a.curlE.size());
  for (std::size_t q = 0; q < a.E.size(); ++q) {
    d.E[q] = a.E[q] - b.E[q];
    d.curlE[q] = a.curlE[q] - b.curlE[q];
  }
  return d;
}

double magnetic_farfield_norm(const FarField& ff) {
  const auto q = sphere_quadrature(2 * ff.coefficients().cutoff() + 2);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * ff.magnetic(q.nodes[i]).squaredNorm();
  return std::sqrt(s);
}

std::string core_label(const CoreMaterial& c) {
  std::ostringstream os;
  os.precision(6);
  os << "eps=" << c.eps << " mu=" << c.mu << " sigma=" << c.sigma;
  return os.str();
}

void finish_sweep(SweepResult& result) {
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const SweepRecord& a, const SweepRecord& b) { return a.parameter < b.parameter; });
  std::vector<double> x, y;
  const SweepRecord* prev = nullptr;
  result.monotone_nonincreasing = true;
  for (const auto& r : result.records) {
    if (r.at_floor) continue;
    if (prev && prev->relative_farfield > r.relative_farfield * (1.0 + 1e-9)) result.monotone_nonincreasing = false;
    prev = &r;
    x.push_back(r.parameter);
    y.push_back(r.relative_farfield);
  }
  result.slope = fit_loglog(x, y);
}

SweepRecord record_from(double parameter, const InvisibilityResult& r) {
  SweepRecord rec;
  rec.parameter = parameter;
  rec.farfield_norm = r.farfield_norm;
  rec.relative_farfield = r.relative_farfield;
  rec.epsilon = std::max(r.relative_epsilon, 0.0);
  rec.omega = r.omega;
  rec.modes = r.modes;
  return rec;
}

}  // namespace

std::string to_string(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::TwoLayer: return "two_layer";
    case DeviceKind::ThreeLayer: return "three_layer";
    case DeviceKind::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(IncidentKind kind) {
  switch (kind) {
    case IncidentKind::HerglotzFit: return "herglotz_fit";
    case IncidentKind::ExactMultipole: return "exact_multipole";
    case IncidentKind::PlaneWave: return "plane_wave";
  }
  return "exact_multipole";
}

IncidentKind incident_kind_from_string(const std::string& s) {
  if (s == "herglotz_fit") return IncidentKind::HerglotzFit;
  if (s == "exact_multipole") return IncidentKind::ExactMultipole;
  if (s == "plane_wave") return IncidentKind::PlaneWave;
  throw std::invalid_argument("unknown incident kind: " + s);
}

std::string to_string(EpsilonDegrade mode) {
  switch (mode) {
    case EpsilonDegrade::Noise: return "noise";
    case EpsilonDegrade::Quadrature: return "quadrature";
    case EpsilonDegrade::Lambda: return "lambda";
  }
  return "noise";
}

EpsilonDegrade epsilon_degrade_from_string(const std::string& s) {
  if (s == "noise") return EpsilonDegrade::Noise;
  if (s == "quadrature") return EpsilonDegrade::Quadrature;
  if (s == "lambda") return EpsilonDegrade::Lambda;
  throw std::invalid_argument("unknown epsilon degradation mode: " + s);
}

bool Scenario::flagged(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

Scenario build_two_layer(double R0, double R1, double n) {
  AnnulusProblem shell{R0, R1, n};
  shell.validate();
  Scenario s;
  s.name = "two_layer";
  s.device = DeviceKind::TwoLayer;
  s.shell = shell;
  s.medium = LayeredMedium({Layer::pec(R0), Layer{R1, n, 1.0, 0.0}});
  s.flags.push_back(to_string(shell.regime()));
  return s;
}

Scenario build_three_layer(double R_sigma, double R0, double R1, double n, const LossyParameters& lossy,
                           const CoreMaterial& core, RegularityWindow window) {
  AnnulusProblem shell{R0, R1, n};
  shell.validate();
  if (!(R_sigma > 0.0 && R_sigma < R0)) throw std::invalid_argument("three-layer device needs 0 < RSigma < R0");
  if (!(lossy.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(lossy.alpha1 > 0.0 && lossy.alpha2 > 0.0 && lossy.alpha3 > 0.0))
    throw std::invalid_argument("alpha parameters must be positive");
  const Layer core_layer{R_sigma, core.eps, core.mu, core.sigma};
  if (!window.contains(core_layer)) throw std::invalid_argument("core medium violates the regularity window");
  Layer lossy_layer{R0, lossy.alpha1 / lossy.tau, lossy.alpha2 * lossy.tau, lossy.alpha3 / lossy.tau};
  lossy_layer.lossy = true;
  Scenario s;
  s.name = "three_layer";
  s.device = DeviceKind::ThreeLayer;
  s.shell = shell;
  s.R_sigma = R_sigma;
  s.lossy = lossy;
  s.core = core;
  s.medium = LayeredMedium({core_layer, lossy_layer, Layer{R1, n, 1.0, 0.0}}, window);
  s.flags.push_back(to_string(shell.regime()));
  if (lossy.tau >= kNotAsymptoticTau) s.flags.push_back("not asymptotic");
  return s;
}

Scenario with_tau(const Scenario& base, double tau) {
  if (base.device != DeviceKind::ThreeLayer) throw std::invalid_argument("tau applies to three-layer devices only");
  LossyParameters lossy = base.lossy;
  lossy.tau = tau;
  Scenario s = build_three_layer(base.R_sigma, base.shell.R0, base.shell.R1, base.shell.n, lossy, base.core,
                                 base.medium.window());
  s.name = base.name;
  s.incident = base.incident;
  s.omega = base.omega;
  s.L = base.L;
  return s;
}

Scenario with_core(const Scenario& base, const CoreMaterial& core) {
  if (base.device != DeviceKind::ThreeLayer) throw std::invalid_argument("core applies to three-layer devices only");
  Scenario s = build_three_layer(base.R_sigma, base.shell.R0, base.shell.R1, base.shell.n, base.lossy, core,
                                 base.medium.window());
  s.name = base.name;
  s.incident = base.incident;
  s.omega = base.omega;
  s.L = base.L;
  return s;
}

Scenario reference_two_layer() { return build_two_layer(0.5, 1.0, 4.0); }

Scenario reference_three_layer(double tau, const CoreMaterial& core) {
  LossyParameters lossy;
  lossy.tau = tau;
  return build_three_layer(0.3, 0.5, 1.0, 4.0, lossy, core);
}

TransmissionEigenvalue select_eigenvalue(const Scenario& scenario) {
  const IncidentSpec& inc = scenario.incident;
  if (inc.eigen_index < 0) throw std::invalid_argument("eigen_index must be non-negative");
  auto evs = find_eigenvalues(scenario.shell, inc.l, inc.pol, inc.wmin, inc.wmax, inc.step);
  if (int(evs.size()) <= inc.eigen_index) {
    std::ostringstream os;
    os << "no transmission eigenvalue #" << inc.eigen_index << " for l=" << inc.l << " " << to_string(inc.pol)
       << " in [" << inc.wmin << ", " << inc.wmax << "] (found " << evs.size() << ")";
    throw std::runtime_error(os.str());
  }
  return evs[std::size_t(inc.eigen_index)];
}

IncidentField resolve_incident(const Scenario& scenario) {
  const IncidentSpec& spec = scenario.incident;
  const double R = scenario.medium.outer_radius();
  IncidentField out;
  const bool needs_eigen = spec.kind != IncidentKind::PlaneWave || scenario.omega <= 0.0;
  if (needs_eigen) {
    TransmissionEigenvalue ev;
    if (scenario.omega > 0.0) {
      ev.problem = scenario.shell;
      ev.l = spec.l;
      ev.pol = spec.pol;
      ev.omega = scenario.omega;
      ev.bracket = {scenario.omega, scenario.omega};
      ev.det_residual = std::abs(ite_det(scenario.shell, spec.l, spec.pol, scenario.omega));
    } else {
      ev = select_eigenvalue(scenario);
    }
    out.eigenvalue = ev;
  }
  out.omega = scenario.omega > 0.0 ? scenario.omega : out.eigenvalue->omega;
  out.L = scenario_cutoff(scenario, out.omega);

  if (spec.kind == IncidentKind::PlaneWave) {
    const int L = std::max(out.L, reconstruction_cutoff(out.omega, R));
    out.L = L;
    out.coeffs = plane_wave_coeffs(spec.direction.normalized(), spec.polarization, out.omega, L);
  } else {
    if (std::abs(spec.m) > spec.l) throw std::invalid_argument("incident azimuthal index |m| exceeds l");
    out.eigenfunction = ite_eigenfunction(*out.eigenvalue);
    const CoefficientVector target = out.eigenfunction->ball_coefficients(spec.m, out.L);
    if (spec.kind == IncidentKind::ExactMultipole) {
      out.coeffs = target;
      out.epsilon = 0.0;
      out.relative_epsilon = 0.0;
    } else {
      FitReport fit = fit_kernel(target, out.omega, R, sphere_quadrature(spec.degree), spec.lambda, spec.fit);
      out.L = std::max(out.L, spec.degree + 8);
      out.coeffs = herglotz_coeffs(fit.kernel, out.omega, out.L);
      out.epsilon = fit.epsilon;
      out.relative_epsilon = fit.relative_epsilon();
      out.fit = std::move(fit);
    }
  }
  if (spec.amplitude != 1.0) {
    out.coeffs *= cplx(spec.amplitude);
    if (out.epsilon > 0.0) out.epsilon *= std::abs(spec.amplitude);
  }
  out.hcurl_norm = ball_norms(out.coeffs, out.omega, R).hcurl();
  return out;
}

InvisibilityResult invisibility_farfield(const Scenario& scenario) {
  return invisibility_farfield(scenario, resolve_incident(scenario));
}

InvisibilityResult invisibility_farfield(const Scenario& scenario, const IncidentField& incident) {
  InvisibilityResult r;
  r.solution = scatter(scenario.medium, incident.omega, incident.coeffs);
  r.omega = r.solution.omega;
  r.farfield_norm = r.solution.farfield.norm();
  r.magnetic_farfield_norm = magnetic_farfield_norm(r.solution.farfield);
  r.incident_norm = incident.hcurl_norm;
  r.relative_farfield = r.incident_norm > 0.0 ? r.farfield_norm / r.incident_norm : 0.0;
  r.epsilon = incident.epsilon;
  r.relative_epsilon = incident.relative_epsilon;
  const auto norms = r.solution.mode_farfield_norms();
  for (std::size_t i = 0; i < r.solution.S.size(); ++i) {
    ModeContribution mc;
    mc.l = int(i / 2) + 1;
    mc.pol = Polarization(i % 2);
    mc.S = r.solution.S[i];
    mc.farfield_norm = norms[i];
    r.modes.push_back(mc);
  }
  return r;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  SlopeFit f;
  f.points = int(x.size());
  if (x.empty()) return f;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog needs positive data");
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
  }
  const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
  f.decades = *mx - *mn;
  if (f.points < 4 || f.decades < 2.0 - 1e-12) return f;
  const double n = double(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (f.intercept + f.slope * lx[i]);
    rss += e * e;
  }
  f.residual = std::sqrt(rss / n);
  f.defined = true;
  return f;
}

SweepResult epsilon_sweep(const Scenario& scenario, const std::vector<double>& targets,
                          const EpsilonSweepOptions& options) {
  if (scenario.device != DeviceKind::TwoLayer) throw std::invalid_argument("epsilon sweep needs a two-layer scenario");
  SweepResult result;
  result.parameter_name = "epsilon";

  Scenario exact = scenario;
  exact.incident.kind = IncidentKind::ExactMultipole;
  const IncidentField base = resolve_incident(exact);
  const double omega = base.omega;
  const double R = scenario.medium.outer_radius();
  const CoefficientVector& target = base.coeffs;
  const double target_norm = base.hcurl_norm;
  const IncidentSpec& spec = scenario.incident;
  const int L_inc = std::max(base.L, spec.degree + 8);

  auto measure = [&](const HerglotzKernel& kernel, double eps_abs, const std::string& label) {
    IncidentField inc;
    inc.omega = omega;
    inc.L = L_inc;
    inc.coeffs = herglotz_coeffs(kernel, omega, L_inc);
    inc.hcurl_norm = ball_norms(inc.coeffs, omega, R).hcurl();
    inc.epsilon = eps_abs;
    inc.relative_epsilon = eps_abs / target_norm;
    SweepRecord rec = record_from(inc.relative_epsilon, invisibility_farfield(scenario, inc));
    rec.label = label;
    return rec;
  };

  if (options.degrade == EpsilonDegrade::Noise) {
    const VolumeQuadrature vq = fit_volume_rule(omega, R, spec.fit);
    const HerglotzFitter fitter(vq, omega, sphere_quadrature(spec.degree), spec.lambda);
    const CurlSamples clean = sample_expansion(target, omega, vq);
    CurlSamples noise;
    std::mt19937 rng(options.seed);
    std::normal_distribution<double> gauss;
    auto draw = [&] {
      CVec3 v;
      for (int c = 0; c < 3; ++c) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(c) = cplx(re, im);
      }
      return v;
    };
    for (std::size_t q = 0; q < vq.size(); ++q) {
      noise.E.push_back(draw());
      noise.curlE.push_back(draw());
    }
    const FitReport r0 = fitter.fit(clean);
    const FitReport rn = fitter.fit(noise);
    const CurlSamples e0 = difference(sample_herglotz(r0.kernel, omega, vq), clean);
    const CurlSamples hn = sample_herglotz(rn.kernel, omega, vq);
    const double a = hcurl_inner_re(hn, hn, vq);
    const double b = hcurl_inner_re(e0, hn, vq);
    const double c = hcurl_inner_re(e0, e0, vq);
    const double floor_rel = std::sqrt(c) / target_norm;
    for (double t : targets) {
      if (!(t > 0.0)) throw std::invalid_argument("epsilon targets must be positive");
      const double eps_t = t * target_norm;
      const double disc = b * b - a * (c - eps_t * eps_t);
      const bool reachable = a > 0.0 && eps_t * eps_t > c && disc >= 0.0;
      const double eta = reachable ? (-b + std::sqrt(disc)) / a : 0.0;
      std::vector<CVec3> g(r0.kernel.size());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = r0.kernel.g[i] + eta * rn.kernel.g[i];
      const HerglotzKernel kernel(r0.kernel.quadrature, std::move(g));
      const double achieved = hcurl_error(sample_herglotz(kernel, omega, vq), clean, vq);
      std::ostringstream label;
      label.precision(6);
      label << "target=" << t;
      SweepRecord rec = measure(kernel, achieved, label.str());
      rec.at_floor = !reachable || t < options.floor_factor * floor_rel;
      result.records.push_back(std::move(rec));
    }
  } else if (options.degrade == EpsilonDegrade::Quadrature) {
    for (int D = options.min_degree; D <= options.max_degree; ++D) {
      const FitReport fit = fit_kernel(target, omega, R, sphere_quadrature(D), spec.lambda, spec.fit);
      result.records.push_back(measure(fit.kernel, fit.epsilon, "degree=" + std::to_string(D)));
    }
  } else {
    const VolumeQuadrature vq = fit_volume_rule(omega, R, spec.fit);
    const CurlSamples clean = sample_expansion(target, omega, vq);
    for (double lambda : options.lambdas) {
      const HerglotzFitter fitter(vq, omega, sphere_quadrature(spec.degree), lambda);
      const FitReport fit = fitter.fit(clean);
      std::ostringstream label;
      label.precision(6);
      label << "lambda=" << fit.lambda;
      result.records.push_back(measure(fit.kernel, fit.epsilon, label.str()));
    }
  }
  if (options.degrade != EpsilonDegrade::Noise) {
    double best = 1e300;
    for (const auto& r : result.records) best = std::min(best, r.epsilon);
    for (auto& r : result.records) r.at_floor = r.epsilon < options.floor_factor * best;
  }
  finish_sweep(result);
  return result;
}

SweepResult tau_sweep(const Scenario& scenario, const std::vector<double>& taus, const SweepOptions& options) {
  SweepResult result;
  result.parameter_name = "tau";
  const IncidentField incident = resolve_incident(scenario);
  result.records.resize(taus.size());
  run_jobs(taus.size(), options.threads, [&](std::size_t i) {
    const Scenario s = with_tau(scenario, taus[i]);
    SweepRecord rec = record_from(taus[i], invisibility_farfield(s, incident));
    std::ostringstream label;
    label.precision(6);
    label << "tau=" << taus[i];
    rec.label = label.str();
    rec.at_floor = rec.relative_farfield < options.floor;
    result.records[i] = std::move(rec);
  });
  finish_sweep(result);
  return result;
}

CoreSweepResult core_sweep(const Scenario& scenario, const std::vector<CoreMaterial>& cores,
                           const std::vector<double>& taus, const SweepOptions& options) {
  if (cores.empty()) throw std::invalid_argument("core sweep needs at least one core");
  CoreSweepResult out;
  out.at_fixed_tau.parameter_name = "core";
  const IncidentField incident = resolve_incident(scenario);
  std::vector<Scenario> devices;
  for (const auto& c : cores) devices.push_back(with_core(scenario, c));
  out.at_fixed_tau.records.resize(cores.size());
  run_jobs(cores.size(), options.threads, [&](std::size_t i) {
    SweepRecord rec = record_from(double(i), invisibility_farfield(devices[i], incident));
    rec.label = core_label(cores[i]);
    out.at_fixed_tau.records[i] = std::move(rec);
  });
  double lo = 1e300, hi = 0.0;
  for (const auto& r : out.at_fixed_tau.records) {
    lo = std::min(lo, r.farfield_norm);
    hi = std::max(hi, r.farfield_norm);
  }
  out.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!taus.empty()) {
    SweepOptions inner = options;
    inner.threads = 1;
    out.tau_sweeps.resize(cores.size());
    run_jobs(cores.size(), options.threads,
             [&](std::size_t i) { out.tau_sweeps[i] = tau_sweep(devices[i], taus, inner); });
  }
  return out;
}

}  // namespace itecloak
