// Acceptance runner: one PASS/FAIL line per criterion, plus INFO lines.
// Exit status is 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "itecloak/io.hpp"
#include "itecloak/specfun.hpp"
#include "oracles.hpp"

using namespace itecloak;

namespace {

int failures = 0;

void verdict(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  std::printf("%s [%d] %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& text) {
  std::printf("INFO %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Riccati-Bessel psi_l, chi_l and derivatives from the elementary seeds
// psi_0 = sin, chi_0 = -cos and the three-term recurrence.
struct Riccati {
  double psi, dpsi, chi, dchi;
};
Riccati riccati_elementary(int l, double x) {
  double pm = std::cos(x), p = std::sin(x);
  double cm = std::sin(x), c = -std::cos(x);
  for (int k = 0; k < l; ++k) {
    const double pn = (2 * k + 1) / x * p - pm;
    const double cn = (2 * k + 1) / x * c - cm;
    pm = p;
    p = pn;
    cm = c;
    c = cn;
  }
  return {p, pm - l * p / x, c, cm - l * c / x};
}

std::vector<double> oracle_roots(const AnnulusProblem& p, int l, Polarization pol, double lo, double hi) {
  const double step = 1e-2;
  std::vector<double> roots;
  double a = lo, fa = ode_oracle_det(p, l, pol, a);
  const int n = int(std::ceil((hi - lo) / step));
  for (int i = 1; i <= n; ++i) {
    const double b = std::min(lo + i * step, hi);
    const double fb = ode_oracle_det(p, l, pol, b);
    if (fa * fb < 0.0) {
      roots.push_back(oracle::bisect([&](double w) { return ode_oracle_det(p, l, pol, w); }, a, b, 1e-13));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_w = 0.0, worst_c = 0.0;
  for (int l = 0; l <= 40; ++l) {
    for (double x : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0}) {
      const auto j = specfun::sph_bessel(specfun::BesselKind::J, l, x);
      const auto y = specfun::sph_bessel(specfun::BesselKind::Y, l, x);
      worst_w = std::max(worst_w, rel(j.value * y.derivative - j.derivative * y.value, 1.0 / (x * x)));
    }
  }
  for (int l = 0; l <= 10; ++l) {
    for (double r : {0.05, 0.5, 1.0, 2.0, 3.5, 5.0}) {
      for (int k = 0; k < 12; ++k) {
        const cplx z = std::polar(r, 2.0 * M_PI * (k + 0.25) / 12.0);
        worst_c = std::max(worst_c, rel(specfun::sph_bessel(specfun::BesselKind::J, l, z).value,
                                        oracle::sph_j_series(l, z)));
      }
    }
  }
  verdict(1, "special functions",
          worst_w <= 1e-10 && worst_c <= 1e-9,
          fmt("max Wronskian rel err %.2e (<= 1e-10)", worst_w) + fmt(", max complex-argument rel err %.2e (<= 1e-9)", worst_c),
          elapsed(t0));
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const double expected = 2.0 * oracle::first_bessel_zero(1);
  const AnnulusProblem p{0.5, 1.0, 1.0};
  const auto evs = find_eigenvalues(p, 1, Polarization::TE, 0.5, 12.0);
  const double got = evs.empty() ? NAN : evs[0].omega;
  const double err = std::abs(got - expected);
  verdict(2, "ITE degenerate oracle (n = 1)", err <= 1e-8,
          fmt("first root %.12f", got) + fmt(", oracle %.12f", expected) + fmt(", |diff| %.2e (<= 1e-8)", err),
          elapsed(t0));
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  double worst = 0.0;
  std::string growth;
  for (double n : {4.0, 0.25}) {
    const AnnulusProblem p{0.5, 1.0, n};
    std::size_t narrow = 0, wide = 0;
    for (int l = 1; l <= 3; ++l) {
      for (auto pol : {Polarization::TE, Polarization::TM}) {
        const auto det_roots = find_eigenvalues(p, l, pol, 0.5, 15.0);
        const auto ode_roots = oracle_roots(p, l, pol, 0.5, 15.0);
        const std::size_t wide_count = ite_scan(p, l, pol, 0.5, 30.0).brackets.size();
        narrow += det_roots.size();
        wide += wide_count;
        bool ok = det_roots.size() == ode_roots.size();
        double gap = 0.0;
        for (std::size_t i = 0; ok && i < det_roots.size(); ++i)
          gap = std::max(gap, std::abs(det_roots[i].omega - ode_roots[i]) / ode_roots[i]);
        ok = ok && gap <= 1e-6;
        worst = std::max(worst, gap);
        pass = pass && ok;
        char buf[200];
        std::snprintf(buf, sizeof buf, "n=%g l=%d %s: %zu det roots, %zu oracle roots, max rel gap %.2e; count on [0.5,30] %zu",
                      n, l, to_string(pol).c_str(), det_roots.size(), ode_roots.size(), gap, wide_count);
        info(buf);
      }
    }
    pass = pass && wide > narrow;
    char buf[120];
    std::snprintf(buf, sizeof buf, "%sn=%g: %zu -> %zu", growth.empty() ? "" : ", ", n, narrow, wide);
    growth += buf;
  }
  verdict(3, "ITE cross-validation against the ODE oracle", pass,
          fmt("max root gap %.2e (<= 1e-6), counts match; total count [0.5,15] -> [0.5,30]: ", worst) + growth,
          elapsed(t0));
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const AnnulusProblem p{0.5, 1.0, 4.0};
  std::vector<TransmissionEigenvalue> all;
  for (int l = 1; l <= 3; ++l)
    for (auto pol : {Polarization::TE, Polarization::TM})
      for (const auto& ev : find_eigenvalues(p, l, pol, 0.5, 15.0)) all.push_back(ev);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.omega < b.omega; });
  bool pass = all.size() >= 3;
  double worst = 0.0, worst_all = 0.0;
  std::string which;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto ef = ite_eigenfunction(all[i]);
    worst_all = std::max(worst_all, ef.max_residual());
    if (i < 3) {
      worst = std::max(worst, ef.max_residual());
      char buf[80];
      std::snprintf(buf, sizeof buf, "%s%.6f (l=%d %s)", i ? ", " : "", all[i].omega, all[i].l, to_string(all[i].pol).c_str());
      which += buf;
    }
  }
  pass = pass && worst <= 1e-8;
  info(fmt("all eigenvalues on [0.5, 15], l <= 3: max residual %.2e", worst_all));
  verdict(4, "eigenfunction residuals", pass, "first three: " + which + fmt("; max residual %.2e (<= 1e-8)", worst),
          elapsed(t0));
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario s = reference_two_layer();
  const auto exact = invisibility_farfield(s);
  Scenario pw = s;
  pw.incident.kind = IncidentKind::PlaneWave;
  pw.omega = exact.omega;
  const auto plane = invisibility_farfield(pw);
  const double ratio = plane.relative_farfield / std::max(exact.relative_farfield, 1e-300);

  s.incident.kind = IncidentKind::HerglotzFit;
  const std::vector<double> targets{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  const auto sweep = epsilon_sweep(s, targets);
  for (const auto& r : sweep.records) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "eps-sweep (noise): epsilon %.3e -> relative far field %.3e%s", r.parameter,
                  r.relative_farfield, r.at_floor ? " [floor]" : "");
    info(buf);
  }
  const bool pass = exact.relative_farfield <= 1e-8 && sweep.slope.defined && std::abs(sweep.slope.slope - 1.0) <= 0.2 &&
                    ratio >= 1e6;
  char buf[400];
  std::snprintf(buf, sizeof buf,
                "omega %.9f; exact multipole relative far field %.2e (<= 1e-8); eps slope %.4f over %.1f decades "
                "(1 +- 0.2); plane-wave/eigen ratio %.2e (>= 1e6)",
                exact.omega, exact.relative_farfield, sweep.slope.slope, sweep.slope.decades, ratio);
  verdict(5, "near-non-scattering", pass, buf, elapsed(t0));

  for (auto mode : {EpsilonDegrade::Quadrature, EpsilonDegrade::Lambda}) {
    EpsilonSweepOptions o;
    o.degrade = mode;
    const auto alt = epsilon_sweep(s, {}, o);
    for (const auto& r : alt.records) {
      std::snprintf(buf, sizeof buf, "eps-sweep (%s, %s): epsilon %.3e -> relative far field %.3e%s",
                    to_string(mode).c_str(), r.label.c_str(), r.parameter, r.relative_farfield,
                    r.at_floor ? " [floor]" : "");
      info(buf);
    }
    std::snprintf(buf, sizeof buf, "eps-sweep (%s): slope %s", to_string(mode).c_str(),
                  alt.slope.defined ? fmt("%.3f", alt.slope.slope).c_str() : "undefined");
    info(buf);
  }
}

const std::vector<double> kTaus{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sweep = tau_sweep(reference_three_layer(), kTaus);
  for (const auto& r : sweep.records) info(fmt("tau %.0e", r.parameter) + fmt(" -> relative far field %.4e", r.relative_farfield));
  const bool pass = sweep.monotone_nonincreasing && sweep.slope.defined && sweep.slope.slope >= 0.4;
  verdict(6, "lossy-layer scaling", pass,
          fmt("slope %.4f (>= 0.4)", sweep.slope.slope) + (sweep.monotone_nonincreasing ? ", monotone" : ", NOT monotone"),
          elapsed(t0));
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<CoreMaterial> cores{{0.2, 1.0, 0.0}, {5.0, 1.0, 0.0}, {2.0, 1.0, 1.0}, {1.0, 0.5, 0.2},
                                        {1.0, 1.0, 0.0}};
  const auto r = core_sweep(reference_three_layer(1e-4), cores, kTaus);
  double min_slope = 1e300;
  for (std::size_t i = 0; i < cores.size(); ++i) {
    min_slope = std::min(min_slope, r.tau_sweeps[i].slope.slope);
    info("core " + r.at_fixed_tau.records[i].label + fmt(": far field %.4e", r.at_fixed_tau.records[i].farfield_norm) +
         fmt(", tau slope %.4f", r.tau_sweeps[i].slope.slope));
  }
  verdict(7, "core independence", r.spread <= 10.0 && min_slope >= 0.4,
          fmt("max/min %.4f (<= 10)", r.spread) + fmt(", min tau slope %.4f (>= 0.4)", min_slope), elapsed(t0));
}

void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  double pec_err = 0.0;
  for (double a : {0.5, 1.0, 2.0}) {
    const LayeredMedium pec({Layer::pec(a)});
    for (double w : {0.5, 1.0, 2.0, 5.0}) {
      const double x = w * a;
      for (int l = 1; l <= 3; ++l) {
        const auto r = riccati_elementary(l, x);
        const cplx te = -r.psi / cplx(r.psi, r.chi);
        const cplx tm = -r.dpsi / cplx(r.dpsi, r.dchi);
        pec_err = std::max(pec_err, std::abs(mode_scattering_coeff(pec, w, l, Polarization::TE) - te));
        pec_err = std::max(pec_err, std::abs(mode_scattering_coeff(pec, w, l, Polarization::TM) - tm));
      }
    }
  }
  const LayeredMedium lossless[] = {LayeredMedium({Layer{0.4, 5.0, 1.0, 0.0}, Layer{1.0, 2.0, 0.5, 0.0}}),
                                    LayeredMedium({Layer::pec(0.5), Layer{1.0, 4.0, 1.0, 0.0}}),
                                    LayeredMedium({Layer::pec(0.5), Layer{1.0, 0.25, 1.0, 0.0}})};
  double unit_err = 0.0, passive_excess = -1.0;
  for (double w : {0.3, 0.99, 3.0, 8.0}) {
    for (int l = 1; l <= 20; ++l) {
      for (auto pol : {Polarization::TE, Polarization::TM}) {
        for (const auto& m : lossless)
          unit_err = std::max(unit_err, std::abs(std::abs(1.0 + 2.0 * mode_scattering_coeff(m, w, l, pol)) - 1.0));
        for (double tau : kTaus) {
          const auto m = reference_three_layer(tau).medium;
          passive_excess = std::max(passive_excess, std::abs(1.0 + 2.0 * mode_scattering_coeff(m, w, l, pol)) - 1.0);
        }
      }
    }
  }
  const LayeredMedium vac({Layer{0.5, 1.0, 1.0, 0.0}, Layer{1.0, 1.0, 1.0, 0.0}});
  const auto inc = plane_wave_coeffs(Vec3::UnitZ(), CVec3(1.0, 0.0, 0.0), 2.0, 14);
  const auto sol = scatter(vac, 2.0, inc);
  bool zero = sol.farfield.norm() == 0.0;
  for (std::size_t i = 0; i < sol.scattered.size(); ++i) zero = zero && sol.scattered[i] == cplx(0.0);
  const bool pass = pec_err <= 1e-10 && unit_err <= 1e-10 && passive_excess <= 1e-10 && zero;
  verdict(8, "scattering engine soundness", pass,
          fmt("PEC closed-form err %.2e (<= 1e-10)", pec_err) + fmt(", lossless ||1+2S|-1| %.2e (<= 1e-10)", unit_err) +
              fmt(", lossy max |1+2S|-1 %.2e (<= 1e-10)", passive_excess) + (zero ? ", vacuum exactly zero" : ", vacuum NONZERO"),
          elapsed(t0));
}

void criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto three = reference_three_layer();
  SweepOptions threaded;
  threaded.threads = 4;
  const std::string tau_a = results_csv(tau_sweep(three, kTaus));
  const std::string tau_b = results_csv(tau_sweep(three, kTaus, threaded));
  Scenario two = reference_two_layer();
  two.incident.kind = IncidentKind::HerglotzFit;
  two.incident.degree = 6;
  const std::vector<double> targets{1e-1, 1e-2, 1e-3, 1e-4};
  const std::string eps_a = results_csv(epsilon_sweep(two, targets));
  const std::string eps_b = results_csv(epsilon_sweep(two, targets));
  const std::vector<CoreMaterial> cores{{0.2, 1.0, 0.0}, {2.0, 1.0, 1.0}};
  const std::string core_a = results_csv(core_sweep(three, cores, {}).at_fixed_tau);
  const std::string core_b = results_csv(core_sweep(three, cores, {}, threaded).at_fixed_tau);
  const bool pass = tau_a == tau_b && eps_a == eps_b && core_a == core_b;
  verdict(9, "determinism", pass,
          std::string("results.csv byte-identical for repeated tau (1 vs 4 threads), eps and core sweeps: ") +
              (pass ? "yes" : "no"),
          elapsed(t0));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                    criterion6, criterion7, criterion8, criterion9};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("FAIL (exception) %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
