#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "itecloak/ite.hpp"

namespace itecloak {
namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

// Integrates u'' = (l(l+1)/r^2 - k^2) u from r0 to r1.
State integrate_radial(int l, double k, State u, double r0, double r1) {
  const double ll = double(l) * (l + 1);
  auto rhs = [&](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = (ll / (r * r) - k * k) * s[0];
  };
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-14, 1e-12);
  double r = r0;
  double dr = (r1 - r0) * 1e-3;
  int steps = 0;
  while (r < r1) {
    if (r + dr > r1) dr = r1 - r;
    if (stepper.try_step(rhs, u, r, dr) == odeint::fail) {
      if (dr < 1e-15 * std::max(1.0, r) || ++steps > 1000000) {
        std::ostringstream msg;
        msg << "radial ODE step size underflow at r = " << r << " (l = " << l << ", k = " << k << ")";
        throw IntegratorError(msg.str());
      }
      continue;
    }
    if (++steps > 1000000) {
      std::ostringstream msg;
      msg << "radial ODE step limit reached at r = " << r << " (l = " << l << ", k = " << k << ")";
      throw IntegratorError(msg.str());
    }
  }
  if (!std::isfinite(u[0]) || !std::isfinite(u[1])) {
    std::ostringstream msg;
    msg << "radial ODE integration diverged before r = " << r1 << " (l = " << l << ", k = " << k << ")";
    throw IntegratorError(msg.str());
  }
  return u;
}

// Regular solution r^(l+1) (1 - x^2/(2(2l+3)) + x^4/(8(2l+3)(2l+5)) - ...),
// x = k r, from its power series at a small radius, then integrated.
State regular_ball(int l, double k, double R) {
  const double r0 = std::min(1e-2 / k, 1e-2 * R);
  double term = 1.0, u = 0.0, du = 0.0;
  const double x2 = (k * r0) * (k * r0);
  for (int j = 0; j < 8; ++j) {
    u += term;
    du += term * double(l + 1 + 2 * j);
    term *= -x2 / (2.0 * (j + 1) * (2.0 * l + 2.0 * j + 3.0));
  }
  const double scale = std::pow(r0, l + 1);
  State s{scale * u, scale * du / r0};
  // Rescale to O(1) values; the determinant sign is unaffected.
  const double n = std::hypot(s[0], s[1]);
  s[0] /= n;
  s[1] /= n;
  return integrate_radial(l, k, s, r0, R);
}

}  // namespace

double ode_oracle_det(const AnnulusProblem& problem, int l, Polarization pol, double omega) {
  problem.validate(true);
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  const double k = problem.k_shell(omega);
  // PEC at R0: u = 0 for TE (tangential E ~ u / r), u' = 0 for TM.
  const State start = pol == Polarization::TE ? State{0.0, 1.0} : State{1.0, 0.0};
  const State ua = integrate_radial(l, k, start, problem.R0, problem.R1);
  const State ub = regular_ball(l, omega, problem.R1);
  if (pol == Polarization::TE) return ub[0] * ua[1] - ua[0] * ub[1];
  return (omega / k) * ua[1] * ub[0] - (k / omega) * ua[0] * ub[1];
}

}  // namespace itecloak
