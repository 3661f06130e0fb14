#include "itecloak/specfun.hpp"

#include <cmath>
#include <sstream>

namespace itecloak::specfun {
namespace {

constexpr double kRescaleAbove = 1e250;

std::string describe(int l, cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << "l=" << l << ", z=(" << z.real() << "," << z.imag() << ")";
  return os.str();
}

void check_args(int l, cplx z) {
  if (l < 0 || l > kMaxOrder) {
    throw DomainError("spherical Bessel order out of range [0, 200]: " + describe(l, z));
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kMaxAbsArg) {
    throw DomainError("spherical Bessel argument out of range |z| <= 1e4: " + describe(l, z));
  }
}

void check_finite(cplx v, int l, cplx z) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw OverflowError("spherical Bessel overflow at " + describe(l, z));
  }
}

// Power series j_l(z) = z^l/(2l+1)!! * sum_k (-z^2/2)^k / (k! (2l+3)...(2l+2k+1)).
cplx j_series(int l, cplx z) {
  cplx lead = 1.0;
  for (int k = 1; k <= l; ++k) lead *= z / double(2 * k + 1);
  const cplx x = -0.5 * z * z;
  cplx term = 1.0;
  cplx sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= x / (double(k) * double(2 * l + 2 * k + 1));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return lead * sum;
}

// Ratio j_{l+1}(z)/j_l(z) from the continued fraction
// z/(2l+3 - z^2/(2l+5 - z^2/(2l+7 - ...))), evaluated with modified Lentz.
cplx j_ratio(int l, cplx z) {
  constexpr double tiny = 1e-300;
  // f = b0 + a1/(b1 + a2/(b2 + ...)) with b_k = (2l+3+2k)/z, a_k = -1.
  cplx f = double(2 * l + 3) / z;
  if (std::abs(f) < tiny) f = tiny;
  cplx c = f;
  cplx d = 0.0;
  for (int k = 1; k < 200000; ++k) {
    const cplx b = double(2 * l + 3 + 2 * k) / z;
    d = b - d;
    if (std::abs(d) < tiny) d = tiny;
    c = b - 1.0 / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return 1.0 / f;
  }
  throw OverflowError("continued fraction for j_l did not converge at " + describe(l, z));
}

BesselEval eval_j(int l, cplx z) {
  if (z == cplx(0.0)) {
    return {l == 0 ? 1.0 : 0.0, l == 1 ? 1.0 / 3.0 : 0.0};
  }
  if (std::abs(z) <= 1.0) {
    const cplx jl = j_series(l, z);
    const cplx jl1 = j_series(l + 1, z);
    return {jl, double(l) / z * jl - jl1};
  }

  const cplx s = std::sin(z);
  const cplx c = std::cos(z);
  check_finite(s, l, z);
  const cplx j0 = s / z;
  const cplx j1 = s / (z * z) - c / z;

  const cplx rho = j_ratio(l, z);
  // Unnormalized downward recurrence; f_hi/f_lo track orders k+1 and k.
  cplx f_hi = rho;
  cplx f_lo = 1.0;
  cplx keep_l = 1.0;
  for (int k = l; k > 0; --k) {
    const cplx f_prev = double(2 * k + 1) / z * f_lo - f_hi;
    f_hi = f_lo;
    f_lo = f_prev;
    if (std::abs(f_lo) > kRescaleAbove) {
      f_lo /= kRescaleAbove;
      f_hi /= kRescaleAbove;
      keep_l /= kRescaleAbove;
    }
  }
  // f_lo ~ j_0, f_hi ~ j_1, on the same scale as keep_l.
  const cplx scale = (std::abs(j0) >= std::abs(j1)) ? j0 / f_lo : j1 / f_hi;
  const cplx jl = keep_l * scale;
  check_finite(jl, l, z);
  return {jl, double(l) / z * jl - rho * jl};
}

// Upward recurrence f_{k+1} = (2k+1)/z f_k - f_{k-1}, valid for y and h1.
BesselEval upward(int l, cplx z, cplx f0, cplx f1) {
  check_finite(f0, l, z);
  check_finite(f1, l, z);
  cplx lo = f0;
  cplx hi = f1;
  for (int k = 1; k <= l; ++k) {
    const cplx next = double(2 * k + 1) / z * hi - lo;
    lo = hi;
    hi = next;
    check_finite(hi, l, z);
  }
  // lo = f_l, hi = f_{l+1}
  return {lo, double(l) / z * lo - hi};
}

}  // namespace

BesselEval sph_bessel(BesselKind kind, int l, cplx z) {
  check_args(l, z);
  switch (kind) {
    case BesselKind::J:
      return eval_j(l, z);
    case BesselKind::Y: {
      if (z == cplx(0.0)) throw DomainError("y_l is singular at z = 0: " + describe(l, z));
      const cplx s = std::sin(z);
      const cplx c = std::cos(z);
      return upward(l, z, -c / z, -c / (z * z) - s / z);
    }
    case BesselKind::H1: {
      if (z == cplx(0.0)) throw DomainError("h1_l is singular at z = 0: " + describe(l, z));
      const cplx I(0.0, 1.0);
      const cplx e = std::exp(I * z);
      return upward(l, z, -I * e / z, -e * (z + I) / (z * z));
    }
  }
  throw DomainError("unknown Bessel kind");
}

RiccatiEval riccati(RiccatiKind kind, int l, cplx z) {
  BesselKind bk = BesselKind::J;
  if (kind == RiccatiKind::Chi) bk = BesselKind::Y;
  if (kind == RiccatiKind::Xi) bk = BesselKind::H1;
  const BesselEval b = sph_bessel(bk, l, z);
  return {z * b.value, b.value + z * b.derivative};
}

}  // namespace itecloak::specfun
