#include "itecloak/vswf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace itecloak {
namespace {

constexpr cplx I(0.0, 1.0);

cplx ipow(int n) {
  // i^n for any integer n
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

cplx neg_ipow(int n) { return ipow(-n); }

void check_unit(const Vec3& d) {
  if (std::abs(d.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("direction must be a unit vector");
  }
}

void check_mode(const ModeIndex& mode) {
  if (mode.l < 1 || std::abs(mode.m) > mode.l) {
    throw std::invalid_argument("invalid mode index (need l >= 1, |m| <= l)");
  }
}

}  // namespace

std::string to_string(Polarization pol) { return pol == Polarization::TE ? "TE" : "TM"; }

Polarization polarization_from_string(const std::string& s) {
  if (s == "TE" || s == "te") return Polarization::TE;
  if (s == "TM" || s == "tm") return Polarization::TM;
  throw std::invalid_argument("unknown polarization '" + s + "' (expected TE or TM)");
}

std::string to_string(Basis basis) { return basis == Basis::Regular ? "regular" : "outgoing"; }

// ---------------------------------------------------------------------------
// CoefficientVector

CoefficientVector::CoefficientVector(int L, Basis basis) : L_(L), basis_(basis) {
  if (L < 1) throw std::invalid_argument("coefficient cutoff L must be >= 1");
  entries_.assign(mode_count(L), cplx(0.0));
}

ModeIndex CoefficientVector::mode_at(std::size_t index) {
  const int pol = int(index % 2);
  const int lm = int(index / 2);  // = l*l - 1 + m + l
  int l = 1;
  while ((l + 1) * (l + 1) - 1 <= lm) ++l;
  const int m = lm - (l * l - 1) - l;
  return {l, m, Polarization(pol)};
}

cplx& CoefficientVector::at(const ModeIndex& mode) {
  check_mode(mode);
  if (mode.l > L_) throw std::out_of_range("mode order exceeds coefficient cutoff");
  return entries_[index(mode)];
}

const cplx& CoefficientVector::at(const ModeIndex& mode) const {
  check_mode(mode);
  if (mode.l > L_) throw std::out_of_range("mode order exceeds coefficient cutoff");
  return entries_[index(mode)];
}

double CoefficientVector::norm() const {
  double s = 0.0;
  for (const cplx& c : entries_) s += std::norm(c);
  return std::sqrt(s);
}

CoefficientVector& CoefficientVector::operator+=(const CoefficientVector& other) {
  if (other.basis_ != basis_) throw std::invalid_argument("cannot add coefficient vectors of different basis");
  if (other.L_ > L_) *this = with_cutoff(other.L_);
  for (std::size_t i = 0; i < other.entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

CoefficientVector& CoefficientVector::operator*=(cplx s) {
  for (cplx& c : entries_) c *= s;
  return *this;
}

CoefficientVector CoefficientVector::with_cutoff(int L) const {
  CoefficientVector out(L, basis_);
  const std::size_t n = std::min(out.size(), size());
  for (std::size_t i = 0; i < n; ++i) out.entries_[i] = entries_[i];
  return out;
}

CoefficientVector operator+(CoefficientVector a, const CoefficientVector& b) {
  a += b;
  return a;
}

CoefficientVector operator*(cplx s, CoefficientVector a) {
  a *= s;
  return a;
}

// ---------------------------------------------------------------------------
// Harmonics

VshTable::VshTable(int L, const Vec3& direction) : L_(L), dir_(direction) {
  check_unit(direction);
  const std::size_t n = std::size_t((L + 1) * (L + 1));
  Y_.assign(n, cplx(0.0));
  X_.assign(n, CVec3::Zero());

  const double ct = std::clamp(direction.z(), -1.0, 1.0);
  const double st = std::hypot(direction.x(), direction.y());
  const cplx eiphi = st > 0.0 ? cplx(direction.x() / st, direction.y() / st) : cplx(1.0);

  // Orthonormal associated Legendre functions, Condon-Shortley phase included.
  std::vector<double> P(n, 0.0);
  auto at = [](int l, int m) { return std::size_t(l * l + l + m); };
  P[at(0, 0)] = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 1; m <= L; ++m) {
    P[at(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * P[at(m - 1, m - 1)];
  }
  for (int m = 0; m < L; ++m) {
    P[at(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * ct * P[at(m, m)];
  }
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      P[at(l, m)] = a * (ct * P[at(l - 1, m)] - b * P[at(l - 2, m)]);
    }
  }
  cplx phase = 1.0;
  for (int m = 0; m <= L; ++m) {
    for (int l = m; l <= L; ++l) {
      const cplx y = P[at(l, m)] * phase;
      Y_[at(l, m)] = y;
      if (m > 0) Y_[at(l, -m)] = ((m % 2) ? -1.0 : 1.0) * std::conj(y);
    }
    phase *= eiphi;
  }

  // X_lm = L Y_lm / sqrt(l(l+1)) using the ladder operators.
  for (int l = 1; l <= L; ++l) {
    const double norm = 1.0 / std::sqrt(double(l) * (l + 1));
    for (int m = -l; m <= l; ++m) {
      const cplx up = (m < l) ? std::sqrt(double(l - m) * (l + m + 1)) * Y_[at(l, m + 1)] : cplx(0.0);
      const cplx dn = (m > -l) ? std::sqrt(double(l + m) * (l - m + 1)) * Y_[at(l, m - 1)] : cplx(0.0);
      CVec3 x;
      x.x() = 0.5 * (up + dn);
      x.y() = (up - dn) / (2.0 * I);
      x.z() = double(m) * Y_[at(l, m)];
      X_[at(l, m)] = norm * x;
    }
  }
}

CVec3 VshTable::tm(int l, int m) const { return cross(dir_, te(l, m)); }

CVec3 VshTable::operator()(const ModeIndex& mode) const {
  return mode.pol == Polarization::TE ? te(mode.l, mode.m) : tm(mode.l, mode.m);
}

CVec3 vsh_eval(const ModeIndex& mode, const Vec3& direction) {
  check_mode(mode);
  check_unit(direction);
  return VshTable(mode.l, direction)(mode);
}

// ---------------------------------------------------------------------------
// Multipole fields

namespace {

struct RadialParts {
  cplx z_l;       // z_l(kr)
  cplx z_over;    // z_l(kr)/(kr)
  cplx dr_over;   // (x z_l)'(x)/x at x = kr
};

RadialParts radial_parts(int l, cplx x, Basis basis) {
  if (x == cplx(0.0)) {
    if (basis == Basis::Outgoing) throw DomainError("outgoing multipole is singular at the origin");
    const double lim1 = (l == 1) ? 1.0 / 3.0 : 0.0;
    return {0.0, lim1, 2.0 * lim1};
  }
  const auto kind = basis == Basis::Regular ? specfun::BesselKind::J : specfun::BesselKind::H1;
  const specfun::BesselEval b = specfun::sph_bessel(kind, l, x);
  return {b.value, b.value / x, (b.value + x * b.derivative) / x};
}

// M and N for one (l, m) at a point; returns {M, N}.
std::pair<CVec3, CVec3> mn_pair(int l, int m, cplx k, const Vec3& point, Basis basis) {
  const double r = point.norm();
  const Vec3 rhat = r > 0.0 ? Vec3(point / r) : Vec3(0.0, 0.0, 1.0);
  const VshTable tab(l, rhat);
  const RadialParts rp = radial_parts(l, k * r, basis);
  const CVec3& X = tab.te(l, m);
  const CVec3 M = rp.z_l * X;
  const CVec3 N = I * std::sqrt(double(l) * (l + 1)) * rp.z_over * tab.scalar(l, m) * rhat.cast<cplx>() +
                  rp.dr_over * cross(rhat, X);
  return {M, N};
}

}  // namespace

CVec3 wave_eval(const ModeIndex& mode, cplx k, const Vec3& point, Basis basis) {
  check_mode(mode);
  if (k == cplx(0.0)) throw std::invalid_argument("wavenumber must be nonzero");
  const auto [M, N] = mn_pair(mode.l, mode.m, k, point, basis);
  return mode.pol == Polarization::TE ? M : N;
}

CVec3 regular_wave_eval(const ModeIndex& mode, cplx k, const Vec3& point) {
  return wave_eval(mode, k, point, Basis::Regular);
}

FieldValue expansion_eval(const CoefficientVector& coeffs, cplx k, const Vec3& point) {
  const int L = coeffs.cutoff();
  const double r = point.norm();
  const Vec3 rhat = r > 0.0 ? Vec3(point / r) : Vec3(0.0, 0.0, 1.0);
  const VshTable tab(L, rhat);
  FieldValue out{CVec3::Zero(), CVec3::Zero()};
  for (int l = 1; l <= L; ++l) {
    const RadialParts rp = radial_parts(l, k * r, coeffs.basis());
    const cplx radial_n = I * std::sqrt(double(l) * (l + 1)) * rp.z_over;
    for (int m = -l; m <= l; ++m) {
      const cplx a = coeffs[CoefficientVector::index({l, m, Polarization::TE})];
      const cplx b = coeffs[CoefficientVector::index({l, m, Polarization::TM})];
      if (a == cplx(0.0) && b == cplx(0.0)) continue;
      const CVec3& X = tab.te(l, m);
      const CVec3 M = rp.z_l * X;
      const CVec3 N = radial_n * tab.scalar(l, m) * rhat.cast<cplx>() + rp.dr_over * cross(rhat, X);
      out.E += a * M + b * N;
      out.curlE += k * (a * N + b * M);
    }
  }
  return out;
}

int default_cutoff(double omega, double radius) { return int(std::ceil(omega * radius)) + 12; }

int reconstruction_cutoff(double omega, double radius) {
  const double x = omega * radius;
  return int(std::ceil(x + 5.0 * std::cbrt(x))) + 6;
}

CoefficientVector plane_wave_coeffs(const Vec3& d, const CVec3& p, double omega, int L) {
  check_unit(d);
  if (std::abs(p.dot(d.cast<cplx>())) > 1e-12 * std::max(1.0, p.norm())) {
    throw std::invalid_argument("plane wave polarization must be transverse to its direction");
  }
  if (!(omega > 0.0)) throw std::invalid_argument("plane wave frequency must be positive");
  CoefficientVector out(L, Basis::Regular);
  const VshTable tab(L, d);
  const double four_pi = 4.0 * std::numbers::pi;
  for (int l = 1; l <= L; ++l) {
    const cplx ca = four_pi * ipow(l);
    const cplx cb = four_pi * ipow(l - 1);
    for (int m = -l; m <= l; ++m) {
      // Eigen's dot conjugates its left operand: sum_j conj(X_j) p_j.
      const cplx pa = tab.te(l, m).dot(p);
      const cplx pb = tab.tm(l, m).dot(p);
      out[CoefficientVector::index({l, m, Polarization::TE})] = ca * pa;
      out[CoefficientVector::index({l, m, Polarization::TM})] = cb * pb;
    }
  }
  return out;
}

CoefficientVector magnetic_coeffs(const CoefficientVector& electric) {
  CoefficientVector out(electric.cutoff(), electric.basis());
  for (std::size_t i = 0; i < electric.size(); i += 2) {
    out[i] = -I * electric[i + 1];
    out[i + 1] = -I * electric[i];
  }
  return out;
}

double BallNorms::hcurl() const { return std::sqrt(l2_sq + curl_l2_sq); }

BallNorms ball_norms(const CoefficientVector& regular, double omega, double R) {
  if (regular.basis() != Basis::Regular) throw std::invalid_argument("ball_norms needs a regular expansion");
  const int L = regular.cutoff();
  const int npts = 48 + int(std::ceil(omega * R));
  const GaussRule gl = gauss_legendre(npts, 0.0, R);
  // Radial integrals for M and N of each order (orthonormal angular parts).
  std::vector<double> iM(std::size_t(L + 1), 0.0);
  std::vector<double> iN(std::size_t(L + 1), 0.0);
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double r = gl.nodes[q];
    const double w = gl.weights[q] * r * r;
    for (int l = 1; l <= L; ++l) {
      const RadialParts rp = radial_parts(l, omega * r, Basis::Regular);
      iM[std::size_t(l)] += w * std::norm(rp.z_l);
      iN[std::size_t(l)] += w * (std::norm(rp.dr_over) + double(l) * (l + 1) * std::norm(rp.z_over));
    }
  }
  BallNorms out;
  const double k2 = omega * omega;
  for (std::size_t i = 0; i < regular.size(); ++i) {
    const ModeIndex mode = CoefficientVector::mode_at(i);
    const double a2 = std::norm(regular[i]);
    const std::size_t l = std::size_t(mode.l);
    if (mode.pol == Polarization::TE) {
      out.l2_sq += a2 * iM[l];
      out.curl_l2_sq += a2 * k2 * iN[l];
    } else {
      out.l2_sq += a2 * iN[l];
      out.curl_l2_sq += a2 * k2 * iM[l];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Far field

FarField::FarField(CoefficientVector outgoing, double omega) : coeffs_(std::move(outgoing)), omega_(omega) {
  if (coeffs_.basis() != Basis::Outgoing) throw std::invalid_argument("far field needs outgoing coefficients");
  if (!(omega > 0.0)) throw std::invalid_argument("far field frequency must be positive");
}

cplx FarField::pattern_coefficient(std::size_t index) const {
  const ModeIndex mode = CoefficientVector::mode_at(index);
  const cplx phase = mode.pol == Polarization::TE ? neg_ipow(mode.l + 1) : neg_ipow(mode.l);
  return phase * coeffs_[index] / omega_;
}

CVec3 FarField::electric(const Vec3& direction) const {
  check_unit(direction);
  CVec3 out = CVec3::Zero();
  if (coeffs_.size() == 0) return out;
  const VshTable tab(coeffs_.cutoff(), direction);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == cplx(0.0)) continue;
    out += pattern_coefficient(i) * tab(CoefficientVector::mode_at(i));
  }
  return out;
}

CVec3 FarField::magnetic(const Vec3& direction) const { return cross(direction, electric(direction)); }

double FarField::norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) s += std::norm(coeffs_[i]);
  return std::sqrt(s) / omega_;
}

}  // namespace itecloak
