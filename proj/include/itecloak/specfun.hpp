#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace itecloak {

using cplx = std::complex<double>;

/// Raised when a special function is requested outside its domain
/// (e.g. y_l or h_l at the origin, or an order above the supported range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an intermediate value leaves the representable range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

namespace specfun {

inline constexpr int kMaxOrder = 200;
inline constexpr double kMaxAbsArg = 1e4;

/// Spherical Bessel family: J regular, Y singular, H1 outgoing (h1 = j + i y).
enum class BesselKind { J, Y, H1 };

/// Riccati-Bessel family: psi = z j, chi = z y (note the + sign), xi = z h1.
enum class RiccatiKind { Psi, Chi, Xi };

struct BesselEval {
  cplx value;
  cplx derivative;
};

/// Value and derivative of a Riccati-Bessel function.
struct RiccatiEval {
  cplx value;
  cplx derivative;
};

/// Spherical Bessel function of the given kind and its z-derivative.
///
/// j_l uses a continued-fraction seeded downward recurrence (power series
/// for |z| <= 1); y_l and h1_l use upward recurrence from closed forms.
BesselEval sph_bessel(BesselKind kind, int l, cplx z);

RiccatiEval riccati(RiccatiKind kind, int l, cplx z);

// Convenience wrappers for real arguments.
inline double sph_j(int l, double x) { return sph_bessel(BesselKind::J, l, x).value.real(); }
inline double sph_y(int l, double x) { return sph_bessel(BesselKind::Y, l, x).value.real(); }

}  // namespace specfun
}  // namespace itecloak
