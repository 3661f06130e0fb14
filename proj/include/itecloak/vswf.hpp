#pragma once

// Vector spherical harmonics and vector spherical wave functions.
//
// Conventions used by every module in this library:
//   * Y_lm are orthonormal complex harmonics with the Condon-Shortley phase.
//   * TE harmonic X_lm = L Y_lm / sqrt(l(l+1)), TM harmonic x^ x X_lm; both
//     orthonormal over the unit sphere.
//   * M_lm(k, x) = z_l(kr) X_lm(x^),  N_lm = curl(M_lm) / k, where z_l is j_l
//     (regular basis) or h1_l (outgoing basis). Hence curl N_lm = k M_lm.
//   * Time dependence exp(-i omega t); vacuum wavenumber equals omega.
//   * Far field: E^s ~ exp(i omega r)/r * E_inf. An outgoing TE coefficient s
//     contributes (-i)^(l+1) s / omega * X_lm, a TM coefficient contributes
//     (-i)^l s / omega * (x^ x X_lm). These factors are applied in
//     FarField::pattern_coefficient and nowhere else.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "itecloak/quadrature.hpp"
#include "itecloak/specfun.hpp"

namespace itecloak {

using CVec3 = Eigen::Vector3cd;

/// Real-by-complex cross product. (Eigen's cross() conjugates complex
/// results, which is not the bilinear product wanted here.)
inline CVec3 cross(const Vec3& a, const CVec3& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x()};
}

/// Bilinear (unconjugated) dot product.
inline cplx bdot(const CVec3& a, const CVec3& b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

enum class Polarization { TE = 0, TM = 1 };

std::string to_string(Polarization pol);
Polarization polarization_from_string(const std::string& s);

struct ModeIndex {
  int l = 1;
  int m = 0;
  Polarization pol = Polarization::TE;

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

enum class Basis { Regular, Outgoing };

std::string to_string(Basis basis);

/// Multipole coefficients for all modes with 1 <= l <= L, ordered by
/// (l, m, pol) with m ascending and TE before TM.
class CoefficientVector {
 public:
  CoefficientVector() = default;
  CoefficientVector(int L, Basis basis);

  static std::size_t mode_count(int L) { return 2 * std::size_t(L * L + 2 * L); }
  static std::size_t index(const ModeIndex& mode) {
    return 2 * std::size_t(mode.l * mode.l - 1 + mode.m + mode.l) + std::size_t(mode.pol);
  }
  static ModeIndex mode_at(std::size_t index);

  int cutoff() const { return L_; }
  Basis basis() const { return basis_; }
  std::size_t size() const { return entries_.size(); }

  cplx& operator[](std::size_t i) { return entries_[i]; }
  const cplx& operator[](std::size_t i) const { return entries_[i]; }
  cplx& at(const ModeIndex& mode);
  const cplx& at(const ModeIndex& mode) const;

  const std::vector<cplx>& entries() const { return entries_; }

  double norm() const;
  CoefficientVector& operator+=(const CoefficientVector& other);
  CoefficientVector& operator*=(cplx s);

  /// Same expansion with cutoff `L` (zero-padded or truncated).
  CoefficientVector with_cutoff(int L) const;

 private:
  int L_ = 0;
  Basis basis_ = Basis::Regular;
  std::vector<cplx> entries_;
};

CoefficientVector operator+(CoefficientVector a, const CoefficientVector& b);
CoefficientVector operator*(cplx s, CoefficientVector a);

/// Scalar and vector spherical harmonics for every (l, m) up to L at one
/// direction.
class VshTable {
 public:
  VshTable(int L, const Vec3& direction);

  int cutoff() const { return L_; }
  const Vec3& direction() const { return dir_; }
  cplx scalar(int l, int m) const { return Y_[std::size_t(l * l + l + m)]; }
  const CVec3& te(int l, int m) const { return X_[std::size_t(l * l + l + m)]; }
  CVec3 tm(int l, int m) const;
  CVec3 operator()(const ModeIndex& mode) const;

 private:
  int L_;
  Vec3 dir_;
  std::vector<cplx> Y_;
  std::vector<CVec3> X_;
};

/// Orthonormal vector spherical harmonic (TE: X_lm, TM: x^ x X_lm).
/// Throws std::invalid_argument for a non-unit direction or invalid mode.
CVec3 vsh_eval(const ModeIndex& mode, const Vec3& direction);

/// M (TE) or N (TM) multipole field at a point for wavenumber k.
CVec3 wave_eval(const ModeIndex& mode, cplx k, const Vec3& point, Basis basis);
CVec3 regular_wave_eval(const ModeIndex& mode, cplx k, const Vec3& point);

/// Field and curl of a full coefficient expansion at a point.
struct FieldValue {
  CVec3 E;
  CVec3 curlE;
};
FieldValue expansion_eval(const CoefficientVector& coeffs, cplx k, const Vec3& point);

/// Default truncation order ceil(omega R) + 12 for solver coefficient vectors.
int default_cutoff(double omega, double radius);

/// Order that reconstructs a plane wave pointwise to ~1e-8 on |x| <= R for
/// omega R <= 20: ceil(omega R + 5 (omega R)^(1/3)) + 6.
int reconstruction_cutoff(double omega, double radius);

/// Truncated expansion of p exp(i omega d.x); p must be transverse to d.
CoefficientVector plane_wave_coeffs(const Vec3& d, const CVec3& p, double omega, int L);

/// Coefficients of H = curl(E)/(i omega) for a vacuum expansion of E.
CoefficientVector magnetic_coeffs(const CoefficientVector& electric);

/// Field energy of a regular vacuum expansion inside the ball of radius R:
/// squared L2 norm of E, and of curl E.
struct BallNorms {
  double l2_sq = 0.0;
  double curl_l2_sq = 0.0;
  double hcurl() const;
};
BallNorms ball_norms(const CoefficientVector& regular, double omega, double R);

class FarField {
 public:
  FarField() = default;
  FarField(CoefficientVector outgoing, double omega);

  const CoefficientVector& coefficients() const { return coeffs_; }
  double omega() const { return omega_; }

  /// Coefficient of the orthonormal VSH in the expansion of E_inf.
  cplx pattern_coefficient(std::size_t index) const;

  CVec3 electric(const Vec3& direction) const;
  CVec3 magnetic(const Vec3& direction) const;
  /// L2(S^2) norm of E_inf by Parseval. Equals the norm of H_inf.
  double norm() const;

 private:
  CoefficientVector coeffs_;
  double omega_ = 1.0;
};

}  // namespace itecloak
