#pragma once

// Interior transmission eigenvalues for a PEC-cored annulus R0 < r < R1 with
// constant index n (mu = 1), coupled to the free field in the ball r < R1.
// The problem separates into independent radial problems per (l, pol).

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "itecloak/vswf.hpp"

namespace itecloak {

enum class ContrastRegime { IndexBelowOne, IndexAboveOne };

/// "n-1<0" or "n-1>0".
std::string to_string(ContrastRegime regime);

struct AnnulusProblem {
  double R0 = 0.5;
  double R1 = 1.0;
  double n = 4.0;

  /// Throws std::invalid_argument unless 0 < R0 < R1 and n > 0. The
  /// contrast-free index n = 1 is rejected unless explicitly allowed (it is
  /// a useful probe with Bessel-zero eigenvalues).
  void validate(bool allow_unit_index = false) const;
  ContrastRegime regime() const;
  double k_shell(double omega) const;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct TransmissionEigenvalue {
  AnnulusProblem problem;
  int l = 1;
  Polarization pol = Polarization::TE;
  double omega = 0.0;
  Bracket bracket;
  double det_residual = 0.0;
  double bc_residual = 0.0;
};

/// Annulus field a j_l(k r) + b y_l(k r), ball field c j_l(omega r), with
/// k = sqrt(n) omega, and max(|a|, |b|, |c|) = 1.
struct RadialEigenfunction {
  int l = 1;
  Polarization pol = Polarization::TE;
  double omega = 0.0;
  double k = 0.0;
  cplx a, b, c;
  /// PEC condition at R0, then the two matching conditions at R1, each
  /// relative to the largest term appearing in any condition.
  std::array<double, 3> residuals{};
  double max_residual() const;

  /// Coefficients of the ball field E_0 = c z_l X (TE) or c N (TM) for the
  /// given azimuthal index, in the multipole basis with cutoff L.
  CoefficientVector ball_coefficients(int m, int L) const;
};

/// Rows: PEC trace at R0, tangential E at R1, tangential curl E at R1.
Eigen::Matrix3d ite_matrix(const AnnulusProblem& problem, int l, Polarization pol, double omega);

/// Determinant of ite_matrix after scaling each row by its largest entry.
double ite_det(const AnnulusProblem& problem, int l, Polarization pol, double omega);

/// Smallest singular value of the row-scaled matrix.
double ite_sigma_min(const AnnulusProblem& problem, int l, Polarization pol, double omega);

struct ScanResult {
  std::vector<Bracket> brackets;
  /// Grid points where the smallest singular value dips below 1e-8 without a
  /// sign change of the determinant. Reported, never refined.
  std::vector<double> suspected_tangencies;
};

ScanResult ite_scan(const AnnulusProblem& problem, int l, Polarization pol, double lo, double hi, double step = 1e-2);

/// Bracketed root to |hi - lo| <= 1e-12 omega. Throws std::invalid_argument
/// when the bracket holds no sign change.
TransmissionEigenvalue ite_refine(const AnnulusProblem& problem, int l, Polarization pol, const Bracket& bracket);

class SpuriousRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel vector of ite_matrix at the eigenvalue. Throws SpuriousRootError if
/// the matrix is numerically of full rank there.
RadialEigenfunction ite_eigenfunction(const TransmissionEigenvalue& ev);

/// Scan, refine and recover eigenfunctions; bc_residual is filled in.
std::vector<TransmissionEigenvalue> find_eigenvalues(const AnnulusProblem& problem, int l, Polarization pol, double lo,
                                                     double hi, double step = 1e-2);

class IntegratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matching determinant from direct adaptive Runge-Kutta integration of the
/// radial equation u'' + (k^2 - l(l+1)/r^2) u = 0, with no special functions.
/// Its sign agrees with ite_det away from roots.
double ode_oracle_det(const AnnulusProblem& problem, int l, Polarization pol, double omega);

}  // namespace itecloak
