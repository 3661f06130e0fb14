#include "itecloak/ite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

namespace itecloak {

using specfun::RiccatiKind;

std::string to_string(ContrastRegime regime) {
  return regime == ContrastRegime::IndexBelowOne ? "n-1<0" : "n-1>0";
}

void AnnulusProblem::validate(bool allow_unit_index) const {
  if (!(R0 > 0.0) || !(R1 > R0)) throw std::invalid_argument("annulus radii must satisfy 0 < R0 < R1");
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("refractive index n must be positive");
  if (n == 1.0 && !allow_unit_index) throw std::invalid_argument("refractive index n = 1 has no contrast");
}

ContrastRegime AnnulusProblem::regime() const {
  return n < 1.0 ? ContrastRegime::IndexBelowOne : ContrastRegime::IndexAboveOne;
}

double AnnulusProblem::k_shell(double omega) const { return std::sqrt(n) * omega; }

Eigen::Matrix3d ite_matrix(const AnnulusProblem& problem, int l, Polarization pol, double omega) {
  problem.validate(true);
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (l < 1) throw std::invalid_argument("multipole order l must be >= 1");
  const double k = problem.k_shell(omega);
  const double R0 = problem.R0, R1 = problem.R1;
  auto re = [](cplx z) { return z.real(); };
  const auto psi0 = specfun::riccati(RiccatiKind::Psi, l, k * R0);
  const auto chi0 = specfun::riccati(RiccatiKind::Chi, l, k * R0);
  const auto psi1 = specfun::riccati(RiccatiKind::Psi, l, k * R1);
  const auto chi1 = specfun::riccati(RiccatiKind::Chi, l, k * R1);
  const auto psiw = specfun::riccati(RiccatiKind::Psi, l, omega * R1);

  Eigen::Matrix3d A;
  if (pol == Polarization::TE) {
    // j = psi / x, y = chi / x.
    A << re(psi0.value) / (k * R0), re(chi0.value) / (k * R0), 0.0,  //
        re(psi1.value) / (k * R1), re(chi1.value) / (k * R1), -re(psiw.value) / (omega * R1),  //
        re(psi1.derivative), re(chi1.derivative), -re(psiw.derivative);
  } else {
    A << re(psi0.derivative), re(chi0.derivative), 0.0,  //
        re(psi1.derivative) / k, re(chi1.derivative) / k, -re(psiw.derivative) / omega,  //
        re(psi1.value) / R1, re(chi1.value) / R1, -re(psiw.value) / R1;
  }
  return A;
}

namespace {

Eigen::Matrix3d row_scaled(const Eigen::Matrix3d& A) {
  Eigen::Matrix3d S = A;
  for (int i = 0; i < 3; ++i) {
    const double s = A.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) S.row(i) /= s;
  }
  return S;
}

}  // namespace

double ite_det(const AnnulusProblem& problem, int l, Polarization pol, double omega) {
  return row_scaled(ite_matrix(problem, l, pol, omega)).determinant();
}

double ite_sigma_min(const AnnulusProblem& problem, int l, Polarization pol, double omega) {
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(row_scaled(ite_matrix(problem, l, pol, omega)));
  return svd.singularValues()(2);
}

ScanResult ite_scan(const AnnulusProblem& problem, int l, Polarization pol, double lo, double hi, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("scan step must be positive");
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("scan range must satisfy 0 < lo < hi");
  problem.validate(true);

  const auto count = std::int64_t(std::ceil((hi - lo) / step));
  std::vector<double> grid;
  grid.reserve(std::size_t(count + 1));
  for (std::int64_t i = 0; i <= count; ++i) grid.push_back(std::min(hi, lo + double(i) * step));

  std::vector<double> det(grid.size()), smin(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::Matrix3d S = row_scaled(ite_matrix(problem, l, pol, grid[i]));
    det[i] = S.determinant();
    smin[i] = Eigen::JacobiSVD<Eigen::Matrix3d>(S).singularValues()(2);
  }

  ScanResult out;
  std::vector<bool> near_bracket(grid.size(), false);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (det[i] == 0.0 || (det[i] < 0.0) != (det[i + 1] < 0.0)) {
      if (det[i + 1] == 0.0 && i + 2 < grid.size()) continue;  // counted by the next interval
      out.brackets.push_back({grid[i], grid[i + 1]});
      near_bracket[i] = near_bracket[i + 1] = true;
    }
  }
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (smin[i] < 1e-8 && smin[i] <= smin[i - 1] && smin[i] <= smin[i + 1] && !near_bracket[i]) {
      out.suspected_tangencies.push_back(grid[i]);
    }
  }
  return out;
}

TransmissionEigenvalue ite_refine(const AnnulusProblem& problem, int l, Polarization pol, const Bracket& bracket) {
  auto f = [&](double w) { return ite_det(problem, l, pol, w); };
  const double flo = f(bracket.lo), fhi = f(bracket.hi);
  TransmissionEigenvalue ev{problem, l, pol, 0.0, bracket, 0.0, 0.0};
  if (flo == 0.0 || fhi == 0.0) {
    ev.omega = flo == 0.0 ? bracket.lo : bracket.hi;
    return ev;
  }
  if ((flo < 0.0) == (fhi < 0.0)) {
    std::ostringstream msg;
    msg << "no sign change of the determinant on [" << bracket.lo << ", " << bracket.hi << "]";
    throw std::invalid_argument(msg.str());
  }
  std::uintmax_t max_iter = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::min(std::abs(a), std::abs(b)); };
  const auto [a, b] = boost::math::tools::toms748_solve(f, bracket.lo, bracket.hi, flo, fhi, tol, max_iter);
  const double fa = std::abs(f(a)), fb = std::abs(f(b));
  ev.omega = fa <= fb ? a : b;
  ev.det_residual = std::min(fa, fb);
  ev.bracket = {a, b};
  return ev;
}

double RadialEigenfunction::max_residual() const { return *std::max_element(residuals.begin(), residuals.end()); }

CoefficientVector RadialEigenfunction::ball_coefficients(int m, int L) const {
  if (std::abs(m) > l) throw std::invalid_argument("azimuthal index out of range for the eigenfunction order");
  if (L < l) throw std::invalid_argument("cutoff below the eigenfunction order");
  CoefficientVector out(L, Basis::Regular);
  out.at({l, m, pol}) = c;
  return out;
}

RadialEigenfunction ite_eigenfunction(const TransmissionEigenvalue& ev) {
  const Eigen::Matrix3d A = ite_matrix(ev.problem, ev.l, ev.pol, ev.omega);
  const Eigen::Matrix3d S = row_scaled(A);
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(S, Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (sv(2) > 1e-6 * sv(0)) {
    std::ostringstream msg;
    msg << "matrix is numerically full rank at omega = " << ev.omega << " (l = " << ev.l << ", " << to_string(ev.pol)
        << ", sigma_min/sigma_max = " << sv(2) / sv(0) << "); spurious root";
    throw SpuriousRootError(msg.str());
  }
  Eigen::Vector3d v = svd.matrixV().col(2);
  const Eigen::Index imax = [&] {
    Eigen::Index i;
    v.cwiseAbs().maxCoeff(&i);
    return i;
  }();
  v /= v(imax);

  RadialEigenfunction ef;
  ef.l = ev.l;
  ef.pol = ev.pol;
  ef.omega = ev.omega;
  ef.k = ev.problem.k_shell(ev.omega);
  ef.a = v(0);
  ef.b = v(1);
  ef.c = v(2);
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(A(i, j) * v(j)));
  const Eigen::Vector3d r = A * v;
  for (int i = 0; i < 3; ++i) ef.residuals[std::size_t(i)] = std::abs(r(i)) / scale;
  return ef;
}

std::vector<TransmissionEigenvalue> find_eigenvalues(const AnnulusProblem& problem, int l, Polarization pol, double lo,
                                                     double hi, double step) {
  std::vector<TransmissionEigenvalue> out;
  for (const Bracket& br : ite_scan(problem, l, pol, lo, hi, step).brackets) {
    TransmissionEigenvalue ev = ite_refine(problem, l, pol, br);
    ev.bc_residual = ite_eigenfunction(ev).max_residual();
    out.push_back(ev);
  }
  return out;
}

}  // namespace itecloak
