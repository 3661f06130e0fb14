#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "itecloak/specfun.hpp"
#include "oracles.hpp"

using namespace itecloak;
using specfun::BesselKind;
using specfun::RiccatiKind;

namespace {

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const double kGrid[] = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 60.0};

}  // namespace

TEST_CASE("closed forms at low order") {
  CHECK(specfun::sph_bessel(BesselKind::J, 0, 1.0).value.real() == doctest::Approx(0.8414709848).epsilon(1e-10));
  CHECK(specfun::sph_bessel(BesselKind::Y, 0, 1.0).value.real() == doctest::Approx(-0.5403023059).epsilon(1e-10));
  const double lead = std::pow(0.1, 5) / 10395.0;
  CHECK(specfun::sph_j(5, 0.1) == doctest::Approx(lead).epsilon(1e-3));
}

TEST_CASE("complex argument agrees with the power-series oracle") {
  const cplx z(3.0, 4.0);
  CHECK(rel_err(specfun::sph_bessel(BesselKind::J, 2, z).value, oracle::sph_j_series(2, z)) < 1e-9);

  for (int l = 0; l <= 10; ++l) {
    for (double re : {-4.0, -1.5, 0.3, 1.2, 2.9, 4.5}) {
      for (double im : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
        const cplx w(re, im);
        if (std::abs(w) > 5.0) continue;
        CHECK(rel_err(specfun::sph_bessel(BesselKind::J, l, w).value, oracle::sph_j_series(l, w)) < 1e-9);
      }
    }
  }
}

TEST_CASE("Wronskian j y' - j' y = 1/x^2") {
  for (int l = 0; l <= 40; ++l) {
    for (double x : kGrid) {
      const auto j = specfun::sph_bessel(BesselKind::J, l, x);
      const auto y = specfun::sph_bessel(BesselKind::Y, l, x);
      const cplx w = j.value * y.derivative - j.derivative * y.value;
      INFO("l=" << l << " x=" << x);
      CHECK(rel_err(w, 1.0 / (x * x)) < 1e-10);
    }
  }
}

TEST_CASE("three-term recurrence holds for J and Y") {
  for (BesselKind kind : {BesselKind::J, BesselKind::Y}) {
    for (int l = 1; l < 40; ++l) {
      for (double x : kGrid) {
        const cplx lo = specfun::sph_bessel(kind, l - 1, x).value;
        const cplx mid = specfun::sph_bessel(kind, l, x).value;
        const cplx hi = specfun::sph_bessel(kind, l + 1, x).value;
        const cplx rhs = double(2 * l + 1) / x * mid;
        const double scale = std::max({std::abs(lo), std::abs(hi), std::abs(rhs)});
        INFO("l=" << l << " x=" << x);
        CHECK(std::abs(lo + hi - rhs) <= 1e-9 * scale);
      }
    }
  }
}

TEST_CASE("h1 = j + i y on the real grid") {
  const cplx I(0.0, 1.0);
  for (int l = 0; l <= 40; ++l) {
    for (double x : kGrid) {
      const auto h = specfun::sph_bessel(BesselKind::H1, l, x);
      const auto j = specfun::sph_bessel(BesselKind::J, l, x);
      const auto y = specfun::sph_bessel(BesselKind::Y, l, x);
      CHECK(rel_err(h.value, j.value + I * y.value) < 1e-12);
      CHECK(rel_err(h.derivative, j.derivative + I * y.derivative) < 1e-11);
    }
  }
}

TEST_CASE("conjugate symmetry of j") {
  for (int l = 0; l <= 12; ++l) {
    for (cplx z : {cplx(0.4, 0.3), cplx(2.0, -1.0), cplx(7.5, 0.8), cplx(25.0, 2.0)}) {
      const cplx a = specfun::sph_bessel(BesselKind::J, l, std::conj(z)).value;
      const cplx b = std::conj(specfun::sph_bessel(BesselKind::J, l, z).value);
      CHECK(rel_err(a, b) < 1e-13);
    }
  }
}

TEST_CASE("derivative matches central differences") {
  for (BesselKind kind : {BesselKind::J, BesselKind::Y, BesselKind::H1}) {
    for (int l : {0, 1, 3, 8}) {
      for (cplx z : {cplx(0.7, 0.0), cplx(3.3, 0.4), cplx(12.0, -0.2)}) {
        const double h = 1e-5;
        const cplx fd = (specfun::sph_bessel(kind, l, z + h).value - specfun::sph_bessel(kind, l, z - h).value) / (2 * h);
        const cplx d = specfun::sph_bessel(kind, l, z).derivative;
        CHECK(std::abs(fd - d) <= 1e-7 * std::max(1.0, std::abs(d)));
      }
    }
  }
}

TEST_CASE("small-argument and origin behavior of j") {
  CHECK(specfun::sph_bessel(BesselKind::J, 0, 0.0).value == cplx(1.0));
  CHECK(specfun::sph_bessel(BesselKind::J, 3, 0.0).value == cplx(0.0));
  CHECK(specfun::sph_bessel(BesselKind::J, 1, 0.0).derivative == cplx(1.0 / 3.0));
  // Deep underflow stays finite.
  const auto tiny = specfun::sph_bessel(BesselKind::J, 200, 0.05);
  CHECK(std::isfinite(tiny.value.real()));
  // Large order past the argument is handled by the downward recurrence.
  CHECK(rel_err(specfun::sph_bessel(BesselKind::J, 30, cplx(4.0, 0.5)).value, oracle::sph_j_series(30, cplx(4.0, 0.5))) <
        1e-10);
}

TEST_CASE("domain and overflow errors") {
  CHECK_THROWS_AS(specfun::sph_bessel(BesselKind::Y, 0, 0.0), DomainError);
  CHECK_THROWS_AS(specfun::sph_bessel(BesselKind::H1, 2, 0.0), DomainError);
  CHECK_THROWS_AS(specfun::sph_bessel(BesselKind::J, 201, 1.0), DomainError);
  CHECK_THROWS_AS(specfun::sph_bessel(BesselKind::J, -1, 1.0), DomainError);
  CHECK_THROWS_AS(specfun::sph_bessel(BesselKind::J, 2, 2e4), DomainError);
  CHECK_THROWS_AS(specfun::sph_bessel(BesselKind::Y, 200, 0.1), OverflowError);
  CHECK_THROWS_AS(specfun::sph_bessel(BesselKind::J, 1, cplx(1.0, 900.0)), OverflowError);
}

TEST_CASE("Riccati-Bessel functions") {
  CHECK(std::abs(specfun::riccati(RiccatiKind::Psi, 0, std::numbers::pi).value) < 1e-15);

  const auto j1 = specfun::sph_bessel(BesselKind::J, 1, 1.0);
  const auto psi1 = specfun::riccati(RiccatiKind::Psi, 1, 1.0);
  CHECK(rel_err(psi1.derivative, j1.value + 1.0 * j1.derivative) < 1e-15);

  const auto chi1 = specfun::riccati(RiccatiKind::Chi, 1, 2.0);
  CHECK(rel_err(chi1.value, 2.0 * specfun::sph_y(1, 2.0)) < 1e-15);

  // psi chi' - psi' chi = 1 with the +z y sign convention.
  for (int l : {1, 4, 9}) {
    for (double x : {0.6, 3.0, 17.0}) {
      const auto p = specfun::riccati(RiccatiKind::Psi, l, x);
      const auto c = specfun::riccati(RiccatiKind::Chi, l, x);
      CHECK(rel_err(p.value * c.derivative - p.derivative * c.value, 1.0) < 1e-11);
    }
  }
  const auto xi = specfun::riccati(RiccatiKind::Xi, 2, 1.5);
  const cplx psi_i_chi = specfun::riccati(RiccatiKind::Psi, 2, 1.5).value +
                         cplx(0.0, 1.0) * specfun::riccati(RiccatiKind::Chi, 2, 1.5).value;
  CHECK(rel_err(xi.value, psi_i_chi) < 1e-13);
}
