#include "itecloak/mie.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace itecloak {

using specfun::RiccatiKind;

std::string to_string(LayerKind kind) { return kind == LayerKind::PEC ? "PEC" : "penetrable"; }

LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "penetrable") return LayerKind::Penetrable;
  if (s == "PEC" || s == "pec") return LayerKind::PEC;
  throw std::invalid_argument("unknown layer kind '" + s + "' (expected penetrable or PEC)");
}

bool RegularityWindow::contains(const Layer& layer) const {
  return layer.eps >= c0 && layer.eps <= 1.0 / c0 && layer.mu >= c0 && layer.mu <= 1.0 / c0 && layer.sigma >= 0.0 &&
         layer.sigma <= lambda0;
}

LayeredMedium::LayeredMedium(std::vector<Layer> layers, RegularityWindow window)
    : layers_(std::move(layers)), window_(window) {
  if (!(window_.c0 > 0.0 && window_.c0 < 1.0) || !(window_.lambda0 > 0.0)) {
    throw std::invalid_argument("regularity window needs 0 < c0 < 1 and lambda0 > 0");
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& L = layers_[i];
    std::ostringstream where;
    where << "layer " << i << ": ";
    if (!(L.outer_radius > prev)) throw std::invalid_argument(where.str() + "radii must be positive and increasing");
    prev = L.outer_radius;
    if (L.kind == LayerKind::PEC) {
      if (i != 0) throw std::invalid_argument(where.str() + "a PEC layer must be innermost");
      continue;
    }
    if (!std::isfinite(L.eps) || !std::isfinite(L.mu) || !std::isfinite(L.sigma) || !(L.eps > 0.0) ||
        !(L.mu > 0.0) || L.sigma < 0.0) {
      throw std::invalid_argument(where.str() + "needs eps > 0, mu > 0, sigma >= 0");
    }
    if (!L.lossy && !window_.contains(L)) {
      std::ostringstream msg;
      msg << where.str() << "(eps, mu, sigma) = (" << L.eps << ", " << L.mu << ", " << L.sigma
          << ") lies outside the regularity window c0 = " << window_.c0 << ", lambda0 = " << window_.lambda0;
      throw std::invalid_argument(msg.str());
    }
  }
}

bool LayeredMedium::has_lossy_layer() const {
  for (const Layer& L : layers_)
    if (L.lossy) return true;
  return false;
}

bool LayeredMedium::contrast_free() const {
  for (const Layer& L : layers_)
    if (!L.vacuum_equivalent()) return false;
  return true;
}

cplx effective_k(const Layer& layer, double omega) {
  if (layer.kind == LayerKind::PEC) throw std::invalid_argument("a PEC layer has no interior wavenumber");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  const cplx k = omega * std::sqrt(cplx(layer.mu) * cplx(layer.eps, layer.sigma / omega));
  return k.imag() < 0.0 ? -k : k;
}

namespace {

using State = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;

struct Segment {
  double r_in;
  double r_out;
  cplx k;
  double mu;
};

// Columns: the psi and chi solutions as (tangential E, tangential H) states.
Mat2 basis_matrix(int l, Polarization pol, cplx k, double mu, double r) {
  const auto p = specfun::riccati(RiccatiKind::Psi, l, k * r);
  const auto c = specfun::riccati(RiccatiKind::Chi, l, k * r);
  Mat2 M;
  if (pol == Polarization::TE) {
    M << p.value / k, c.value / k, p.derivative / mu, c.derivative / mu;
  } else {
    M << p.derivative / k, c.derivative / k, p.value / mu, c.value / mu;
  }
  return M;
}

// Inverse using det = 1/(k mu) (Wronskian psi chi' - psi' chi = 1).
Mat2 basis_inverse(const Mat2& M, cplx k, double mu, Polarization pol) {
  const cplx det = pol == Polarization::TE ? 1.0 / (k * mu) : -1.0 / (k * mu);
  Mat2 inv;
  inv << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
  return inv / det;
}

State normalized(const State& v) {
  const double s = v.cwiseAbs().maxCoeff();
  return s > 0.0 ? State(v / s) : v;
}

struct Structure {
  bool pec_core = false;
  double pec_radius = 0.0;
  double pec_omega = 1.0;  // vacuum wavenumber for a bare PEC sphere
  std::optional<Segment> core;  // penetrable core ball (r_in = 0)
  std::vector<Segment> shells;  // annular layers, innermost first
};

// Merges adjacent identical layers; contrast-free media reduce to nothing.
Structure structure_of(const LayeredMedium& medium, double omega) {
  std::vector<Layer> merged;
  for (const Layer& L : medium.layers()) {
    if (!merged.empty() && L.kind == LayerKind::Penetrable && merged.back().kind == LayerKind::Penetrable &&
        L.eps == merged.back().eps && L.mu == merged.back().mu && L.sigma == merged.back().sigma) {
      merged.back().outer_radius = L.outer_radius;
    } else {
      merged.push_back(L);
    }
  }
  if (medium.contrast_free()) merged.clear();

  Structure s;
  s.pec_omega = omega;
  double r = 0.0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const Layer& L = merged[i];
    if (L.kind == LayerKind::PEC) {
      s.pec_core = true;
      s.pec_radius = L.outer_radius;
    } else {
      const Segment seg{r, L.outer_radius, effective_k(L, omega), L.mu};
      if (i == 0) {
        s.core = seg;
      } else {
        s.shells.push_back(seg);
      }
    }
    r = L.outer_radius;
  }
  return s;
}

// Exterior basis states: regular (psi) and outgoing (xi) vacuum solutions.
std::pair<State, State> exterior_states(int l, Polarization pol, double omega, double R) {
  const auto p = specfun::riccati(RiccatiKind::Psi, l, omega * R);
  const auto x = specfun::riccati(RiccatiKind::Xi, l, omega * R);
  State mj, mh;
  if (pol == Polarization::TE) {
    mj << p.value / omega, p.derivative;
    mh << x.value / omega, x.derivative;
  } else {
    mj << p.derivative / omega, p.value;
    mh << x.derivative / omega, x.value;
  }
  return {mj, mh};
}

cplx wedge(const State& a, const State& b) { return a(0) * b(1) - a(1) * b(0); }

// Starting state at the core boundary and the condition functional
// c(v) = 0 it satisfies there.
State core_state(const Structure& s, int l, Polarization pol) {
  if (s.pec_core) {
    // Tangential E = 0 at the PEC radius.
    const Segment first = s.shells.empty() ? Segment{0.0, s.pec_radius, s.pec_omega, 1.0} : s.shells.front();
    const Mat2 M = basis_matrix(l, pol, first.k, first.mu, s.pec_radius);
    State ab(M(0, 1), -M(0, 0));
    return M * ab;
  }
  const Segment& core = *s.core;
  return basis_matrix(l, pol, core.k, core.mu, core.r_out).col(0);
}

std::optional<cplx> solve_outward(const Structure& s, int l, Polarization pol, double omega, double R,
                                  std::string* failure) {
  State v = normalized(core_state(s, l, pol));
  for (std::size_t i = 0; i < s.shells.size(); ++i) {
    const Segment& seg = s.shells[i];
    const Mat2 Min = basis_matrix(l, pol, seg.k, seg.mu, seg.r_in);
    const Mat2 Mout = basis_matrix(l, pol, seg.k, seg.mu, seg.r_out);
    v = normalized(Mout * (basis_inverse(Min, seg.k, seg.mu, pol) * v));
    if (!v.allFinite()) {
      *failure = "non-finite transfer state in layer " + std::to_string(i);
      return std::nullopt;
    }
  }
  const auto [mj, mh] = exterior_states(l, pol, omega, R);
  const cplx den = wedge(mh, v);
  if (std::abs(den) <= 1e-13 * mh.norm() * v.norm()) {
    *failure = "singular exterior matching";
    return std::nullopt;
  }
  return -wedge(mj, v) / den;
}

std::optional<cplx> solve_inward(const Structure& s, int l, Polarization pol, double omega, double R,
                                 std::string* failure) {
  auto [vj, vh] = exterior_states(l, pol, omega, R);
  for (std::size_t i = s.shells.size(); i-- > 0;) {
    const Segment& seg = s.shells[i];
    const Mat2 Min = basis_matrix(l, pol, seg.k, seg.mu, seg.r_in);
    const Mat2 Mout = basis_matrix(l, pol, seg.k, seg.mu, seg.r_out);
    const Mat2 T = Min * basis_inverse(Mout, seg.k, seg.mu, pol);
    vj = T * vj;
    vh = T * vh;
    const double scale = std::max(vj.cwiseAbs().maxCoeff(), vh.cwiseAbs().maxCoeff());
    vj /= scale;
    vh /= scale;
    if (!vj.allFinite() || !vh.allFinite()) {
      *failure = "non-finite transfer state in layer " + std::to_string(i);
      return std::nullopt;
    }
  }
  // Core condition: the state must be parallel to the core's own state.
  const State c = core_state(s, l, pol);
  const cplx den = wedge(vh, c);
  if (std::abs(den) <= 1e-13 * vh.norm() * c.norm()) {
    *failure = "singular core matching";
    return std::nullopt;
  }
  return -wedge(vj, c) / den;
}

cplx solve_mode(const LayeredMedium& medium, double omega, int l, Polarization pol, SweepDirection direction,
                double* omega_used) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (l < 1) throw std::invalid_argument("multipole order l must be >= 1");
  std::string failure;
  double w = omega;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Structure s = structure_of(medium, w);
    if (!s.pec_core && !s.core) {
      if (omega_used) *omega_used = w;
      return 0.0;
    }
    const double R = !s.shells.empty() ? s.shells.back().r_out : s.pec_core ? s.pec_radius : s.core->r_out;
    const auto S = direction == SweepDirection::Outward ? solve_outward(s, l, pol, w, R, &failure)
                                                        : solve_inward(s, l, pol, w, R, &failure);
    if (S) {
      if (omega_used) *omega_used = w;
      return *S;
    }
    w = omega * (1.0 + 1e-9);
  }
  std::ostringstream msg;
  msg << "singular transfer matrix (" << failure << ") at omega = " << omega << ", l = " << l << ", "
      << to_string(pol) << ", after a 1e-9 relative frequency nudge";
  throw SingularTransferError(msg.str());
}

}  // namespace

cplx mode_scattering_coeff(const LayeredMedium& medium, double omega, int l, Polarization pol,
                           SweepDirection direction) {
  return solve_mode(medium, omega, l, pol, direction, nullptr);
}

std::vector<double> ScatteringSolution::mode_farfield_norms() const {
  std::vector<double> out(S.size(), 0.0);
  for (std::size_t i = 0; i < scattered.size(); ++i) {
    const ModeIndex mode = CoefficientVector::mode_at(i);
    out[std::size_t(2 * (mode.l - 1) + int(mode.pol))] += std::norm(scattered[i]);
  }
  for (double& v : out) v = std::sqrt(v) / omega;
  return out;
}

ScatteringSolution scatter(const LayeredMedium& medium, double omega, const CoefficientVector& incident) {
  if (incident.basis() != Basis::Regular) throw std::invalid_argument("incident coefficients must be regular");
  const int L = incident.cutoff();
  ScatteringSolution sol;
  sol.incident = incident;
  sol.scattered = CoefficientVector(L, Basis::Outgoing);
  sol.S.assign(std::size_t(2 * L), cplx(0.0));
  sol.omega = omega;
  for (int l = 1; l <= L; ++l) {
    for (Polarization pol : {Polarization::TE, Polarization::TM}) {
      bool active = false;
      for (int m = -l; m <= l && !active; ++m) active = incident[CoefficientVector::index({l, m, pol})] != cplx(0.0);
      double used = omega;
      const cplx S = solve_mode(medium, omega, l, pol, SweepDirection::Outward, &used);
      if (active && used != omega) sol.omega = used;
      sol.S[std::size_t(2 * (l - 1) + int(pol))] = S;
      for (int m = -l; m <= l; ++m) {
        const std::size_t i = CoefficientVector::index({l, m, pol});
        sol.scattered[i] = S * incident[i];
      }
    }
  }
  sol.farfield = FarField(sol.scattered, omega);
  return sol;
}

}  // namespace itecloak
