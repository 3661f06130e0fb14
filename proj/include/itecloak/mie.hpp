#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "itecloak/vswf.hpp"

namespace itecloak {

enum class LayerKind { Penetrable, PEC };

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& s);

struct Layer {
  double outer_radius = 1.0;
  double eps = 1.0;
  double mu = 1.0;
  double sigma = 0.0;
  LayerKind kind = LayerKind::Penetrable;
  /// Exempt from the regularity window (its parameters scale with tau).
  bool lossy = false;

  static Layer pec(double radius) { return {radius, 1.0, 1.0, 0.0, LayerKind::PEC, false}; }
  bool vacuum_equivalent() const {
    return kind == LayerKind::Penetrable && eps == 1.0 && mu == 1.0 && sigma == 0.0;
  }
};

/// c0 <= eps, mu <= 1/c0 and 0 <= sigma <= lambda0 for regular layers.
struct RegularityWindow {
  double c0 = 0.1;
  double lambda0 = 10.0;
  bool contains(const Layer& layer) const;
};

/// Concentric layers, innermost first, in a vacuum background.
class LayeredMedium {
 public:
  LayeredMedium() = default;
  explicit LayeredMedium(std::vector<Layer> layers, RegularityWindow window = {});

  const std::vector<Layer>& layers() const { return layers_; }
  const RegularityWindow& window() const { return window_; }
  double outer_radius() const { return layers_.empty() ? 0.0 : layers_.back().outer_radius; }
  bool has_pec_core() const { return !layers_.empty() && layers_.front().kind == LayerKind::PEC; }
  bool has_lossy_layer() const;
  /// True when every layer is vacuum-equivalent (no PEC, no contrast).
  bool contrast_free() const;

 private:
  std::vector<Layer> layers_;
  RegularityWindow window_;
};

/// k = omega sqrt(mu (eps + i sigma / omega)) with Im k >= 0.
cplx effective_k(const Layer& layer, double omega);

class SingularTransferError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepDirection { Outward, Inward };

/// Per-mode scattering multiplier: scattered outgoing coefficient equals
/// S(l, pol) times the incident regular coefficient, for every m.
cplx mode_scattering_coeff(const LayeredMedium& medium, double omega, int l, Polarization pol,
                           SweepDirection direction = SweepDirection::Outward);

struct ScatteringSolution {
  CoefficientVector incident;
  CoefficientVector scattered;
  /// S(l, pol) at index 2 (l - 1) + pol.
  std::vector<cplx> S;
  FarField farfield;
  /// Frequency actually used (differs from the request only after a
  /// singular-transfer nudge).
  double omega = 0.0;

  cplx multiplier(int l, Polarization pol) const { return S[std::size_t(2 * (l - 1) + int(pol))]; }
  /// Far-field norm carried by each (l, pol), same indexing as S.
  std::vector<double> mode_farfield_norms() const;
};

ScatteringSolution scatter(const LayeredMedium& medium, double omega, const CoefficientVector& incident);

}  // namespace itecloak
