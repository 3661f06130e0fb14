#pragma once

// Cloaking experiments: device construction, eigen-incident pipelines and
// the epsilon, tau and core-medium sweeps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itecloak/herglotz.hpp"
#include "itecloak/ite.hpp"
#include "itecloak/mie.hpp"

namespace itecloak {

struct CoreMaterial {
  double eps = 2.0;
  double mu = 1.0;
  double sigma = 0.3;
};

struct LossyParameters {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  double tau = 1e-4;
};

enum class DeviceKind { TwoLayer, ThreeLayer, Custom };
enum class IncidentKind { HerglotzFit, ExactMultipole, PlaneWave };

std::string to_string(DeviceKind kind);
std::string to_string(IncidentKind kind);
IncidentKind incident_kind_from_string(const std::string& s);

struct IncidentSpec {
  IncidentKind kind = IncidentKind::ExactMultipole;
  // Eigenfunction selection (shell annulus problem).
  int l = 1;
  Polarization pol = Polarization::TE;
  int m = 0;
  int eigen_index = 0;
  double wmin = 0.5;
  double wmax = 15.0;
  double step = 1e-2;
  // Herglotz fit.
  int degree = 8;
  double lambda = 0.0;
  FitOptions fit;
  // Plane wave.
  Vec3 direction = Vec3::UnitZ();
  CVec3 polarization = CVec3(1.0, 0.0, 0.0);
  /// Overall amplitude applied to any incident.
  double amplitude = 1.0;
};

struct Scenario {
  std::string name;
  DeviceKind device = DeviceKind::TwoLayer;
  LayeredMedium medium;
  /// Annulus whose eigenvalues drive eigen-incidents (shell over a PEC core).
  AnnulusProblem shell;
  double R_sigma = 0.0;
  LossyParameters lossy;
  CoreMaterial core;
  IncidentSpec incident;
  /// Frequency; <= 0 selects the shell eigenvalue named by the incident spec.
  double omega = 0.0;
  /// Multipole cutoff; <= 0 selects ceil(omega R1) + 12.
  int L = 0;
  std::vector<std::string> flags;

  ContrastRegime regime() const { return shell.regime(); }
  bool flagged(const std::string& flag) const;
};

/// PEC core of radius R0, shell (eps = n, mu = 1, sigma = 0) out to R1.
Scenario build_two_layer(double R0, double R1, double n);

/// Core ball RSigma, lossy layer (alpha1/tau, alpha2 tau, alpha3/tau) out to R0,
/// shell (eps = n) out to R1. tau >= 0.1 is flagged "not asymptotic".
Scenario build_three_layer(double R_sigma, double R0, double R1, double n, const LossyParameters& lossy,
                           const CoreMaterial& core, RegularityWindow window = {});

/// Same device with a different tau or core.
Scenario with_tau(const Scenario& three_layer, double tau);
Scenario with_core(const Scenario& three_layer, const CoreMaterial& core);

/// Reference configuration: RSigma = 0.3, R0 = 0.5, R1 = 1, n = 4, alpha = 1.
Scenario reference_two_layer();
Scenario reference_three_layer(double tau = 1e-4, const CoreMaterial& core = {});

struct IncidentField {
  CoefficientVector coeffs;
  double omega = 0.0;
  int L = 0;
  /// H(curl) norm of the incident field on the ball of radius R1.
  double hcurl_norm = 0.0;
  /// H(curl) distance to the eigen-incident E_0 (0 for exact multipoles,
  /// -1 when no eigenfunction is involved), and the same over the norm of E_0.
  double epsilon = -1.0;
  double relative_epsilon = -1.0;
  std::optional<TransmissionEigenvalue> eigenvalue;
  std::optional<RadialEigenfunction> eigenfunction;
  std::optional<FitReport> fit;
};

/// Shell eigenvalue selected by the incident spec; throws std::runtime_error
/// when the window holds too few eigenvalues.
TransmissionEigenvalue select_eigenvalue(const Scenario& scenario);

IncidentField resolve_incident(const Scenario& scenario);

struct ModeContribution {
  int l = 1;
  Polarization pol = Polarization::TE;
  cplx S;
  double farfield_norm = 0.0;
};

struct InvisibilityResult {
  double omega = 0.0;
  double farfield_norm = 0.0;
  double magnetic_farfield_norm = 0.0;
  double incident_norm = 0.0;
  double relative_farfield = 0.0;
  double epsilon = -1.0;
  double relative_epsilon = -1.0;
  std::vector<ModeContribution> modes;
  ScatteringSolution solution;
};

InvisibilityResult invisibility_farfield(const Scenario& scenario);
InvisibilityResult invisibility_farfield(const Scenario& scenario, const IncidentField& incident);

struct SlopeFit {
  bool defined = false;
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the log10-log10 fit.
  double residual = 0.0;
  int points = 0;
  double decades = 0.0;
};

/// Least-squares line through (log10 x, log10 y); defined only with >= 4
/// points spanning >= 2 decades in x.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRecord {
  double parameter = 0.0;
  std::string label;
  double farfield_norm = 0.0;
  double relative_farfield = 0.0;
  double epsilon = 0.0;
  double omega = 0.0;
  /// Excluded from the slope fit (numerical floor).
  bool at_floor = false;
  std::vector<ModeContribution> modes;
};

struct SweepResult {
  std::string parameter_name;
  std::vector<SweepRecord> records;
  SlopeFit slope;
  /// Relative far-field values never increase as the parameter decreases,
  /// over the records above the floor.
  bool monotone_nonincreasing = true;
};

enum class EpsilonDegrade { Noise, Quadrature, Lambda };
std::string to_string(EpsilonDegrade mode);
EpsilonDegrade epsilon_degrade_from_string(const std::string& s);

struct EpsilonSweepOptions {
  EpsilonDegrade degrade = EpsilonDegrade::Noise;
  std::uint32_t seed = 20240601;
  /// Quadrature degrees tried by the quadrature ladder.
  int min_degree = 1;
  int max_degree = 8;
  /// Regularization ladder of the lambda mode.
  std::vector<double> lambdas{1e-10, 1e-8, 1e-6, 1e-4, 1e-2};
  /// Records with epsilon below floor_factor times the clean-fit epsilon
  /// are marked as floor.
  double floor_factor = 10.0;
};

/// Each target is a relative epsilon (distance to E_0 over its H(curl) norm).
/// The noise mode hits each target by mixing a seeded noise fit into the
/// clean fit; the quadrature and lambda modes ignore the targets and report
/// one record per rung of their ladder.
SweepResult epsilon_sweep(const Scenario& two_layer, const std::vector<double>& relative_targets,
                          const EpsilonSweepOptions& options = {});

struct SweepOptions {
  /// Relative far-field values below this are treated as the numerical floor.
  double floor = 1e-13;
  int threads = 1;
};

SweepResult tau_sweep(const Scenario& three_layer, const std::vector<double>& taus, const SweepOptions& options = {});

struct CoreSweepResult {
  SweepResult at_fixed_tau;
  double spread = 0.0;  // max / min far-field norm
  std::vector<SweepResult> tau_sweeps;
};

CoreSweepResult core_sweep(const Scenario& three_layer, const std::vector<CoreMaterial>& cores,
                           const std::vector<double>& taus, const SweepOptions& options = {});

}  // namespace itecloak
