#pragma once

#include <memory>
#include <string>
#include <vector>

#include "itecloak/quadrature.hpp"
#include "itecloak/vswf.hpp"

namespace itecloak {

/// Orthonormal tangent pair (e1, e2) at a unit direction, with e1 x e2 = d.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& d);

/// Node-collocated kernel: E^g(x) = sum_i w_i exp(i omega x.d_i) g_i.
struct HerglotzKernel {
  SphereQuadrature quadrature;
  std::vector<CVec3> g;

  HerglotzKernel() = default;
  explicit HerglotzKernel(SphereQuadrature q);
  HerglotzKernel(SphereQuadrature q, std::vector<CVec3> values);

  std::size_t size() const { return g.size(); }
  /// Throws std::invalid_argument unless every g_i is tangential to 1e-12.
  void validate() const;
  /// Discrete L2(S^2) norm (sum_i w_i |g_i|^2)^(1/2).
  double l2_norm() const;
};

/// Kernel sampling a vector spherical harmonic; with `analytic_scale` the
/// values are divided by 4 pi i^l (TE) or 4 pi i^(l-1) (TM), so that the
/// exact Herglotz integral equals the regular multipole M_lm or N_lm.
HerglotzKernel vsh_kernel(const SphereQuadrature& q, const ModeIndex& mode, bool analytic_scale);

/// Multipole coefficients of the (discrete) Herglotz field, cutoff L.
CoefficientVector herglotz_coeffs(const HerglotzKernel& kernel, double omega, int L);

struct FieldSamples {
  std::vector<CVec3> E;
  std::vector<CVec3> H;
};

/// E^g and H^g = curl(E^g)/(i omega), both in closed form.
FieldSamples herglotz_field(const HerglotzKernel& kernel, double omega, const std::vector<Vec3>& points);

/// A field and its curl sampled on a volume rule.
struct CurlSamples {
  std::vector<CVec3> E;
  std::vector<CVec3> curlE;
};

CurlSamples sample_expansion(const CoefficientVector& regular, double omega, const VolumeQuadrature& vq);
CurlSamples sample_herglotz(const HerglotzKernel& kernel, double omega, const VolumeQuadrature& vq);

/// Discrete curl-graph (H(curl)) norm of a - b. Throws on size mismatch.
double hcurl_error(const CurlSamples& a, const CurlSamples& b, const VolumeQuadrature& vq);

struct FitOptions {
  /// Radial Gauss-Legendre points of the volume rule.
  int radial_points = 24;
  /// Angular degree of the volume rule; < 0 selects 2 L_v + 4 with
  /// L_v = ceil(omega R) + 8.
  int angular_degree = -1;
};

struct FitReport {
  HerglotzKernel kernel;
  /// Achieved discrete H(curl, ball) error of E^g - E_target.
  double epsilon = 0.0;
  /// The same error from exact radial integrals of the multipole
  /// difference (only for coefficient targets; -1 otherwise).
  double epsilon_exact = -1.0;
  /// Target H(curl) norm on the ball.
  double target_norm = 0.0;
  /// Regularization used, relative to the mean diagonal of the normal matrix.
  double lambda = 0.0;
  bool lambda_escalated = false;
  /// Unregularized misfit and kernel norm at the solution.
  double data_misfit = 0.0;
  double kernel_norm = 0.0;
  int rank = 0;
  double condition_estimate = 0.0;
  int quadrature_degree = 0;
  int radial_points = 0;
  int angular_degree = 0;
  double radius = 0.0;
  double omega = 0.0;
  std::string target_description;

  double relative_epsilon() const { return target_norm > 0.0 ? epsilon / target_norm : epsilon; }
};

/// Tikhonov-regularized least squares on the ball of radius R:
/// min ||E^g - E_t||^2 + ||curl(E^g - E_t)||^2 + lambda ||g||^2 over
/// tangential node values. lambda = 0 uses a rank-revealing solve; if that
/// fails, lambda escalates through 1e-12, 1e-10, ... and the value used is
/// reported.
FitReport fit_kernel(const CoefficientVector& target, double omega, double R, const SphereQuadrature& quadrature,
                     double lambda = 0.0, const FitOptions& options = {});

FitReport fit_kernel(const CurlSamples& target, const VolumeQuadrature& vq, double omega,
                     const SphereQuadrature& quadrature, double lambda = 0.0);

/// Factorizes the fit system once so several targets on the same volume rule
/// can be fitted; the map from target samples to kernel is linear.
class HerglotzFitter {
 public:
  HerglotzFitter(VolumeQuadrature vq, double omega, SphereQuadrature quadrature, double lambda = 0.0);
  ~HerglotzFitter();
  HerglotzFitter(HerglotzFitter&&) noexcept;
  HerglotzFitter& operator=(HerglotzFitter&&) noexcept;

  FitReport fit(const CurlSamples& target) const;
  const VolumeQuadrature& volume() const { return vq_; }
  const SphereQuadrature& quadrature() const { return quadrature_; }
  double lambda() const;

 private:
  struct Impl;
  VolumeQuadrature vq_;
  SphereQuadrature quadrature_;
  double omega_;
  std::unique_ptr<Impl> impl_;
};

/// Default volume rule for a fit on the ball of radius R.
VolumeQuadrature fit_volume_rule(double omega, double R, const FitOptions& options = {});

/// Exact H(curl, ball) norm of E^g - target from multipole coefficients.
double herglotz_exact_error(const HerglotzKernel& kernel, const CoefficientVector& target, double omega, double R);

}  // namespace itecloak
