#include "itecloak/herglotz.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace itecloak {
namespace {

constexpr cplx I(0.0, 1.0);

cplx ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

std::pair<Vec3, Vec3> tangent_basis(const Vec3& d) {
  // Least-aligned coordinate axis keeps the construction well conditioned.
  Vec3 a = Vec3::UnitX();
  if (std::abs(d.y()) < std::abs(d.x()) && std::abs(d.y()) <= std::abs(d.z())) {
    a = Vec3::UnitY();
  } else if (std::abs(d.z()) < std::abs(d.x()) && std::abs(d.z()) < std::abs(d.y())) {
    a = Vec3::UnitZ();
  }
  const Vec3 e1 = a.cross(d).normalized();
  const Vec3 e2 = d.cross(e1);
  return {e1, e2};
}

HerglotzKernel::HerglotzKernel(SphereQuadrature q) : quadrature(std::move(q)), g(quadrature.size(), CVec3::Zero()) {}

HerglotzKernel::HerglotzKernel(SphereQuadrature q, std::vector<CVec3> values)
    : quadrature(std::move(q)), g(std::move(values)) {
  if (g.size() != quadrature.size()) throw std::invalid_argument("kernel needs one value per quadrature node");
  validate();
}

void HerglotzKernel::validate() const {
  if (g.size() != quadrature.size()) throw std::invalid_argument("kernel needs one value per quadrature node");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(bdot(quadrature.nodes[i].cast<cplx>(), g[i])) > 1e-12 * std::max(1.0, g[i].norm())) {
      std::ostringstream msg;
      msg << "kernel value at node " << i << " is not tangential";
      throw std::invalid_argument(msg.str());
    }
  }
}

double HerglotzKernel::l2_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += quadrature.weights[i] * g[i].squaredNorm();
  return std::sqrt(s);
}

HerglotzKernel vsh_kernel(const SphereQuadrature& q, const ModeIndex& mode, bool analytic_scale) {
  HerglotzKernel k(q);
  cplx scale = 1.0;
  if (analytic_scale) {
    scale = 1.0 / (4.0 * std::numbers::pi * ipow(mode.pol == Polarization::TE ? mode.l : mode.l - 1));
  }
  for (std::size_t i = 0; i < q.size(); ++i) k.g[i] = scale * vsh_eval(mode, q.nodes[i]);
  return k;
}

CoefficientVector herglotz_coeffs(const HerglotzKernel& kernel, double omega, int L) {
  kernel.validate();
  CoefficientVector out(L, Basis::Regular);
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    if (kernel.g[i] == CVec3::Zero()) continue;
    out += kernel.quadrature.weights[i] * plane_wave_coeffs(kernel.quadrature.nodes[i], kernel.g[i], omega, L);
  }
  return out;
}

FieldSamples herglotz_field(const HerglotzKernel& kernel, double omega, const std::vector<Vec3>& points) {
  kernel.validate();
  FieldSamples out;
  out.E.assign(points.size(), CVec3::Zero());
  out.H.assign(points.size(), CVec3::Zero());
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const Vec3& d = kernel.quadrature.nodes[i];
    const CVec3 wg = kernel.quadrature.weights[i] * kernel.g[i];
    // curl(e^{i omega x.d} g) = i omega d x g e^{...}, so H term = d x g e^{...}.
    const CVec3 wh = cross(d, wg);
    for (std::size_t p = 0; p < points.size(); ++p) {
      const cplx e = std::exp(I * omega * d.dot(points[p]));
      out.E[p] += e * wg;
      out.H[p] += e * wh;
    }
  }
  return out;
}

CurlSamples sample_expansion(const CoefficientVector& regular, double omega, const VolumeQuadrature& vq) {
  CurlSamples s;
  s.E.reserve(vq.size());
  s.curlE.reserve(vq.size());
  for (const Vec3& x : vq.points) {
    const FieldValue f = expansion_eval(regular, omega, x);
    s.E.push_back(f.E);
    s.curlE.push_back(f.curlE);
  }
  return s;
}

CurlSamples sample_herglotz(const HerglotzKernel& kernel, double omega, const VolumeQuadrature& vq) {
  FieldSamples f = herglotz_field(kernel, omega, vq.points);
  CurlSamples s{std::move(f.E), std::move(f.H)};
  for (CVec3& c : s.curlE) c *= I * omega;
  return s;
}

double hcurl_error(const CurlSamples& a, const CurlSamples& b, const VolumeQuadrature& vq) {
  if (a.E.size() != vq.size() || b.E.size() != vq.size() || a.curlE.size() != vq.size() ||
      b.curlE.size() != vq.size()) {
    throw std::invalid_argument("sample grids do not match the volume quadrature");
  }
  double s = 0.0;
  for (std::size_t q = 0; q < vq.size(); ++q) {
    s += vq.weights[q] * ((a.E[q] - b.E[q]).squaredNorm() + (a.curlE[q] - b.curlE[q]).squaredNorm());
  }
  return std::sqrt(s);
}

namespace {

Eigen::MatrixXcd assemble_matrix(const VolumeQuadrature& vq, double omega, const SphereQuadrature& quadrature,
                                 std::vector<std::pair<Vec3, Vec3>>& frames) {
  const Eigen::Index m = Eigen::Index(6 * vq.size());
  const Eigen::Index n = Eigen::Index(2 * quadrature.size());
  Eigen::MatrixXcd A(m, n);
  frames.clear();
  for (std::size_t i = 0; i < quadrature.size(); ++i) {
    const Vec3& d = quadrature.nodes[i];
    frames.push_back(tangent_basis(d));
    const auto& [e1, e2] = frames.back();
    const double w = quadrature.weights[i];
    for (std::size_t q = 0; q < vq.size(); ++q) {
      const cplx e = std::sqrt(vq.weights[q]) * w * std::exp(I * omega * d.dot(vq.points[q]));
      const cplx ce = I * omega * e;
      for (int c = 0; c < 3; ++c) {
        // d x e1 = e2, d x e2 = -e1.
        A(Eigen::Index(6 * q + c), Eigen::Index(2 * i)) = e * e1(c);
        A(Eigen::Index(6 * q + c), Eigen::Index(2 * i + 1)) = e * e2(c);
        A(Eigen::Index(6 * q + 3 + c), Eigen::Index(2 * i)) = ce * e2(c);
        A(Eigen::Index(6 * q + 3 + c), Eigen::Index(2 * i + 1)) = -ce * e1(c);
      }
    }
  }
  return A;
}

Eigen::VectorXcd assemble_rhs(const CurlSamples& target, const VolumeQuadrature& vq) {
  if (target.E.size() != vq.size() || target.curlE.size() != vq.size()) {
    throw std::invalid_argument("target samples do not match the volume quadrature");
  }
  Eigen::VectorXcd b(Eigen::Index(6 * vq.size()));
  for (std::size_t q = 0; q < vq.size(); ++q) {
    if (!target.E[q].allFinite() || !target.curlE[q].allFinite()) throw std::invalid_argument("target is not finite");
    const double sw = std::sqrt(vq.weights[q]);
    for (int c = 0; c < 3; ++c) {
      b(Eigen::Index(6 * q + c)) = sw * target.E[q](c);
      b(Eigen::Index(6 * q + 3 + c)) = sw * target.curlE[q](c);
    }
  }
  return b;
}

double r_condition(const Eigen::MatrixXcd& R, Eigen::Index rank) {
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rank; ++i) {
    hi = std::max(hi, std::abs(R(i, i)));
    lo = std::min(lo, std::abs(R(i, i)));
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

struct HerglotzFitter::Impl {
  Eigen::MatrixXcd A;
  std::vector<std::pair<Vec3, Vec3>> frames;
  double lambda = 0.0;
  bool escalated = false;
  int rank = 0;
  double condition = 0.0;
  std::optional<Eigen::ColPivHouseholderQR<Eigen::MatrixXcd>> pivoted;
  std::optional<Eigen::HouseholderQR<Eigen::MatrixXcd>> augmented;
};

HerglotzFitter::HerglotzFitter(VolumeQuadrature vq, double omega, SphereQuadrature quadrature, double lambda)
    : vq_(std::move(vq)), quadrature_(std::move(quadrature)), omega_(omega), impl_(std::make_unique<Impl>()) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  Impl& f = *impl_;
  f.A = assemble_matrix(vq_, omega_, quadrature_, f.frames);
  const Eigen::Index m = f.A.rows(), n = f.A.cols();
  const double mean_diag = f.A.squaredNorm() / double(n);

  const std::vector<double> schedule = {lambda, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4};
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const double lam = schedule[s];
    if (s > 0 && lam <= lambda) continue;
    f.pivoted.reset();
    f.augmented.reset();
    if (lam == 0.0) {
      f.pivoted.emplace(f.A);
      f.rank = int(f.pivoted->rank());
      f.condition = r_condition(f.pivoted->matrixR(), f.pivoted->rank());
    } else {
      Eigen::MatrixXcd Aug = Eigen::MatrixXcd::Zero(m + n, n);
      Aug.topRows(m) = f.A;
      for (Eigen::Index j = 0; j < n; ++j) {
        Aug(m + j, j) = std::sqrt(lam * mean_diag * quadrature_.weights[std::size_t(j / 2)]);
      }
      f.augmented.emplace(Aug);
      f.rank = int(n);
      f.condition = r_condition(f.augmented->matrixQR().topRows(n), n);
    }
    f.lambda = lam;
    f.escalated = s > 0;
    if (std::isfinite(f.condition) && f.condition < 1e14) return;
  }
  throw std::runtime_error("Herglotz fit is ill-conditioned at every regularization level");
}

HerglotzFitter::~HerglotzFitter() = default;
HerglotzFitter::HerglotzFitter(HerglotzFitter&&) noexcept = default;
HerglotzFitter& HerglotzFitter::operator=(HerglotzFitter&&) noexcept = default;

double HerglotzFitter::lambda() const { return impl_->lambda; }

FitReport HerglotzFitter::fit(const CurlSamples& target) const {
  const Impl& f = *impl_;
  const Eigen::VectorXcd b = assemble_rhs(target, vq_);
  Eigen::VectorXcd x;
  if (f.pivoted) {
    x = f.pivoted->solve(b);
  } else {
    Eigen::VectorXcd baug = Eigen::VectorXcd::Zero(f.A.rows() + f.A.cols());
    baug.head(f.A.rows()) = b;
    x = f.augmented->solve(baug);
  }
  if (!x.allFinite()) throw std::runtime_error("Herglotz fit produced a non-finite kernel");

  std::vector<CVec3> g(quadrature_.size());
  for (std::size_t i = 0; i < quadrature_.size(); ++i) {
    const auto& [e1, e2] = f.frames[i];
    g[i] = x(Eigen::Index(2 * i)) * e1.cast<cplx>() + x(Eigen::Index(2 * i + 1)) * e2.cast<cplx>();
  }
  FitReport rep;
  rep.kernel = HerglotzKernel(quadrature_, std::move(g));
  rep.data_misfit = (f.A * x - b).norm();
  rep.epsilon = rep.data_misfit;
  rep.kernel_norm = rep.kernel.l2_norm();
  rep.target_norm = b.norm();
  rep.lambda = f.lambda;
  rep.lambda_escalated = f.escalated;
  rep.rank = f.rank;
  rep.condition_estimate = f.condition;
  rep.quadrature_degree = quadrature_.degree;
  rep.radial_points = vq_.radial_points;
  rep.angular_degree = vq_.angular_degree;
  rep.radius = vq_.radius;
  rep.omega = omega_;
  rep.target_description = "field samples";
  return rep;
}

FitReport fit_kernel(const CurlSamples& target, const VolumeQuadrature& vq, double omega,
                     const SphereQuadrature& quadrature, double lambda) {
  return HerglotzFitter(vq, omega, quadrature, lambda).fit(target);
}

VolumeQuadrature fit_volume_rule(double omega, double R, const FitOptions& options) {
  if (!(R > 0.0)) throw std::invalid_argument("fit radius must be positive");
  const int degree =
      options.angular_degree >= 0 ? options.angular_degree : 2 * (int(std::ceil(omega * R)) + 8) + 4;
  return ball_quadrature(R, options.radial_points, degree);
}

double herglotz_exact_error(const HerglotzKernel& kernel, const CoefficientVector& target, double omega, double R) {
  const int L = std::max(target.cutoff(), reconstruction_cutoff(omega, R) + 6);
  CoefficientVector diff = herglotz_coeffs(kernel, omega, L);
  diff += cplx(-1.0) * target;
  return ball_norms(diff, omega, R).hcurl();
}

FitReport fit_kernel(const CoefficientVector& target, double omega, double R, const SphereQuadrature& quadrature,
                     double lambda, const FitOptions& options) {
  if (target.basis() != Basis::Regular) throw std::invalid_argument("fit target must be a regular expansion");
  const VolumeQuadrature vq = fit_volume_rule(omega, R, options);
  FitReport rep = fit_kernel(sample_expansion(target, omega, vq), vq, omega, quadrature, lambda);
  rep.epsilon_exact = herglotz_exact_error(rep.kernel, target, omega, R);
  rep.target_norm = ball_norms(target, omega, R).hcurl();
  std::ostringstream desc;
  desc << "multipole expansion (L = " << target.cutoff() << ", coefficient norm " << target.norm() << ")";
  rep.target_description = desc.str();
  return rep;
}

}  // namespace itecloak
