#include "itecloak/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace itecloak {

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussRule rule;
  rule.nodes.resize(std::size_t(n));
  rule.weights.resize(std::size_t(n));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[std::size_t(i)] = mid - half * x;
    rule.nodes[std::size_t(n - 1 - i)] = mid + half * x;
    rule.weights[std::size_t(i)] = half * w;
    rule.weights[std::size_t(n - 1 - i)] = half * w;
  }
  return rule;
}

SphereQuadrature sphere_quadrature(int degree) {
  if (degree < 1) throw std::invalid_argument("sphere_quadrature: degree must be >= 1");
  const int n_theta = degree / 2 + 1;
  const int n_phi = degree + 1;
  const GaussRule gl = gauss_legendre(n_theta);
  SphereQuadrature q;
  q.degree = degree;
  q.nodes.reserve(std::size_t(n_theta * n_phi));
  q.weights.reserve(std::size_t(n_theta * n_phi));
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl.nodes[std::size_t(i)];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * dphi;
      q.nodes.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      q.weights.push_back(gl.weights[std::size_t(i)] * dphi);
    }
  }
  return q;
}

VolumeQuadrature ball_quadrature(double radius, int radial_points, int angular_degree) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball_quadrature: radius must be positive");
  const GaussRule radial = gauss_legendre(radial_points, 0.0, radius);
  const SphereQuadrature ang = sphere_quadrature(angular_degree);
  VolumeQuadrature vq;
  vq.radius = radius;
  vq.radial_points = radial_points;
  vq.angular_degree = angular_degree;
  vq.points.reserve(radial.nodes.size() * ang.size());
  vq.weights.reserve(radial.nodes.size() * ang.size());
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    const double wr = radial.weights[i] * r * r;
    for (std::size_t j = 0; j < ang.size(); ++j) {
      vq.points.push_back(r * ang.nodes[j]);
      vq.weights.push_back(wr * ang.weights[j]);
    }
  }
  return vq;
}

}  // namespace itecloak
