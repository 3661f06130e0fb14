#pragma once

#include <Eigen/Dense>
#include <vector>

namespace itecloak {

using Vec3 = Eigen::Vector3d;

/// Gauss-Legendre rule on [a, b].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
/// uniform azimuthal grid. Integrates spherical harmonics exactly up to
/// `degree`.
struct SphereQuadrature {
  int degree = 0;
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

SphereQuadrature sphere_quadrature(int degree);

/// Tensor rule on the ball |x| <= radius (radial Gauss-Legendre with r^2
/// folded into the weights, angular product rule).
struct VolumeQuadrature {
  double radius = 0.0;
  int radial_points = 0;
  int angular_degree = 0;
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

VolumeQuadrature ball_quadrature(double radius, int radial_points, int angular_degree);

}  // namespace itecloak
