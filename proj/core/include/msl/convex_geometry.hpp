#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "msl/common.hpp"
#include "msl/sphere_quadrature.hpp"

namespace msl {

// Volume of the unit ball in R^k: pi^{k/2} / Gamma(k/2 + 1).
double unit_ball_volume(int k);

// (d/2) * omega_d / omega_{d-1}; the critical density is this times W(K).
double sharp_constant(int d);

struct EuclideanBall {
  double radius = 1.0;
};

struct Cube {
  double half_width = 1.0;
};

// Unit l^p ball in the plane, p in [1, inf].
struct LpBall2D {
  double p = 2.0;
};

struct SupportOracle {
  std::function<double(const UnitVector&)> h;
  bool smooth = false;
  // Tabulated values at equispaced angles when the body came from a grid.
  std::vector<double> angle_grid;
};

using BodyKind = std::variant<EuclideanBall, Cube, LpBall2D, SupportOracle>;

struct OracleTraits {
  bool smooth = false;
  bool quarter_turn_symmetric = false;
  // Number of directions used for the gauge sup; 0 selects the standard
  // sphere quadrature of the dimension.
  int gauge_grid_nodes = 0;
};

// Origin-symmetric convex body with 0 in its interior, described by its
// support function h_K(theta) = max_{x in K} <x, theta> on unit vectors.
class ConvexBody {
 public:
  static ConvexBody ball(int dimension, double radius = 1.0);
  static ConvexBody cube(int dimension, double half_width = 1.0);
  static ConvexBody lp_ball_2d(double p);
  static ConvexBody from_oracle(int dimension, std::function<double(const UnitVector&)> h,
                                OracleTraits traits = {});
  // d = 2 body from h sampled at angles 2 pi k / n, interpolated linearly in angle.
  static ConvexBody from_angle_grid(std::vector<double> h_values);

  int dimension() const { return dimension_; }
  const BodyKind& kind() const { return kind_; }
  bool origin_symmetric() const { return true; }
  bool quarter_turn_symmetric() const { return quarter_turn_; }
  // True when boundary points and normals are uniquely defined (required by
  // boundary_point and sample_boundary).
  bool strictly_convex() const;
  std::string name() const;

  // Directions used by gauge() for oracle bodies.
  const std::vector<UnitVector>& gauge_directions() const;

 private:
  ConvexBody(int d, BodyKind kind, bool quarter_turn)
      : dimension_(d), kind_(std::move(kind)), quarter_turn_(quarter_turn) {}

  int dimension_;
  BodyKind kind_;
  bool quarter_turn_;
  std::shared_ptr<const std::vector<UnitVector>> gauge_dirs_;
};

double support_function(const ConvexBody& body, const UnitVector& theta);

// Minkowski functional ||x||_K = inf{lambda >= 0 : x in lambda K}.
double gauge(const ConvexBody& body, std::span<const double> x);

// W(K) = (2 / |S^{d-1}|) * integral of h_K over the sphere.
Estimate mean_width(const ConvexBody& body, const SphereQuadrature& quad);

// grad h_K(theta): the boundary point whose outward normal is theta.
Point boundary_point(const ConvexBody& body, const UnitVector& theta);

struct BoundarySample {
  Point point;
  UnitVector normal;
};

// Points distributed uniformly w.r.t. surface measure on the boundary.
std::vector<BoundarySample> sample_boundary(const ConvexBody& body, std::size_t n, std::uint64_t seed);

// Circumscribed polygon of a planar body built from n support lines at
// equispaced normal angles. side_length[i] is the length of the edge with
// normal angle 2 pi i / n, the discrete analogue of (h + h'') d phi.
struct BoundaryTable {
  std::vector<double> angles;
  std::vector<double> side_length;
  std::vector<double> cumulative;  // prefix sums, cumulative.back() == perimeter
  double perimeter() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

inline constexpr int kBoundaryTableNodes = 8192;

BoundaryTable boundary_table_2d(const ConvexBody& body, int n = kBoundaryTableNodes);

struct PerimeterReport {
  double perimeter = 0.0;       // from the boundary tabulation
  double pi_mean_width = 0.0;   // pi * W(K) from the circle quadrature
  double discrepancy = 0.0;     // relative difference of the two
};

PerimeterReport perimeter_2d(const ConvexBody& body, int n = kBoundaryTableNodes);

// Checks h > 0, h(-theta) = h(theta) and, when flagged, the quarter-turn
// symmetry on the given directions. Throws BodyDefinitionError.
void validate_body(const ConvexBody& body, const std::vector<UnitVector>& directions, double tol = 1e-12);

}  // namespace msl
