#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msl/common.hpp"

namespace msl {

// A point of S^{d-1}. Construction checks |v| = 1 to 1e-12.
class UnitVector {
 public:
  explicit UnitVector(Point coords);

  static UnitVector normalized(Point v);
  static UnitVector axis(int dimension, int index);
  static UnitVector from_angle(double phi);  // (cos phi, sin phi)

  int dimension() const { return static_cast<int>(coords_.size()); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> span() const { return coords_; }
  const Point& coords() const { return coords_; }
  UnitVector operator-() const;

 private:
  struct Trusted {};
  UnitVector(Point coords, Trusted) : coords_(std::move(coords)) {}
  Point coords_;
};

// Orthonormal basis of theta^perp (d - 1 vectors).
std::vector<Point> orthonormal_complement(const UnitVector& theta);

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

enum class QuadratureScheme { Trapezoid, ProductGaussTrapezoid, MonteCarlo };

std::string to_string(QuadratureScheme s);

// Weighted node set on S^{d-1}; weights are in units of H^{d-1}, so they sum
// to |S^{d-1}| = d * omega_d.
//   d = 2  : equispaced angles (trapezoid), spectrally accurate for smooth h
//   d = 3  : Gauss-Legendre in cos(polar) x trapezoid in azimuth
//   d >= 4 : Monte Carlo, uniform nodes with equal weights and a seed
class SphereQuadrature {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed'0f'5fe7eULL;
  static constexpr int kDefaultCircleNodes = 4096;
  static constexpr int kDefaultPolarNodes = 256;
  static constexpr int kDefaultAzimuthNodes = 512;
  static constexpr std::size_t kDefaultMonteCarloNodes = 200000;

  static SphereQuadrature circle(int n = kDefaultCircleNodes);
  static SphereQuadrature sphere(int n_polar = kDefaultPolarNodes, int n_azimuth = kDefaultAzimuthNodes);
  static SphereQuadrature monte_carlo(int dimension, std::size_t n = kDefaultMonteCarloNodes,
                                      std::uint64_t seed = kDefaultSeed);
  // The scheme the library uses by default for dimension d.
  static SphereQuadrature standard(int dimension, std::uint64_t seed = kDefaultSeed);

  int dimension() const { return dimension_; }
  QuadratureScheme scheme() const { return scheme_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<UnitVector>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  double total_weight() const;

  // Sum_i w_i f(theta_i). Monte Carlo schemes attach a standard error.
  Estimate integrate(const std::function<double(const UnitVector&)>& f) const;

 private:
  SphereQuadrature(int d, QuadratureScheme s) : dimension_(d), scheme_(s) {}

  int dimension_;
  QuadratureScheme scheme_;
  std::vector<UnitVector> nodes_;
  std::vector<double> weights_;
  std::optional<std::uint64_t> seed_;
};

}  // namespace msl
