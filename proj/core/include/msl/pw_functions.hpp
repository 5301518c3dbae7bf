#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msl/common.hpp"
#include "msl/convex_geometry.hpp"
#include "msl/sphere_quadrature.hpp"

namespace msl {

struct CosineTerm {
  double a;  // frequency, > 0
  UnitVector nu;
};

// f(x) = prod_n cos(2 pi a_n <x, nu_n>). f(0) = 1 and |f| <= 1.
class CosineProduct {
 public:
  explicit CosineProduct(int dimension, std::vector<CosineTerm> terms = {});

  int dimension() const { return dimension_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<CosineTerm>& terms() const { return terms_; }

  void add(double a, UnitVector nu);
  // Sum_n a_n |<nu_n, v>|, the support function of the spectrum at v.
  double spectral_support(std::span<const double> v) const;

 private:
  int dimension_;
  std::vector<CosineTerm> terms_;
};

double evaluate(const CosineProduct& f, std::span<const double> x);

struct SpectrumCertificate {
  std::string body;
  double gauge_max = 0.0;  // max over the grid of sum_n a_n |<nu_n, theta / h_K(theta)>|
  Point argmax;            // maximising polar boundary point
  std::size_t grid_nodes = 0;
  bool pass = false;
};

inline constexpr std::size_t kMinCertificateNodes = 256;

// Default direction grid for certificates: the standard sphere quadrature
// nodes for d <= 3, Monte Carlo directions for d >= 4.
std::vector<UnitVector> certificate_grid(int dimension);

// supp(f^) consists of the 2^N points sum_n eps_n a_n nu_n; all of them lie in
// K iff sup_{y in dK°} sum_n a_n |<nu_n, y>| <= 1. The sup is taken over the
// grid {theta / h_K(theta)}.
SpectrumCertificate spectrum_certificate(const CosineProduct& f, const ConvexBody& body,
                                         const std::vector<UnitVector>& grid);
SpectrumCertificate spectrum_certificate(const CosineProduct& f, const ConvexBody& body);

// Number of s in [-t, t] with f(base + s theta) = 0, counted per factor.
long long slice_zero_count(const CosineProduct& f, std::span<const double> base, const UnitVector& theta,
                           double t);

// Zeros s in [-t, t] of f(base + s theta), sorted, with multiplicity.
std::vector<double> slice_zeros(const CosineProduct& f, std::span<const double> base, const UnitVector& theta,
                                double t);

struct JensenSides {
  double lhs = 0.0;  // int_0^T card{|s| <= t : f(x + s theta) = 0} dt / t
  double rhs = 0.0;  // 4 T h_theta + log(1 / |f(x)|)
  long long zeros = 0;
};

JensenSides jensen_functional(const CosineProduct& f, std::span<const double> x, const UnitVector& theta, double T,
                              double h_theta);

inline constexpr std::size_t kMinRonkinSamples = 10000;

// R^{-(d+1)} int_{B(0,R)} log(1 / |f|) dm_d by Monte Carlo over the ball.
Estimate ronkin_estimate(const CosineProduct& f, double R, std::size_t n_samples, std::uint64_t seed);

}  // namespace msl
