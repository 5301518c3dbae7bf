#include "msl/sphere_quadrature.hpp"

#include <numeric>

#include "msl/convex_geometry.hpp"
#include "msl/random.hpp"

namespace msl {

UnitVector::UnitVector(Point coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw ValidationError("unit vector needs dimension >= 2");
  const double n = norm(coords_);
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-12)
    throw ValidationError("vector is not of unit length (|v| = " + std::to_string(n) + ")");
}

UnitVector UnitVector::normalized(Point v) {
  if (v.size() < 2) throw ValidationError("unit vector needs dimension >= 2");
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("cannot normalise a zero or non-finite vector");
  for (auto& x : v) x /= n;
  return UnitVector(std::move(v), Trusted{});
}

UnitVector UnitVector::axis(int dimension, int index) {
  require(dimension >= 2 && index >= 0 && index < dimension, "axis index out of range");
  Point v(static_cast<std::size_t>(dimension), 0.0);
  v[static_cast<std::size_t>(index)] = 1.0;
  return UnitVector(std::move(v), Trusted{});
}

UnitVector UnitVector::from_angle(double phi) {
  return UnitVector(Point{std::cos(phi), std::sin(phi)}, Trusted{});
}

UnitVector UnitVector::operator-() const {
  Point v = coords_;
  for (auto& x : v) x = -x;
  return UnitVector(std::move(v), Trusted{});
}

std::vector<Point> orthonormal_complement(const UnitVector& theta) {
  const auto d = static_cast<std::size_t>(theta.dimension());
  if (d == 2) return {Point{-theta[1], theta[0]}};
  // Gram-Schmidt on the coordinate axes, skipping the one most aligned with theta.
  std::size_t skip = 0;
  for (std::size_t i = 1; i < d; ++i)
    if (std::abs(theta[i]) > std::abs(theta[skip])) skip = i;
  std::vector<Point> basis;
  for (std::size_t i = 0; i < d; ++i) {
    if (i == skip) continue;
    Point v(d, 0.0);
    v[i] = 1.0;
    auto project_out = [&](std::span<const double> u) {
      const double c = dot(v, u);
      for (std::size_t k = 0; k < d; ++k) v[k] -= c * u[k];
    };
    project_out(theta.span());
    for (const auto& b : basis) project_out(b);
    const double n = norm(v);
    for (auto& x : v) x /= n;
    basis.push_back(std::move(v));
  }
  return basis;
}

GaussLegendre gauss_legendre(int n) {
  require(n >= 1, "Gauss-Legendre order must be positive");
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

std::string to_string(QuadratureScheme s) {
  switch (s) {
    case QuadratureScheme::Trapezoid: return "trapezoid";
    case QuadratureScheme::ProductGaussTrapezoid: return "product-gauss-trapezoid";
    case QuadratureScheme::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

SphereQuadrature SphereQuadrature::circle(int n) {
  require(n >= 8, "circle quadrature needs at least 8 nodes");
  SphereQuadrature q(2, QuadratureScheme::Trapezoid);
  q.nodes_.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) q.nodes_.push_back(UnitVector::from_angle(2.0 * kPi * k / n));
  q.weights_.assign(static_cast<std::size_t>(n), 2.0 * kPi / n);
  return q;
}

SphereQuadrature SphereQuadrature::sphere(int n_polar, int n_azimuth) {
  require(n_polar >= 4 && n_azimuth >= 8, "sphere quadrature too coarse");
  SphereQuadrature q(3, QuadratureScheme::ProductGaussTrapezoid);
  const auto gl = gauss_legendre(n_polar);
  q.nodes_.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  for (int i = 0; i < n_polar; ++i) {
    const double z = gl.nodes[static_cast<std::size_t>(i)];
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5 * (i % 2)) / n_azimuth;
      q.nodes_.push_back(UnitVector::normalized({rho * std::cos(phi), rho * std::sin(phi), z}));
      q.weights_.push_back(gl.weights[static_cast<std::size_t>(i)] * 2.0 * kPi / n_azimuth);
    }
  }
  return q;
}

SphereQuadrature SphereQuadrature::monte_carlo(int dimension, std::size_t n, std::uint64_t seed) {
  require(dimension >= 2, "sphere dimension must be >= 2");
  require(n >= 16, "Monte Carlo sphere quadrature needs at least 16 nodes");
  SphereQuadrature q(dimension, QuadratureScheme::MonteCarlo);
  q.seed_ = seed;
  Rng rng(seed);
  q.nodes_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) q.nodes_.push_back(UnitVector::normalized(uniform_on_sphere(dimension, rng)));
  q.weights_.assign(n, dimension * unit_ball_volume(dimension) / static_cast<double>(n));
  return q;
}

SphereQuadrature SphereQuadrature::standard(int dimension, std::uint64_t seed) {
  require(dimension >= 2, "sphere dimension must be >= 2");
  if (dimension == 2) return circle();
  if (dimension == 3) return sphere();
  return monte_carlo(dimension, kDefaultMonteCarloNodes, seed);
}

double SphereQuadrature::total_weight() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

Estimate SphereQuadrature::integrate(const std::function<double(const UnitVector&)>& f) const {
  Estimate e;
  if (scheme_ != QuadratureScheme::MonteCarlo) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) e.value += weights_[i] * f(nodes_[i]);
    return e;
  }
  // Equal weights: value = |S| * mean, standard error from the sample variance.
  const double n = static_cast<double>(nodes_.size());
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& node : nodes_) {
    const double v = f(node);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  const double area = total_weight();
  e.value = area * mean;
  e.std_error = area * std::sqrt(var / n);
  return e;
}

}  // namespace msl
