#include "msl/convex_geometry.hpp"

#include <algorithm>
#include <limits>

#include "msl/parallel.hpp"
#include "msl/random.hpp"

namespace msl {
namespace {

constexpr double kFiniteDifferenceStep = 1e-6;
constexpr std::size_t kSampleChunk = 4096;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dimension(const ConvexBody& body, std::size_t n) {
  if (static_cast<int>(n) != body.dimension())
    throw DimensionMismatch("expected a vector of dimension " + std::to_string(body.dimension()) + ", got " +
                            std::to_string(n));
}

double dual_exponent(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

// l^r norm of a planar vector, r in [1, inf].
double lr_norm_2d(double a, double b, double r) {
  a = std::abs(a);
  b = std::abs(b);
  if (std::isinf(r)) return std::max(a, b);
  if (r == 1.0) return a + b;
  const double m = std::max(a, b);
  if (m == 0.0) return 0.0;
  return m * std::pow(std::pow(a / m, r) + std::pow(b / m, r), 1.0 / r);
}

double angle_of(std::span<const double> v) {
  double phi = std::atan2(v[1], v[0]);
  if (phi < 0.0) phi += 2.0 * kPi;
  return phi;
}

double interpolate_angle_grid(const std::vector<double>& grid, double phi) {
  const auto n = grid.size();
  const double t = phi / (2.0 * kPi) * static_cast<double>(n);
  double cell = std::floor(t);
  const double frac = t - cell;
  const auto i = static_cast<std::size_t>(cell) % n;
  return (1.0 - frac) * grid[i] + frac * grid[(i + 1) % n];
}

}  // namespace

double unit_ball_volume(int k) {
  require(k >= 0, "unit_ball_volume: k must be non-negative");
  if (k == 0) return 1.0;
  return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double sharp_constant(int d) {
  require(d >= 2, "sharp_constant: dimension must be >= 2");
  return 0.5 * d * unit_ball_volume(d) / unit_ball_volume(d - 1);
}

ConvexBody ConvexBody::ball(int dimension, double radius) {
  require(dimension >= 2, "ball: dimension must be >= 2");
  require(radius > 0.0 && std::isfinite(radius), "ball: radius must be positive");
  return ConvexBody(dimension, EuclideanBall{radius}, dimension == 2);
}

ConvexBody ConvexBody::cube(int dimension, double half_width) {
  require(dimension >= 2, "cube: dimension must be >= 2");
  require(half_width > 0.0 && std::isfinite(half_width), "cube: half width must be positive");
  return ConvexBody(dimension, Cube{half_width}, dimension == 2);
}

ConvexBody ConvexBody::lp_ball_2d(double p) {
  require(p >= 1.0, "lp ball: exponent must be in [1, inf]");
  return ConvexBody(2, LpBall2D{p}, true);
}

ConvexBody ConvexBody::from_oracle(int dimension, std::function<double(const UnitVector&)> h, OracleTraits traits) {
  require(dimension >= 2, "oracle body: dimension must be >= 2");
  require(static_cast<bool>(h), "oracle body: empty support function");
  require(!traits.quarter_turn_symmetric || dimension == 2, "quarter-turn symmetry is only defined for d = 2");
  ConvexBody body(dimension, SupportOracle{std::move(h), traits.smooth, {}}, traits.quarter_turn_symmetric);
  const SphereQuadrature grid = traits.gauge_grid_nodes > 0
                                    ? (dimension == 2 ? SphereQuadrature::circle(traits.gauge_grid_nodes)
                                                      : SphereQuadrature::monte_carlo(
                                                            dimension, static_cast<std::size_t>(traits.gauge_grid_nodes)))
                                    : SphereQuadrature::standard(dimension);
  body.gauge_dirs_ = std::make_shared<const std::vector<UnitVector>>(grid.nodes());
  return body;
}

ConvexBody ConvexBody::from_angle_grid(std::vector<double> h_values) {
  const std::size_t n = h_values.size();
  require(n >= 8, "oracle grid: need at least 8 tabulated values");
  for (double v : h_values)
    if (!(v > 0.0) || !std::isfinite(v)) throw BodyDefinitionError("oracle grid: support values must be positive");
  if (n % 2 != 0) throw BodyDefinitionError("oracle grid: an odd number of angles cannot encode origin symmetry");
  for (std::size_t k = 0; k < n / 2; ++k)
    if (std::abs(h_values[k] - h_values[k + n / 2]) > 1e-12 * std::max(1.0, h_values[k]))
      throw BodyDefinitionError("oracle grid: h(-theta) != h(theta) at index " + std::to_string(k));
  bool quarter = (n % 4 == 0);
  for (std::size_t k = 0; quarter && k < n; ++k)
    quarter = std::abs(h_values[k] - h_values[(k + n / 4) % n]) <= 1e-12 * std::max(1.0, h_values[k]);

  auto grid = std::make_shared<const std::vector<double>>(h_values);
  auto h = [grid](const UnitVector& theta) { return interpolate_angle_grid(*grid, angle_of(theta.span())); };
  OracleTraits traits;
  traits.quarter_turn_symmetric = quarter;
  ConvexBody body = from_oracle(2, h, traits);
  std::get<SupportOracle>(body.kind_).angle_grid = std::move(h_values);
  return body;
}

bool ConvexBody::strictly_convex() const {
  return std::visit(Overloaded{
                        [](const EuclideanBall&) { return true; },
                        [](const Cube&) { return false; },
                        [](const LpBall2D& b) { return b.p > 1.0 && std::isfinite(b.p); },
                        [](const SupportOracle& o) { return o.smooth; },
                    },
                    kind_);
}

std::string ConvexBody::name() const {
  return std::visit(Overloaded{
                        [&](const EuclideanBall& b) {
                          return "ball(d=" + std::to_string(dimension_) + ", R=" + std::to_string(b.radius) + ")";
                        },
                        [&](const Cube& c) {
                          return "cube(d=" + std::to_string(dimension_) + ", R=" + std::to_string(c.half_width) + ")";
                        },
                        [](const LpBall2D& b) { return "lp2d(p=" + std::to_string(b.p) + ")"; },
                        [&](const SupportOracle& o) {
                          return std::string(o.angle_grid.empty() ? "oracle" : "oracle-grid") +
                                 "(d=" + std::to_string(dimension_) + ")";
                        },
                    },
                    kind_);
}

const std::vector<UnitVector>& ConvexBody::gauge_directions() const {
  static const std::vector<UnitVector> empty;
  return gauge_dirs_ ? *gauge_dirs_ : empty;
}

double support_function(const ConvexBody& body, const UnitVector& theta) {
  check_dimension(body, theta.coords().size());
  return std::visit(Overloaded{
                        [](const EuclideanBall& b) { return b.radius; },
                        [&](const Cube& c) {
                          double s = 0.0;
                          for (double t : theta.span()) s += std::abs(t);
                          return c.half_width * s;
                        },
                        [&](const LpBall2D& b) { return lr_norm_2d(theta[0], theta[1], dual_exponent(b.p)); },
                        [&](const SupportOracle& o) {
                          const double h = o.h(theta);
                          if (!(h > 0.0) || !std::isfinite(h))
                            throw BodyDefinitionError("support oracle returned a non-positive or non-finite value");
                          return h;
                        },
                    },
                    body.kind());
}

double gauge(const ConvexBody& body, std::span<const double> x) {
  check_dimension(body, x.size());
  for (double v : x)
    if (!std::isfinite(v)) throw ValidationError("gauge: point must be finite");
  return std::visit(Overloaded{
                        [&](const EuclideanBall& b) { return norm(x) / b.radius; },
                        [&](const Cube& c) {
                          double m = 0.0;
                          for (double v : x) m = std::max(m, std::abs(v));
                          return m / c.half_width;
                        },
                        [&](const LpBall2D& b) { return lr_norm_2d(x[0], x[1], b.p); },
                        [&](const SupportOracle&) {
                          double best = 0.0;
                          for (const auto& theta : body.gauge_directions())
                            best = std::max(best, dot(x, theta.span()) / support_function(body, theta));
                          return best;
                        },
                    },
                    body.kind());
}

Estimate mean_width(const ConvexBody& body, const SphereQuadrature& quad) {
  if (quad.dimension() != body.dimension())
    throw DimensionMismatch("mean_width: quadrature dimension " + std::to_string(quad.dimension()) +
                            " != body dimension " + std::to_string(body.dimension()));
  const double area = body.dimension() * unit_ball_volume(body.dimension());
  Estimate integral = quad.integrate([&](const UnitVector& t) { return support_function(body, t); });
  return Estimate{2.0 * integral.value / area, 2.0 * integral.std_error / area, 0.0};
}

Point boundary_point(const ConvexBody& body, const UnitVector& theta) {
  check_dimension(body, theta.coords().size());
  if (!body.strictly_convex())
    throw NotStrictlyConvex(body.name() +
                            " is not strictly convex; approximate it by a smooth body (e.g. an l^p ball with large "
                            "finite p) before asking for boundary points");
  return std::visit(
      Overloaded{
          [&](const EuclideanBall& b) {
            Point x = theta.coords();
            for (auto& v : x) v *= b.radius;
            return x;
          },
          [&](const Cube&) -> Point { throw NotStrictlyConvex("cube"); },
          [&](const LpBall2D& b) {
            const double q = dual_exponent(b.p);
            const double hq = lr_norm_2d(theta[0], theta[1], q);
            Point x(2);
            for (std::size_t i = 0; i < 2; ++i)
              x[i] = std::copysign(std::pow(std::abs(theta[i]) / hq, q - 1.0), theta[i]);
            return x;
          },
          [&](const SupportOracle&) {
            // grad h = h(theta) theta + tangential derivative (Euler's identity
            // for the 1-homogeneous extension), central differences on S^{d-1}.
            const double h0 = support_function(body, theta);
            Point x = theta.coords();
            for (auto& v : x) v *= h0;
            const double eps = kFiniteDifferenceStep;
            const double stretch = std::sqrt(1.0 + eps * eps);
            for (const auto& e : orthonormal_complement(theta)) {
              Point plus = theta.coords(), minus = theta.coords();
              for (std::size_t k = 0; k < plus.size(); ++k) {
                plus[k] += eps * e[k];
                minus[k] -= eps * e[k];
              }
              const double hp = support_function(body, UnitVector::normalized(plus));
              const double hm = support_function(body, UnitVector::normalized(minus));
              const double deriv = stretch * (hp - hm) / (2.0 * eps);
              for (std::size_t k = 0; k < x.size(); ++k) x[k] += deriv * e[k];
            }
            return x;
          },
      },
      body.kind());
}

BoundaryTable boundary_table_2d(const ConvexBody& body, int n) {
  if (body.dimension() != 2) throw ValidationError("boundary tabulation requires d = 2");
  require(n >= 64, "boundary tabulation needs at least 64 directions");
  BoundaryTable t;
  const auto un = static_cast<std::size_t>(n);
  t.angles.resize(un);
  std::vector<double> h(un);
  for (std::size_t i = 0; i < un; ++i) {
    t.angles[i] = 2.0 * kPi * static_cast<double>(i) / n;
    h[i] = support_function(body, UnitVector::from_angle(t.angles[i]));
  }
  // vertex[i] = intersection of the support lines i and i+1.
  const double sin_step = std::sin(2.0 * kPi / n);
  std::vector<std::array<double, 2>> vertex(un);
  for (std::size_t i = 0; i < un; ++i) {
    const std::size_t j = (i + 1) % un;
    const double a = t.angles[i], b = t.angles[j];
    vertex[i] = {(h[i] * std::sin(b) - h[j] * std::sin(a)) / sin_step,
                 (h[j] * std::cos(a) - h[i] * std::cos(b)) / sin_step};
  }
  t.side_length.resize(un);
  t.cumulative.resize(un);
  double total = 0.0;
  for (std::size_t i = 0; i < un; ++i) {
    const auto& prev = vertex[(i + un - 1) % un];
    const auto& next = vertex[i];
    const double tx = -std::sin(t.angles[i]), ty = std::cos(t.angles[i]);
    double len = (next[0] - prev[0]) * tx + (next[1] - prev[1]) * ty;
    const double scale = 1e-8 * h[i];
    if (len < -scale)
      throw BodyDefinitionError(body.name() + ": negative boundary density at angle " +
                                std::to_string(t.angles[i]) + " (support function is not convex)");
    len = std::max(len, 0.0);
    t.side_length[i] = len;
    total += len;
    t.cumulative[i] = total;
  }
  return t;
}

PerimeterReport perimeter_2d(const ConvexBody& body, int n) {
  if (body.dimension() != 2) throw ValidationError("perimeter_2d requires d = 2");
  PerimeterReport r;
  r.perimeter = boundary_table_2d(body, n).perimeter();
  r.pi_mean_width = kPi * mean_width(body, SphereQuadrature::circle(n)).value;
  r.discrepancy = std::abs(r.perimeter - r.pi_mean_width) / r.pi_mean_width;
  return r;
}

std::vector<BoundarySample> sample_boundary(const ConvexBody& body, std::size_t n, std::uint64_t seed) {
  const int d = body.dimension();
  const bool is_ball = std::holds_alternative<EuclideanBall>(body.kind());
  if (!is_ball) {
    if (d != 2) throw UnsupportedBody("sample_boundary: only balls are supported for d > 2");
    if (!body.strictly_convex())
      throw NotStrictlyConvex(body.name() + " is not strictly convex; boundary normals are not unique");
  }

  std::shared_ptr<const BoundaryTable> table;
  if (!is_ball) table = std::make_shared<const BoundaryTable>(boundary_table_2d(body));

  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  auto parts = map_chunks<std::vector<BoundarySample>>(chunks, [&](std::size_t c) {
    Rng rng(derive_seed(seed, {0xB0DAULL, c}));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t begin = c * kSampleChunk, end = std::min(n, begin + kSampleChunk);
    std::vector<BoundarySample> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      if (is_ball) {
        auto u = UnitVector::normalized(uniform_on_sphere(d, rng));
        out.push_back({boundary_point(body, u), u});
        continue;
      }
      const double target = unif(rng) * table->perimeter();
      auto it = std::upper_bound(table->cumulative.begin(), table->cumulative.end(), target);
      const auto cell = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - table->cumulative.begin(), static_cast<std::ptrdiff_t>(table->cumulative.size()) - 1));
      const double width = 2.0 * kPi / static_cast<double>(table->angles.size());
      const double phi = table->angles[cell] + (unif(rng) - 0.5) * width;
      auto u = UnitVector::from_angle(phi);
      out.push_back({boundary_point(body, u), u});
    }
    return out;
  });

  std::vector<BoundarySample> samples;
  samples.reserve(n);
  for (auto& p : parts)
    for (auto& s : p) samples.push_back(std::move(s));
  return samples;
}

void validate_body(const ConvexBody& body, const std::vector<UnitVector>& directions, double tol) {
  for (const auto& theta : directions) {
    const double h = support_function(body, theta);
    const double hm = support_function(body, -theta);
    if (std::abs(h - hm) > tol * std::max(1.0, h))
      throw BodyDefinitionError(body.name() + ": h(-theta) != h(theta)");
    if (body.quarter_turn_symmetric()) {
      const double hr = support_function(body, UnitVector::normalized({-theta[1], theta[0]}));
      if (std::abs(h - hr) > tol * std::max(1.0, h))
        throw BodyDefinitionError(body.name() + ": flagged quarter-turn symmetric but h(-t2, t1) != h(t1, t2)");
    }
  }
}

}  // namespace msl
