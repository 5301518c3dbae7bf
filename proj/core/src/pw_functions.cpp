#include "msl/pw_functions.hpp"

#include <algorithm>
#include <limits>

#include "msl/parallel.hpp"
#include "msl/random.hpp"

namespace msl {
namespace {

constexpr double kParallelTol = 1e-15;
constexpr double kIndexSlack = 1e-12;
constexpr std::size_t kRonkinChunk = 8192;
constexpr std::size_t kCertificateChunk = 2048;
constexpr std::size_t kCertificateMcNodes = 50000;

void check_point(const CosineProduct& f, std::size_t n) {
  if (static_cast<int>(n) != f.dimension())
    throw DimensionMismatch("expected a point of dimension " + std::to_string(f.dimension()) + ", got " +
                            std::to_string(n));
}

// Indices k with (2k + 1) / (4a) in [lo, hi].
std::pair<long long, long long> zero_index_range(double a, double lo, double hi) {
  const double klo = (4.0 * a * lo - 1.0) / 2.0;
  const double khi = (4.0 * a * hi - 1.0) / 2.0;
  const double slack = kIndexSlack * std::max(1.0, std::max(std::abs(klo), std::abs(khi)));
  return {static_cast<long long>(std::ceil(klo - slack)), static_cast<long long>(std::floor(khi + slack))};
}

}  // namespace

CosineProduct::CosineProduct(int dimension, std::vector<CosineTerm> terms) : dimension_(dimension) {
  require(dimension >= 1, "cosine product: dimension must be positive");
  for (auto& t : terms) add(t.a, std::move(t.nu));
}

void CosineProduct::add(double a, UnitVector nu) {
  require(a > 0.0 && std::isfinite(a), "cosine product: frequencies must be positive");
  if (nu.dimension() != dimension_)
    throw DimensionMismatch("cosine product: direction has dimension " + std::to_string(nu.dimension()));
  terms_.push_back({a, std::move(nu)});
}

double CosineProduct::spectral_support(std::span<const double> v) const {
  check_point(*this, v.size());
  double s = 0.0;
  for (const auto& t : terms_) s += t.a * std::abs(dot(t.nu.span(), v));
  return s;
}

double evaluate(const CosineProduct& f, std::span<const double> x) {
  check_point(f, x.size());
  double v = 1.0;
  for (const auto& t : f.terms()) v *= std::cos(2.0 * kPi * t.a * dot(x, t.nu.span()));
  return v;
}

std::vector<UnitVector> certificate_grid(int dimension) {
  if (dimension <= 3) return SphereQuadrature::standard(dimension).nodes();
  return SphereQuadrature::monte_carlo(dimension, kCertificateMcNodes).nodes();
}

SpectrumCertificate spectrum_certificate(const CosineProduct& f, const ConvexBody& body,
                                         const std::vector<UnitVector>& grid) {
  if (f.dimension() != body.dimension())
    throw DimensionMismatch("certificate: product and body dimensions differ");
  if (grid.size() < kMinCertificateNodes)
    throw ValidationError("certificate grid has " + std::to_string(grid.size()) + " nodes, need at least " +
                          std::to_string(kMinCertificateNodes));
  struct Best {
    double value = -1.0;
    std::size_t index = 0;
  };
  const std::size_t chunks = (grid.size() + kCertificateChunk - 1) / kCertificateChunk;
  auto parts = map_chunks<Best>(chunks, [&](std::size_t c) {
    Best best;
    const std::size_t end = std::min(grid.size(), (c + 1) * kCertificateChunk);
    for (std::size_t i = c * kCertificateChunk; i < end; ++i) {
      const double v = f.spectral_support(grid[i].span()) / support_function(body, grid[i]);
      if (v > best.value) best = {v, i};
    }
    return best;
  });
  Best best;
  for (const auto& p : parts)
    if (p.value > best.value) best = p;

  SpectrumCertificate cert;
  cert.body = body.name();
  cert.grid_nodes = grid.size();
  cert.gauge_max = std::max(0.0, best.value);
  const UnitVector& theta = grid[best.index];
  const double h = support_function(body, theta);
  cert.argmax = theta.coords();
  for (auto& v : cert.argmax) v /= h;
  cert.pass = cert.gauge_max <= 1.0;
  return cert;
}

SpectrumCertificate spectrum_certificate(const CosineProduct& f, const ConvexBody& body) {
  return spectrum_certificate(f, body, certificate_grid(body.dimension()));
}

std::vector<double> slice_zeros(const CosineProduct& f, std::span<const double> base, const UnitVector& theta,
                                double t) {
  check_point(f, base.size());
  check_point(f, theta.coords().size());
  require(t >= 0.0 && std::isfinite(t), "slice half-width must be finite and non-negative");
  std::vector<double> zeros;
  for (const auto& term : f.terms()) {
    const double c = dot(base, term.nu.span());
    const double v = dot(theta.span(), term.nu.span());
    if (std::abs(v) <= kParallelTol) {
      if (std::abs(std::cos(2.0 * kPi * term.a * c)) <= 1e-12)
        throw InfiniteCount("slice lies inside the zero set of a factor");
      continue;
    }
    const auto [k0, k1] = zero_index_range(term.a, c - t * std::abs(v), c + t * std::abs(v));
    for (long long k = k0; k <= k1; ++k) {
      const double s = ((2.0 * static_cast<double>(k) + 1.0) / (4.0 * term.a) - c) / v;
      zeros.push_back(std::clamp(s, -t, t));
    }
  }
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

long long slice_zero_count(const CosineProduct& f, std::span<const double> base, const UnitVector& theta,
                           double t) {
  check_point(f, base.size());
  check_point(f, theta.coords().size());
  require(t >= 0.0 && std::isfinite(t), "slice half-width must be finite and non-negative");
  long long count = 0;
  for (const auto& term : f.terms()) {
    const double c = dot(base, term.nu.span());
    const double v = dot(theta.span(), term.nu.span());
    if (std::abs(v) <= kParallelTol) {
      if (std::abs(std::cos(2.0 * kPi * term.a * c)) <= 1e-12)
        throw InfiniteCount("slice lies inside the zero set of a factor");
      continue;
    }
    const auto [k0, k1] = zero_index_range(term.a, c - t * std::abs(v), c + t * std::abs(v));
    count += std::max(0LL, k1 - k0 + 1);
  }
  return count;
}

JensenSides jensen_functional(const CosineProduct& f, std::span<const double> x, const UnitVector& theta, double T,
                              double h_theta) {
  require(T > 0.0 && std::isfinite(T), "jensen: T must be positive");
  const double fx = evaluate(f, x);
  if (fx == 0.0) throw ValidationError("jensen: f(x) = 0, log(1/|f(x)|) diverges");
  const double minimal = f.spectral_support(theta.span());
  if (h_theta < minimal * (1.0 - 1e-12))
    throw ValidationError("jensen: h_theta = " + std::to_string(h_theta) +
                          " is below the spectral support value " + std::to_string(minimal));
  JensenSides out;
  for (double s : slice_zeros(f, x, theta, T)) {
    // A zero numerically at s = 0 would contradict f(x) != 0; keep it finite.
    const double as = std::max(std::abs(s), std::numeric_limits<double>::min());
    out.lhs += std::log(T / as);
    ++out.zeros;
  }
  out.rhs = 4.0 * T * h_theta + std::log(1.0 / std::abs(fx));
  return out;
}

Estimate ronkin_estimate(const CosineProduct& f, double R, std::size_t n_samples, std::uint64_t seed) {
  require(R > 0.0 && std::isfinite(R), "ronkin: R must be positive");
  require(n_samples >= kMinRonkinSamples, "ronkin: need at least 10^4 samples");
  if (f.empty()) return {};
  const int d = f.dimension();
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
  };
  const std::size_t chunks = (n_samples + kRonkinChunk - 1) / kRonkinChunk;
  auto parts = map_chunks<Acc>(chunks, [&](std::size_t c) {
    Rng rng(derive_seed(seed, {0x80CCULL, c}));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const std::size_t count = std::min(n_samples, (c + 1) * kRonkinChunk) - c * kRonkinChunk;
    Acc acc;
    Point x(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < count;) {
      double r2 = 0.0;
      for (auto& v : x) {
        v = unif(rng);
        r2 += v * v;
      }
      if (r2 > 1.0) continue;
      for (auto& v : x) v *= R;
      const double fx = std::abs(evaluate(f, x));
      if (fx == 0.0) continue;
      const double l = -std::log(fx);
      acc.sum += l;
      acc.sum_sq += l * l;
      ++i;
    }
    return acc;
  });
  Acc total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = total.sum / n;
  const double var = std::max(0.0, (total.sum_sq / n - mean * mean) * n / (n - 1.0));
  const double scale = unit_ball_volume(d) / R;
  return {scale * mean, scale * std::sqrt(var / n), 0.0};
}

}  // namespace msl
