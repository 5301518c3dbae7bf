#include "msl/sharpness.hpp"

#include <algorithm>
#include <numeric>

#include "msl/parallel.hpp"
#include "msl/random.hpp"

namespace msl {
namespace {

constexpr std::size_t kBootstrapTopNodes = 16;
constexpr std::size_t kMuNodeChunk = 64;

std::vector<double> evaluate_weights(const WeightFunction& g, const std::vector<BoundarySample>& samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const double v = g(s);
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("weight function is negative or not finite at a boundary sample");
    out.push_back(v);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

WeightFunction WeightFunction::one() {
  return {[](const BoundarySample&) { return 1.0; }, "one", 1.0};
}

double WeightFunction::operator()(const BoundarySample& s) const { return g ? g(s) : 1.0; }

std::vector<UnitVector> mu_polar_grid(int dimension) {
  require(dimension >= 2, "mu grid: dimension must be >= 2");
  if (dimension == 2) return SphereQuadrature::circle(1024).nodes();
  if (dimension == 3) return SphereQuadrature::sphere(24, 48).nodes();
  return SphereQuadrature::monte_carlo(dimension, 2048).nodes();
}

MuEstimate mu_functional(const ConvexBody& body, const WeightFunction& g, std::size_t M,
                         const std::vector<UnitVector>& polar_grid, std::uint64_t seed) {
  require(M >= kMinMuSamples, "mu: need at least 1000 boundary samples");
  require(!polar_grid.empty(), "mu: empty polar grid");
  const int d = body.dimension();
  const auto samples = sample_boundary(body, M, derive_seed(seed, {0x3A3AULL}));
  const auto weights = evaluate_weights(g, samples);

  const std::size_t J = polar_grid.size();
  std::vector<Point> y(J);
  for (std::size_t j = 0; j < J; ++j) {
    if (polar_grid[j].dimension() != d) throw DimensionMismatch("mu: polar grid dimension differs from the body");
    y[j] = polar_grid[j].coords();
    const double h = support_function(body, polar_grid[j]);
    for (auto& v : y[j]) v /= h;
  }
  auto value_at = [&](std::size_t m, std::size_t j) {
    return std::abs(dot(samples[m].normal.span(), y[j])) * weights[m];
  };

  // Per-node sums over the even (A) and odd (B) halves of the sample.
  struct NodeSums {
    double a = 0.0, b = 0.0;
  };
  std::vector<NodeSums> sums(J);
  const std::size_t chunks = (J + kMuNodeChunk - 1) / kMuNodeChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(J, (c + 1) * kMuNodeChunk);
    for (std::size_t j = c * kMuNodeChunk; j < end; ++j) {
      for (std::size_t m = 0; m + 1 < M; m += 2) {
        sums[j].a += value_at(m, j);
        sums[j].b += value_at(m + 1, j);
      }
      if (M % 2 == 1) sums[j].a += value_at(M - 1, j);
    }
  });
  const double nB = static_cast<double>(M / 2);

  MuEstimate out;
  out.samples = M;
  out.nodes = J;
  out.g_mean = mean_of(weights);
  std::vector<std::size_t> order(J);
  std::iota(order.begin(), order.end(), 0);
  auto full = [&](std::size_t j) { return (sums[j].a + sums[j].b) / static_cast<double>(M); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return full(i) > full(j); });
  out.value = full(order.front());
  out.argmax = y[order.front()];

  std::size_t best_a = 0;
  for (std::size_t j = 1; j < J; ++j)
    if (sums[j].a > sums[best_a].a) best_a = j;
  out.holdout = sums[best_a].b / nB;

  // Bootstrap: max over the top nodes for the plug-in value; the mean at the
  // selected node over the B half for the holdout value.
  const std::size_t top = std::min(kBootstrapTopNodes, J);
  std::vector<double> table(M * top);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t t = 0; t < top; ++t) table[m * top + t] = value_at(m, order[t]);
  std::vector<double> holdout_values;
  holdout_values.reserve(static_cast<std::size_t>(nB));
  for (std::size_t m = 1; m < M; m += 2) holdout_values.push_back(value_at(m, best_a));

  Rng rng(derive_seed(seed, {0xB007ULL}));
  std::uniform_int_distribution<std::size_t> pick_m(0, M - 1), pick_b(0, holdout_values.size() - 1);
  std::vector<double> boot_max, boot_hold;
  std::vector<double> acc(top);
  std::vector<std::uint32_t> counts(M);
  for (int b = 0; b < kBootstrapResamples; ++b) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0U);
    for (std::size_t i = 0; i < M; ++i) ++counts[pick_m(rng)];
    for (std::size_t m = 0; m < M; ++m) {
      if (counts[m] == 0) continue;
      const double c = counts[m];
      for (std::size_t t = 0; t < top; ++t) acc[t] += c * table[m * top + t];
    }
    boot_max.push_back(*std::max_element(acc.begin(), acc.end()) / static_cast<double>(M));
    double s = 0.0;
    for (std::size_t i = 0; i < holdout_values.size(); ++i) s += holdout_values[pick_b(rng)];
    boot_hold.push_back(s / static_cast<double>(holdout_values.size()));
  }
  auto sd = [](const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  out.std_error = sd(boot_max);
  out.holdout_std_error = sd(boot_hold);
  return out;
}

QuarterTurnMu mu_2d_quarter_turn(const ConvexBody& body, int grid_nodes) {
  if (body.dimension() != 2) throw ValidationError("mu_2d_quarter_turn requires d = 2");
  QuarterTurnMu out;
  out.perimeter = boundary_table_2d(body, grid_nodes).perimeter();
  const auto grid = SphereQuadrature::circle(grid_nodes);
  for (const auto& theta : grid.nodes()) {
    const auto perp = UnitVector::normalized({-theta[1], theta[0]});
    out.sup_factor = std::max(out.sup_factor, support_function(body, perp) / support_function(body, theta));
  }
  out.mu = 4.0 * out.sup_factor / out.perimeter;
  return out;
}

double default_rho(double min_spacing) { return std::min(0.01, min_spacing / 10.0); }

SharpnessRun construct_example(const ConvexBody& body, const WeightFunction& g, std::size_t N, double delta,
                               std::optional<double> rho, std::uint64_t seed, const SharpnessOptions& options) {
  require(N >= 1, "construct: N must be at least 1");
  require(delta > 0.0 && std::isfinite(delta), "construct: delta must be positive");
  require(!rho || (*rho >= 0.0 && std::isfinite(*rho)), "construct: rho must be non-negative");
  require(options.max_retries >= 0, "construct: retry cap must be non-negative");
  const int d = body.dimension();
  const std::size_t M = options.mu_samples.value_or(std::max<std::size_t>(100 * N, 100000));
  const auto polar = options.polar_grid.empty() ? mu_polar_grid(d) : options.polar_grid;
  const auto cert_grid = options.certificate_grid.empty() ? certificate_grid(d) : options.certificate_grid;

  SharpnessRun run;
  run.body = body.name();
  run.dimension = d;
  run.N = N;
  run.delta = delta;
  run.seed = seed;
  double worst_gauge = 0.0;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const std::uint64_t s = derive_seed(seed, {0xC0257ULL, static_cast<std::uint64_t>(attempt)});
    run.attempt_seed = s;
    run.retries = attempt;
    run.samples = sample_boundary(body, N, derive_seed(s, {1}));
    run.g_values = evaluate_weights(g, run.samples);
    run.g_mean = mean_of(run.g_values);
    run.mu = mu_functional(body, g, M, polar, derive_seed(s, {2}));
    run.alpha = 1.0 / (run.mu.value + 3.0 * delta);

    CosineProduct f(d);
    for (std::size_t n = 0; n < N; ++n)
      if (run.g_values[n] > 0.0) f.add(run.alpha * run.g_values[n] / static_cast<double>(N), run.samples[n].normal);
    run.f = f;
    run.certificate = spectrum_certificate(run.f, body, cert_grid);
    worst_gauge = std::max(worst_gauge, run.certificate.gauge_max);
    if (run.certificate.pass) break;
    if (attempt == options.max_retries)
      throw CertificateFailure("spectrum certificate failed after " + std::to_string(attempt + 1) +
                               " attempts (largest gauge " + std::to_string(worst_gauge) + ")");
  }

  auto families = nodal_arrangement(run.f);
  if (families.empty()) {
    run.rho = rho.value_or(0.0);
    run.arrangement = PrunedArrangement({}, run.rho);
    run.target = -2.0 * delta;
    run.margin = -run.target;
    return run;
  }
  PrunedArrangement raw(families, 0.0);
  run.rho = rho.value_or(default_rho(raw.min_spacing()));
  run.arrangement = PrunedArrangement(std::move(families), run.rho);
  run.analytic_density = analytic_density(run.arrangement.families());

  const auto radii = options.radii.empty() ? default_radii(raw) : options.radii;
  const auto centers = options.centers.empty() ? default_centers(raw) : options.centers;
  run.raw_lower_density = lower_density_estimate(raw, radii, centers, derive_seed(run.attempt_seed, {3}),
                                                 options.measure)
                              .lower_density;
  run.density = lower_density_estimate(run.arrangement, radii, centers, derive_seed(run.attempt_seed, {4}),
                                       options.measure);
  run.achieved_density = run.density.lower_density;
  run.achieved_std_error = run.density.lower_density_std_error;
  run.pruning_loss = run.raw_lower_density - run.achieved_density;
  run.target = 2.0 * run.g_mean / run.mu.value - 2.0 * delta;
  run.margin = run.achieved_density - run.target;
  return run;
}

BallSharpnessReport verify_ball_sharpness(int d, double delta, std::size_t N, std::uint64_t seed,
                                          std::optional<double> rho, const SharpnessOptions& options) {
  require(d >= 2 && d <= 4, "verify-ball supports d in {2, 3, 4}");
  BallSharpnessReport rep;
  rep.run = construct_example(ConvexBody::ball(d), WeightFunction::one(), N, delta, rho, seed, options);
  rep.ceiling = sharp_constant(d) * 2.0;
  rep.target = rep.ceiling - 2.0 * delta;
  rep.achieved = rep.run.achieved_density;
  rep.std_error = rep.run.achieved_std_error;
  rep.margin = rep.achieved - rep.target;
  rep.meets_target = rep.achieved >= rep.target;
  rep.below_ceiling = rep.achieved <= rep.ceiling + 3.0 * rep.std_error;
  return rep;
}

PlanarSharpnessReport verify_2d_sharpness(const ConvexBody& body, double delta, std::size_t N, std::uint64_t seed,
                                          std::optional<double> rho, const SharpnessOptions& options) {
  if (body.dimension() != 2) throw ValidationError("verify-2d requires d = 2");
  if (!body.quarter_turn_symmetric())
    throw UnsupportedBody(body.name() + " is not flagged quarter-turn symmetric");
  PlanarSharpnessReport rep;
  rep.mean_width = mean_width(body, SphereQuadrature::circle(kBoundaryTableNodes)).value;
  rep.target = (kPi / 2.0 - delta) * rep.mean_width;
  rep.mu_qt = mu_2d_quarter_turn(body);
  rep.two_over_mu = 2.0 / rep.mu_qt.mu;
  rep.pi_half_width = kPi / 2.0 * rep.mean_width;
  rep.relative_gap = std::abs(rep.two_over_mu - rep.pi_half_width) / rep.pi_half_width;
  rep.run = construct_example(body, WeightFunction::one(), N, delta, rho, seed, options);
  rep.achieved = rep.run.achieved_density;
  rep.std_error = rep.run.achieved_std_error;
  rep.margin = rep.achieved - rep.target;
  rep.meets_target = rep.achieved >= rep.target;
  return rep;
}

Estimate density_bound_margin(const CosineProduct& f, const ConvexBody& body, const SphereQuadrature& quad) {
  const auto cert = spectrum_certificate(f, body);
  if (!cert.pass)
    throw CertificateFailure("spectrum not certified inside " + body.name() + " (gauge " +
                             std::to_string(cert.gauge_max) + ")");
  const Estimate w = mean_width(body, quad);
  const double a = sharp_constant(body.dimension());
  return {a * w.value - analytic_density(nodal_arrangement(f)), a * w.std_error, 0.0};
}

}  // namespace msl
