#include "msl/sampling_experiments.hpp"

#include <algorithm>

#include "msl/parallel.hpp"
#include "msl/random.hpp"

namespace msl {
namespace {

constexpr double kGoldenAngle = 2.399963229728653;  // pi (3 - sqrt 5)
constexpr int kBisectionSteps = 200;

double sinc(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - (kPi * t) * (kPi * t) / 6.0;
  return std::sin(kPi * t) / (kPi * t);
}

double power(double v, double p) {
  v = std::abs(v);
  if (p == 1.0) return v;
  if (p == 2.0) return v * v;
  return std::pow(v, p);
}

// Vertices of the box with the given half-widths, up to the sign of the first axis.
double box_vertex_gauge(const ConvexBody& body, const std::vector<double>& half) {
  const std::size_t d = half.size();
  double worst = 0.0;
  Point v(d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << (d - 1)); ++mask) {
    v[0] = half[0];
    for (std::size_t i = 1; i < d; ++i) v[i] = ((mask >> (i - 1)) & 1U) ? -half[i] : half[i];
    worst = std::max(worst, gauge(body, v));
  }
  return worst;
}

struct Contribution {
  double value = 0.0;  // sum of |f|^p * weight, or max |f| for p = inf
  std::size_t points = 0;
};

void merge(Contribution& acc, const Contribution& c, double p) {
  acc.value = std::isinf(p) ? std::max(acc.value, c.value) : acc.value + c.value;
  acc.points += c.points;
}

// Quadrature of |f|^p over the planes of one family inside [-L, L]^d.
Contribution family_contribution(const TestFunction& f, const PrunedArrangement& gamma, std::size_t i, double p,
                                 double L, double h) {
  const auto& fam = gamma.families()[i];
  const int d = f.dimension();
  const auto ud = static_cast<std::size_t>(d);
  double reach = 0.0;
  for (double v : fam.nu.span()) reach += std::abs(v) * L;
  const double lo = -reach - fam.offset, hi = reach - fam.offset;
  const auto k0 = static_cast<long long>(std::ceil(lo / fam.spacing));
  const auto k1 = static_cast<long long>(std::floor(hi / fam.spacing));
  if (k1 < k0) return {};
  const auto basis = orthonormal_complement(fam.nu);
  const auto planes = static_cast<std::size_t>(k1 - k0 + 1);

  auto parts = map_chunks<Contribution>(planes, [&](std::size_t idx) {
    const double level = fam.offset + static_cast<double>(k0 + static_cast<long long>(idx)) * fam.spacing;
    Point foot = fam.nu.coords();
    for (auto& v : foot) v *= level;
    Contribution c;
    Point x(ud);
    auto visit = [&](double weight) {
      for (double v : x)
        if (std::abs(v) > L) return;
      if (!gamma.kept(x, i)) return;
      const double fx = f.profile(x);
      if (std::isinf(p))
        c.value = std::max(c.value, std::abs(fx));
      else
        c.value += power(fx, p) * weight;
      ++c.points;
    };
    if (d == 2) {
      const auto& e = basis[0];
      double ulo = -kInfinity, uhi = kInfinity;
      for (std::size_t q = 0; q < 2; ++q) {
        if (std::abs(e[q]) < 1e-15) {
          if (std::abs(foot[q]) > L) return c;
          continue;
        }
        double a = (-L - foot[q]) / e[q], b = (L - foot[q]) / e[q];
        if (a > b) std::swap(a, b);
        ulo = std::max(ulo, a);
        uhi = std::min(uhi, b);
      }
      if (!(uhi > ulo)) return c;
      const auto n = static_cast<std::size_t>(std::ceil((uhi - ulo) / h));
      const double hu = (uhi - ulo) / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double u = ulo + (static_cast<double>(k) + 0.5) * hu;
        x[0] = foot[0] + u * e[0];
        x[1] = foot[1] + u * e[1];
        // Clip roundoff at the segment ends.
        x[0] = std::clamp(x[0], -L, L);
        x[1] = std::clamp(x[1], -L, L);
        visit(hu);
      }
      return c;
    }
    const double radius = std::sqrt(std::max(0.0, d * L * L - level * level));
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * radius / h));
    if (n == 0) return c;
    const double weight = std::pow(h, d - 1);
    std::vector<std::size_t> index(ud - 1, 0);
    while (true) {
      x = foot;
      for (std::size_t e = 0; e + 1 < ud; ++e) {
        const double u = -0.5 * static_cast<double>(n) * h + (static_cast<double>(index[e]) + 0.5) * h;
        for (std::size_t q = 0; q < ud; ++q) x[q] += u * basis[e][q];
      }
      visit(weight);
      std::size_t e = 0;
      while (e + 1 < ud && ++index[e] == n) index[e++] = 0;
      if (e + 1 == ud) break;
    }
    return c;
  });
  Contribution total;
  for (const auto& c : parts) merge(total, c, p);
  return total;
}

struct Ambient {
  double value = 0.0;  // integral of |f|^p over the box, or max |f|
  double tail = 0.0;
  double h = 0.0;
};

Ambient ambient_quadrature(const TestFunction& f, double p, double L, double h) {
  const auto d = static_cast<std::size_t>(f.dimension());
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * L / h)));
  const double he = 2.0 * L / static_cast<double>(n);
  std::vector<double> axis(d, 0.0), tails(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double v = f.axis_factor(i, -L + (static_cast<double>(k) + 0.5) * he);
      axis[i] = std::isinf(p) ? std::max(axis[i], std::abs(v)) : axis[i] + power(v, p) * he;
    }
    // Each factor peaks at its shift; a midpoint grid can miss it.
    if (std::isinf(p) && std::abs(f.shift[i]) <= L) axis[i] = std::max(axis[i], std::abs(f.axis_factor(i, f.shift[i])));
    // |factor| <= (pi b |x - c|)^{-2} away from the centre.
    const double gap = L - std::abs(f.shift[i]);
    const double pb = kPi * f.bandwidth[i];
    if (gap <= 0.0)
      tails[i] = kInfinity;
    else if (std::isinf(p))
      tails[i] = std::pow(pb * gap, -2.0);
    else
      tails[i] = 2.0 * std::pow(pb, -2.0 * p) * std::pow(gap, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
  }
  Ambient out;
  out.h = he;
  out.value = 1.0;
  for (double v : axis) out.value *= v;
  if (std::isinf(p)) {
    for (double t : tails) out.tail = std::max(out.tail, t);
    out.tail /= out.value;
    return out;
  }
  double outside = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double term = tails[i];
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) term *= axis[j] + tails[j];
    outside += term;
  }
  out.tail = outside / out.value;
  return out;
}

void check_ratio_inputs(const TestFunction& f, const PrunedArrangement& gamma, double p, double L, double h) {
  require(p >= 1.0, "sampling ratio: p must lie in [1, inf]");
  require(L > 0.0 && std::isfinite(L), "sampling ratio: box half-width must be positive");
  require(h > 0.0 && std::isfinite(h), "sampling ratio: resolution must be positive");
  if (!gamma.empty() && gamma.dimension() != f.dimension())
    throw DimensionMismatch("sampling ratio: trajectory and test function dimensions differ");
  const double limit = 1.0 / (8.0 * f.max_frequency());
  if (h > limit * (1.0 + 1e-12))
    throw ValidationError("resolution check failed: h = " + std::to_string(h) + " exceeds 1/(8 f_max) = " +
                          std::to_string(limit));
}

double norm_from(double value, double p) { return std::isinf(p) ? value : std::pow(value, 1.0 / p); }

}  // namespace

std::vector<double> TestFunction::spectral_half_widths() const {
  std::vector<double> out(bandwidth.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bandwidth[i] + (modulation.empty() ? 0.0 : modulation[i]);
  return out;
}

double TestFunction::max_frequency() const { return norm(spectral_half_widths()); }

double TestFunction::min_bandwidth() const { return *std::min_element(bandwidth.begin(), bandwidth.end()); }

double TestFunction::axis_factor(std::size_t i, double x) const {
  const double t = x - shift[i];
  const double s = sinc(bandwidth[i] * t);
  double v = s * s;
  if (!modulation.empty() && modulation[i] != 0.0) v *= std::cos(2.0 * kPi * modulation[i] * t);
  return v;
}

double TestFunction::profile(std::span<const double> x) const {
  if (x.size() != bandwidth.size()) throw DimensionMismatch("test function evaluated at a point of wrong dimension");
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) v *= axis_factor(i, x[i]);
  return v;
}

double spectral_gauge(const TestFunction& f, const ConvexBody& body) {
  if (f.dimension() != body.dimension()) throw DimensionMismatch("test function and body dimensions differ");
  return box_vertex_gauge(body, f.spectral_half_widths());
}

TestFunction make_test_function(const ConvexBody& body, double margin, Point shift) {
  require(margin > 0.0 && margin < 1.0, "test function: margin must lie in (0, 1)");
  const auto d = static_cast<std::size_t>(body.dimension());
  if (shift.empty()) shift.assign(d, 0.0);
  if (shift.size() != d) throw DimensionMismatch("test function: shift has wrong dimension");
  const double unit = box_vertex_gauge(body, std::vector<double>(d, 1.0));
  if (!(unit > 0.0) || !std::isfinite(unit)) throw BodyDefinitionError("test function: no positive bandwidth fits the body");
  TestFunction f;
  f.id = "sinc2";
  f.bandwidth.assign(d, (1.0 - margin) / unit);
  f.modulation.assign(d, 0.0);
  f.shift = std::move(shift);
  return f;
}

TestFunction make_modulated_test_function(const ConvexBody& body, double margin, int axis, double m, Point shift) {
  require(margin > 0.0 && margin < 1.0, "test function: margin must lie in (0, 1)");
  require(m >= 0.0 && std::isfinite(m), "test function: modulation must be non-negative");
  const auto d = static_cast<std::size_t>(body.dimension());
  require(axis >= 0 && static_cast<std::size_t>(axis) < d, "test function: modulation axis out of range");
  if (shift.empty()) shift.assign(d, 0.0);
  if (shift.size() != d) throw DimensionMismatch("test function: shift has wrong dimension");
  const double goal = 1.0 - margin;
  auto widths = [&](double b) {
    std::vector<double> w(d, b);
    w[static_cast<std::size_t>(axis)] += m;
    return w;
  };
  if (box_vertex_gauge(body, widths(0.0)) >= goal)
    throw ValidationError("test function: modulation " + std::to_string(m) + " leaves no room for a bandwidth");
  double lo = 0.0, hi = goal / box_vertex_gauge(body, std::vector<double>(d, 1.0));
  for (int it = 0; it < kBisectionSteps && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (box_vertex_gauge(body, widths(mid)) <= goal ? lo : hi) = mid;
  }
  TestFunction f;
  f.id = "sinc2-mod";
  f.bandwidth.assign(d, lo);
  f.modulation.assign(d, 0.0);
  f.modulation[static_cast<std::size_t>(axis)] = m;
  f.shift = std::move(shift);
  return f;
}

std::vector<TestFunction> make_test_bank(const ConvexBody& body, double margin, const std::vector<Point>& shifts) {
  std::vector<TestFunction> bank;
  bank.push_back(make_test_function(body, margin));
  bank.back().id = "centered";
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    bank.push_back(make_test_function(body, margin, shifts[i]));
    bank.back().id = "shift-" + std::to_string(i);
  }
  return bank;
}

RatioReport sampling_ratio(const TestFunction& f, const PrunedArrangement& gamma, double p, double box, double h) {
  check_ratio_inputs(f, gamma, p, box, h);
  RatioReport rep;
  rep.p = p;
  rep.box = box;
  const Ambient amb = ambient_quadrature(f, p, box, h);
  rep.resolution = amb.h;
  rep.tail_bound = amb.tail;
  Contribution traj;
  for (std::size_t i = 0; i < gamma.families().size(); ++i)
    merge(traj, family_contribution(f, gamma, i, p, box, amb.h), p);
  rep.trajectory_points = traj.points;
  const double scale = std::abs(f.amplitude);
  const double ambient = norm_from(amb.value, p), trajectory = norm_from(traj.value, p);
  rep.ambient_norm = scale * ambient;
  rep.trajectory_norm = scale * trajectory;
  rep.ratio = trajectory > 0.0 ? ambient / trajectory : kInfinity;
  return rep;
}

RatioReport sampling_ratio(const TestFunction& f, const PrunedArrangement& gamma, double p) {
  return sampling_ratio(f, gamma, p, kDefaultBoxScale / f.min_bandwidth(), 1.0 / (8.0 * f.max_frequency()));
}

HyperplaneFamily sweep_family(int dimension, std::size_t j, double spacing, std::uint64_t seed) {
  require(dimension >= 2, "sweep: dimension must be >= 2");
  require(spacing > 0.0, "sweep: spacing must be positive");
  Rng rng(derive_seed(seed, {0xFA11ULL, j}));
  const double offset = std::uniform_real_distribution<double>(0.0, spacing)(rng);
  if (j == 0) return {UnitVector::axis(dimension, 0), spacing, offset};
  if (dimension == 2) return {UnitVector::from_angle(static_cast<double>(j) * kGoldenAngle), spacing, offset};
  return {UnitVector::normalized(uniform_on_sphere(dimension, rng)), spacing, offset};
}

std::vector<TestFunction> sweep_bank(const ConvexBody& body, double spacing, std::uint64_t seed, double margin) {
  const int d = body.dimension();
  const auto first = sweep_family(d, 0, spacing, seed);
  Point mid(static_cast<std::size_t>(d), 0.0);
  mid[0] = first.offset + 0.5 * spacing;
  mid[0] -= spacing * std::round(mid[0] / spacing);  // stay near the origin

  std::vector<TestFunction> bank;
  bank.push_back(make_test_function(body, margin));
  bank.back().id = "centered";
  bank.push_back(make_test_function(body, margin, mid));
  bank.back().id = "between-planes";
  try {
    bank.push_back(make_modulated_test_function(body, margin, 0, 0.5 / spacing, mid));
    bank.back().id = "modulated-between";
  } catch (const ValidationError&) {
    // The modulation does not fit inside the body at this spacing.
  }
  return bank;
}

SweepResult density_sweep(const ConvexBody& body, double p, const std::vector<double>& density_grid,
                          const std::vector<TestFunction>& f_bank, const std::vector<std::uint64_t>& seeds,
                          const SweepOptions& options) {
  require(!density_grid.empty(), "sweep: empty density grid");
  require(!seeds.empty(), "sweep: at least one seed is required");
  require(p >= 1.0, "sweep: p must lie in [1, inf]");
  for (double D : density_grid) require(D > 0.0 && std::isfinite(D), "sweep: densities must be positive");
  const int d = body.dimension();
  SweepResult result;
  result.threshold = sharp_constant(d) * mean_width(body, SphereQuadrature::standard(d)).value;
  const double dmin = *std::min_element(density_grid.begin(), density_grid.end());
  result.spacing = 1.0 / dmin;
  std::vector<std::size_t> counts;
  std::size_t most = 0;
  for (double D : density_grid) {
    counts.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(D / dmin))));
    most = std::max(most, counts.back());
  }

  for (std::uint64_t seed : seeds) {
    const auto bank = f_bank.empty() ? sweep_bank(body, result.spacing, seed, options.margin) : f_bank;
    std::vector<HyperplaneFamily> families;
    for (std::size_t j = 0; j < most; ++j) families.push_back(sweep_family(d, j, result.spacing, seed));
    const PrunedArrangement all(families, 0.0);

    // ratio[f][k] for density k.
    std::vector<std::vector<double>> ratios(bank.size(), std::vector<double>(density_grid.size()));
    for (std::size_t fi = 0; fi < bank.size(); ++fi) {
      const auto& f = bank[fi];
      if (f.dimension() != d) throw DimensionMismatch("sweep: test function dimension differs from the body");
      const double L = options.box_scale / f.min_bandwidth();
      const double h = 1.0 / (options.points_per_period * f.max_frequency());
      if (options.rho == 0.0) {
        // Nested raw arrangements: per-family contributions are shared.
        check_ratio_inputs(f, all, p, L, h);
        const Ambient amb = ambient_quadrature(f, p, L, h);
        std::vector<Contribution> per_family;
        for (std::size_t j = 0; j < most; ++j) per_family.push_back(family_contribution(f, all, j, p, L, amb.h));
        for (std::size_t k = 0; k < density_grid.size(); ++k) {
          Contribution traj;
          for (std::size_t j = 0; j < counts[k]; ++j) merge(traj, per_family[j], p);
          const double t = norm_from(traj.value, p);
          ratios[fi][k] = t > 0.0 ? norm_from(amb.value, p) / t : kInfinity;
        }
      } else {
        for (std::size_t k = 0; k < density_grid.size(); ++k) {
          std::vector<HyperplaneFamily> prefix(families.begin(),
                                               families.begin() + static_cast<std::ptrdiff_t>(counts[k]));
          ratios[fi][k] = sampling_ratio(f, PrunedArrangement(prefix, options.rho), p, L, h).ratio;
        }
      }
    }
    for (std::size_t k = 0; k < density_grid.size(); ++k) {
      SweepRow row;
      row.density = density_grid[k];
      row.families = counts[k];
      row.analytic_density = static_cast<double>(counts[k]) * dmin;
      row.p = p;
      row.seed = seed;
      row.max_ratio = -1.0;
      for (std::size_t fi = 0; fi < bank.size(); ++fi) {
        if (ratios[fi][k] > row.max_ratio) {
          row.max_ratio = ratios[fi][k];
          row.f_id = bank[fi].id;
        }
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

}  // namespace msl
