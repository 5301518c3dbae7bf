#include "msl/nodal_density.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "msl/convex_geometry.hpp"
#include "msl/parallel.hpp"
#include "msl/random.hpp"

namespace msl {
namespace {

constexpr double kParallelTol = 1e-15;
constexpr double kIndexSlack = 1e-12;
constexpr double kParallelFamilies = 1e-12;
constexpr int kResampleCap = 100;
constexpr std::size_t kHybridChunk = 4096;

// Plane indices k with k * s in [lo, hi].
std::pair<long long, long long> plane_range(double s, double lo, double hi) {
  const double a = lo / s, b = hi / s;
  const double slack = kIndexSlack * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  return {static_cast<long long>(std::ceil(a - slack)), static_cast<long long>(std::floor(b + slack))};
}

void check_center(const PrunedArrangement& set, std::size_t n) {
  if (!set.empty() && static_cast<int>(n) != set.dimension())
    throw DimensionMismatch("point of dimension " + std::to_string(n) + " for an arrangement in R^" +
                            std::to_string(set.dimension()));
}

// A plane of one family intersected with a ball: foot point and radius.
struct Section {
  std::size_t family;
  Point foot;
  double radius;
};

std::vector<Section> ball_sections(const PrunedArrangement& set, std::span<const double> center, double r) {
  std::vector<Section> out;
  for (std::size_t i = 0; i < set.families().size(); ++i) {
    const auto& fam = set.families()[i];
    const double c = dot(center, fam.nu.span()) - fam.offset;
    const auto [k0, k1] = plane_range(fam.spacing, c - r, c + r);
    for (long long k = k0; k <= k1; ++k) {
      const double delta = static_cast<double>(k) * fam.spacing - c;
      const double rad2 = r * r - delta * delta;
      if (rad2 <= 0.0) continue;
      Point foot(center.begin(), center.end());
      for (std::size_t q = 0; q < foot.size(); ++q) foot[q] += delta * fam.nu[q];
      out.push_back({i, std::move(foot), std::sqrt(rad2)});
    }
  }
  return out;
}

double section_volume(int d, double radius) { return unit_ball_volume(d - 1) * std::pow(radius, d - 1); }

double raw_measure(const PrunedArrangement& set, std::span<const double> center, double r) {
  const int d = set.dimension();
  double total = 0.0;
  for (const auto& fam : set.families()) {
    const double c = dot(center, fam.nu.span()) - fam.offset;
    const auto [k0, k1] = plane_range(fam.spacing, c - r, c + r);
    for (long long k = k0; k <= k1; ++k) {
      const double delta = static_cast<double>(k) * fam.spacing - c;
      const double rad2 = r * r - delta * delta;
      if (rad2 > 0.0) total += section_volume(d, std::sqrt(rad2));
    }
  }
  return total;
}

// Exact surviving length of a chord of a planar arrangement.
double surviving_chord_length(const PrunedArrangement& set, const Section& sec) {
  const auto& fam = set.families()[sec.family];
  const double tx = -fam.nu[1], ty = fam.nu[0];
  const double L = sec.radius;
  const double rho = set.rho();
  std::vector<std::pair<double, double>> cut;
  for (std::size_t j = 0; j < set.families().size(); ++j) {
    if (j == sec.family || set.parallel(sec.family, j)) continue;
    const auto& other = set.families()[j];
    const double w = tx * other.nu[0] + ty * other.nu[1];
    const double u0 = dot(sec.foot, other.nu.span()) - other.offset;
    const double span = L * std::abs(w) + rho;
    const auto [m0, m1] = plane_range(other.spacing, u0 - span, u0 + span);
    for (long long m = m0; m <= m1; ++m) {
      const double level = static_cast<double>(m) * other.spacing;
      double a = (level - rho - u0) / w, b = (level + rho - u0) / w;
      if (a > b) std::swap(a, b);
      a = std::max(a, -L);
      b = std::min(b, L);
      if (a < b) cut.emplace_back(a, b);
    }
  }
  std::sort(cut.begin(), cut.end());
  double removed = 0.0, lo = 0.0, hi = 0.0;
  bool open = false;
  for (const auto& [a, b] : cut) {
    if (!open || a > hi) {
      if (open) removed += hi - lo;
      lo = a;
      hi = b;
      open = true;
    } else {
      hi = std::max(hi, b);
    }
  }
  if (open) removed += hi - lo;
  return std::max(0.0, 2.0 * L - removed);
}

Estimate hybrid_measure(const PrunedArrangement& set, const std::vector<Section>& sections, std::size_t samples,
                        std::uint64_t seed) {
  const int d = set.dimension();
  std::vector<double> cumulative(sections.size());
  double total = 0.0;
  for (std::size_t k = 0; k < sections.size(); ++k) {
    total += section_volume(d, sections[k].radius);
    cumulative[k] = total;
  }
  if (total == 0.0 || samples == 0) return {};
  std::vector<std::vector<Point>> bases(set.families().size());
  for (std::size_t i = 0; i < bases.size(); ++i) bases[i] = orthonormal_complement(set.families()[i].nu);

  // Systematic allocation of points to sections in proportion to their volume.
  Rng offset_rng(derive_seed(seed, {0x5EC7ULL}));
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(offset_rng);
  const std::size_t chunks = (samples + kHybridChunk - 1) / kHybridChunk;
  auto kept = map_chunks<std::size_t>(chunks, [&](std::size_t c) {
    Rng rng(derive_seed(seed, {0x4B1DULL, c}));
    const std::size_t end = std::min(samples, (c + 1) * kHybridChunk);
    std::size_t count = 0;
    Point x(static_cast<std::size_t>(d));
    for (std::size_t j = c * kHybridChunk; j < end; ++j) {
      const double pos = (static_cast<double>(j) + u) / static_cast<double>(samples) * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pos);
      const auto k = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(sections.size()) - 1));
      const auto& sec = sections[k];
      const Point w = uniform_in_ball(d - 1, rng);
      x = sec.foot;
      const auto& basis = bases[sec.family];
      for (std::size_t e = 0; e < basis.size(); ++e)
        for (std::size_t q = 0; q < x.size(); ++q) x[q] += sec.radius * w[e] * basis[e][q];
      if (set.kept(x, sec.family)) ++count;
    }
    return count;
  });
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(std::accumulate(kept.begin(), kept.end(), std::size_t{0})) / n;
  return {total * p, total * std::sqrt(std::max(p * (1.0 - p), 0.25 / n) / n), 0.0};
}

}  // namespace

namespace {

// u minus the nearest multiple of s; ties round away from zero like std::round.
inline double wrap(double u, double s) {
  const double q = u / s;
  return u - s * static_cast<double>(static_cast<long long>(q + (q >= 0.0 ? 0.5 : -0.5)));
}

}  // namespace

double HyperplaneFamily::residual(std::span<const double> x) const { return wrap(dot(x, nu.span()) - offset, spacing); }

std::vector<HyperplaneFamily> nodal_arrangement(const CosineProduct& f) {
  std::vector<HyperplaneFamily> out;
  out.reserve(f.size());
  for (const auto& t : f.terms()) out.push_back({t.nu, 1.0 / (2.0 * t.a), 1.0 / (4.0 * t.a)});
  return out;
}

double analytic_density(const std::vector<HyperplaneFamily>& families) {
  double s = 0.0;
  for (const auto& f : families) s += 1.0 / f.spacing;
  return s;
}

PrunedArrangement::PrunedArrangement(std::vector<HyperplaneFamily> families, double rho)
    : families_(std::move(families)), rho_(rho) {
  require(rho >= 0.0 && std::isfinite(rho), "exclusion radius must be finite and non-negative");
  for (const auto& f : families_) {
    require(f.spacing > 0.0 && std::isfinite(f.spacing), "plane spacing must be positive");
    require(std::isfinite(f.offset), "plane offset must be finite");
    if (f.nu.dimension() != families_.front().nu.dimension())
      throw DimensionMismatch("hyperplane families of different dimensions");
  }
  const std::size_t n = families_.size();
  parallel_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      parallel_[i * n + j] =
          std::abs(dot(families_[i].nu.span(), families_[j].nu.span())) >= 1.0 - kParallelFamilies;
  for (const auto& f : families_) nu_flat_.insert(nu_flat_.end(), f.nu.coords().begin(), f.nu.coords().end());
}

int PrunedArrangement::dimension() const {
  if (families_.empty()) throw ValidationError("empty arrangement has no dimension");
  return families_.front().nu.dimension();
}

double PrunedArrangement::min_spacing() const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& f : families_) s = std::min(s, f.spacing);
  return s;
}

double PrunedArrangement::max_spacing() const {
  double s = 0.0;
  for (const auto& f : families_) s = std::max(s, f.spacing);
  return s;
}

bool PrunedArrangement::kept(std::span<const double> x, std::size_t on_family) const {
  if (rho_ == 0.0) return true;
  const std::size_t n = families_.size();
  const std::size_t d = x.size();
  const char* par = parallel_.data() + on_family * n;
  for (std::size_t j = 0; j < n; ++j) {
    const double* v = nu_flat_.data() + j * d;
    double u = 0.0;
    for (std::size_t k = 0; k < d; ++k) u += x[k] * v[k];
    if (std::abs(wrap(u - families_[j].offset, families_[j].spacing)) <= rho_ && j != on_family && !par[j]) return false;
  }
  return true;
}

PrunedArrangement prune(std::vector<HyperplaneFamily> families, double rho) {
  return PrunedArrangement(std::move(families), rho);
}

long long line_intersection_count(const PrunedArrangement& set, std::span<const double> y, const UnitVector& theta,
                                  double t0, double t1) {
  require(t0 <= t1, "segment must satisfy t0 <= t1");
  if (set.empty()) return 0;
  check_center(set, y.size());
  check_center(set, theta.coords().size());
  long long count = 0;
  Point x(y.size());
  for (std::size_t i = 0; i < set.families().size(); ++i) {
    const auto& fam = set.families()[i];
    const double v = dot(theta.span(), fam.nu.span());
    if (std::abs(v) <= kParallelTol) {
      if (std::abs(fam.residual(y)) <= 1e-12) throw InfiniteCount("line lies inside a plane of the arrangement");
      continue;
    }
    const double c = dot(y, fam.nu.span()) - fam.offset;
    const double a = c + t0 * v, b = c + t1 * v;
    const auto [k0, k1] = plane_range(fam.spacing, std::min(a, b), std::max(a, b));
    if (k1 < k0) continue;
    if (set.raw()) {
      count += k1 - k0 + 1;
      continue;
    }
    for (long long k = k0; k <= k1; ++k) {
      const double t = (static_cast<double>(k) * fam.spacing - c) / v;
      for (std::size_t q = 0; q < x.size(); ++q) x[q] = y[q] + t * theta[q];
      if (set.kept(x, i)) ++count;
    }
  }
  return count;
}

Estimate crofton_estimate(const PrunedArrangement& set, std::span<const double> center, double R, int n_dirs,
                          int n_lines_per_dir, std::uint64_t seed) {
  require(R > 0.0 && std::isfinite(R), "crofton: R must be positive");
  require(n_dirs >= 2 && n_lines_per_dir >= 1, "crofton: need at least 2 directions and 1 line per direction");
  if (set.empty()) return {};
  check_center(set, center.size());
  const int d = set.dimension();

  auto means = map_chunks<double>(static_cast<std::size_t>(n_dirs), [&](std::size_t dir) {
    Rng rng(derive_seed(seed, {0xC0F7ULL, dir}));
    const auto theta = UnitVector::normalized(uniform_on_sphere(d, rng));
    const auto basis = orthonormal_complement(theta);
    double sum = 0.0;
    Point y(static_cast<std::size_t>(d));
    for (int line = 0; line < n_lines_per_dir; ++line) {
      for (int attempt = 0;; ++attempt) {
        if (attempt >= kResampleCap) throw InternalError("crofton: too many degenerate lines");
        const Point w = uniform_in_ball(d - 1, rng);
        double w2 = 0.0;
        std::copy(center.begin(), center.end(), y.begin());
        for (std::size_t e = 0; e < basis.size(); ++e) {
          w2 += w[e] * w[e];
          for (std::size_t q = 0; q < y.size(); ++q) y[q] += R * w[e] * basis[e][q];
        }
        const double half = R * std::sqrt(std::max(0.0, 1.0 - w2));
        try {
          sum += static_cast<double>(line_intersection_count(set, y, theta, -half, half));
          break;
        } catch (const InfiniteCount&) {
        }
      }
    }
    return sum / n_lines_per_dir;
  });

  const double n = static_cast<double>(n_dirs);
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / n;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double factor = 0.5 * d * unit_ball_volume(d) * std::pow(R, d - 1);
  return {factor * mean, factor * std::sqrt(ss / (n - 1.0) / n), 0.0};
}

std::string to_string(MeasureMethod m) {
  switch (m) {
    case MeasureMethod::Analytic: return "analytic";
    case MeasureMethod::Crofton: return "crofton";
    case MeasureMethod::Hybrid: return "hybrid";
  }
  return "unknown";
}

MeasureResult ball_measure(const PrunedArrangement& set, std::span<const double> center, double r,
                           std::uint64_t seed, const MeasureOptions& options) {
  require(r > 0.0 && std::isfinite(r), "ball radius must be positive");
  if (set.empty()) return {};
  check_center(set, center.size());
  const int d = set.dimension();

  MeasureMethod method = MeasureMethod::Analytic;
  if (options.force) {
    method = *options.force;
  } else if (!set.raw()) {
    method = MeasureMethod::Hybrid;
    if (d == 2) {
      const double crossings =
          raw_measure(set, center, r) * analytic_density(set.families());
      if (crossings <= static_cast<double>(options.exact_crossing_budget)) method = MeasureMethod::Analytic;
    }
  }

  switch (method) {
    case MeasureMethod::Crofton:
      return {crofton_estimate(set, center, r, options.crofton_dirs, options.crofton_lines, seed), method};
    case MeasureMethod::Hybrid:
      return {hybrid_measure(set, ball_sections(set, center, r), options.hybrid_samples, seed), method};
    case MeasureMethod::Analytic:
      break;
  }
  if (set.raw()) return {{raw_measure(set, center, r), 0.0, 0.0}, method};
  if (d != 2) throw ValidationError("closed-form pruned measures exist only for d = 2");
  double total = 0.0;
  for (const auto& sec : ball_sections(set, center, r)) total += surviving_chord_length(set, sec);
  return {{total, 0.0, 0.0}, method};
}

std::vector<double> default_radii(const PrunedArrangement& set) {
  require(!set.empty(), "default radii need a non-empty arrangement");
  const double s = set.max_spacing();
  return {2.0 * s, 4.0 * s, 8.0 * s, 16.0 * s};
}

std::vector<Point> default_centers(const PrunedArrangement& set) {
  require(!set.empty(), "default centers need a non-empty arrangement");
  const int d = set.dimension();
  const double s = set.max_spacing();
  const int per_axis = d <= 2 ? 3 : 2;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<Point> centers;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point x(static_cast<std::size_t>(d));
    std::size_t rest = idx;
    for (auto& v : x) {
      const auto k = static_cast<int>(rest % static_cast<std::size_t>(per_axis));
      rest /= static_cast<std::size_t>(per_axis);
      v = s * ((k + 0.5) / per_axis - 0.5);
    }
    centers.push_back(std::move(x));
  }
  return centers;
}

DensityReport lower_density_estimate(const PrunedArrangement& set, const std::vector<double>& radii,
                                     const std::vector<Point>& centers, std::uint64_t seed,
                                     const MeasureOptions& options) {
  require(!radii.empty(), "lower density: empty radius list");
  require(!centers.empty(), "lower density: empty center list");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0.0, "lower density: radii must be positive");
    require(i == 0 || radii[i] > radii[i - 1], "lower density: radii must be increasing");
  }
  DensityReport report;
  report.centers = centers.size();
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    const double volume = set.empty() ? 1.0 : unit_ball_volume(set.dimension()) * std::pow(r, set.dimension());
    DensityRow row;
    row.r = r;
    row.inf_density = std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      if (set.empty()) {
        row = {r, 0.0, 0.0, centers[ci]};
        break;
      }
      const auto m = ball_measure(set, centers[ci], r, derive_seed(seed, {ri, ci}), options);
      report.method = m.method;
      const double density = m.measure.value / volume;
      if (density < row.inf_density) row = {r, density, m.measure.std_error / volume, centers[ci]};
    }
    report.densities.push_back(std::move(row));
  }
  const auto& last = report.densities.back();
  report.lower_density = last.inf_density;
  report.lower_density_std_error = last.std_error;
  std::ostringstream trend;
  trend << "inf over " << centers.size() << " centers at r = " << last.r;
  if (report.densities.size() >= 2) {
    const auto& prev = report.densities[report.densities.size() - 2];
    const double change = prev.inf_density > 0.0 ? (last.inf_density - prev.inf_density) / prev.inf_density : 0.0;
    trend << "; relative change from r = " << prev.r << ": " << change;
  }
  report.trend = trend.str();
  return report;
}

std::vector<Point> adversarial_centers(const PrunedArrangement& set) {
  std::vector<Point> out;
  if (set.empty()) return out;
  const int d = set.dimension();
  const auto nf = std::min<std::size_t>(set.families().size(), 6);
  out.emplace_back(static_cast<std::size_t>(d), 0.0);

  // Nearest point to the origin on the plane of family i closest to it.
  auto plane_foot = [&](std::size_t i) {
    const auto& f = set.families()[i];
    const double level = f.offset + f.spacing * std::round(-f.offset / f.spacing);
    Point x = f.nu.coords();
    for (auto& v : x) v *= level;
    return std::pair{x, level};
  };
  for (std::size_t i = 0; i < nf; ++i) out.push_back(plane_foot(i).first);

  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t j = 0; j < nf; ++j) {
      if (i == j || set.parallel(i, j)) continue;
      const auto& fi = set.families()[i];
      const auto& fj = set.families()[j];
      const double li = plane_foot(i).second, lj = plane_foot(j).second;
      // Crossing point in span(nu_i, nu_j): x = alpha nu_i + beta nu_j.
      const double g = dot(fi.nu.span(), fj.nu.span());
      const double det = 1.0 - g * g;
      const double alpha = (li - g * lj) / det, beta = (lj - g * li) / det;
      Point crossing(static_cast<std::size_t>(d));
      for (std::size_t q = 0; q < crossing.size(); ++q) crossing[q] = alpha * fi.nu[q] + beta * fj.nu[q];
      if (i < j) out.push_back(crossing);
      // Walk inside plane i away from plane j: the in-plane direction is the
      // component of nu_j orthogonal to nu_i; distance to plane j grows at rate sqrt(det).
      Point t(static_cast<std::size_t>(d));
      for (std::size_t q = 0; q < t.size(); ++q) t[q] = (fj.nu[q] - g * fi.nu[q]) / std::sqrt(det);
      for (double target : {0.5 * set.rho(), set.rho() * (1.0 + 1e-9), 2.0 * set.rho()}) {
        if (target <= 0.0) continue;
        Point x = crossing;
        for (std::size_t q = 0; q < x.size(); ++q) x[q] += target / std::sqrt(det) * t[q];
        out.push_back(std::move(x));
      }
    }
  }
  return out;
}

std::vector<PhiRow> phi_regularity_profile(const PrunedArrangement& set, const std::vector<double>& r_list,
                                           const std::vector<Point>& centers, std::uint64_t seed,
                                           const MeasureOptions& options) {
  require(!r_list.empty(), "phi profile: empty radius list");
  for (double r : r_list) require(r > 0.0 && r < 1.0, "phi profile: radii must lie in (0, 1)");
  std::vector<Point> all = centers;
  for (auto& c : adversarial_centers(set)) all.push_back(std::move(c));
  std::vector<PhiRow> rows;
  for (std::size_t ri = 0; ri < r_list.size(); ++ri) {
    const double r = r_list[ri];
    PhiRow row{r, 0.0, 0.0, {}};
    if (set.empty()) {
      rows.push_back(row);
      continue;
    }
    const int d = set.dimension();
    const double disk = unit_ball_volume(d - 1) * std::pow(r, d - 1);
    for (std::size_t ci = 0; ci < all.size(); ++ci) {
      const auto m = ball_measure(set, all[ci], r, derive_seed(seed, {0xF1ULL, ri, ci}), options);
      const double ratio = m.measure.value / disk;
      if (row.argmax.empty() || ratio > row.sup_ratio) row = {r, ratio, m.measure.std_error / disk, all[ci]};
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace msl
