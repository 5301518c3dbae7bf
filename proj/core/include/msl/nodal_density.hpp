#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msl/common.hpp"
#include "msl/pw_functions.hpp"
#include "msl/sphere_quadrature.hpp"

namespace msl {

// Planes {x : <x, nu> = offset + k * spacing}, k in Z.
struct HyperplaneFamily {
  UnitVector nu;
  double spacing;
  double offset;

  // Signed distance from <x, nu> to the nearest plane of the family.
  double residual(std::span<const double> x) const;
};

std::vector<HyperplaneFamily> nodal_arrangement(const CosineProduct& f);

// Sum_n 1 / s_n.
double analytic_density(const std::vector<HyperplaneFamily>& families);

// Union of the families with the rho-neighbourhoods of pairwise plane
// intersections removed. A point on a plane of family i survives iff its
// distance to the nearest plane of every other non-parallel family exceeds rho.
// rho = 0 is the raw arrangement.
class PrunedArrangement {
 public:
  PrunedArrangement() = default;
  PrunedArrangement(std::vector<HyperplaneFamily> families, double rho = 0.0);

  int dimension() const;
  const std::vector<HyperplaneFamily>& families() const { return families_; }
  double rho() const { return rho_; }
  bool raw() const { return rho_ == 0.0; }
  bool empty() const { return families_.empty(); }
  double min_spacing() const;
  double max_spacing() const;
  // rho beyond half the minimum spacing: pruning is no longer small.
  bool aggressive() const { return !families_.empty() && rho_ > 0.5 * min_spacing(); }

  // Pruning predicate for a point lying on a plane of family `on_family`.
  bool kept(std::span<const double> x, std::size_t on_family) const;
  bool parallel(std::size_t i, std::size_t j) const { return parallel_[i * families_.size() + j]; }

 private:
  std::vector<HyperplaneFamily> families_;
  double rho_ = 0.0;
  std::vector<char> parallel_;
  // Directions stored row-major, for the pruning predicate.
  std::vector<double> nu_flat_;
};

PrunedArrangement prune(std::vector<HyperplaneFamily> families, double rho);

// Number of t in [t0, t1] with y + t theta on a (surviving part of a) plane.
long long line_intersection_count(const PrunedArrangement& set, std::span<const double> y, const UnitVector& theta,
                                  double t0, double t1);

inline constexpr int kDefaultCroftonDirections = 256;
inline constexpr int kDefaultCroftonLinesPerDirection = 8;

// Unbiased Monte Carlo estimate of H^{d-1}(set ∩ B(center, R)) from the
// Crofton formula. The standard error treats directions as independent units.
Estimate crofton_estimate(const PrunedArrangement& set, std::span<const double> center, double R,
                          int n_dirs = kDefaultCroftonDirections,
                          int n_lines_per_dir = kDefaultCroftonLinesPerDirection, std::uint64_t seed = 1);

enum class MeasureMethod { Analytic, Crofton, Hybrid };
std::string to_string(MeasureMethod m);

struct MeasureOptions {
  // Points on plane sections used by the hybrid estimator.
  std::size_t hybrid_samples = 40000;
  // d = 2 pruned measures switch from exact interval unions to the hybrid
  // estimator above this many plane crossings.
  std::size_t exact_crossing_budget = 4000000;
  int crofton_dirs = kDefaultCroftonDirections;
  int crofton_lines = kDefaultCroftonLinesPerDirection;
  std::optional<MeasureMethod> force;
};

struct MeasureResult {
  Estimate measure;
  MeasureMethod method = MeasureMethod::Analytic;
};

// H^{d-1}(set ∩ B(center, r)). Raw arrangements use closed-form section
// volumes; pruned planar arrangements use exact interval unions along each
// chord; otherwise plane sections are sampled and tested with the predicate.
MeasureResult ball_measure(const PrunedArrangement& set, std::span<const double> center, double r,
                           std::uint64_t seed = 1, const MeasureOptions& options = {});

struct DensityRow {
  double r = 0.0;
  double inf_density = 0.0;
  double std_error = 0.0;
  Point argmin;
};

struct PhiRow {
  double r = 0.0;
  double sup_ratio = 0.0;
  double std_error = 0.0;
  Point argmax;
};

struct DensityReport {
  std::vector<DensityRow> densities;
  std::vector<PhiRow> phi_profile;
  double lower_density = 0.0;
  double lower_density_std_error = 0.0;
  MeasureMethod method = MeasureMethod::Analytic;
  std::string trend;
  std::size_t centers = 0;
};

std::vector<double> default_radii(const PrunedArrangement& set);
// Grid of centers over [-s/2, s/2]^d with s the largest spacing.
std::vector<Point> default_centers(const PrunedArrangement& set);

DensityReport lower_density_estimate(const PrunedArrangement& set, const std::vector<double>& radii,
                                     const std::vector<Point>& centers, std::uint64_t seed,
                                     const MeasureOptions& options = {});

// Points on planes, at crossings and just outside exclusion zones near the
// origin; used as adversarial centers for the phi profile.
std::vector<Point> adversarial_centers(const PrunedArrangement& set);

// sup over centers (user centers plus adversarial ones) of
// H^{d-1}(set ∩ B(x, r)) / (omega_{d-1} r^{d-1}).
std::vector<PhiRow> phi_regularity_profile(const PrunedArrangement& set, const std::vector<double>& r_list,
                                           const std::vector<Point>& centers, std::uint64_t seed,
                                           const MeasureOptions& options = {});

}  // namespace msl
