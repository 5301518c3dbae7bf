#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "msl/convex_geometry.hpp"
#include "msl/nodal_density.hpp"

namespace msl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Separable band-limited test function
//   f(x) = amplitude * prod_i sinc^2(b_i (x_i - c_i)) cos(2 pi m_i (x_i - c_i)),
// sinc(t) = sin(pi t) / (pi t). Its spectrum lies in the box with half-widths
// b_i + m_i, and |f| decays like |x|^{-2} along each axis.
struct TestFunction {
  std::string id;
  std::vector<double> bandwidth;   // b_i > 0
  std::vector<double> modulation;  // m_i >= 0
  Point shift;                     // c
  double amplitude = 1.0;

  int dimension() const { return static_cast<int>(bandwidth.size()); }
  std::vector<double> spectral_half_widths() const;
  // Largest frequency along any line: Euclidean norm of the half-widths.
  double max_frequency() const;
  double min_bandwidth() const;
  // One factor of the unit-amplitude profile.
  double axis_factor(std::size_t i, double x) const;
  // f / amplitude.
  double profile(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return amplitude * profile(x); }
};

// Largest gauge of the spectral box vertices; <= 1 means the spectrum fits K.
double spectral_gauge(const TestFunction& f, const ConvexBody& body);

// Equal bandwidths b chosen so the spectral cube vertices have gauge 1 - margin.
TestFunction make_test_function(const ConvexBody& body, double margin, Point shift = {});
// Same envelope idea with an extra modulation m along `axis`; b shrinks so the
// widened box still has vertex gauge 1 - margin.
TestFunction make_modulated_test_function(const ConvexBody& body, double margin, int axis, double m,
                                          Point shift = {});
std::vector<TestFunction> make_test_bank(const ConvexBody& body, double margin, const std::vector<Point>& shifts);

struct RatioReport {
  double p = 2.0;
  double box = 0.0;         // half-width of the truncation box
  double resolution = 0.0;  // grid step actually used
  double ambient_norm = 0.0;
  double trajectory_norm = 0.0;
  double ratio = 0.0;       // ambient / trajectory (unit amplitude; +inf if the trajectory norm vanishes)
  double tail_bound = 0.0;  // bound on the mass outside the box relative to the mass inside (sup for p = inf)
  std::size_t trajectory_points = 0;
};

inline constexpr double kDefaultBoxScale = 40.0;

// ||f||_{L^p(box)} / ||f||_{L^p(Gamma ∩ box)} with tensor-grid and per-plane
// grid quadratures of step h. Requires h <= 1 / (8 max_frequency).
RatioReport sampling_ratio(const TestFunction& f, const PrunedArrangement& gamma, double p, double box, double h);

// Default resolution 1 / (8 max_frequency) and box kDefaultBoxScale / min bandwidth.
RatioReport sampling_ratio(const TestFunction& f, const PrunedArrangement& gamma, double p);

struct SweepRow {
  double density = 0.0;           // requested
  double analytic_density = 0.0;  // realised by the arrangement
  std::size_t families = 0;
  double p = 2.0;
  double max_ratio = 0.0;
  std::string f_id;
  std::uint64_t seed = 0;
};

struct SweepResult {
  double threshold = 0.0;  // A_d W(K)
  double spacing = 0.0;    // common family spacing
  std::string label = "empirical upper envelope";
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  double margin = 0.3;
  double rho = 0.0;
  double box_scale = kDefaultBoxScale;
  // Resolution factor: h = 1 / (points_per_period * max_frequency).
  double points_per_period = 8.0;
};

// Family j of the nested sweep arrangement (direction, offset) for a seed.
HyperplaneFamily sweep_family(int dimension, std::size_t j, double spacing, std::uint64_t seed);

// Default bank for one seed: centered envelope, envelope translated midway
// between two planes of the first family, and an envelope modulated so its
// zeros lie on the planes of the first family.
std::vector<TestFunction> sweep_bank(const ConvexBody& body, double spacing, std::uint64_t seed, double margin);

// For each density D, an arrangement of round(D / D_min) nested families with
// spacing 1 / D_min; max ratio over the bank.
SweepResult density_sweep(const ConvexBody& body, double p, const std::vector<double>& density_grid,
                          const std::vector<TestFunction>& f_bank, const std::vector<std::uint64_t>& seeds,
                          const SweepOptions& options = {});

}  // namespace msl
