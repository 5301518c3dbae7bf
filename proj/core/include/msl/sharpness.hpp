#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msl/convex_geometry.hpp"
#include "msl/nodal_density.hpp"
#include "msl/pw_functions.hpp"

namespace msl {

// Non-negative weight on the boundary, evaluated at sampled (point, normal).
struct WeightFunction {
  std::function<double(const BoundarySample&)> g;
  std::string name;
  std::optional<double> sup;

  static WeightFunction one();
  double operator()(const BoundarySample& s) const;
};

struct MuEstimate {
  // Plug-in value: max over polar nodes of the full-sample means.
  double value = 0.0;
  double std_error = 0.0;  // bootstrap over the top nodes
  // Node chosen on one half of the sample, evaluated on the other half.
  double holdout = 0.0;
  double holdout_std_error = 0.0;
  Point argmax;  // maximising polar boundary point y = theta / h_K(theta)
  double g_mean = 0.0;
  std::size_t samples = 0;
  std::size_t nodes = 0;
};

inline constexpr std::size_t kMinMuSamples = 1000;
inline constexpr int kBootstrapResamples = 200;

std::vector<UnitVector> mu_polar_grid(int dimension);

// mu = sup_{y in dK°} mean over boundary samples of |<nu, y>| g.
MuEstimate mu_functional(const ConvexBody& body, const WeightFunction& g, std::size_t M,
                         const std::vector<UnitVector>& polar_grid, std::uint64_t seed);

struct QuarterTurnMu {
  double mu = 0.0;
  double sup_factor = 0.0;  // sup over dK° of h_K(theta^perp)
  double perimeter = 0.0;
};

// d = 2, g = 1: mu = 4 sup h_K(theta^perp) / H^1(dK) over theta in dK°.
QuarterTurnMu mu_2d_quarter_turn(const ConvexBody& body, int grid_nodes = kBoundaryTableNodes);

struct SharpnessOptions {
  std::optional<std::size_t> mu_samples;  // default max(100 N, 10^5)
  std::vector<UnitVector> polar_grid;     // empty: mu_polar_grid(d)
  std::vector<UnitVector> certificate_grid;  // empty: certificate_grid(d)
  int max_retries = 20;
  MeasureOptions measure;
  std::vector<double> radii;     // empty: default_radii
  std::vector<Point> centers;    // empty: default_centers
};

struct SharpnessRun {
  std::string body;
  int dimension = 0;
  std::size_t N = 0;
  double delta = 0.0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t attempt_seed = 0;
  int retries = 0;
  std::vector<BoundarySample> samples;
  std::vector<double> g_values;
  MuEstimate mu;
  double g_mean = 0.0;
  double alpha = 0.0;
  CosineProduct f{2};
  SpectrumCertificate certificate;
  PrunedArrangement arrangement;
  double analytic_density = 0.0;     // sum_n 2 a_n of the unpruned nodal set
  double raw_lower_density = 0.0;    // closed-form D^- estimate of the unpruned set
  DensityReport density;             // pruned set
  double achieved_density = 0.0;
  double achieved_std_error = 0.0;
  double pruning_loss = 0.0;         // raw_lower_density - achieved_density
  double target = 0.0;               // 2 g_mean / mu_hat - 2 delta
  double margin = 0.0;
};

double default_rho(double min_spacing);

// Sample, estimate mu on an independent sample, set alpha = 1/(mu + 3 delta),
// certify, prune, measure. Certificate failures are retried with fresh seeds.
SharpnessRun construct_example(const ConvexBody& body, const WeightFunction& g, std::size_t N, double delta,
                               std::optional<double> rho, std::uint64_t seed, const SharpnessOptions& options = {});

struct BallSharpnessReport {
  SharpnessRun run;
  double target = 0.0;   // d omega_d / omega_{d-1} - 2 delta
  double ceiling = 0.0;  // A_d W(B) = d omega_d / omega_{d-1}
  double achieved = 0.0;
  double std_error = 0.0;
  double margin = 0.0;   // achieved - target
  bool meets_target = false;
  bool below_ceiling = false;
};

BallSharpnessReport verify_ball_sharpness(int d, double delta, std::size_t N, std::uint64_t seed,
                                          std::optional<double> rho = std::nullopt,
                                          const SharpnessOptions& options = {});

struct PlanarSharpnessReport {
  SharpnessRun run;
  double mean_width = 0.0;
  double target = 0.0;           // (pi/2 - delta) W(K)
  QuarterTurnMu mu_qt;
  double two_over_mu = 0.0;      // 2 / mu from the quarter-turn formula
  double pi_half_width = 0.0;    // (pi/2) W(K)
  double relative_gap = 0.0;     // |2/mu - (pi/2) W| / ((pi/2) W)
  double achieved = 0.0;
  double std_error = 0.0;
  double margin = 0.0;
  bool meets_target = false;
};

PlanarSharpnessReport verify_2d_sharpness(const ConvexBody& body, double delta, std::size_t N, std::uint64_t seed,
                                          std::optional<double> rho = std::nullopt,
                                          const SharpnessOptions& options = {});

// A_d W(K) - analytic density of the nodal set of f; requires a passing certificate.
Estimate density_bound_margin(const CosineProduct& f, const ConvexBody& body, const SphereQuadrature& quad);

}  // namespace msl
