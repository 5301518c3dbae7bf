// Acceptance suite: one PASS/FAIL line per criterion.
//
//   msl_acceptance [--only 1,5,9] [--expect-fail 7] [--threads N]
//
// Exit status is 0 when every selected criterion passes, except those listed
// in --expect-fail, which must fail (their lines still read FAIL).

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "msl/convex_geometry.hpp"
#include "msl/nodal_density.hpp"
#include "msl/parallel.hpp"
#include "msl/pw_functions.hpp"
#include "msl/random.hpp"
#include "msl/sampling_experiments.hpp"
#include "msl/serialization.hpp"
#include "msl/sharpness.hpp"
#include "msl/sphere_quadrature.hpp"
#include "support/oracles.hpp"

namespace {

using namespace msl;
using Clock = std::chrono::steady_clock;

// Serialized outputs of every randomized run, compared by criterion 14.
class Recorder {
 public:
  void add(const std::string& label, const Json& j) { items_.emplace_back(label, j.dump()); }
  void add(const std::string& label, double v) { items_.emplace_back(label, format_double(v)); }
  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0: none
  bool randomized;
  std::function<Verdict(Recorder&)> run;
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

bool within(double x, double ref, double tol) { return std::abs(x - ref) <= tol; }

// 1 ----------------------------------------------------------------------
Verdict constants(Recorder&) {
  Verdict v;
  const double a2 = sharp_constant(2), a3 = sharp_constant(3), a4 = sharp_constant(4);
  v.pass = within(a2, kPi / 2.0, 1e-12) && within(a3, oracle::sharp_constant(3), 1e-12) &&
           within(a4, oracle::sharp_constant(4), 1e-12) && within(a3, 2.0, 1e-12) &&
           within(a4, 3.0 * kPi / 4.0, 1e-12);
  for (int k = 0; k <= 6; ++k) v.pass = v.pass && within(unit_ball_volume(k), oracle::ball_volume(k), 1e-12);
  v.detail = "A_2=" + fmt(a2, 17) + " A_3=" + fmt(a3, 17) + " A_4=" + fmt(a4, 17);
  return v;
}

// 2 ----------------------------------------------------------------------
Verdict mean_width_closed_forms(Recorder& rec) {
  Verdict v;
  double worst_det = 0.0, worst_z = 0.0;
  for (int d : {2, 3, 4}) {
    const auto quad = SphereQuadrature::standard(d);
    for (double R : {0.5, 1.0, 3.0}) {
      const auto w = mean_width(ConvexBody::ball(d, R), quad);
      if (d <= 3) {
        worst_det = std::max(worst_det, std::abs(w.value - 2.0 * R));
      } else {
        rec.add("W ball d4 R" + fmt(R), w.value);
        // h is constant on a ball, so the sample variance is zero up to rounding.
        const double err = std::abs(w.value - 2.0 * R);
        if (err > 1e-9 * R) worst_z = std::max(worst_z, w.std_error > 0.0 ? err / w.std_error : kInfinity);
      }
    }
  }
  v.pass = v.pass && worst_det <= 1e-6 && worst_z <= 3.0;

  // Side-length-1 cube: [-1/2, 1/2]^d.
  const double w2 = mean_width(ConvexBody::cube(2, 0.5), SphereQuadrature::standard(2)).value;
  const double w3 = mean_width(ConvexBody::cube(3, 0.5), SphereQuadrature::standard(3)).value;
  const bool cube_ok = within(w2, 4.0 / kPi, 1e-4) && within(w3, 1.5, 1e-4);
  // Half-width 1 doubles both values.
  const double u2 = mean_width(ConvexBody::cube(2, 1.0), SphereQuadrature::standard(2)).value;
  const double u3 = mean_width(ConvexBody::cube(3, 1.0), SphereQuadrature::standard(3)).value;
  const bool unit_ok = within(u2, 8.0 / kPi, 2e-4) && within(u3, 3.0, 2e-4);
  v.pass = v.pass && cube_ok && unit_ok;
  v.detail = "ball max|W-2R|=" + fmt(worst_det, 3) + " (d<=3), max z=" + fmt(worst_z, 3) +
             " (d=4); W([-1/2,1/2]^2)=" + fmt(w2, 9) + " W([-1/2,1/2]^3)=" + fmt(w3, 9) +
             "; W([-1,1]^2)=" + fmt(u2, 9) + " W([-1,1]^3)=" + fmt(u3, 9);
  return v;
}

// 3 ----------------------------------------------------------------------
Verdict sphere_identity(Recorder& rec) {
  Verdict v;
  Rng rng(derive_seed(3, {0}));
  double worst_det = 0.0, worst_z = 0.0;
  for (int d : {2, 3, 4}) {
    const auto quad = SphereQuadrature::standard(d);
    const double ref = 2.0 * oracle::ball_volume(d - 1);
    for (int i = 0; i < 10; ++i) {
      const UnitVector u(uniform_on_sphere(d, rng));
      const auto e = quad.integrate([&](const UnitVector& t) { return std::abs(dot(t.coords(), u.coords())); });
      if (d <= 3) {
        worst_det = std::max(worst_det, std::abs(e.value - ref));
      } else {
        rec.add("sphere identity d4 #" + std::to_string(i), e.value);
        if (e.std_error <= 0.0) {
          v.pass = false;
          continue;
        }
        worst_z = std::max(worst_z, std::abs(e.value - ref) / e.std_error);
      }
    }
  }
  v.pass = v.pass && worst_det <= 1e-4 && worst_z <= 3.0;
  v.detail = "max|err|=" + fmt(worst_det, 3) + " (d<=3), max z=" + fmt(worst_z, 3) + " (d=4)";
  return v;
}

// 4 ----------------------------------------------------------------------
Verdict cauchy_relation(Recorder&) {
  Verdict v;
  std::vector<ConvexBody> bodies{ConvexBody::ball(2), ConvexBody::cube(2)};
  for (double p : {1.0, 1.5, 2.0, 3.0, kInfinity}) bodies.push_back(ConvexBody::lp_ball_2d(p));
  double worst = 0.0;
  std::string worst_name;
  for (const auto& K : bodies) {
    const double per = perimeter_2d(K).perimeter;
    const double piw = kPi * mean_width(K, SphereQuadrature::circle()).value;
    const double rel = std::abs(per - piw) / piw;
    if (rel >= worst) {
      worst = rel;
      worst_name = K.name();
    }
  }
  v.pass = worst <= 0.005;
  v.detail = "max relative gap " + fmt(worst, 3) + " (" + worst_name + ")";
  return v;
}

// 5 ----------------------------------------------------------------------
Verdict crofton_vs_analytic(Recorder& rec) {
  Verdict v;
  constexpr double R = 30.0;
  constexpr int kDirs = 2048, kLines = 4;
  Rng rng(derive_seed(5, {0}));
  std::uniform_real_distribution<double> spacing(0.3, 1.5), unit(0.0, 1.0), shift(-5.0, 5.0);
  std::uniform_int_distribution<int> n_fam(2, 5);
  double worst_z = 0.0, worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 2;
    std::vector<HyperplaneFamily> fams;
    const int nf = n_fam(rng);
    for (int j = 0; j < nf; ++j) {
      const double s = spacing(rng);
      fams.push_back({UnitVector(uniform_on_sphere(d, rng)), s, s * unit(rng)});
    }
    Point c(d);
    for (auto& x : c) x = shift(rng);
    const PrunedArrangement set(fams, 0.0);
    const auto est = crofton_estimate(set, c, R, kDirs, kLines, derive_seed(5, {1, static_cast<std::uint64_t>(trial)}));
    rec.add("crofton #" + std::to_string(trial), with_error(est));
    const double vol = oracle::ball_volume(d) * std::pow(R, d);
    const double dens = est.value / vol, se = est.std_error / vol;
    const double analytic = analytic_density(fams);
    worst_z = std::max(worst_z, std::abs(dens - analytic) / se);
    worst_rel = std::max(worst_rel, se / analytic);
  }
  v.pass = worst_z <= 3.0 && worst_rel <= 0.02;
  v.detail = "20 arrangements, " + std::to_string(kDirs) + "x" + std::to_string(kLines) +
             " lines: max z=" + fmt(worst_z, 3) + ", max relative se=" + fmt(worst_rel, 3);
  return v;
}

// 6 ----------------------------------------------------------------------
Verdict nodal_density_bound(Recorder& rec) {
  Verdict v;
  std::vector<ConvexBody> bodies{ConvexBody::ball(2, 0.7), ConvexBody::cube(2),         ConvexBody::lp_ball_2d(1.5),
                                 ConvexBody::lp_ball_2d(3.0), ConvexBody::lp_ball_2d(8.0), ConvexBody::ball(3, 1.3),
                                 ConvexBody::cube(3, 0.8)};
  std::vector<SphereQuadrature> quads{SphereQuadrature::standard(2), SphereQuadrature::standard(3)};
  Rng rng(derive_seed(6, {0}));
  std::uniform_real_distribution<double> freq(0.1, 1.0), scale(0.5, 0.999);
  std::uniform_int_distribution<int> n_terms(1, 8);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const auto& K = bodies[static_cast<std::size_t>(i) % bodies.size()];
    const int d = K.dimension();
    CosineProduct raw(d);
    const int n = n_terms(rng);
    for (int t = 0; t < n; ++t) raw.add(freq(rng), UnitVector(uniform_on_sphere(d, rng)));
    const double g = spectrum_certificate(raw, K).gauge_max;
    const double c = scale(rng) / g;
    CosineProduct f(d);
    for (const auto& t : raw.terms()) f.add(c * t.a, t.nu);
    const auto m = density_bound_margin(f, K, quads[static_cast<std::size_t>(d - 2)]);
    rec.add("margin #" + std::to_string(i), m.value);
    worst = std::min(worst, m.value);
  }
  v.pass = worst >= -1e-9;
  v.detail = "200 products over " + std::to_string(bodies.size()) + " bodies: min margin " + fmt(worst, 6);
  return v;
}

// 7 ----------------------------------------------------------------------
Verdict ball_pincer(Recorder& rec) {
  Verdict v;
  std::string d2, d3, last_failure;
  for (int d : {2, 3}) {
    const double tol = d == 2 ? 0.15 : 0.2;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const std::string label = "ball d" + std::to_string(d) + " seed " + std::to_string(seed);
      auto& out = d == 2 ? d2 : d3;
      try {
        const auto r = verify_ball_sharpness(d, 0.005, 400, seed, 0.01);
        rec.add(label, sharpness_run_to_json(r.run, false));
        const bool ok = r.run.certificate.pass && r.achieved >= r.ceiling - tol &&
                        r.achieved <= r.ceiling + 3.0 * r.std_error;
        v.pass = v.pass && ok;
        out += " " + fmt(r.achieved, 4) + "[" + fmt(r.run.raw_lower_density, 4) + "]";
      } catch (const CertificateFailure& e) {
        rec.add(label, Json(e.what()));
        v.pass = false;
        out += " uncertified";
        last_failure = e.what();
      }
    }
  }
  v.detail = "pruned D [raw D]; d=2 band [" + fmt(kPi - 0.15, 4) + ", pi+3se]:" + d2 + "; d=3 band [3.8, 4+3se]:" + d3;
  if (!last_failure.empty()) v.detail += " (" + last_failure + ")";
  return v;
}

// 8 ----------------------------------------------------------------------
Verdict planar_sharpness(Recorder& rec) {
  Verdict v;
  constexpr double delta = 0.002, rho = 1e-4;
  constexpr std::size_t N = 1000;
  std::string detail;
  for (double p : {1.05, 1.5, 4.0, 8.0}) {
    const auto K = ConvexBody::lp_ball_2d(p);
    double min_excess = std::numeric_limits<double>::infinity(), gap = 0.0, piw = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto r = verify_2d_sharpness(K, delta, N, seed, rho);
      rec.add("planar p" + fmt(p) + " seed " + std::to_string(seed), sharpness_run_to_json(r.run, false));
      gap = r.relative_gap;
      piw = r.pi_half_width;
      const double excess = r.achieved - (r.target - 0.1);
      min_excess = std::min(min_excess, excess);
      v.pass = v.pass && r.run.certificate.pass && excess >= 0.0;
    }
    v.pass = v.pass && gap <= 0.01;
    if (p == 1.05) v.pass = v.pass && std::abs(piw - 2.0 * std::sqrt(2.0)) <= 0.02 * 2.0 * std::sqrt(2.0);
    detail += " p=" + fmt(p) + ": gap " + fmt(gap, 2) + ", min excess " + fmt(min_excess, 3) + ";";
  }
  v.detail = "delta=0.002 N=1000 rho=1e-4" + detail;
  return v;
}

// 9 ----------------------------------------------------------------------
Verdict mu_cross_validation(Recorder& rec) {
  Verdict v;
  std::string detail;
  for (int d : {2, 3, 4}) {
    const auto m = mu_functional(ConvexBody::ball(d), WeightFunction::one(), 100000, mu_polar_grid(d), 9);
    rec.add("mu ball d" + std::to_string(d), mu_to_json(m));
    const double ref = 2.0 * oracle::ball_volume(d - 1) / (d * oracle::ball_volume(d));
    const double z = std::abs(m.holdout - ref) / m.holdout_std_error;
    v.pass = v.pass && z <= 3.0;
    detail += " ball d=" + std::to_string(d) + " z=" + fmt(z, 3) + ";";
  }
  for (double p : {1.5, 3.0, 6.0}) {
    const auto K = ConvexBody::lp_ball_2d(p);
    const auto q = mu_2d_quarter_turn(K);
    const auto m = mu_functional(K, WeightFunction::one(), 100000, mu_polar_grid(2), 9);
    rec.add("mu lp" + fmt(p), mu_to_json(m));
    constexpr double qt_tol = 1e-6;
    const double combined = std::hypot(m.holdout_std_error, qt_tol);
    const double z = std::abs(m.holdout - q.mu) / combined;
    v.pass = v.pass && z <= 3.0;
    detail += " lp" + fmt(p) + " z=" + fmt(z, 3) + ";";
  }
  v.detail = "holdout estimates vs closed form / quarter turn:" + detail;
  return v;
}

// 10 ---------------------------------------------------------------------
Verdict jensen_property(Recorder& rec) {
  Verdict v;
  Rng rng(derive_seed(10, {0}));
  std::uniform_real_distribution<double> freq(0.05, 2.0), coord(-3.0, 3.0), horizon(0.2, 5.0);
  std::uniform_int_distribution<int> n_terms(1, 6), dim(2, 3);
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const int d = dim(rng);
    CosineProduct f(d);
    const int n = n_terms(rng);
    for (int t = 0; t < n; ++t) f.add(freq(rng), UnitVector(uniform_on_sphere(d, rng)));
    Point x(d);
    for (auto& c : x) c = coord(rng);
    const UnitVector theta(uniform_on_sphere(d, rng));
    const double T = horizon(rng);
    const auto s = jensen_functional(f, x, theta, T, f.spectral_support(theta.coords()));
    rec.add("jensen #" + std::to_string(i), s.rhs - s.lhs);
    min_gap = std::min(min_gap, s.rhs - s.lhs);
  }
  CosineProduct one(2);
  one.add(1.0, UnitVector::axis(2, 0));
  const auto s = jensen_functional(one, Point{0.0, 0.0}, UnitVector::axis(2, 0), 1.0, 1.0);
  const double hand = 2.0 * std::log(16.0 / 3.0);
  v.pass = min_gap > 0.0 && within(s.lhs, hand, 1e-9) && within(s.lhs, 3.3479, 1e-4);
  v.detail = "min rhs-lhs over 100 instances " + fmt(min_gap, 4) + "; single cosine lhs=" + fmt(s.lhs, 12);
  return v;
}

// 11 ---------------------------------------------------------------------
Verdict ronkin_decay(Recorder& rec) {
  Verdict v;
  CosineProduct f(2);
  f.add(1.0, UnitVector::axis(2, 0));
  const auto e10 = ronkin_estimate(f, 10.0, 400000, 11);
  const auto e40 = ronkin_estimate(f, 40.0, 400000, 12);
  rec.add("ronkin R10", with_error(e10));
  rec.add("ronkin R40", with_error(e40));
  const double ratio = e10.value / e40.value;
  const double rel = std::hypot(e10.std_error / e10.value, e40.std_error / e40.value);
  v.pass = e10.value >= 0.0 && e40.value >= 0.0 && within(ratio, 4.0, 1.0) && rel <= 0.1;
  v.detail = "E(10)=" + fmt(e10.value, 5) + " E(40)=" + fmt(e40.value, 5) + " ratio " + fmt(ratio, 4) +
             " combined relative error " + fmt(rel, 3);
  return v;
}

// 12 ---------------------------------------------------------------------
Verdict phi_regularity(Recorder& rec) {
  Verdict v;
  const std::vector<double> radii{0.01, 0.03, 0.05, 0.07, 0.09};
  const std::vector<std::vector<HyperplaneFamily>> pairs{
      {{UnitVector::axis(2, 0), 1.0, 0.0}, {UnitVector::axis(2, 1), 1.0, 0.0}},
      {{UnitVector::axis(2, 0), 0.8, 0.1}, {UnitVector::from_angle(kPi / 3.0), 0.8, 0.3}}};
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const PrunedArrangement pruned(pairs[k], 0.2);
    // The origin is a crossing for the first pair; the adversarial set adds crossings for both.
    const auto rows = phi_regularity_profile(pruned, radii, {Point{0.0, 0.0}}, 12);
    for (const auto& r : rows) {
      rec.add("phi pair " + std::to_string(k) + " r " + fmt(r.r), r.sup_ratio);
      worst = std::max(worst, r.sup_ratio);
    }
  }
  const PrunedArrangement raw(pairs[0], 0.0);
  const double crossing = phi_regularity_profile(raw, {0.01}, {Point{0.0, 0.0}}, 12)[0].sup_ratio;
  v.pass = worst <= 1.02 && crossing >= 1.9;
  v.detail = "pruned sup phi over r<=0.09: " + fmt(worst, 6) + "; raw at crossing, r=0.01: " + fmt(crossing, 6);
  return v;
}

// 13 ---------------------------------------------------------------------
Verdict sampling_sweep(Recorder& rec) {
  Verdict v;
  std::string detail;
  const std::vector<double> factors{0.3, 0.6, 0.9, 1.2, 1.5};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  for (const auto& K : {ConvexBody::ball(2), ConvexBody::cube(2)}) {
    const double T = sharp_constant(2) * mean_width(K, SphereQuadrature::circle()).value;
    std::vector<double> grid;
    for (double f : factors) grid.push_back(f * T);
    const auto res = density_sweep(K, 2.0, grid, {}, seeds);
    rec.add("sweep " + K.name(), sweep_to_json(res));

    // Rows are seed-major; nested arrangements can only lower the max ratio.
    bool monotone = true;
    double low = 0.0, high = 0.0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto* row = &res.rows[s * factors.size()];
      for (std::size_t k = 1; k < factors.size(); ++k) monotone = monotone && row[k].max_ratio <= row[k - 1].max_ratio;
      low = std::max(low, row[0].max_ratio);
      high = std::max(high, row[factors.size() - 1].max_ratio);
    }

    // Per-function inclusion on a fixed grid: trajectory norms never decrease.
    bool inclusion = true, scale = true;
    for (const auto seed : seeds) {
      std::vector<HyperplaneFamily> fams;
      for (std::size_t j = 0; j < 4; ++j) fams.push_back(sweep_family(2, j, res.spacing, seed));
      for (auto f : sweep_bank(K, res.spacing, seed, 0.3)) {
        const double L = kDefaultBoxScale / f.min_bandwidth(), h = 1.0 / (8.0 * f.max_frequency());
        double prev = 0.0;
        for (std::size_t n = 1; n <= fams.size(); ++n) {
          const auto r = sampling_ratio(f, PrunedArrangement({fams.begin(), fams.begin() + n}), 2.0, L, h);
          inclusion = inclusion && r.trajectory_norm >= prev;
          prev = r.trajectory_norm;
        }
        const PrunedArrangement two({fams[0], fams[1]});
        const double base = sampling_ratio(f, two, 2.0, L, h).ratio;
        for (double c : {-3.0, 0.5, 1e3}) {
          f.amplitude = c;
          scale = scale && sampling_ratio(f, two, 2.0, L, h).ratio == base;
        }
      }
    }
    const double gap = low / high;
    v.pass = v.pass && monotone && inclusion && scale && gap >= 5.0;
    detail += " " + K.name() + ": monotone=" + (monotone && inclusion ? "yes" : "no") +
              " scale=" + (scale ? "exact" : "broken") + " max ratio " + fmt(low, 4) + " at 0.3x vs " +
              fmt(high, 4) + " at 1.5x;";
  }
  v.detail = detail.substr(1);
  return v;
}

std::vector<Criterion> criteria() {
  return {
      {1, "constants", 0.001, false, constants},
      {2, "mean width closed forms", 5.0, true, mean_width_closed_forms},
      {3, "sphere identity", 0.0, true, sphere_identity},
      {4, "Cauchy relation", 5.0, false, cauchy_relation},
      {5, "Crofton vs analytic density", 60.0, true, crofton_vs_analytic},
      {6, "nodal density bound", 60.0, true, nodal_density_bound},
      {7, "ball sharpness pincer", 300.0, true, ball_pincer},
      {8, "planar quarter-turn sharpness", 300.0, true, planar_sharpness},
      {9, "mu cross-validation", 0.0, true, mu_cross_validation},
      {10, "Jensen property", 0.0, true, jensen_property},
      {11, "Ronkin decay", 0.0, true, ronkin_decay},
      {12, "phi regularity", 0.0, true, phi_regularity},
      {13, "sampling sweep", 600.0, true, sampling_sweep},
  };
}

void report(int id, const std::string& name, bool pass, double seconds, const std::string& detail) {
  std::printf("%s [%2d] %s (%.3f s): %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), seconds, detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only, expect_fail;
  unsigned threads = 1;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--expect-fail", expect_fail, "criteria known to fail")->delimiter(',');
  app.add_option("--threads", threads, "thread budget for the first pass")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected(only.begin(), only.end()), expected(expect_fail.begin(), expect_fail.end());
  const auto want = [&](int id) { return selected.empty() || selected.count(id) > 0; };

  bool ok = true;
  const auto tally = [&](int id, bool pass) {
    if (pass == (expected.count(id) == 0)) return;
    ok = false;
    if (pass) std::printf("note: criterion %d passed but was expected to fail\n", id);
  };

  std::map<int, Recorder> first;
  set_thread_budget(threads);
  for (const auto& c : criteria()) {
    if (!want(c.id)) continue;
    Recorder rec;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run(rec);
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.time_limit_s > 0.0 && s >= c.time_limit_s) {
      v.pass = false;
      v.detail += "; over time limit " + fmt(c.time_limit_s) + " s";
    }
    report(c.id, c.name, v.pass, s, v.detail);
    tally(c.id, v.pass);
    if (c.randomized) first.emplace(c.id, std::move(rec));
  }

  if (want(14)) {
    // Rerun every randomized criterion under a different thread budget and compare bytes.
    const auto t0 = Clock::now();
    set_thread_budget(threads == 1 ? 3 : 1);
    std::size_t runs = 0;
    std::vector<std::string> mismatches;
    for (const auto& c : criteria()) {
      if (!c.randomized) continue;
      auto it = first.find(c.id);
      if (it == first.end()) {
        Recorder rec;
        try {
          c.run(rec);
        } catch (const std::exception&) {
        }
        it = first.emplace(c.id, std::move(rec)).first;
      }
      Recorder again;
      try {
        c.run(again);
      } catch (const std::exception&) {
      }
      const auto& a = it->second.items();
      const auto& b = again.items();
      runs += a.size();
      if (a != b) mismatches.push_back(std::to_string(c.id));
    }
    set_thread_budget(threads);
    const bool pass = mismatches.empty() && runs > 0;
    std::string detail = std::to_string(runs) + " recorded runs repeated with thread budget " +
                         std::to_string(threads == 1 ? 3 : 1);
    if (!mismatches.empty()) {
      detail += "; differing criteria:";
      for (const auto& m : mismatches) detail += " " + m;
    }
    report(14, "determinism", pass, std::chrono::duration<double>(Clock::now() - t0).count(), detail);
    tally(14, pass);
  }
  return ok ? 0 : 1;
}
