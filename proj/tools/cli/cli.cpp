#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "msl/convex_geometry.hpp"
#include "msl/nodal_density.hpp"
#include "msl/parallel.hpp"
#include "msl/random.hpp"
#include "msl/pw_functions.hpp"
#include "msl/sampling_experiments.hpp"
#include "msl/serialization.hpp"
#include "msl/sharpness.hpp"

#ifndef MSL_VERSION
#define MSL_VERSION "unknown"
#endif

namespace msl::cli {
namespace {

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

template <class T>
T json_as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw ValidationError("config field \"" + key + "\" has the wrong type");
  }
}

// Command-line options backed by config-file values. A flag given on the
// command line always wins over the config entry of the same name.
class Bindings {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& key, T& var, const std::string& desc) {
    auto* opt = app->add_option("--" + key, var, desc);
    entries_.push_back({app, opt, key, [&var, key](const Json& j) { var = json_as<T>(j, key); }});
    return opt;
  }

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& key, std::optional<T>& var, const std::string& desc) {
    auto* opt = app->add_option("--" + key, var, desc);
    entries_.push_back({app, opt, key, [&var, key](const Json& j) { var = json_as<T>(j, key); }});
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& key, bool& var, const std::string& desc) {
    auto* opt = app->add_flag("--" + key, var, desc);
    entries_.push_back({app, opt, key, [&var, key](const Json& j) { var = json_as<bool>(j, key); }});
    return opt;
  }

  // Custom handler for values that may be objects in the config file.
  void config_only(CLI::App* app, CLI::Option* opt, const std::string& key, std::function<void(const Json&)> apply) {
    entries_.push_back({app, opt, key, std::move(apply)});
  }

  void apply(const Json& config, const CLI::App* active) const {
    for (const auto& e : entries_) {
      if (e.app != active && e.app->get_parent() != nullptr) continue;
      if (e.opt != nullptr && e.opt->count() > 0) continue;
      if (config.contains(e.key)) e.apply(config.at(e.key));
    }
  }

 private:
  struct Entry {
    const CLI::App* app;
    CLI::Option* opt;
    std::string key;
    std::function<void(const Json&)> apply;
  };
  std::vector<Entry> entries_;
};

struct BodySpec {
  std::string kind = "ball";
  int d = 0;
  double R = 1.0;
  double p = 2.0;
  std::string file;
  Json inline_spec;

  void bind(Bindings& b, CLI::App* app, const std::string& default_kind) {
    kind = default_kind;
    auto* o = app->add_option("--body", kind, "ball | cube | lp2d")->default_str(default_kind);
    b.config_only(app, o, "body", [this](const Json& j) {
      if (j.is_object())
        inline_spec = j;
      else
        kind = json_as<std::string>(j, "body");
    });
    b.add(app, "d", d, "dimension");
    b.add(app, "R", R, "radius (ball) or half-width (cube)");
    b.add(app, "p", p, "exponent of the planar l^p ball (inf allowed)");
    b.add(app, "body-file", file, "JSON body specification");
  }

  ConvexBody build(int fallback_dimension) const {
    if (!inline_spec.is_null()) return body_from_json(inline_spec);
    if (!file.empty()) return body_from_json(read_json_file(file));
    const int dim = d > 0 ? d : fallback_dimension;
    if (kind == "ball") return ConvexBody::ball(dim, R);
    if (kind == "cube") return ConvexBody::cube(dim, R);
    if (kind == "lp2d") {
      if (d != 0 && d != 2) throw ValidationError("lp2d bodies are planar");
      return ConvexBody::lp_ball_2d(p);
    }
    throw ValidationError("unknown body \"" + kind + "\"");
  }
};

// A cosine product from --f (file or inline config object) or a single
// factor cos(2 pi a <x, nu>).
struct ProductSpec {
  std::string file;
  Json inline_spec;
  std::optional<double> a;
  std::vector<double> nu;
  int d = 2;

  void bind(Bindings& b, CLI::App* app) {
    auto* o = app->add_option("--f", file, "cosine product JSON file");
    b.config_only(app, o, "f", [this](const Json& j) {
      if (j.is_object())
        inline_spec = j;
      else
        file = json_as<std::string>(j, "f");
    });
    b.add(app, "a", a, "single-factor frequency");
    b.add(app, "nu", nu, "single-factor direction (default e1)")->delimiter(',');
    b.add(app, "d", d, "dimension of the single factor");
  }

  CosineProduct build() const {
    if (!inline_spec.is_null()) return cosine_product_from_json(inline_spec);
    if (!file.empty()) return cosine_product_from_json(read_json_file(file));
    if (!a) throw ValidationError("give a cosine product with --f or a single factor with --a");
    const UnitVector dir = nu.empty() ? UnitVector::axis(d, 0) : UnitVector::normalized(nu);
    CosineProduct f(dir.dimension());
    f.add(*a, dir);
    return f;
  }
};

struct ArrangementSpec {
  std::string file;
  Json inline_spec;
  ProductSpec product;
  std::optional<double> rho;

  void bind(Bindings& b, CLI::App* app) {
    auto* o = app->add_option("--arrangement", file, "hyperplane arrangement JSON file");
    b.config_only(app, o, "arrangement", [this](const Json& j) {
      if (j.is_object())
        inline_spec = j;
      else
        file = json_as<std::string>(j, "arrangement");
    });
    product.bind(b, app);
    b.add(app, "rho", rho, "exclusion radius (overrides the file)");
  }

  PrunedArrangement build() const {
    PrunedArrangement set;
    if (!inline_spec.is_null())
      set = arrangement_from_json(inline_spec);
    else if (!file.empty())
      set = arrangement_from_json(read_json_file(file));
    else
      set = PrunedArrangement(nodal_arrangement(product.build()), 0.0);
    if (rho) set = PrunedArrangement(set.families(), *rho);
    if (set.empty()) throw ValidationError("arrangement has no hyperplane families");
    return set;
  }
};

std::pair<int, int> parse_dimension_range(const std::string& s) {
  auto to_int = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("bad dimension range \"" + s + "\"");
    }
  };
  const auto pos = s.find("..");
  const int lo = to_int(s.substr(0, pos));
  const int hi = pos == std::string::npos ? lo : to_int(s.substr(pos + 2));
  if (lo < 1 || hi < lo || hi > 64) throw ValidationError("bad dimension range \"" + s + "\"");
  return {lo, hi};
}

struct Result {
  Json parameters = Json::object();
  Json result;
  std::optional<std::string> csv;
};

std::string csv_row(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ',';
    out += format_double(v);
  }
  return out + '\n';
}

Json point_array(std::span<const double> p) {
  Json a = Json::array();
  for (double v : p) a.push_back(number(v));
  return a;
}

}  // namespace

Outcome run(const std::vector<std::string>& args) {
  CLI::App app{"Mobile sampling and nodal density experiments", "msl"};
  app.set_version_flag("--version", MSL_VERSION);
  app.require_subcommand(0, 1);
  app.fallthrough();

  Bindings bind;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_path;
  std::string format = "json";
  app.add_option("--config", config_path, "JSON configuration; command-line flags take precedence");
  bind.add(&app, "seed", seed, "random seed (generated and echoed when absent)");
  bind.add(&app, "threads", threads, "thread budget (default $MSL_THREADS or all cores)");
  bind.add(&app, "out", out_path, "write the result here instead of stdout");
  bind.add(&app, "format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  std::map<std::string, std::function<Result(std::uint64_t)>> commands;

  // constants
  std::string dims = "2..4";
  {
    auto* c = app.add_subcommand("constants", "unit-ball volumes and the sharp constants A_d");
    bind.add(c, "d", dims, "dimension or range lo..hi");
    commands["constants"] = [&](std::uint64_t) {
      Result r;
      const auto [lo, hi] = parse_dimension_range(dims);
      r.parameters["d"] = dims;
      Json rows = Json::array();
      std::string csv = "d,omega_d,omega_d_minus_1,A_d\n";
      for (int d = lo; d <= hi; ++d) {
        const double w = unit_ball_volume(d), wm = unit_ball_volume(d - 1), a = d >= 2 ? sharp_constant(d) : 0.0;
        Json row{{"d", d}, {"omega_d", exact(w)}, {"omega_d_minus_1", exact(wm)}, {"sphere_area", exact(d * w)}};
        row["A_d"] = d >= 2 ? exact(a) : Json(nullptr);
        rows.push_back(std::move(row));
        csv += std::to_string(d) + ',' + format_double(w) + ',' + format_double(wm) + ',' +
               (d >= 2 ? format_double(a) : std::string()) + '\n';
      }
      r.result = Json{{"rows", std::move(rows)}};
      r.csv = csv;
      return r;
    };
  }

  // mean-width
  BodySpec mw_body;
  {
    auto* c = app.add_subcommand("mean-width", "mean width W(K) by sphere quadrature");
    mw_body.bind(bind, c, "ball");
    commands["mean-width"] = [&](std::uint64_t s) {
      Result r;
      const auto body = mw_body.build(2);
      const int d = body.dimension();
      const auto quad = SphereQuadrature::standard(d, s);
      const auto w = mean_width(body, quad);
      r.parameters["body"] = body_to_json(body);
      r.parameters["seed"] = s;
      r.result = Json{{"mean_width", with_error(w)},
                      {"quadrature", Json{{"scheme", to_string(quad.scheme())}, {"nodes", quad.size()}}}};
      if (const auto* b = std::get_if<EuclideanBall>(&body.kind()))
        r.result["closed_form"] = exact(2.0 * b->radius);
      if (const auto* q = std::get_if<Cube>(&body.kind()))
        r.result["closed_form"] = exact(4.0 * q->half_width * unit_ball_volume(d - 1) / unit_ball_volume(d));
      if (d == 2) {
        const auto per = perimeter_2d(body);
        r.result["perimeter"] = with_tolerance(per.perimeter, per.discrepancy * per.perimeter);
        r.result["pi_mean_width"] = with_error({per.pi_mean_width, 0.0, 0.0});
      }
      std::string csv = "mean_width,std_err\n" + csv_row({w.value, w.std_error});
      r.csv = csv;
      return r;
    };
  }

  // density
  ArrangementSpec den_set;
  std::vector<double> den_radii;
  std::vector<double> den_phi_r{0.05, 0.1, 0.2, 0.5};
  std::vector<Point> den_centers;
  std::size_t den_hybrid = MeasureOptions{}.hybrid_samples;
  {
    auto* c = app.add_subcommand("density", "lower surface density and phi-regularity profile");
    den_set.bind(bind, c);
    bind.add(c, "radii", den_radii, "ball radii (default: multiples of the largest spacing)")->delimiter(',');
    bind.add(c, "phi-r", den_phi_r, "radii in (0, 1) for the phi profile")->delimiter(',');
    bind.config_only(c, nullptr, "centers", [&](const Json& j) { den_centers = json_as<std::vector<Point>>(j, "centers"); });
    bind.add(c, "hybrid-samples", den_hybrid, "points per pruned measure estimate");
    commands["density"] = [&](std::uint64_t s) {
      Result r;
      const auto set = den_set.build();
      MeasureOptions mo;
      mo.hybrid_samples = den_hybrid;
      const auto radii = den_radii.empty() ? default_radii(set) : den_radii;
      const auto centers = den_centers.empty() ? default_centers(set) : den_centers;
      auto report = lower_density_estimate(set, radii, centers, derive_seed(s, {1}), mo);
      if (!den_phi_r.empty()) report.phi_profile = phi_regularity_profile(set, den_phi_r, centers, derive_seed(s, {2}), mo);
      r.parameters["arrangement"] = arrangement_to_json(set);
      r.parameters["radii"] = radii;
      r.parameters["phi_r"] = den_phi_r;
      r.parameters["seed"] = s;
      r.result = density_report_to_json(report);
      r.result["analytic_density"] = exact(analytic_density(set.families()));
      r.csv = density_report_to_csv(report);
      return r;
    };
  }

  // construct
  BodySpec con_body;
  std::size_t con_N = 400;
  double con_delta = 0.005;
  std::optional<double> con_rho;
  std::optional<std::size_t> con_mu_samples;
  int con_retries = 20;
  bool con_no_samples = false;
  {
    auto* c = app.add_subcommand("construct", "sharpness construction with g = 1");
    con_body.bind(bind, c, "ball");
    bind.add(c, "N", con_N, "number of boundary samples");
    bind.add(c, "delta", con_delta, "slack delta > 0");
    bind.add(c, "rho", con_rho, "exclusion radius (default min(0.01, spacing / 10))");
    bind.add(c, "mu-samples", con_mu_samples, "boundary samples for mu (default max(100 N, 10^5))");
    bind.add(c, "max-retries", con_retries, "certificate retry cap");
    bind.flag(c, "no-samples", con_no_samples, "omit samples, f and the arrangement from the output");
    commands["construct"] = [&](std::uint64_t s) {
      Result r;
      const auto body = con_body.build(2);
      SharpnessOptions opt;
      opt.mu_samples = con_mu_samples;
      opt.max_retries = con_retries;
      const auto run = construct_example(body, WeightFunction::one(), con_N, con_delta, con_rho, s, opt);
      r.parameters = Json{{"body", body_to_json(body)}, {"N", con_N}, {"delta", number(con_delta)}, {"seed", s}};
      r.parameters["rho"] = con_rho ? number(*con_rho) : Json("default");
      r.result = sharpness_run_to_json(run, !con_no_samples);
      return r;
    };
  }

  // verify-ball
  int vb_d = 2;
  std::size_t vb_N = 400;
  double vb_delta = 0.005;
  std::optional<double> vb_rho;
  {
    auto* c = app.add_subcommand("verify-ball", "sharpness run on the unit ball against 2 A_d");
    bind.add(c, "d", vb_d, "dimension (2..4)");
    bind.add(c, "N", vb_N, "number of boundary samples");
    bind.add(c, "delta", vb_delta, "slack delta > 0");
    bind.add(c, "rho", vb_rho, "exclusion radius");
    commands["verify-ball"] = [&](std::uint64_t s) {
      Result r;
      const auto rep = verify_ball_sharpness(vb_d, vb_delta, vb_N, s, vb_rho);
      r.parameters = Json{{"d", vb_d}, {"N", vb_N}, {"delta", number(vb_delta)}, {"seed", s}};
      r.parameters["rho"] = vb_rho ? number(*vb_rho) : Json("default");
      r.result = Json{{"target", exact(rep.target)},
                      {"ceiling", exact(rep.ceiling)},
                      {"achieved_density", with_error({rep.achieved, rep.std_error, 0.0})},
                      {"raw_lower_density", exact(rep.run.raw_lower_density)},
                      {"margin", with_error({rep.margin, rep.std_error, 0.0})},
                      {"meets_target", rep.meets_target},
                      {"below_ceiling", rep.below_ceiling},
                      {"run", sharpness_run_to_json(rep.run, false)}};
      return r;
    };
  }

  // verify-2d
  BodySpec v2_body;
  std::size_t v2_N = 1000;
  double v2_delta = 0.002;
  std::optional<double> v2_rho;
  {
    auto* c = app.add_subcommand("verify-2d", "sharpness run on a quarter-turn symmetric planar body");
    v2_body.bind(bind, c, "lp2d");
    bind.add(c, "N", v2_N, "number of boundary samples");
    bind.add(c, "delta", v2_delta, "slack delta > 0");
    bind.add(c, "rho", v2_rho, "exclusion radius");
    commands["verify-2d"] = [&](std::uint64_t s) {
      Result r;
      const auto body = v2_body.build(2);
      const auto rep = verify_2d_sharpness(body, v2_delta, v2_N, s, v2_rho);
      r.parameters = Json{{"body", body_to_json(body)}, {"N", v2_N}, {"delta", number(v2_delta)}, {"seed", s}};
      r.parameters["rho"] = v2_rho ? number(*v2_rho) : Json("default");
      r.result = Json{{"mean_width", exact(rep.mean_width)},
                      {"pi_half_width", exact(rep.pi_half_width)},
                      {"two_over_mu", exact(rep.two_over_mu)},
                      {"relative_gap", exact(rep.relative_gap)},
                      {"perimeter", exact(rep.mu_qt.perimeter)},
                      {"target", exact(rep.target)},
                      {"achieved_density", with_error({rep.achieved, rep.std_error, 0.0})},
                      {"raw_lower_density", exact(rep.run.raw_lower_density)},
                      {"margin", with_error({rep.margin, rep.std_error, 0.0})},
                      {"meets_target", rep.meets_target},
                      {"run", sharpness_run_to_json(rep.run, false)}};
      return r;
    };
  }

  // bound-margin
  ProductSpec bm_f;
  BodySpec bm_body;
  {
    auto* c = app.add_subcommand("bound-margin", "A_d W(K) minus the nodal density of a certified product");
    bm_f.bind(bind, c);
    auto* o = c->add_option("--body", bm_body.kind, "ball | cube | lp2d")->default_str("ball");
    bind.config_only(c, o, "body", [&](const Json& j) {
      if (j.is_object())
        bm_body.inline_spec = j;
      else
        bm_body.kind = json_as<std::string>(j, "body");
    });
    bind.add(c, "R", bm_body.R, "radius or half-width");
    bind.add(c, "p", bm_body.p, "planar l^p exponent");
    bind.add(c, "body-file", bm_body.file, "JSON body specification");
    commands["bound-margin"] = [&](std::uint64_t s) {
      Result r;
      const auto f = bm_f.build();
      const auto body = bm_body.build(f.dimension());
      const auto cert = spectrum_certificate(f, body);
      const auto margin = density_bound_margin(f, body, SphereQuadrature::standard(body.dimension(), s));
      r.parameters = Json{{"body", body_to_json(body)}, {"f", cosine_product_to_json(f)}, {"seed", s}};
      r.result = Json{{"margin", with_error(margin)},
                      {"nodal_density", exact(analytic_density(nodal_arrangement(f)))},
                      {"certificate", certificate_to_json(cert)}};
      return r;
    };
  }

  // jensen
  ProductSpec jf;
  std::vector<double> j_x, j_theta;
  double j_T = 1.0;
  std::optional<double> j_h;
  {
    auto* c = app.add_subcommand("jensen", "both sides of the slice zero-count inequality");
    jf.bind(bind, c);
    bind.add(c, "x", j_x, "base point (default origin)")->delimiter(',');
    bind.add(c, "theta", j_theta, "slice direction (default e1)")->delimiter(',');
    bind.add(c, "T", j_T, "slice half-length");
    bind.add(c, "h-theta", j_h, "spectral support bound along theta (default: exact)");
    commands["jensen"] = [&](std::uint64_t) {
      Result r;
      const auto f = jf.build();
      const int d = f.dimension();
      const Point x = j_x.empty() ? Point(d, 0.0) : j_x;
      const UnitVector theta = j_theta.empty() ? UnitVector::axis(d, 0) : UnitVector::normalized(j_theta);
      if (static_cast<int>(x.size()) != d || theta.dimension() != d)
        throw DimensionMismatch("x and theta must have the dimension of f");
      const double h = j_h.value_or(f.spectral_support(theta.span()));
      const auto sides = jensen_functional(f, x, theta, j_T, h);
      r.parameters = Json{{"f", cosine_product_to_json(f)},
                          {"x", point_array(x)},
                          {"theta", point_array(theta.span())},
                          {"T", number(j_T)},
                          {"h", number(h)}};
      r.result = Json{{"lhs", exact(sides.lhs)},
                      {"rhs", exact(sides.rhs)},
                      {"zeros", sides.zeros},
                      {"holds", sides.lhs <= sides.rhs}};
      r.csv = "lhs,rhs,zeros\n" + format_double(sides.lhs) + ',' + format_double(sides.rhs) + ',' +
              std::to_string(sides.zeros) + '\n';
      return r;
    };
  }

  // ronkin
  ProductSpec rf;
  std::vector<double> r_radii{10.0, 40.0};
  std::size_t r_samples = 100000;
  {
    auto* c = app.add_subcommand("ronkin", "normalised Ronkin-type averages of log(1/|f|) over balls");
    rf.bind(bind, c);
    bind.add(c, "R", r_radii, "ball radii")->delimiter(',');
    bind.add(c, "samples", r_samples, "Monte Carlo points per radius (>= 10^4)");
    commands["ronkin"] = [&](std::uint64_t s) {
      Result r;
      const auto f = rf.build();
      Json rows = Json::array();
      std::string csv = "R,value,std_err\n";
      for (std::size_t i = 0; i < r_radii.size(); ++i) {
        const auto e = ronkin_estimate(f, r_radii[i], r_samples, derive_seed(s, {i}));
        rows.push_back(Json{{"R", number(r_radii[i])}, {"estimate", with_error(e)}});
        csv += csv_row({r_radii[i], e.value, e.std_error});
      }
      r.parameters = Json{{"f", cosine_product_to_json(f)}, {"R", r_radii}, {"samples", r_samples}, {"seed", s}};
      r.result = Json{{"rows", std::move(rows)}};
      r.csv = csv;
      return r;
    };
  }

  // crofton
  ArrangementSpec cr_set;
  std::vector<double> cr_center;
  double cr_R = 30.0;
  int cr_dirs = kDefaultCroftonDirections, cr_lines = kDefaultCroftonLinesPerDirection;
  {
    auto* c = app.add_subcommand("crofton", "Crofton estimate of the arrangement measure in a ball");
    cr_set.bind(bind, c);
    bind.add(c, "center", cr_center, "ball center (default origin)")->delimiter(',');
    bind.add(c, "radius", cr_R, "ball radius");
    bind.add(c, "dirs", cr_dirs, "line directions");
    bind.add(c, "lines", cr_lines, "lines per direction");
    commands["crofton"] = [&](std::uint64_t s) {
      Result r;
      const auto set = cr_set.build();
      const int d = set.dimension();
      const Point center = cr_center.empty() ? Point(d, 0.0) : cr_center;
      const auto e = crofton_estimate(set, center, cr_R, cr_dirs, cr_lines, s);
      const double vol = unit_ball_volume(d) * std::pow(cr_R, d);
      r.parameters = Json{{"arrangement", arrangement_to_json(set)},
                          {"center", point_array(center)},
                          {"radius", number(cr_R)},
                          {"dirs", cr_dirs},
                          {"lines", cr_lines},
                          {"seed", s}};
      r.result = Json{{"measure", with_error(e)}, {"density", with_error({e.value / vol, e.std_error / vol, 0.0})}};
      if (set.raw()) {
        r.result["analytic_density"] = exact(analytic_density(set.families()));
        r.result["exact_measure"] = exact(ball_measure(set, center, cr_R).measure.value);
      }
      r.csv = "measure,std_err,density\n" + csv_row({e.value, e.std_error, e.value / vol});
      return r;
    };
  }

  // sampling-sweep
  BodySpec sw_body;
  double sw_p = 2.0;
  std::vector<double> sw_factors{0.3, 0.6, 0.9, 1.2, 1.5};
  std::vector<std::uint64_t> sw_seeds;
  SweepOptions sw_opt;
  {
    auto* c = app.add_subcommand("sampling-sweep", "L^p sampling ratios against arrangement density");
    sw_body.bind(bind, c, "ball");
    bind.add(c, "lp", sw_p, "L^p exponent (>= 1 or inf)");
    bind.add(c, "density-factors", sw_factors, "densities as multiples of A_d W(K)")->delimiter(',');
    bind.add(c, "seeds", sw_seeds, "arrangement seeds (default: --seed)")->delimiter(',');
    bind.add(c, "margin", sw_opt.margin, "spectral margin of the test functions");
    bind.add(c, "rho", sw_opt.rho, "exclusion radius");
    bind.add(c, "box-scale", sw_opt.box_scale, "truncation box in units of 1 / bandwidth");
    bind.add(c, "points-per-period", sw_opt.points_per_period, "quadrature resolution");
    commands["sampling-sweep"] = [&](std::uint64_t s) {
      Result r;
      const auto body = sw_body.build(2);
      const int d = body.dimension();
      const double threshold = sharp_constant(d) * mean_width(body, SphereQuadrature::standard(d)).value;
      std::vector<double> grid;
      for (double f : sw_factors) grid.push_back(f * threshold);
      const std::vector<std::uint64_t> seeds = sw_seeds.empty() ? std::vector<std::uint64_t>{s} : sw_seeds;
      const auto res = density_sweep(body, sw_p, grid, {}, seeds, sw_opt);
      r.parameters = Json{{"body", body_to_json(body)},
                          {"lp", number(sw_p)},
                          {"density_factors", sw_factors},
                          {"seeds", seeds},
                          {"margin", number(sw_opt.margin)},
                          {"rho", number(sw_opt.rho)},
                          {"box_scale", number(sw_opt.box_scale)},
                          {"points_per_period", number(sw_opt.points_per_period)}};
      r.result = sweep_to_json(res);
      r.csv = sweep_to_csv(res);
      return r;
    };
  }

  // A command named in the config file runs when none is given on the line.
  Json config = Json::object();
  std::vector<std::string> argv_store{"msl"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());

  Outcome outcome;
  std::string command;
  auto error_json = [&](const std::string& kind, const std::string& message) {
    Json e{{"error", Json{{"kind", kind}, {"message", message}}}};
    if (!command.empty()) e["error"]["command"] = command;
    return e.dump(2) + '\n';
  };

  try {
    for (std::size_t i = 1; i < argv_store.size(); ++i) {
      const auto& a = argv_store[i];
      if (a == "--config" && i + 1 < argv_store.size()) config = read_json_file(argv_store[i + 1]);
      if (a.rfind("--config=", 0) == 0) config = read_json_file(a.substr(9));
    }
    if (!config.is_object()) throw ValidationError("config must be a JSON object");
    bool has_command = false;
    for (const auto& a : args) has_command = has_command || commands.count(a) > 0;
    if (!has_command && config.contains("command"))
      argv_store.insert(argv_store.begin() + 1, json_as<std::string>(config["command"], "command"));

    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      std::ostringstream out, err;
      outcome.exit_code = app.exit(e, out, err);
      outcome.output = out.str();
      outcome.error = err.str();
      if (outcome.exit_code != 0) {
        outcome.error = error_json("usage", e.what());
        outcome.exit_code = kExitValidation;
      }
      return outcome;
    }

    const CLI::App* active = nullptr;
    for (const auto* sub : app.get_subcommands()) active = sub;
    if (active == nullptr) {
      outcome.output = app.help();
      return outcome;
    }
    command = active->get_name();
    bind.apply(config, active);

    if (threads) set_thread_budget(*threads);
    std::string seed_source = "flag";
    if (!seed) {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      seed_source = "generated";
    } else if (app.get_option("--seed")->count() == 0) {
      seed_source = "config";
    }

    Result res = commands.at(command)(*seed);
    if (!res.parameters.contains("seed") && !res.parameters.contains("seeds")) seed_source = "unused";
    std::string text;
    if (format == "csv") {
      if (!res.csv) throw ValidationError("csv output is not available for " + command);
      text = *res.csv;
    } else {
      Json doc{{"command", command},
               {"parameters", std::move(res.parameters)},
               {"result", std::move(res.result)},
               {"metadata", Json{{"tool", "msl"}, {"version", MSL_VERSION}, {"seed_source", seed_source}}}};
      text = doc.dump(2) + '\n';
    }
    if (out_path.empty()) {
      outcome.output = std::move(text);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw ValidationError("cannot write " + out_path);
      out << text;
    }
  } catch (const ValidationError& e) {
    outcome.exit_code = kExitValidation;
    outcome.error = error_json(e.kind(), e.what());
  } catch (const Error& e) {
    outcome.exit_code = kExitFailure;
    outcome.error = error_json(e.kind(), e.what());
  } catch (const std::exception& e) {
    outcome.exit_code = kExitFailure;
    outcome.error = error_json("internal", e.what());
  }
  return outcome;
}

}  // namespace msl::cli
