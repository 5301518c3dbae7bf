#include "msl/serialization.hpp"

#include <charconv>
#include <sstream>

namespace msl {
namespace {

double read_number(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return kInfinity;
  }
  throw ValidationError(std::string("field \"") + key + "\" must be a number");
}

Point read_point(const Json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of numbers");
  Point p;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError("expected an array of numbers");
    p.push_back(v.get<double>());
  }
  return p;
}

Json point_json(std::span<const double> p) {
  Json a = Json::array();
  for (double v : p) a.push_back(number(v));
  return a;
}

int read_dimension(const Json& j) {
  if (!j.contains("dimension") || !j.at("dimension").is_number_integer())
    throw ValidationError("missing integer field \"dimension\"");
  return j.at("dimension").get<int>();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

Json exact(double v) { return Json{{"value", number(v)}, {"exact", true}}; }

Json with_error(const Estimate& e) {
  Json j{{"value", number(e.value)}};
  if (e.tolerance > 0.0) j["tolerance"] = number(e.tolerance);
  j["std_error"] = number(e.std_error);
  return j;
}

Json with_tolerance(double v, double tol) { return Json{{"value", number(v)}, {"tolerance", number(tol)}}; }

ConvexBody body_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ValidationError("body specification needs a string field \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "ball") return ConvexBody::ball(read_dimension(j), j.contains("radius") ? read_number(j, "radius") : 1.0);
  if (kind == "cube")
    return ConvexBody::cube(read_dimension(j), j.contains("half_width") ? read_number(j, "half_width") : 1.0);
  if (kind == "lp2d") {
    if (j.contains("dimension") && read_dimension(j) != 2) throw ValidationError("lp2d bodies are planar");
    return ConvexBody::lp_ball_2d(read_number(j, "p"));
  }
  if (kind == "oracle-grid") {
    if (j.contains("dimension") && read_dimension(j) != 2) throw ValidationError("oracle-grid bodies are planar");
    if (!j.contains("grid")) throw ValidationError("oracle-grid body needs a \"grid\" array");
    return ConvexBody::from_angle_grid(read_point(j.at("grid")));
  }
  throw ValidationError("unknown body kind \"" + kind + "\"");
}

Json body_to_json(const ConvexBody& body) {
  Json j;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, EuclideanBall>) {
          j = Json{{"kind", "ball"}, {"dimension", body.dimension()}, {"radius", number(k.radius)}};
        } else if constexpr (std::is_same_v<T, Cube>) {
          j = Json{{"kind", "cube"}, {"dimension", body.dimension()}, {"half_width", number(k.half_width)}};
        } else if constexpr (std::is_same_v<T, LpBall2D>) {
          j = Json{{"kind", "lp2d"}, {"dimension", 2}, {"p", number(k.p)}};
        } else if (!k.angle_grid.empty()) {
          j = Json{{"kind", "oracle-grid"}, {"dimension", 2}, {"grid", point_json(k.angle_grid)}};
        } else {
          j = Json{{"kind", "oracle"}, {"dimension", body.dimension()}};
        }
      },
      body.kind());
  j["quarter_turn_symmetric"] = body.quarter_turn_symmetric();
  return j;
}

CosineProduct cosine_product_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("cosine product must be a JSON object");
  const int d = read_dimension(j);
  CosineProduct f(d);
  if (j.contains("terms")) {
    for (const auto& t : j.at("terms")) {
      if (!t.contains("nu")) throw ValidationError("cosine term needs \"nu\"");
      const Point nu = read_point(t.at("nu"));
      if (static_cast<int>(nu.size()) != d) throw DimensionMismatch("cosine term direction has wrong dimension");
      f.add(read_number(t, "a"), UnitVector::normalized(nu));
    }
  }
  return f;
}

Json cosine_product_to_json(const CosineProduct& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms()) terms.push_back(Json{{"a", number(t.a)}, {"nu", point_json(t.nu.span())}});
  return Json{{"dimension", f.dimension()}, {"terms", std::move(terms)}};
}

PrunedArrangement arrangement_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("arrangement must be a JSON object");
  const int d = read_dimension(j);
  std::vector<HyperplaneFamily> families;
  if (j.contains("families")) {
    for (const auto& f : j.at("families")) {
      const Point nu = read_point(f.at("nu"));
      if (static_cast<int>(nu.size()) != d) throw DimensionMismatch("family direction has wrong dimension");
      families.push_back({UnitVector::normalized(nu), read_number(f, "spacing"),
                          f.contains("offset") ? read_number(f, "offset") : 0.0});
    }
  }
  return PrunedArrangement(std::move(families), j.contains("rho") ? read_number(j, "rho") : 0.0);
}

Json arrangement_to_json(const PrunedArrangement& a) {
  Json fams = Json::array();
  for (const auto& f : a.families())
    fams.push_back(Json{{"nu", point_json(f.nu.span())}, {"spacing", number(f.spacing)}, {"offset", number(f.offset)}});
  Json j;
  if (!a.empty()) j["dimension"] = a.dimension();
  j["rho"] = number(a.rho());
  j["aggressive_pruning"] = a.aggressive();
  j["families"] = std::move(fams);
  return j;
}

Json certificate_to_json(const SpectrumCertificate& c) {
  return Json{{"body", c.body},
              {"gauge_max", exact(c.gauge_max)},
              {"argmax", point_json(c.argmax)},
              {"grid_nodes", c.grid_nodes},
              {"pass", c.pass}};
}

Json mu_to_json(const MuEstimate& m) {
  return Json{{"mu_hat", with_error({m.value, m.std_error, 0.0})},
              {"mu_holdout", with_error({m.holdout, m.holdout_std_error, 0.0})},
              {"argmax", point_json(m.argmax)},
              {"samples", m.samples},
              {"nodes", m.nodes}};
}

Json density_report_to_json(const DensityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.densities)
    rows.push_back(Json{{"r", number(row.r)},
                        {"inf_density", with_error({row.inf_density, row.std_error, 0.0})},
                        {"argmin", point_json(row.argmin)}});
  Json phi = Json::array();
  for (const auto& row : r.phi_profile)
    phi.push_back(Json{{"r", number(row.r)},
                       {"sup_phi_ratio", with_error({row.sup_ratio, row.std_error, 0.0})},
                       {"argmax", point_json(row.argmax)}});
  return Json{{"lower_density", with_error({r.lower_density, r.lower_density_std_error, 0.0})},
              {"method", to_string(r.method)},
              {"centers", r.centers},
              {"trend", r.trend},
              {"densities", std::move(rows)},
              {"phi_profile", std::move(phi)}};
}

std::string density_report_to_csv(const DensityReport& r) {
  std::ostringstream out;
  out << "r,inf_density,sup_phi_ratio,std_err\n";
  for (const auto& row : r.densities)
    out << format_double(row.r) << ',' << format_double(row.inf_density) << ",," << format_double(row.std_error)
        << '\n';
  for (const auto& row : r.phi_profile)
    out << format_double(row.r) << ",," << format_double(row.sup_ratio) << ',' << format_double(row.std_error)
        << '\n';
  return out.str();
}

Json sharpness_run_to_json(const SharpnessRun& run, bool include_samples) {
  Json j{{"body", run.body},
         {"dimension", run.dimension},
         {"N", run.N},
         {"delta", number(run.delta)},
         {"rho", number(run.rho)},
         {"seed", run.seed},
         {"attempt_seed", run.attempt_seed},
         {"retries", run.retries},
         {"mu", mu_to_json(run.mu)},
         {"g_mean", exact(run.g_mean)},
         {"alpha", exact(run.alpha)},
         {"certificate", certificate_to_json(run.certificate)},
         {"analytic_density", exact(run.analytic_density)},
         {"raw_lower_density", exact(run.raw_lower_density)},
         {"achieved_density", with_error({run.achieved_density, run.achieved_std_error, 0.0})},
         {"pruning_loss", with_error({run.pruning_loss, run.achieved_std_error, 0.0})},
         {"target", exact(run.target)},
         {"margin", with_error({run.margin, run.achieved_std_error, 0.0})},
         {"density", density_report_to_json(run.density)}};
  if (include_samples) {
    Json samples = Json::array();
    for (std::size_t i = 0; i < run.samples.size(); ++i)
      samples.push_back(Json{{"point", point_json(run.samples[i].point)},
                             {"normal", point_json(run.samples[i].normal.span())},
                             {"g", number(run.g_values[i])}});
    j["samples"] = std::move(samples);
    j["f"] = cosine_product_to_json(run.f);
    j["arrangement"] = arrangement_to_json(run.arrangement);
  }
  return j;
}

Json ratio_report_to_json(const RatioReport& r) {
  return Json{{"p", number(r.p)},
              {"box", number(r.box)},
              {"resolution", number(r.resolution)},
              {"ambient_norm", with_tolerance(r.ambient_norm, r.tail_bound * r.ambient_norm)},
              {"trajectory_norm", exact(r.trajectory_norm)},
              {"ratio", with_tolerance(r.ratio, r.tail_bound * r.ratio)},
              {"tail_bound", exact(r.tail_bound)},
              {"trajectory_points", r.trajectory_points}};
}

Json sweep_to_json(const SweepResult& s) {
  Json rows = Json::array();
  for (const auto& row : s.rows)
    rows.push_back(Json{{"density", number(row.density)},
                        {"analytic_density", exact(row.analytic_density)},
                        {"families", row.families},
                        {"p", number(row.p)},
                        {"max_ratio", exact(row.max_ratio)},
                        {"f_id", row.f_id},
                        {"seed", row.seed}});
  return Json{{"label", s.label},
              {"threshold", exact(s.threshold)},
              {"spacing", exact(s.spacing)},
              {"rows", std::move(rows)}};
}

std::string sweep_to_csv(const SweepResult& s) {
  std::ostringstream out;
  out << "density,p,max_ratio,f_id,seed\n";
  for (const auto& row : s.rows)
    out << format_double(row.analytic_density) << ',' << format_double(row.p) << ','
        << format_double(row.max_ratio) << ',' << row.f_id << ',' << row.seed << '\n';
  return out.str();
}

}  // namespace msl
