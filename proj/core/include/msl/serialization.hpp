#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "msl/convex_geometry.hpp"
#include "msl/nodal_density.hpp"
#include "msl/pw_functions.hpp"
#include "msl/sampling_experiments.hpp"
#include "msl/sharpness.hpp"

namespace msl {

using Json = nlohmann::ordered_json;

// Numeric fields: {"value": v, "exact": true} for deterministic closed forms,
// {"value": v, "std_error": e} for estimates, {"value": v, "tolerance": t}
// for quadrature results. Non-finite values are written as strings.
Json number(double v);
Json exact(double v);
Json with_error(const Estimate& e);
Json with_tolerance(double v, double tol);

// {"kind": "ball"|"cube"|"lp2d"|"oracle-grid", "dimension", "radius"|"half_width"|"p"|"grid"}
ConvexBody body_from_json(const Json& j);
Json body_to_json(const ConvexBody& body);

// {"dimension": d, "terms": [{"a": ..., "nu": [...]}]}
CosineProduct cosine_product_from_json(const Json& j);
Json cosine_product_to_json(const CosineProduct& f);

// {"dimension": d, "rho": r, "families": [{"nu": [...], "spacing": s, "offset": c}]}
PrunedArrangement arrangement_from_json(const Json& j);
Json arrangement_to_json(const PrunedArrangement& a);

Json certificate_to_json(const SpectrumCertificate& c);
Json mu_to_json(const MuEstimate& m);
Json density_report_to_json(const DensityReport& r);
// Columns r, inf_density, sup_phi_ratio, std_err.
std::string density_report_to_csv(const DensityReport& r);
Json sharpness_run_to_json(const SharpnessRun& run, bool include_samples = true);
Json ratio_report_to_json(const RatioReport& r);
Json sweep_to_json(const SweepResult& s);
// Columns density, p, max_ratio, f_id, seed.
std::string sweep_to_csv(const SweepResult& s);

// Shortest round-trip decimal representation, '.' separator, independent of locale.
std::string format_double(double v);

}  // namespace msl
