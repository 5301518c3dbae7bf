#include <gtest/gtest.h>

#include <clocale>
#include <limits>

#include "msl/serialization.hpp"

namespace msl {
namespace {

TEST(Serialization, NumberTags) {
  EXPECT_EQ(exact(0.5).dump(), R"({"value":0.5,"exact":true})");
  EXPECT_EQ(with_error({1.0, 0.25, 0.0}).dump(), R"({"value":1.0,"std_error":0.25})");
  EXPECT_EQ(with_tolerance(2.0, 1e-6).dump(), R"({"value":2.0,"tolerance":1e-06})");
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()).dump(), R"("inf")");
}

TEST(Serialization, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, -2.5e-300, 1e22}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Serialization, BodyRoundTrip) {
  for (const auto& body : {ConvexBody::ball(3, 2.0), ConvexBody::cube(2, 0.5), ConvexBody::lp_ball_2d(4.0)}) {
    const auto j = body_to_json(body);
    const auto back = body_from_json(j);
    EXPECT_EQ(body_to_json(back).dump(), j.dump());
  }
  EXPECT_EQ(body_from_json(Json::parse(R"({"kind":"lp2d","p":"inf"})")).name(), ConvexBody::lp_ball_2d(kInfinity).name());
  EXPECT_THROW(body_from_json(Json::parse(R"({"kind":"torus"})")), ValidationError);
  EXPECT_THROW(body_from_json(Json::parse(R"({"kind":"ball"})")), ValidationError);
}

TEST(Serialization, ProductAndArrangementRoundTrip) {
  CosineProduct f(2);
  f.add(0.25, UnitVector::from_angle(0.3));
  f.add(0.5, UnitVector::axis(2, 1));
  const auto jf = cosine_product_to_json(f);
  EXPECT_EQ(cosine_product_to_json(cosine_product_from_json(jf)).dump(), jf.dump());

  const PrunedArrangement set(nodal_arrangement(f), 0.05);
  const auto ja = arrangement_to_json(set);
  const auto back = arrangement_from_json(ja);
  EXPECT_EQ(arrangement_to_json(back).dump(), ja.dump());
  EXPECT_EQ(back.rho(), 0.05);
  EXPECT_THROW(arrangement_from_json(Json::parse(R"({"dimension":2,"families":[{"nu":[1,0,0],"spacing":1}]})")),
               DimensionMismatch);
}

TEST(Serialization, CsvHeaders) {
  DensityReport rep;
  rep.densities.push_back({2.0, 1.5, 0.01, {}});
  EXPECT_EQ(density_report_to_csv(rep), "r,inf_density,sup_phi_ratio,std_err\n2,1.5,,0.01\n");
  SweepResult s;
  s.rows.push_back({1.0, 1.0, 1, 2.0, 3.5, "centered", 7});
  EXPECT_EQ(sweep_to_csv(s), "density,p,max_ratio,f_id,seed\n1,2,3.5,centered,7\n");
}

TEST(Serialization, LocaleIndependent) {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") == nullptr) GTEST_SKIP() << "de_DE locale not installed";
  EXPECT_EQ(format_double(0.5), "0.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

}  // namespace
}  // namespace msl
