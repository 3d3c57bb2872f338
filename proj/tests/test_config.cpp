#include "cfinsler/config.hpp"
#include "support.hpp"

#include <filesystem>

namespace cf = cfinsler;
using cf::testing::kSqrt3;

namespace {

// message of the ConfigError raised by fn, or "" if none
template <class Fn>
std::string config_error(Fn&& fn) {
  try {
    fn();
  } catch (const cf::Error& e) {
    if (e.code() == cf::ErrorCode::ConfigError) return e.what();
    return std::string("wrong code: ") + e.what();
  }
  return "";
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("cfinsler_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(ConfigNorm, Polyhedral) {
  const auto n = cf::norm_from_source(R"({"kind":"polyhedral","vertices":[[1,0],[0,1],[-1,0],[0,-1]]})");
  EXPECT_EQ(n.kind(), cf::NormKind::Polyhedral);
  EXPECT_NEAR(cf::eval(n, cf::vec({0.5, 0.5})), 1.0, 1e-15);
}

TEST(ConfigNorm, QuadraticAndScaled) {
  const auto n = cf::parse_norm(cf::json::parse(R"({"kind":"scaled","factor":2,
      "inner":{"kind":"quadratic","matrix":[[4,0],[0,1]]}})"));
  EXPECT_NEAR(cf::eval(n, cf::vec({1, 0})), 1.0, 1e-15);
}

TEST(ConfigNorm, ArcCompositeMatchesSePreset) {
  const double r = std::sqrt(5.0);
  cf::json arcs = cf::json::array();
  const double c[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (int k = 0; k < 4; ++k) {
    arcs.push_back({{"center", {c[k][0], c[k][1]}}, {"radius", r}, {"from", k * cf::kPi / 2}, {"to", (k + 1) * cf::kPi / 2}});
  }
  const auto n = cf::parse_norm({{"kind", "arc_composite"}, {"arcs", arcs}});
  const auto se = cf::norm_preset("se");
  for (double th = 0.1; th < 6.2; th += 0.37) {
    const cf::Vector y = cf::vec({std::cos(th), std::sin(th)});
    EXPECT_NEAR(cf::eval(n, y), cf::eval(se, y), 1e-15);
  }
}

TEST(ConfigNorm, Presets) {
  EXPECT_NEAR(cf::dual_eval(cf::norm_from_source("hexagon"), cf::covec({1, 0})), kSqrt3 / 2, 1e-15);
  EXPECT_NEAR(cf::eval(cf::parse_norm(cf::json::parse(R"({"preset":"euclidean"})")), cf::vec({3, 4})), 5.0, 1e-15);
  EXPECT_NE(config_error([] { cf::norm_from_source("octagon"); }).find("unknown norm preset"), std::string::npos);
}

TEST(ConfigNorm, ErrorsNameTheField) {
  EXPECT_NE(config_error([] { cf::norm_from_source(R"({"kind":"quadratic","matrix":[[1,0],[0,-1]]})"); })
                .find("field '/matrix'"),
            std::string::npos);
  EXPECT_NE(config_error([] { cf::norm_from_source(R"({"kind":"polyhedral"})"); }).find("'/vertices': missing"),
            std::string::npos);
  EXPECT_NE(config_error([] { cf::norm_from_source(R"({"kind":"polyhedral","vertices":[[1,0],[0,"a"],[-1,0]]})"); })
                .find("'/vertices/1/1'"),
            std::string::npos);
  EXPECT_NE(config_error([] {
              cf::norm_from_source(R"({"kind":"arc_composite","arcs":[{"center":[0,0],"radius":1,"from":0,"to":3.14},
                                   {"center":[0,0],"radius":"big","from":3.14,"to":6.28}]})");
            }).find("'/arcs/1/radius'"),
            std::string::npos);
  EXPECT_NE(config_error([] { cf::norm_from_source(R"({"kind":"conic"})"); }).find("unknown norm kind"),
            std::string::npos);
  EXPECT_NE(config_error([] { cf::norm_from_source(R"({"kind":"scaled","factor":-1,"inner":"hexagon"})"); })
                .find("'/factor'"),
            std::string::npos);
}

TEST(ConfigJson, SyntaxErrorsReportLineAndColumn) {
  const std::string msg = config_error([] { cf::parse_json_text("{\n  \"kind\": ,\n}", "cfg.json"); });
  EXPECT_NE(msg.find("cfg.json:2:"), std::string::npos) << msg;
  EXPECT_NE(config_error([] { cf::norm_from_source("{\"kind\":"); }).find("<inline>:1:"), std::string::npos);
}

TEST(ConfigField, Kinds) {
  const auto qh = cf::field_from_source(R"({"kind":"quasi_hyperbolic","base":{"preset":"hexagon"}})");
  EXPECT_NEAR(cf::field_eval(qh, cf::vec({0, 2}), cf::vec({0, 1})), 0.5, 1e-15);

  const auto box = cf::field_from_source(R"({"kind":"constant","norm":"euclidean","lower":[-1,-1],"upper":[1,1]})");
  EXPECT_TRUE(box.domain().contains(cf::vec({0.5, 0.5})));
  EXPECT_FALSE(box.domain().contains(cf::vec({1.5, 0.5})));

  const auto rh = cf::field_from_source(R"({"kind":"riemannian_hyperbolic"})");
  EXPECT_NEAR(cf::field_eval(rh, cf::vec({0, 2}), cf::vec({3, 4})), 2.5, 1e-15);

  const auto re = cf::field_from_source(R"({"kind":"riemannian_euclidean","dimension":3})");
  EXPECT_EQ(re.dimension(), 3);
}

TEST(ConfigField, Presets) {
  for (const char* name : {"hexagon", "se", "hyperbolic", "riemannian_hyperbolic", "euclidean"}) {
    EXPECT_NO_THROW(cf::field_preset(name)) << name;
  }
  EXPECT_NEAR(cf::field_eval(cf::field_from_source("hyperbolic"), cf::vec({0, 2}), cf::vec({3, 4})), 2.5, 1e-15);
  EXPECT_NE(config_error([] { cf::field_from_source("klein"); }).find("unknown field preset"), std::string::npos);
}

TEST(ConfigField, ErrorsNameTheField) {
  EXPECT_NE(config_error([] { cf::field_from_source(R"({"kind":"quasi_hyperbolic","base":{"kind":"quadratic","matrix":[[1]]}})"); })
                .find("'/base'"),
            std::string::npos);
  EXPECT_NE(config_error([] { cf::field_from_source(R"({"kind":"constant","norm":"euclidean","lower":[0,0]})"); })
                .find("'/upper': missing"),
            std::string::npos);
  EXPECT_NE(config_error([] { cf::field_from_source(R"({"kind":"constant","norm":"euclidean","lower":[1,0],"upper":[0,1]})"); })
                .find("'/lower'"),
            std::string::npos);
  EXPECT_NE(config_error([] { cf::field_from_source(R"({"kind":"riemannian_euclidean","dimension":0})"); })
                .find("'/dimension'"),
            std::string::npos);
  EXPECT_NE(config_error([] { cf::field_from_source("[1,2]"); }), "");
}

TEST(ConfigField, LoadsFromFile) {
  const auto path = temp_file("field.json", R"({"kind": "quasi_hyperbolic", "base": "se"})");
  const auto f = cf::field_from_source(path);
  EXPECT_NEAR(cf::field_eval(f, cf::vec({0, 2}), cf::vec({0, 1})), 0.5, 1e-15);
  const auto bad = temp_file("bad.json", "{\n\n  \"kind\" \"constant\"\n}");
  const std::string msg = config_error([&] { cf::field_from_source(bad); });
  EXPECT_NE(msg.find(bad + ":3:"), std::string::npos) << msg;
  EXPECT_NE(config_error([] { cf::load_json_file("/nonexistent/cfinsler.json"); }).find("cannot open"),
            std::string::npos);
}

TEST(ConfigNumbers, ParsesLists) {
  EXPECT_EQ(cf::parse_number_list("1,2.5,-3e-1", "x0"), (std::vector<double>{1, 2.5, -0.3}));
  EXPECT_EQ(cf::parse_number_list(" 1  2 ", "x0"), (std::vector<double>{1, 2}));
  EXPECT_TRUE(cf::parse_number_list("", "x0").empty());
  EXPECT_NE(config_error([] { cf::parse_number_list("1,x", "x0"); }).find("x0: 'x'"), std::string::npos);
  EXPECT_NE(config_error([] { cf::parse_number_list("1,2q", "x0"); }), "");
  EXPECT_NE(config_error([] { cf::parse_number_list("inf", "x0"); }), "");
}
