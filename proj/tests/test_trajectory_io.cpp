#include "cfinsler/integrator.hpp"
#include "cfinsler/qh_plane.hpp"
#include "cfinsler/trajectory_io.hpp"
#include "support.hpp"

#include <filesystem>
#include <sstream>

namespace cf = cfinsler;
using cf::testing::kSqrt3;

namespace {

cf::Trajectory hexagon_run() {
  cf::IntegrationOptions o;
  o.step = 0.1;
  return cf::integrate_E(cf::FinslerField::quasi_hyperbolic(cf::hexagon_norm()),
                         {cf::vec({0, 1}), cf::covec({1, kSqrt3})}, 0, 3, o);
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::exp(1.0)}) {
    EXPECT_EQ(std::stod(cf::format_double(v)), v);
  }
}

TEST(TrajectoryCsv, HeaderAndRows) {
  const auto tr = hexagon_run();
  std::ostringstream os;
  cf::write_trajectory_csv(os, tr);
  const auto ls = lines(os.str());
  ASSERT_FALSE(ls.empty());
  EXPECT_EQ(ls[0], "t,x1,x2,a1,a2,control,H");
  EXPECT_EQ(ls.size(), tr.sample_count() + 1);
  EXPECT_EQ(ls[1].rfind("0,0,1,1,1.7320508075688772,V1,", 0), 0u) << ls[1];
  EXPECT_NE(ls.back().find(",V5,"), std::string::npos);
}

TEST(TrajectoryCsv, ValuesParseBackExactly) {
  const auto tr = hexagon_run();
  std::ostringstream os;
  cf::write_trajectory_csv(os, tr);
  const auto ls = lines(os.str());
  std::istringstream row(ls.back());
  std::vector<std::string> cells;
  for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 7u);
  EXPECT_EQ(std::stod(cells[0]), tr.back().t);
  EXPECT_EQ(std::stod(cells[1]), tr.back().z.x(0));
  EXPECT_EQ(std::stod(cells[2]), tr.back().z.x(1));
  EXPECT_EQ(std::stod(cells[4]), tr.back().z.alpha(1));
}

TEST(TrajectoryCsv, EmptyTrajectoryWritesNothing) {
  std::ostringstream os;
  cf::write_trajectory_csv(os, cf::Trajectory{});
  EXPECT_TRUE(os.str().empty());
}

TEST(EventsCsv, ListsSwitches) {
  const auto tr = hexagon_run();
  std::ostringstream os;
  cf::write_events_csv(os, tr);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "t,kind,from,to,x1,x2,a1,a2");
  EXPECT_NEAR(std::stod(ls[1].substr(0, ls[1].find(','))), 2 * std::log(2.0), 1e-6) << ls[1];
  EXPECT_NE(ls[1].find(",switch,V1,V0,"), std::string::npos);
  EXPECT_NE(ls[2].find(",switch,V0,V5,"), std::string::npos);
}

TEST(EventsCsv, PathNaming) {
  EXPECT_EQ(cf::events_path_for("run.csv"), "run.events.csv");
  EXPECT_EQ(cf::events_path_for("out/run.v2.csv"), "out/run.v2.events.csv");
  EXPECT_EQ(cf::events_path_for("out.d/run"), "out.d/run.events.csv");
}

TEST(Svg, PolylineAndSwitchMarkers) {
  const auto tr = hexagon_run();
  std::ostringstream os;
  cf::write_svg(os, {cf::svg_series(tr, "#123456", "hexagon")}, "demo");
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("<?xml", 0), 0u);
  EXPECT_NE(s.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_NE(s.find("<title>demo</title>"), std::string::npos);
  EXPECT_NE(s.find("stroke=\"#123456\""), std::string::npos);
  std::size_t circles = 0;
  for (auto p = s.find("<circle"); p != std::string::npos; p = s.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, tr.switch_times().size());
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}

TEST(Svg, SeriesPoints) {
  const auto tr = hexagon_run();
  const auto series = cf::svg_series(tr);
  EXPECT_EQ(series.points.size(), tr.sample_count());
  ASSERT_EQ(series.markers.size(), 2u);
  // top corner of the trace, then back down at the starting height
  EXPECT_NEAR(series.markers[0].y(), 2.0, 1e-7);
  EXPECT_NEAR(series.markers[1].y(), 1.0, 1e-7);
}

TEST(Files, SavedOutputIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "cfinsler_io_test";
  std::filesystem::create_directories(dir);
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  cf::save_trajectory_csv(a, hexagon_run());
  cf::save_trajectory_csv(b, hexagon_run());
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(cf::events_path_for(a)), slurp(cf::events_path_for(b)));
  EXPECT_FALSE(slurp(cf::events_path_for(a)).empty());
  cf::save_svg((dir / "a.svg").string(), {cf::svg_series(hexagon_run())});
  cf::save_svg((dir / "b.svg").string(), {cf::svg_series(hexagon_run())});
  EXPECT_EQ(slurp((dir / "a.svg").string()), slurp((dir / "b.svg").string()));
}

TEST(Files, UnwritablePathIsConfigError) {
  EXPECT_CODE(cf::save_trajectory_csv("/nonexistent-dir/x.csv", hexagon_run()), ConfigError);
}
