#include <gtest/gtest.h>

#include <sstream>

#include "flexduplex/config.hpp"

namespace fc = flexduplex::config;
namespace fe = flexduplex::engine;

namespace {

fc::ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return fc::parse(in, "test.cfg");
}

// Expects a ConfigError on `line` naming `key`.
void expect_error(const std::string& text, int line, const std::string& key) {
  try {
    parse(text);
    ADD_FAILURE() << "no error for:\n" << text;
  } catch (const fc::ConfigError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.key(), key) << e.what();
    if (line > 0) EXPECT_NE(std::string(e.what()).find("test.cfg:" + std::to_string(line)), std::string::npos);
  }
}

}  // namespace

TEST(Config, DefaultsFollowTheDeployment) {
  const auto c = parse("");
  EXPECT_EQ(c.sim.scheme, fe::Scheme::kOnlyMeNB);
  EXPECT_EQ(c.sim.ue_count, 50);
  EXPECT_DOUBLE_EQ(c.sim.isd_m, 500.0);
  EXPECT_DOUBLE_EQ(c.sim.senb_distance_m, 100.0);
  EXPECT_DOUBLE_EQ(c.sim.packet_bits, 2e6);
  EXPECT_DOUBLE_EQ(c.sim.asymmetry_ratio, 0.1);
  EXPECT_DOUBLE_EQ(c.sim.budget.tx_power_menb_dbm, 46.0);
  EXPECT_DOUBLE_EQ(c.sim.budget.tx_power_senb_dbm, 24.0);
  EXPECT_DOUBLE_EQ(c.sim.budget.tx_power_ue_dbm, 23.0);
  EXPECT_DOUBLE_EQ(c.sim.aci.acir_db, 30.0);
  EXPECT_EQ(c.sim.plan.total_rbs, 50);
}

TEST(Config, ParsesSectionsCommentsAndShortSchemes) {
  const auto c = parse(
      "# header\n"
      "[engine]\n"
      "scheme = FMA   ; inline comment\n"
      "seed = 42\n"
      "[traffic]\n"
      "lambda_dl = 0.1\n"
      "asymmetry_ratio = 10\n"
      "[radio]\n"
      "acir_db = inf\n"
      "fading = true\n");
  EXPECT_EQ(c.sim.scheme, fe::Scheme::kFmaDlReuse);
  EXPECT_EQ(c.sim.seed, 42u);
  EXPECT_TRUE(std::isinf(c.sim.aci.acir_db));
  EXPECT_TRUE(c.sim.propagation.fading_enabled);
}

TEST(Config, ResolveScheme) {
  EXPECT_EQ(fc::resolve_scheme("FMA", 0.1), fe::Scheme::kFmaUlReuse);
  EXPECT_EQ(fc::resolve_scheme("FMA", 10), fe::Scheme::kFmaDlReuse);
  EXPECT_EQ(fc::resolve_scheme("TMA", 0.1), fe::Scheme::kTmaUlReuse);
  EXPECT_EQ(fc::resolve_scheme("ONLY_MENB", 10), fe::Scheme::kOnlyMeNB);
  EXPECT_THROW(fc::resolve_scheme("TMA", 10), flexduplex::InvalidArgument);
}

TEST(Config, LinePreciseDiagnostics) {
  expect_error("[engine]\nhorizon = 100\nwarmup = 200\n", 2, "engine.horizon");
  expect_error("[engine]\nbogus = 1\n", 2, "engine.bogus");
  expect_error("[nowhere]\n", 1, "nowhere");
  expect_error("[engine]\nseed = 1\nseed = 2\n", 3, "engine.seed");
  expect_error("[traffic]\nlambda_dl = fast\n", 2, "traffic.lambda_dl");
  expect_error("lambda_dl = 1\n", 1, "lambda_dl");
  expect_error("[engine]\nscheme = TMA\n[traffic]\nasymmetry_ratio = 10\n", 2, "engine.scheme");
  expect_error("[engine]\nreplications = 0\n", 2, "engine.replications");
  expect_error("[engine]\nneighbor_ue_interference = maybe\n", 2, "engine.neighbor_ue_interference");
  expect_error("[scenario]\nsenb_distance = 400\n", 2, "scenario.senb_distance");
}

TEST(Config, SweepAxes) {
  const auto c = parse(
      "[sweep.top]\nschemes = ONLY_MENB, FMA, TMA\nlambda_dl = 1, 1.5\nratio = 0.1\n"
      "[sweep.bottom]\nschemes = ONLY_MENB, FMA\nlambda_dl = 0.1, 0.15\nratio = 10\n");
  const auto pts = c.sweep_points();
  ASSERT_EQ(pts.size(), 10u);
  EXPECT_EQ(pts[0].scheme, fe::Scheme::kOnlyMeNB);
  EXPECT_EQ(pts[2].scheme, fe::Scheme::kFmaUlReuse);
  EXPECT_EQ(pts[5].scheme, fe::Scheme::kTmaUlReuse);
  EXPECT_EQ(pts[8].scheme, fe::Scheme::kFmaDlReuse);
  EXPECT_DOUBLE_EQ(pts[9].lambda_dl, 0.15);
}

TEST(Config, SweepErrors) {
  expect_error("[sweep]\nschemes =\nlambda_dl = 1\nratio = 0.1\n", 2, "sweep.schemes");
  expect_error("[sweep]\nschemes = FMA\nratio = 0.1\n", 1, "sweep.lambda_dl");
  expect_error("[sweep]\nschemes = TMA\nlambda_dl = 1\nratio = 10\n", 2, "sweep.schemes");
  expect_error("[sweep]\nschemes = FMA\nlambda_dl = 1\nratio = 0.1\nstep = 3\n", 5, "sweep.step");
}

TEST(Config, DumpRoundTrips) {
  const auto c = parse(
      "[engine]\nscheme = TMA\nseed = 9\ninterferer_activity = 0.25\nut_averaging = ue\n"
      "[traffic]\nlambda_dl = 0.3333333333333333\n"
      "[radio]\nacir_db = inf\nshadowing_small_ue = 7.5\n"
      "[sweep]\nschemes = FMA\nlambda_dl = 1, 1.5\nratio = 0.1\n");
  const std::string once = fc::dump(c);
  const auto back = parse(once);
  EXPECT_EQ(fc::dump(back), once);
  EXPECT_EQ(back.sim.scheme, fe::Scheme::kTmaUlReuse);
  EXPECT_EQ(back.sim.lambda_dl, c.sim.lambda_dl);
  EXPECT_EQ(back.sim.propagation.sigma(flexduplex::radio::LinkClass::kSmallUe), 7.5);
  EXPECT_EQ(back.sim.ut_averaging, flexduplex::metrics::UtAveraging::kPerUe);
  EXPECT_EQ(back.sweeps.size(), 1u);
}

TEST(Config, EveryKeyIsDocumentedAndDumped) {
  const std::string d = fc::dump(parse(""));
  for (const auto& k : fc::known_keys()) {
    EXPECT_FALSE(k.description.empty()) << k.key;
    if (k.section != "sweep") EXPECT_NE(d.find("\n" + k.key + " = "), std::string::npos) << k.key;
  }
}

TEST(Config, MissingFile) { EXPECT_THROW(fc::load("/nonexistent/x.cfg"), fc::ConfigError); }
