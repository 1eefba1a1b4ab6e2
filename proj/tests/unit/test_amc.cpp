#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lfmimo/amc.hpp"
#include "lfmimo/error.hpp"
#include "lfmimo/units.hpp"

namespace lfmimo {
namespace {

TEST(ModulationTable, DefaultModesEchoReferenceTable) {
  const auto modes = default_modes();
  ASSERT_EQ(modes.size(), 7u);
  EXPECT_EQ(modes[0].name, "BPSK");
  EXPECT_DOUBLE_EQ(modes[0].a, 67.7328);
  EXPECT_DOUBLE_EQ(modes[0].g, 0.9819);
  EXPECT_NEAR(modes[0].gamma_p_db(), 6.3281, 1e-12);
  EXPECT_NEAR(modes[0].gamma_p, 4.293485494723103, 1e-12);
  for (std::size_t i = 0; i < modes.size(); ++i) EXPECT_EQ(modes[i].bits_per_symbol, static_cast<int>(i + 1));
}

TEST(ModulationTable, FrozenThresholds) {
  const auto t = default_table();
  const double expect[] = {13.673399455103016, 27.324726149485667, 80.94665159, 133.8134459,
                           344.4479467,        551.5421753,        1372.935846};
  ASSERT_EQ(t.thresholds().size(), 9u);
  EXPECT_EQ(t.threshold(0), 0.0);
  EXPECT_TRUE(std::isinf(t.threshold(8)));
  for (std::size_t n = 1; n <= 7; ++n) EXPECT_NEAR(t.threshold(n) / expect[n - 1], 1.0, 1e-9) << n;
  EXPECT_NEAR(linear_to_db(t.threshold(1)), 11.35876501, 1e-8);
  EXPECT_EQ(t.level_count(), 8u);
}

TEST(ModulationTable, ThresholdsStrictlyIncreasing) {
  const auto t = default_table();
  for (std::size_t n = 0; n + 1 < t.thresholds().size(); ++n) EXPECT_LT(t.threshold(n), t.threshold(n + 1));
}

TEST(ModulationTable, PerAtThresholdEqualsTarget) {
  const auto t = default_table();
  for (std::size_t n = 1; n <= t.modes().size(); ++n) {
    EXPECT_NEAR(per(t.modes()[n - 1], t.threshold(n)), 1e-4, 1e-15);
  }
  EXPECT_EQ(per(t.modes()[0], 1.0), 1.0);
}

TEST(ModulationTable, RejectsBadTables) {
  EXPECT_THROW(build_thresholds({}, 1e-4), ValidationError);
  auto modes = default_modes();
  EXPECT_THROW(build_thresholds(modes, 100.0), ValidationError);
  EXPECT_THROW(build_thresholds(modes, 0.0), ValidationError);
  auto swapped = default_modes();
  std::swap(swapped[2], swapped[3]);
  EXPECT_THROW(build_thresholds(swapped, 1e-4), ValidationError);
  auto low = default_modes();
  low[1].gamma_p = db_to_linear(30.0);
  EXPECT_THROW(build_thresholds(low, 1e-4), ValidationError);
  auto neg = default_modes();
  neg[0].g = -1.0;
  try {
    build_thresholds(neg, 1e-4);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "modulation.modes[0]");
  }
}

TEST(SelectMode, BinsAreLeftClosed) {
  const auto t = default_table();
  EXPECT_EQ(select_mode(t, 0.0), 0u);
  EXPECT_EQ(select_mode(t, 13.0), 0u);
  EXPECT_EQ(select_mode(t, t.threshold(1)), 1u);
  EXPECT_EQ(select_mode(t, std::nextafter(t.threshold(2), 0.0)), 1u);
  EXPECT_EQ(select_mode(t, t.threshold(7)), 7u);
  EXPECT_EQ(select_mode(t, 1e12), 7u);
  EXPECT_EQ(select_mode(t, std::numeric_limits<double>::infinity()), 7u);
}

TEST(ServeRate, BitsPerSymbolTimesBandwidth) {
  const auto t = default_table();
  EXPECT_EQ(serve_rate(t, 0), 0.0);
  for (std::size_t n = 1; n <= 7; ++n) EXPECT_DOUBLE_EQ(serve_rate(t, n), n * 1e6);
  EXPECT_THROW(serve_rate(t, 8), std::out_of_range);
}

}  // namespace
}  // namespace lfmimo
