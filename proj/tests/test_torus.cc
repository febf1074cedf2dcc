#include "dimer/torus.hpp"

#include <gtest/gtest.h>

#include <set>

#include "dimer/errors.hpp"

namespace dimer {
namespace {

TEST(TorusShape, ValidatesExtents) {
  EXPECT_THROW(torus_shape(0, 3), std::invalid_argument);
  EXPECT_THROW(torus_shape(2, -1), std::invalid_argument);
  EXPECT_EQ(torus_shape(4, 3).sites(), 12);
}

TEST(TorusShape, IndexRoundTrip) {
  torus_shape shape(5, 3);
  for (int i = 0; i < shape.sites(); ++i) {
    site x = shape.at(i);
    EXPECT_EQ(shape.index(x), i);
    EXPECT_GE(x.x1, 0);
    EXPECT_LT(x.x1, 5);
    EXPECT_GE(x.x2, 0);
    EXPECT_LT(x.x2, 3);
  }
}

TEST(TorusShape, StepAndWrap) {
  torus_shape shape(3, 2);
  EXPECT_EQ(shape.step({0, 0}, move::stay).x1, 0);
  EXPECT_EQ(shape.step({2, 0}, move::step1).x1, 0);
  EXPECT_TRUE(shape.wraps({2, 0}, move::step1));
  EXPECT_FALSE(shape.wraps({1, 0}, move::step1));
  EXPECT_TRUE(shape.wraps({0, 1}, move::step2));
  EXPECT_FALSE(shape.wraps({0, 0}, move::step2));
  // Degenerate directions always wrap.
  torus_shape line(4, 1);
  for (int x1 = 0; x1 < 4; ++x1) EXPECT_TRUE(line.wraps({x1, 0}, move::step2));
}

TEST(Enumeration, KnownCounts) {
  // Counts on a single ring of length m are 2^m + 1: each site independently
  // stays or steps right except the all-step cycle also closes, plus the
  // vertical wrap of every site.
  EXPECT_EQ(enumerate_matchings(torus_shape(1, 1)).size(), 3u);
  EXPECT_EQ(enumerate_matchings(torus_shape(2, 1)).size(), 5u);
  EXPECT_EQ(enumerate_matchings(torus_shape(3, 1)).size(), 9u);
  EXPECT_EQ(enumerate_matchings(torus_shape(4, 1)).size(), 17u);
  EXPECT_EQ(enumerate_matchings(torus_shape(12, 1)).size(), 4097u);
  EXPECT_EQ(enumerate_matchings(torus_shape(2, 2)).size(), 9u);
}

TEST(Enumeration, CapEnforced) {
  EXPECT_THROW(enumerate_matchings(torus_shape(5, 4)), shape_too_large_error);
}

TEST(Enumeration, MatchingsAreDistinctPermutations) {
  torus_shape shape(3, 2);
  std::set<std::vector<move>> seen;
  for (const matching& m : enumerate_matchings(shape)) {
    EXPECT_TRUE(seen.insert(m.moves).second);
    std::set<int> targets;
    for (int i = 0; i < shape.sites(); ++i)
      EXPECT_TRUE(targets.insert(shape.index(m.target(shape.at(i)))).second);
  }
}

TEST(MatchingType, CountsWrappingSteps) {
  torus_shape shape(2, 1);
  matching all_stay{shape, {move::stay, move::stay}};
  EXPECT_EQ(matching_type(all_stay).h1, 0);
  EXPECT_EQ(matching_type(all_stay).h2, 0);

  matching ring{shape, {move::step1, move::step1}};
  EXPECT_EQ(matching_type(ring).h1, 1);
  EXPECT_EQ(matching_type(ring).h2, 0);
  EXPECT_EQ(matching_sign(ring), -1);

  matching both_up{shape, {move::step2, move::step2}};
  EXPECT_EQ(matching_type(both_up).h2, 2);
  EXPECT_EQ(matching_sign(both_up), 1);
}

TEST(MatchingCycles, RingDecomposition) {
  torus_shape shape(3, 1);
  matching ring{shape, {move::step1, move::step1, move::step1}};
  auto cycles = matching_cycles(ring);
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0].length, 3);
  EXPECT_EQ(cycles[0].q1, 1);
  EXPECT_EQ(cycles[0].q2, 0);
}

TEST(SignFormula, HoldsOnSmallShapes) {
  for (auto [m1, m2] : {std::pair{1, 1}, {2, 1}, {3, 2}, {2, 3}, {4, 2}}) {
    torus_shape shape(m1, m2);
    for (const matching& m : enumerate_matchings(shape)) EXPECT_TRUE(sign_formula_holds(m));
  }
}

TEST(BeadShadow, MapsMovesToPoints) {
  torus_shape shape(4, 2);
  std::vector<move> mv(8, move::stay);
  mv[static_cast<std::size_t>(shape.index({2, 1}))] = move::step2;
  mv[static_cast<std::size_t>(shape.index({0, 0}))] = move::step1;
  matching m{shape, mv};
  bead_shadow shadow = matching_to_beads(m);
  ASSERT_EQ(shadow.beads.size(), 1u);
  EXPECT_DOUBLE_EQ(shadow.beads[0].t, 0.5);
  EXPECT_EQ(shadow.beads[0].string, 1);
  ASSERT_EQ(shadow.occupied.size(), 1u);
  EXPECT_DOUBLE_EQ(shadow.occupied[0].t_lo, 0.0);
  EXPECT_DOUBLE_EQ(shadow.occupied[0].t_hi, 0.25);
  EXPECT_EQ(shadow.occupied[0].string, 0);
}

}  // namespace
}  // namespace dimer
