#include "dimer/correlations.hpp"

#include <gtest/gtest.h>

#include <random>

namespace dimer {
namespace {

weight_field seeded_positive_field(torus_shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  weight_field f(shape);
  for (auto& sw : f.w) {
    sw.alpha = u(rng);
    sw.beta = u(rng);
    sw.gamma = u(rng);
  }
  return f;
}

TEST(SectorWeights, UniformSmallTori) {
  weight_field f11(torus_shape(1, 1), {});
  sector_weight_set mu = sector_weights(f11);
  EXPECT_NEAR(std::abs(mu.at({0, 0}) - cplx(0.5, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mu.at({1, 0}) - cplx(1.0 / 6, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mu.at({0, 1}) - cplx(1.0 / 6, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mu.at({1, 1}) - cplx(1.0 / 6, 0.0)), 0.0, 1e-12);

  weight_field f22(torus_shape(2, 2), {});
  sector_weight_set mu22 = sector_weights(f22);
  EXPECT_NEAR(std::abs(mu22.at({0, 0}) - cplx(1.0 / 6, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mu22.at({1, 0}) - cplx(5.0 / 18, 0.0)), 0.0, 1e-12);

  cplx sum = 0.0;
  for (theta th : all_sectors) sum += mu22.at(th);
  EXPECT_NEAR(std::abs(sum - cplx(1.0, 0.0)), 0.0, 1e-12);
}

TEST(EdgeProbability, SingleSiteUniformIsOneThird) {
  weight_field f(torus_shape(1, 1), {});
  for (move mv : {move::stay, move::step1, move::step2}) {
    cplx p = edge_probability(f, {{{0, 0}, mv}});
    EXPECT_NEAR(std::abs(p - cplx(1.0 / 3, 0.0)), 0.0, 1e-12);
  }
}

TEST(EdgeProbability, MatchesEnumerationOnSeededFields) {
  std::mt19937_64 rng(99);
  for (auto [m1, m2] : {std::pair{2, 2}, {3, 2}, {4, 2}, {2, 4}, {3, 3}}) {
    torus_shape shape(m1, m2);
    weight_field f = seeded_positive_field(shape, 1000 + static_cast<std::uint64_t>(m1 * m2));
    for (int len = 1; len <= 3; ++len) {
      std::vector<edge_event> ev;
      std::vector<int> sites;
      while (static_cast<int>(ev.size()) < len) {
        int i = static_cast<int>(rng() % static_cast<std::uint64_t>(shape.sites()));
        bool dup = false;
        for (int s : sites) dup = dup || s == i;
        if (dup) continue;
        sites.push_back(i);
        ev.push_back({shape.at(i), static_cast<move>(rng() % 3)});
      }
      cplx det_val = edge_probability(f, ev);
      cplx oracle = edge_probability_by_enumeration(f, ev);
      EXPECT_NEAR(std::abs(det_val - oracle), 0.0, 1e-10)
          << "shape (" << m1 << "," << m2 << ") events " << len;
    }
  }
}

TEST(EdgeProbability, LawOfTotalProbabilityPerSite) {
  torus_shape shape(3, 2);
  weight_field f = seeded_positive_field(shape, 4242);
  for (int i = 0; i < shape.sites(); ++i) {
    cplx sum = 0.0;
    for (move mv : {move::stay, move::step1, move::step2})
      sum += edge_probability(f, {{shape.at(i), mv}});
    EXPECT_NEAR(std::abs(sum - cplx(1.0, 0.0)), 0.0, 1e-11);
  }
}

TEST(EdgeProbability, MixtureOfSectorValues) {
  torus_shape shape(3, 3);
  weight_field f = seeded_positive_field(shape, 7);
  std::vector<edge_event> ev{{{0, 0}, move::step1}, {{1, 2}, move::step2}};
  sector_weight_set mu = sector_weights(f);
  cplx mixture = 0.0;
  for (theta th : all_sectors) mixture += mu.at(th) * sector_edge_probability(f, th, ev);
  EXPECT_NEAR(std::abs(mixture - edge_probability(f, ev)), 0.0, 1e-12);
}

TEST(EdgeProbability, RejectsCoincidingSites) {
  weight_field f(torus_shape(2, 2), {});
  std::vector<edge_event> ev{{{0, 0}, move::stay}, {{0, 0}, move::step1}};
  EXPECT_THROW(edge_probability(f, ev), std::invalid_argument);
}

TEST(EdgeProbability, EmptyEventIsCertain) {
  weight_field f(torus_shape(2, 2), {});
  EXPECT_EQ(edge_probability(f, {}), cplx(1.0, 0.0));
}

TEST(WrapCounts, PerLabelRule) {
  torus_shape shape(2, 2);
  std::vector<edge_event> ev{{{1, 0}, move::step1}, {{0, 1}, move::step2}, {{0, 0}, move::stay}};
  auto g = event_wrap_counts(shape, ev);
  EXPECT_EQ(g[0], 1);
  EXPECT_EQ(g[1], 1);
  torus_shape line(1, 2);
  std::vector<edge_event> ev2{{{0, 0}, move::step1}};
  auto g2 = event_wrap_counts(line, ev2);
  EXPECT_EQ(g2[0], 1);  // degenerate direction always wraps
}

TEST(TranslationInverse, MatchesDenseInverse) {
  site_weights w{1.1, 0.8, 1.25};
  for (auto [m1, m2] : {std::pair{4, 3}, {3, 4}, {2, 2}}) {
    torus_shape shape(m1, m2);
    weight_field f(shape, w);
    for (theta th : all_sectors) {
      cmatrix kinv = kasteleyn_inverse(f, th).inv;
      double worst = 0.0;
      for (int xi = 0; xi < shape.sites(); ++xi)
        for (int yi = 0; yi < shape.sites(); ++yi) {
          cplx fourier = kasteleyn_inverse_constant(shape, w, th, shape.at(xi), shape.at(yi));
          worst = std::max(worst, std::abs(fourier - kinv(xi, yi)));
        }
      EXPECT_LT(worst, 1e-11) << "(" << m1 << "," << m2 << ") theta " << sector_index(th);
    }
  }
}

TEST(TranslationInverse, PoleDetected) {
  // Uniform weights on (3,3): the periodic sector spectrum contains
  // 1 + w + w^2 = 0, an exact pole of the inverse.
  torus_shape shape(3, 3);
  EXPECT_THROW(translation_inverse_entry(shape, {1.0, 1.0, 1.0}, {0, 0}, 1, 0), pole_error);
}

TEST(SectorWeights, ZeroPartitionRejected) {
  // alpha = 1, beta = gamma = -1/2 on a single site: every sector value is
  // proportional to alpha + beta + gamma = 0 or cancels in the mixture.
  weight_field f(torus_shape(1, 1), {cplx(1.0, 0.0), cplx(-0.5, 0.0), cplx(-0.5, 0.0)});
  EXPECT_THROW(sector_weights(f), zero_partition_error);
}

}  // namespace
}  // namespace dimer
