#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "tacsim/disturbance.hpp"
#include "tacsim/errors.hpp"
#include "oracles.hpp"

using namespace tacsim;
using namespace tacsim::disturbance;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 1);
  Vec3 v(g(rng), g(rng), g(rng));
  return v.normalized();
}

RotationObservation observe(const Mat3& m, const Vec3& be) { return {m, (m - Mat3::Identity()) * be}; }

}  // namespace

TEST(Snr, Examples) {
  EXPECT_DOUBLE_EQ(snr(100, 0), 1.0);
  EXPECT_DOUBLE_EQ(snr(580, 20), 580.0 / 600.0);
  EXPECT_DOUBLE_EQ(snr(1, 1), 0.5);
  EXPECT_THROW(snr(0, 1), InvalidSignal);
  EXPECT_THROW(snr(-1, 1), InvalidSignal);
  EXPECT_THROW(snr(1, -1), InvalidArgument);
}

TEST(EarthField, TwoRotationsRecoverKnownField) {
  const Vec3 be(10, 20, 30);
  const double t = std::numbers::pi / 3;
  const std::vector<RotationObservation> obs{observe(oracle::rodrigues(Vec3::UnitX(), t), be),
                                             observe(oracle::rodrigues(Vec3::UnitY(), t), be)};
  const EarthFieldEstimate e = estimate_earth_field(obs);
  EXPECT_EQ(e.rank, 3);
  EXPECT_LT((e.field_ut - be).norm(), 1e-9 * be.norm());
  EXPECT_LT(e.residual_norm_ut, 1e-9);
}

TEST(EarthField, RandomExactInstances) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(0.2, 3.0);
  std::uniform_real_distribution<double> mag(-60, 60);
  for (int i = 0; i < 100; ++i) {
    const Vec3 be(mag(rng), mag(rng), mag(rng));
    std::vector<RotationObservation> obs;
    const int n = 2 + i % 4;
    for (int k = 0; k < n; ++k) obs.push_back(observe(oracle::rodrigues(random_unit(rng), ang(rng)), be));
    const EarthFieldEstimate e = estimate_earth_field(obs);
    ASSERT_LE((e.field_ut - be).norm(), 1e-9 * be.norm());
    std::shuffle(obs.begin(), obs.end(), rng);
    ASSERT_LE((estimate_earth_field(obs).field_ut - e.field_ut).norm(), 1e-12 * be.norm());
  }
}

TEST(EarthField, SingleAxisFamilyIsRankDeficient) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> ang(0.2, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis = random_unit(rng);
    std::vector<RotationObservation> obs;
    for (int k = 0; k < 1 + i % 5; ++k) obs.push_back(observe(oracle::rodrigues(axis, ang(rng)), {10, -5, 40}));
    try {
      estimate_earth_field(obs);
      FAIL() << "expected RankDeficient";
    } catch (const RankDeficient& e) {
      EXPECT_EQ(e.rank(), 2);
      EXPECT_NEAR(std::abs(e.unobservable_axis().dot(axis)), 1.0, 1e-9);
    }
  }
}

TEST(EarthField, IdentityRotationIsDegenerate) {
  const std::vector<RotationObservation> obs{observe(Mat3::Identity(), {1, 2, 3})};
  EXPECT_THROW(estimate_earth_field(obs), DegenerateRotation);
  EXPECT_THROW(estimate_earth_field({}), InvalidArgument);
}

TEST(EarthField, NoisyResidualAndCovariance) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> noise(0, 0.5);
  const Vec3 be(0, 32, 38);
  std::vector<RotationObservation> obs;
  for (int k = 0; k < 30; ++k) {
    auto o = observe(oracle::rodrigues(random_unit(rng), 1.0), be);
    o.delta_b_ut += Vec3(noise(rng), noise(rng), noise(rng));
    obs.push_back(o);
  }
  const EarthFieldEstimate e = estimate_earth_field(obs);
  EXPECT_LT((e.field_ut - be).norm(), 1.0);
  EXPECT_GT(e.residual_norm_ut, 0.0);
  for (int i = 0; i < 3; ++i) EXPECT_GT(e.covariance(i, i), 0.0);
  EXPECT_LT((e.covariance - e.covariance.transpose()).norm(), 1e-12);
}

TEST(Cancel, RoundTripAndZeroField) {
  std::mt19937_64 rng(24);
  const Vec3 be(12, -7, 40);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = oracle::rodrigues(random_unit(rng), 0.1 + i * 0.03);
    const Vec3 b(i, -2.0 * i, 0.5 * i);
    const Vec3 c = cancel_earth_field(b, be, r);
    EXPECT_LT((c + r.transpose() * be - b).norm(), 1e-12);
    EXPECT_EQ(cancel_earth_field(b, Vec3::Zero(), r), b);
  }
  pipeline::TactileFrame f;
  f.fa1.setConstant(77);
  f.sa2_ut = {1, 2, 3};
  const auto g = cancel_earth_field(f, be, Mat3::Identity());
  EXPECT_EQ(g.fa1, f.fa1);
  EXPECT_EQ(g.sa2_ut, f.sa2_ut - be);
}

TEST(Cancel, SnrCancellationOnRotatedFrames) {
  // Field seen after a rotation is R^T B_e; cancelling with the estimate leaves zero.
  const Vec3 be(0, 30, 40);
  const Mat3 r = oracle::rodrigues(Vec3::UnitZ(), std::numbers::pi / 3);
  const Vec3 seen = r.transpose() * be;
  EXPECT_LT(cancel_earth_field(seen, be, r).norm(), 1e-12);
}

TEST(AdjacentSweep, MatchesDipoleOracleAndIsMonotone) {
  const auto magnets = sensor::calibrated_magnet_set();
  const auto grid = default_dy_grid();
  ASSERT_EQ(grid.front(), 4.0);
  ASSERT_EQ(grid.back(), 30.0);
  ASSERT_EQ(grid.size(), 27U);
  const SnrSweep sweep = adjacent_snr_sweep(magnets, grid);
  ASSERT_EQ(sweep.rows.size(), 4 * grid.size());
  for (std::size_t m = 0; m < 4; ++m) {
    const double gap = sensor::rest_gap_mm(magnets[m]);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const SnrReport& row = sweep.rows[m * grid.size() + j];
      EXPECT_EQ(row.magnet_id, magnets[m].id);
      EXPECT_NEAR(row.s_ut, sensor::kEffectiveSignalsUt[m], 1e-6 * row.s_ut);
      const double d = oracle::dipole_field_ut(magnets[m].dipole_moment, 0, grid[j], gap).norm();
      EXPECT_NEAR(row.d_ut, d, 1e-9 * d);
      EXPECT_DOUBLE_EQ(row.snr, row.s_ut / (row.s_ut + row.d_ut));
      if (j > 0) {
        EXPECT_GT(row.snr, sweep.rows[m * grid.size() + j - 1].snr);
      }
    }
  }
}

TEST(AdjacentSweep, MagnetTwoLeadsFromSixteenMillimetres) {
  const auto magnets = sensor::calibrated_magnet_set();
  const auto grid = default_dy_grid();
  const SnrSweep sweep = adjacent_snr_sweep(magnets, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j] < 16.0) continue;
    EXPECT_EQ(sweep.argmax_magnet[j], 2) << grid[j];
    if (grid[j] == 16.0) {
      EXPECT_GE(sweep.rows[1 * grid.size() + j].snr, 0.91);
    }
  }
}
