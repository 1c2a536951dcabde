#include <gtest/gtest.h>

#include <cmath>

#include "tdjsarc/scenario.hpp"

using namespace tdjsarc;

TEST(AbsPose, FirstSlot) {
  const ScenarioConfig c;
  const AbsPose p = abs_pose(c, 1, 0.0);
  EXPECT_NEAR((p.q_a - Vec3(200.0, 0.0, 100.0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((p.e_perp - Vec3(-1.0, 0.0, 0.0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((p.e_t - Vec3(0.0, 1.0, 0.0)).norm(), 0.0, 1e-12);
  EXPECT_EQ(p.e_b, Vec3(0.0, 0.0, 1.0));
}

TEST(AbsPose, FrameOrthonormalEverySlot) {
  const ScenarioConfig c;
  for (int n = 1; n <= c.N; ++n) {
    const AbsPose p = abs_pose(c, n, 0.3);
    EXPECT_NEAR(p.e_perp.norm(), 1.0, 1e-12);
    EXPECT_NEAR(p.e_t.norm(), 1.0, 1e-12);
    EXPECT_NEAR(p.e_perp.dot(p.e_t), 0.0, 1e-12);
    EXPECT_NEAR(p.e_perp.dot(p.e_b), 0.0, 1e-12);
    EXPECT_NEAR(p.e_t.dot(p.e_b), 0.0, 1e-12);
    EXPECT_NEAR(std::hypot(p.q_a.x(), p.q_a.y()), c.r_a, 1e-9);
    EXPECT_DOUBLE_EQ(p.q_a.z(), c.h);
    const Vec3 horiz(p.q_a.x(), p.q_a.y(), 0.0);
    EXPECT_NEAR((p.e_perp + horiz / c.r_a).norm(), 0.0, 1e-12);
  }
}

TEST(AbsPose, OrbitPeriod) {
  const ScenarioConfig c;
  const double step = c.v_a * c.delta_t / c.r_a;
  EXPECT_NEAR(2.0 * kPi * c.r_a / (c.v_a * c.delta_t), 1256.6, 0.05);
  EXPECT_LT(std::abs(orbit_phase(c, 1 + 1257, 0.0) - orbit_phase(c, 1, 0.0) - 2.0 * kPi), step);
  const AbsPose a = abs_pose(c, 1, 0.0), b = abs_pose(c, 1258, 0.0);
  EXPECT_LT((a.q_a - b.q_a).norm(), c.v_a * c.delta_t);
}

TEST(AbsPose, OutOfRange) {
  const ScenarioConfig c;
  EXPECT_THROW(abs_pose(c, 0, 0.0), std::out_of_range);
  EXPECT_THROW(abs_pose(c, c.N + 1, 0.0), std::out_of_range);
}

TEST(Circular, Kinematics) {
  const ScenarioConfig c;
  const EveTrack t = gen_eve_circular(c, 55.0, 10.0, 4);
  ASSERT_EQ(t.size(), c.N);
  ASSERT_EQ(static_cast<int>(t.velocities.size()), c.N - 1);
  EXPECT_EQ(t.kind, TrackKind::Circular);
  for (int n = 1; n <= c.N; ++n) {
    EXPECT_NEAR((t.position(n) - c.q_u).norm(), 55.0, 1e-9);
    EXPECT_DOUBLE_EQ(t.position(n).z(), 0.0);
  }
  for (int n = 1; n < c.N; ++n) {
    const double step = (t.position(n + 1) - t.position(n)).norm();
    EXPECT_GE(step, 0.999);
    EXPECT_LE(step, 1.0 + 1e-12);
  }
  EXPECT_NO_THROW(validate_track(c, t, false));
}

TEST(Circular, ZeroSpeedAndCentripetal) {
  const ScenarioConfig c;
  const EveTrack still = gen_eve_circular(c, 55.0, 0.0, 1);
  for (int n = 2; n <= c.N; ++n) EXPECT_EQ(still.position(n), still.position(1));
  // 14 m/s on a 55 m circle needs 3.56 m/s^2, above the cap; speed still holds.
  const EveTrack fast = gen_eve_circular(c, 55.0, 14.0, 1);
  EXPECT_NO_THROW(validate_track(c, fast, false));
  EXPECT_THROW(validate_track(c, fast, true), ValidationError);
  EXPECT_NEAR(track_kinematics(c, fast).max_accel, 14.0 * 14.0 / 55.0, 0.01);
  EXPECT_THROW(gen_eve_circular(c, 55.0, 28.5, 1), ValidationError);
}

TEST(Circular, SeedSetsStartOnly) {
  const ScenarioConfig c;
  const EveTrack a = gen_eve_circular(c, 55.0, 6.0, 1), b = gen_eve_circular(c, 55.0, 6.0, 1);
  const EveTrack d = gen_eve_circular(c, 55.0, 6.0, 2);
  EXPECT_EQ(a.positions, b.positions);
  EXPECT_NE(a.position(1), d.position(1));
}

TEST(Linear, ConstantSpeedDegenerate) {
  const ScenarioConfig c;
  const EveTrack t = gen_eve_linear_oscillating(c, 0.5, 10.0, 10.0, 200.0, Vec3(-100.0, 0.0, 0.0), 1);
  for (int n = 1; n < c.N; ++n) {
    EXPECT_NEAR(t.velocity(n).norm(), 10.0, 1e-9);
    EXPECT_NEAR(std::atan2(t.velocity(n).y(), t.velocity(n).x()), 0.5, 1e-9);
  }
  EXPECT_NO_THROW(validate_track(c, t));
}

TEST(Linear, OscillatesWithinBoundsAndSlopeCap) {
  const ScenarioConfig c;
  const EveTrack t = gen_eve_linear_oscillating(c, 0.0, 5.0, 20.0, 240.0, Vec3(-200.0, -20.0, 0.0), 1);
  double lo = 1e9, hi = 0.0, max_step = 0.0;
  for (int n = 1; n < c.N; ++n) {
    lo = std::min(lo, t.speed(n));
    hi = std::max(hi, t.speed(n));
    if (n > 1) max_step = std::max(max_step, std::abs(t.speed(n) - t.speed(n - 1)));
  }
  EXPECT_GE(lo, 5.0 - 1e-9);
  EXPECT_LE(hi, 20.0 + 1e-9);
  EXPECT_GT(hi, 19.0);
  EXPECT_LE(max_step, c.a_e_max * c.delta_t + 1e-9);
  EXPECT_NO_THROW(validate_track(c, t));
}

TEST(Linear, SteepProfileIsRateLimited) {
  const ScenarioConfig c;
  const EveTrack t = gen_eve_linear_oscillating(c, 0.0, 5.0, 20.0, 20.0, Vec3::Zero(), 1);
  double max_step = 0.0;
  for (int n = 2; n < c.N; ++n) max_step = std::max(max_step, std::abs(t.speed(n) - t.speed(n - 1)));
  EXPECT_NEAR(max_step, c.a_e_max * c.delta_t, 1e-9);
  EXPECT_THROW(gen_eve_linear_oscillating(c, 0.0, 5.0, 30.0, 240.0, Vec3::Zero(), 1), ValidationError);
}

TEST(Random, InvariantsAndConfinement) {
  ScenarioConfig c;
  c.N = 400;
  const double bound = 1.1 * c.r_r + c.v_e_max * c.delta_t;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const EveTrack t = gen_eve_random(c, s);
    ASSERT_EQ(t.size(), c.N);
    ASSERT_NO_THROW(validate_track(c, t)) << "seed " << s;
    ASSERT_LE(track_kinematics(c, t).max_range, bound) << "seed " << s;
  }
}

TEST(Random, Deterministic) {
  const ScenarioConfig c;
  EXPECT_EQ(gen_eve_random(c, 9).positions, gen_eve_random(c, 9).positions);
  EXPECT_NE(gen_eve_random(c, 9).positions, gen_eve_random(c, 10).positions);
}
