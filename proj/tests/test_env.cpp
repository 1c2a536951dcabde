#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tdjsarc/env.hpp"
#include "tdjsarc/episode.hpp"

using namespace tdjsarc;
using namespace tdjsarc::oracle;

namespace {

constexpr Action S = Action::Sense;
constexpr Action C = Action::Communicate;

ScenarioConfig short_cfg(int N) {
  ScenarioConfig c;
  c.N = N;
  return c;
}

}  // namespace

TEST(Mask, Slots) {
  const ActionMask first = action_mask_for_slot(1, 100);
  EXPECT_TRUE(first.sense);
  EXPECT_FALSE(first.communicate);
  const ActionMask last = action_mask_for_slot(100, 100);
  EXPECT_FALSE(last.sense);
  EXPECT_TRUE(last.communicate);
  for (int n = 2; n < 100; ++n) {
    const ActionMask m = action_mask_for_slot(n, 100);
    EXPECT_TRUE(m.sense && m.communicate);
  }
}

TEST(Env, ResetObservation) {
  const ScenarioConfig c = short_cfg(50);
  const EveTrack t = gen_eve_circular(c, 55.0, 14.0, 3);
  SchedulingEnv env(c);
  const Observation o = env.reset(t, 0.0, 7);
  EXPECT_EQ(env.state().n, 1);
  EXPECT_EQ(env.state().L_run, 1);
  EXPECT_EQ(env.state().L_frozen, 1);
  EXPECT_EQ(env.state().u.center, t.position(1));
  EXPECT_NEAR(o.s1, 1.0 / c.N, 1e-15);
  const double dr = c.delta_r();
  EXPECT_NEAR(o.s3, 0.5 * std::sqrt(dr * dr + 144.0) / c.r_r, 1e-12);
  EXPECT_NEAR(o.s3, 0.0600, 1e-4);
  EXPECT_GE(o.s4, 0.0);
  EXPECT_LE(o.s4, 1.0);
  EXPECT_LE(std::abs(o.s2x), 1.0);
  EXPECT_LE(std::abs(o.s2y), 1.0);
  EXPECT_NEAR(std::hypot(o.s2x, o.s2y), 14.0 / 28.0, 1e-3);
  const SlotOutcome& f = env.first_outcome();
  EXPECT_EQ(f.action, S);
  EXPECT_EQ(f.reward, 0.0);

  SchedulingEnv again(c);
  EXPECT_EQ(again.reset(t, 0.0, 7).values(), o.values());
  EXPECT_THROW(again.reset(gen_eve_circular(short_cfg(40), 55.0, 1.0, 1), 0.0, 0), ContractViolation);
}

TEST(Env, MaskedAndFinishedStepsRejected) {
  const ScenarioConfig c = short_cfg(5);
  const EveTrack t = gen_eve_circular(c, 55.0, 5.0, 1);
  SchedulingEnv env(c);
  EXPECT_THROW(env.step(S), ContractViolation);
  env.reset(t, 0.0, 0);
  env.step(S);
  env.step(S);
  env.step(S);
  EXPECT_THROW(env.step(S), ContractViolation);
  EXPECT_TRUE(env.step(C).outcome.done);
  EXPECT_THROW(env.step(C), ContractViolation);
}

TEST(Env, ShortApertureFiresScrPenalty) {
  const ScenarioConfig c = short_cfg(20);
  const EveTrack t = gen_eve_circular(c, 55.0, 10.0, 2);
  SchedulingEnv env(c);
  env.reset(t, 0.0, 0);
  env.step(S);
  const SlotOutcome o = env.step(C).outcome;
  EXPECT_TRUE(o.scr_penalty_fired);
  EXPECT_DOUBLE_EQ(o.reward, -0.5);
  EXPECT_EQ(o.R_u, 0.0);
  EXPECT_EQ(o.R, 0.0);
  EXPECT_EQ(o.alpha, 0.0);
  EXPECT_EQ(env.state().cum_user_rate, 0.0);
}

TEST(Env, FeasibleApertureReward) {
  const ScenarioConfig c = short_cfg(20);
  const EveTrack t = gen_eve_circular(c, 55.0, 10.0, 2);
  SchedulingEnv env(c);
  env.reset(t, 0.0, 0);
  env.step(S);
  env.step(S);
  const SlotOutcome o = env.step(C).outcome;
  EXPECT_FALSE(o.scr_penalty_fired);
  EXPECT_EQ(o.n, 4);
  EXPECT_NEAR(o.reward, o.R - 0.5 * std::max(1.0 - o.R_u / 4.0, 0.0), 1e-12);
  const RobustResult r = robust_power_allocation(c, abs_pose(c, 4, 0.0), env.state().u, o.r_e);
  EXPECT_EQ(o.R, r.secrecy_rate);
  EXPECT_EQ(o.alpha, r.alpha_star);
  EXPECT_NEAR(o.r_e, uncertainty_radius(c, env.state().u, 4), 1e-15);
}

TEST(Env, EpisodeAccounting) {
  const ScenarioConfig c = short_cfg(250);
  Rng rng(17);
  const EveTrack t = gen_eve_random(c, 5);
  const auto actions = random_actions(c.N, rng, 0.4);
  SchedulingEnv env(c);
  env.reset(t, 0.0, 0);
  double cum = 0.0;
  for (int n = 2; n <= c.N; ++n) {
    const SlotOutcome o = env.step(actions[static_cast<std::size_t>(n - 1)]).outcome;
    if (o.action == S) {
      EXPECT_EQ(o.R_u, 0.0);
      EXPECT_EQ(o.R_e_worst, 0.0);
      EXPECT_EQ(o.R, 0.0);
      EXPECT_EQ(o.reward, 0.0);
      EXPECT_EQ(o.alpha, 0.0);
    }
    cum += o.R_u;
    EXPECT_NEAR(env.state().cum_user_rate / n, cum / n, 1e-12);
    EXPECT_GE(env.state().l, 1);
    EXPECT_LE(env.state().l, n);
  }
  const EpisodeLog a = evaluate_schedule(c, actions, t, 0.0);
  const EpisodeLog b = evaluate_schedule(c, actions, t, 0.0);
  ASSERT_EQ(a.slots.size(), b.slots.size());
  for (std::size_t k = 0; k < a.slots.size(); ++k) ASSERT_EQ(a.slots[k].reward, b.slots[k].reward);
  EXPECT_NEAR(a.mean_user_rate, cum / c.N, 1e-12);
}

TEST(Schedule, HandExample) {
  const std::vector<Action> a{S, S, C, C, S, C};
  const Schedule s = reconstruct_schedule(a);
  EXPECT_EQ(s.I, 2);
  EXPECT_EQ(s.T, (std::vector<int>{4, 2}));
  EXPECT_EQ(s.L, (std::vector<int>{2, 1}));
  EXPECT_EQ(s.l, (std::vector<int>{2, 5}));
  EXPECT_EQ(s.C(), (std::vector<int>{2, 1}));
}

TEST(Schedule, AlternatingAndSingleFrame) {
  std::vector<Action> alt;
  for (int k = 0; k < 10; ++k) {
    alt.push_back(S);
    alt.push_back(C);
  }
  const Schedule s = reconstruct_schedule(alt);
  EXPECT_EQ(s.I, 10);
  for (int k = 0; k < s.I; ++k) {
    EXPECT_EQ(s.T[k], 2);
    EXPECT_EQ(s.L[k], 1);
  }
  std::vector<Action> one(30, S);
  one.back() = C;
  const Schedule u = reconstruct_schedule(one);
  EXPECT_EQ(u.I, 1);
  EXPECT_EQ(u.T[0], 30);
  EXPECT_EQ(u.L[0], 29);
  EXPECT_THROW(reconstruct_schedule(std::vector<Action>{C, C}), ContractViolation);
  EXPECT_THROW(reconstruct_schedule(std::vector<Action>{S, S}), ContractViolation);
}

TEST(Schedule, RandomSequencesSatisfyFraming) {
  Rng rng(21);
  for (int k = 0; k < 1000; ++k) {
    const int N = 3 + static_cast<int>(uniform01(rng) * 3000);
    const auto a = random_actions(N, rng, uniform01(rng));
    const Schedule s = reconstruct_schedule(a);
    ASSERT_TRUE(schedule_is_valid(s, N));
  }
}

TEST(Schedule, PrintedRecursionsAgreeExhaustivelyN10) {
  const int N = 10;
  const ScenarioConfig c = short_cfg(N);
  const EveTrack t = gen_eve_circular(c, 55.0, 6.0, 1);
  int checked = 0;
  for (unsigned mask = 0; mask < (1u << (N - 2)); ++mask) {
    std::vector<Action> a(N, C);
    a[0] = S;
    for (int k = 0; k < N - 2; ++k) a[static_cast<std::size_t>(k + 1)] = (mask >> k) & 1u ? S : C;
    const Schedule fwd = reconstruct_schedule(a);
    const Schedule ref = schedule_from_paper(a);
    ASSERT_EQ(fwd.I, ref.I) << mask;
    ASSERT_EQ(fwd.L, ref.L) << mask;
    ASSERT_EQ(fwd.l, ref.l) << mask;

    // The environment's forward counters after slot n - 1 equal the printed
    // counters at n.
    const PaperCounters p = paper_counters(a);
    SchedulingEnv env(c);
    env.reset(t, 0.0, 0);
    for (int n = 2; n <= N; ++n) {
      ASSERT_EQ(env.state().i, p.i[n]) << mask << " n " << n;
      ASSERT_EQ(env.state().l, p.l[n]) << mask << " n " << n;
      ASSERT_EQ(a[static_cast<std::size_t>(n - 2)] == S ? env.state().L_run : 0, p.L[n]) << mask << " n " << n;
      env.step(a[static_cast<std::size_t>(n - 1)]);
    }
    ++checked;
  }
  EXPECT_EQ(checked, 256);
}

TEST(Schedule, PrintedRecursionsAgreeRandomN2500) {
  Rng rng(22);
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_actions(2500, rng, 0.2 + 0.6 * uniform01(rng));
    const Schedule fwd = reconstruct_schedule(a);
    const Schedule ref = schedule_from_paper(a);
    ASSERT_EQ(fwd.I, ref.I);
    ASSERT_EQ(fwd.L, ref.L);
    ASSERT_EQ(fwd.l, ref.l);
  }
}
