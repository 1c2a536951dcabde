#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tdjsarc/config.hpp"
#include "tdjsarc/env.hpp"
#include "tdjsarc/episode.hpp"
#include "tdjsarc/errors.hpp"
#include "tdjsarc/mlp.hpp"
#include "tdjsarc/rng.hpp"
#include "tdjsarc/scenario.hpp"

namespace tdjsarc {

using ObsArray = std::array<double, kObsDim>;

// Running mean/variance of observations (Welford). Identity when disabled.
struct ObsNormalizer {
  bool enabled = false;
  double count = 0.0;
  ObsArray mean{};
  ObsArray m2{};

  void update(const ObsArray& x) {
    if (!enabled) return;
    count += 1.0;
    for (int k = 0; k < kObsDim; ++k) {
      const double d = x[k] - mean[k];
      mean[k] += d / count;
      m2[k] += d * (x[k] - mean[k]);
    }
  }

  ObsArray apply(const ObsArray& x) const {
    if (!enabled || count < 2.0) return x;
    ObsArray y;
    for (int k = 0; k < kObsDim; ++k) {
      const double sd = std::sqrt(m2[k] / count + 1e-8);
      y[k] = std::clamp((x[k] - mean[k]) / sd, -10.0, 10.0);
    }
    return y;
  }
};

// Policy head (obs -> 2 logits, index = Action) and value head (obs -> 1).
struct PolicyParams {
  Mlp policy_net;
  Mlp value_net;
  Eigen::VectorXd policy;
  Eigen::VectorXd value;
  ObsNormalizer norm;

  bool finite() const { return policy.allFinite() && value.allFinite(); }
};

inline std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

inline PolicyParams make_policy(const std::vector<int>& hidden, bool obs_norm, Rng& rng) {
  PolicyParams p;
  p.policy_net = Mlp(layer_sizes(kObsDim, hidden, 2));
  p.value_net = Mlp(layer_sizes(kObsDim, hidden, 1));
  p.policy = p.policy_net.init(rng, 1.0, 0.01);
  p.value = p.value_net.init(rng, 1.0, 1.0);
  p.norm.enabled = obs_norm;
  return p;
}

inline Eigen::VectorXd to_eigen(const ObsArray& x) { return Eigen::Map<const Eigen::VectorXd>(x.data(), kObsDim); }

// Masked log-softmax over the two actions. Forbidden actions get -inf.
inline std::array<double, 2> masked_log_probs(double logit_comm, double logit_sense, const ActionMask& mask) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!mask.sense && !mask.communicate) throw ContractViolation("act: every action is masked");
  if (!mask.sense) return {0.0, kNegInf};
  if (!mask.communicate) return {kNegInf, 0.0};
  const double m = std::max(logit_comm, logit_sense);
  const double lse = m + std::log(std::exp(logit_comm - m) + std::exp(logit_sense - m));
  return {logit_comm - lse, logit_sense - lse};
}

struct ActResult {
  Action action = Action::Sense;
  double log_prob = 0.0;
  double value = 0.0;
  std::array<double, 2> probs{};
};

inline ActResult evaluate_obs(const PolicyParams& params, const ObsArray& net_input, const ActionMask& mask) {
  const Eigen::VectorXd x = to_eigen(net_input);
  const Eigen::MatrixXd logits = params.policy_net.forward(params.policy, x);
  const Eigen::MatrixXd v = params.value_net.forward(params.value, x);
  const auto lp = masked_log_probs(logits(0, 0), logits(1, 0), mask);
  ActResult r;
  r.value = v(0, 0);
  r.probs = {std::exp(lp[0]), std::exp(lp[1])};
  return r;
}

// Samples a[n] ~ pi(.|s[n]) with masked actions excluded.
inline ActResult act(const PolicyParams& params, const ObsArray& net_input, const ActionMask& mask, Rng& rng) {
  ActResult r = evaluate_obs(params, net_input, mask);
  const double u = uniform01(rng);
  r.action = u < r.probs[1] ? Action::Sense : Action::Communicate;
  if (!mask.allows(r.action)) r.action = mask.sense ? Action::Sense : Action::Communicate;
  const int k = static_cast<int>(r.action);
  r.log_prob = std::log(r.probs[k]);
  return r;
}

inline ActResult act_greedy(const PolicyParams& params, const ObsArray& net_input, const ActionMask& mask) {
  ActResult r = evaluate_obs(params, net_input, mask);
  r.action = r.probs[1] > r.probs[0] ? Action::Sense : Action::Communicate;
  if (!mask.allows(r.action)) r.action = mask.sense ? Action::Sense : Action::Communicate;
  r.log_prob = std::log(r.probs[static_cast<int>(r.action)]);
  return r;
}

inline ActResult act(const PolicyParams& params, const Observation& obs, const ActionMask& mask, Rng& rng) {
  return act(params, params.norm.apply(obs.values()), mask, rng);
}

struct RolloutBatch {
  std::vector<ObsArray> obs;  // network inputs (already normalized)
  std::vector<int> action;
  std::vector<ActionMask> mask;
  std::vector<double> log_prob;
  std::vector<double> reward;
  std::vector<double> value;
  std::vector<char> done;
  std::vector<double> advantage;
  std::vector<double> ret;

  std::size_t size() const { return obs.size(); }

  void push(const ObsArray& o, const ActResult& a, const ActionMask& m, double r, bool d) {
    obs.push_back(o);
    action.push_back(static_cast<int>(a.action));
    mask.push_back(m);
    log_prob.push_back(a.log_prob);
    reward.push_back(r);
    value.push_back(a.value);
    done.push_back(d ? 1 : 0);
  }
};

// Generalized advantage estimation over concatenated episodes. A transition
// with done = 1 does not bootstrap from its successor.
inline void gae(RolloutBatch& b, double gamma, double lambda) {
  const std::size_t n = b.size();
  b.advantage.assign(n, 0.0);
  b.ret.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double not_done = b.done[k] ? 0.0 : 1.0;
    const double next_value = k + 1 < n ? b.value[k + 1] : 0.0;
    const double delta = b.reward[k] + gamma * next_value * not_done - b.value[k];
    next_adv = delta + gamma * lambda * not_done * next_adv;
    b.advantage[k] = next_adv;
    b.ret[k] = b.advantage[k] + b.value[k];
  }
}

inline void normalize_advantages(RolloutBatch& b) {
  const std::size_t n = b.advantage.size();
  if (n < 2) return;
  const double mean = std::accumulate(b.advantage.begin(), b.advantage.end(), 0.0) / n;
  double var = 0.0;
  for (double a : b.advantage) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : b.advantage) a = (a - mean) / (sd + 1e-12);
}

struct PpoHyper {
  double clip = 0.2;
  double lr = 3e-4;
  int epochs = 4;
  int minibatch = 256;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;

  static PpoHyper from(const PpoConfig& c) {
    return {c.clip, c.lr, c.epochs, c.minibatch, c.entropy_coef, c.value_coef, c.max_grad_norm};
  }
};

struct LossTerms {
  double total = 0.0;
  double policy = 0.0;  // -mean clipped surrogate
  double value = 0.0;   // mean squared error to returns (unweighted)
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_frac = 0.0;
};

// Clipped-surrogate PPO loss on the samples `idx`; optionally returns the
// gradients w.r.t. both parameter vectors.
//   total = -mean(min(r A, clip(r) A)) + c_v mean((V - ret)^2) - c_e mean(H)
inline LossTerms ppo_loss(const PolicyParams& p, const RolloutBatch& b, std::span<const int> idx, const PpoHyper& h,
                          Eigen::VectorXd* g_policy = nullptr, Eigen::VectorXd* g_value = nullptr) {
  const int B = static_cast<int>(idx.size());
  Eigen::MatrixXd x(kObsDim, B);
  for (int j = 0; j < B; ++j) x.col(j) = to_eigen(b.obs[static_cast<std::size_t>(idx[j])]);

  Mlp::Cache pc, vc;
  const Eigen::MatrixXd logits = p.policy_net.forward(p.policy, x, &pc);
  const Eigen::MatrixXd values = p.value_net.forward(p.value, x, &vc);
  Eigen::MatrixXd d_logits = Eigen::MatrixXd::Zero(2, B);
  Eigen::MatrixXd d_values = Eigen::MatrixXd::Zero(1, B);

  LossTerms t;
  const double inv_b = 1.0 / B;
  for (int j = 0; j < B; ++j) {
    const auto s = static_cast<std::size_t>(idx[j]);
    const auto lp = masked_log_probs(logits(0, j), logits(1, j), b.mask[s]);
    const int a = b.action[s];
    const double ratio = std::exp(lp[a] - b.log_prob[s]);
    const double adv = b.advantage[s];
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - h.clip, 1.0 + h.clip) * adv;
    t.policy -= std::min(unclipped, clipped) * inv_b;
    t.approx_kl += (b.log_prob[s] - lp[a]) * inv_b;
    if (std::abs(ratio - 1.0) > h.clip) t.clip_frac += inv_b;

    double H = 0.0;
    std::array<double, 2> pr{};
    for (int k = 0; k < 2; ++k) {
      pr[k] = std::isfinite(lp[k]) ? std::exp(lp[k]) : 0.0;
      if (pr[k] > 0.0) H -= pr[k] * lp[k];
    }
    t.entropy += H * inv_b;

    const double dv = values(0, j) - b.ret[s];
    t.value += dv * dv * inv_b;

    if (g_policy) {
      const double d_logp = unclipped <= clipped ? -ratio * adv * inv_b : 0.0;
      for (int k = 0; k < 2; ++k) {
        if (pr[k] == 0.0) continue;
        d_logits(k, j) += d_logp * ((k == a ? 1.0 : 0.0) - pr[k]);
        d_logits(k, j) += h.entropy_coef * inv_b * pr[k] * (lp[k] + H);
      }
    }
    if (g_value) d_values(0, j) = 2.0 * h.value_coef * dv * inv_b;
  }
  t.total = t.policy + h.value_coef * t.value - h.entropy_coef * t.entropy;
  if (g_policy) *g_policy = p.policy_net.backward(p.policy, pc, d_logits);
  if (g_value) *g_value = p.value_net.backward(p.value, vc, d_values);
  return t;
}

struct AdamPair {
  Adam policy;
  Adam value;
};

struct UpdateStats {
  LossTerms last;
  int steps = 0;
};

// Minibatch epochs of Adam on the PPO loss with global-norm gradient clipping.
inline UpdateStats ppo_update(PolicyParams& p, AdamPair& opt, const RolloutBatch& b, const PpoHyper& h, Rng& rng) {
  if (b.size() == 0) throw ContractViolation("ppo_update: empty batch");
  std::vector<int> order(b.size());
  std::iota(order.begin(), order.end(), 0);
  const int mb = std::max(1, std::min<int>(h.minibatch, static_cast<int>(b.size())));
  UpdateStats st;
  Eigen::VectorXd gp, gv;
  for (int e = 0; e < h.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(mb)) {
      const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(mb), order.size() - start);
      const std::span<const int> idx(order.data() + start, len);
      st.last = ppo_loss(p, b, idx, h, &gp, &gv);
      if (!std::isfinite(st.last.total) || !gp.allFinite() || !gv.allFinite()) {
        throw std::runtime_error("ppo_update: non-finite loss (policy " + std::to_string(st.last.policy) +
                                 ", value " + std::to_string(st.last.value) + ", entropy " +
                                 std::to_string(st.last.entropy) + ")");
      }
      const double norm = std::sqrt(gp.squaredNorm() + gv.squaredNorm());
      if (h.max_grad_norm > 0.0 && norm > h.max_grad_norm) {
        const double s = h.max_grad_norm / norm;
        gp *= s;
        gv *= s;
      }
      opt.policy.step(p.policy, gp, h.lr);
      opt.value.step(p.value, gv, h.lr);
      if (!p.finite()) throw std::runtime_error("ppo_update: parameters became non-finite");
      ++st.steps;
    }
  }
  return st;
}

// Runs one episode under the policy. With `batch` set, decisions are recorded
// for training and the observation statistics are updated.
inline EpisodeLog run_policy_episode(const ScenarioConfig& cfg, PolicyParams& params, const EveTrack& track,
                                     bool greedy, Rng& rng, RolloutBatch* batch = nullptr) {
  SchedulingEnv env(cfg);
  Observation obs = env.reset(track, cfg.phase0, 0);
  EpisodeLog log;
  log.actions.reserve(static_cast<std::size_t>(cfg.N));
  log.slots.reserve(static_cast<std::size_t>(cfg.N));
  log.actions.push_back(Action::Sense);
  log.slots.push_back(env.first_outcome());
  while (!env.done()) {
    const ObsArray raw = obs.values();
    if (batch) params.norm.update(raw);
    const ObsArray in = params.norm.apply(raw);
    const ActionMask mask = env.action_mask();
    const ActResult a = greedy ? act_greedy(params, in, mask) : act(params, in, mask, rng);
    const auto res = env.step(a.action);
    if (batch) batch->push(in, a, mask, res.outcome.reward, res.outcome.done);
    log.actions.push_back(a.action);
    log.slots.push_back(res.outcome);
    obs = res.obs;
  }
  finalize_log(cfg, log);
  return log;
}

inline EpisodeLog run_policy_episode(const ScenarioConfig& cfg, const PolicyParams& params, const EveTrack& track) {
  PolicyParams copy = params;
  Rng unused(0);
  return run_policy_episode(cfg, copy, track, true, unused);
}

struct CurveRow {
  int iteration = 0;
  double mean_reward = 0.0;  // per episode
  double mean_secrecy = 0.0;
  double mean_user_rate = 0.0;
  int scr_violations = 0;
};

struct TrainResult {
  PolicyParams best;
  PolicyParams last;
  std::vector<CurveRow> curve;
  double best_score = -std::numeric_limits<double>::infinity();
  int best_iteration = 0;
};

using TrackGenerator = std::function<EveTrack(const ScenarioConfig&, std::uint64_t)>;

inline TrackGenerator random_track_generator() {
  return [](const ScenarioConfig& c, std::uint64_t s) { return gen_eve_random(c, s); };
}

// Score used to pick the best checkpoint: mean secrecy, penalized by the
// average user-rate shortfall.
inline double policy_score(const ScenarioConfig& cfg, const PolicyParams& params,
                           std::span<const EveTrack> tracks) {
  double score = 0.0;
  for (const auto& t : tracks) {
    const EpisodeLog log = run_policy_episode(cfg, params, t);
    score += log.mean_secrecy - cfg.rho_1 * std::max(cfg.R_min - log.mean_user_rate, 0.0);
  }
  return score / static_cast<double>(tracks.size());
}

// Rollout -> GAE -> update over freshly generated tracks. Returns the last
// parameters and the best ones on a fixed validation set.
inline TrainResult train(const ScenarioConfig& cfg, const PpoConfig& hyper, const TrackGenerator& make_track,
                         std::uint64_t seed, const std::function<void(const CurveRow&)>& on_iteration = {}) {
  Rng init_rng(derive_seed(seed, Stream::PolicyInit));
  Rng rollout_rng(derive_seed(seed, Stream::Rollout));
  Rng minibatch_rng(derive_seed(seed, Stream::Minibatch));
  PolicyParams params = make_policy(hyper.hidden, hyper.obs_norm, init_rng);
  AdamPair opt;
  const PpoHyper h = PpoHyper::from(hyper);

  std::vector<EveTrack> validation;
  for (int k = 0; k < hyper.eval_episodes; ++k) {
    validation.push_back(make_track(cfg, derive_seed(seed, Stream::ValidationTrack, static_cast<std::uint64_t>(k))));
  }

  TrainResult result;
  auto consider = [&](int iteration) {
    const double s = policy_score(cfg, params, validation);
    if (s > result.best_score) {
      result.best_score = s;
      result.best = params;
      result.best_iteration = iteration;
    }
  };
  consider(0);

  for (int it = 1; it <= hyper.iterations; ++it) {
    RolloutBatch batch;
    CurveRow row;
    row.iteration = it;
    for (int e = 0; e < hyper.episodes_per_iter; ++e) {
      const auto idx = static_cast<std::uint64_t>(it - 1) * static_cast<std::uint64_t>(hyper.episodes_per_iter) +
                       static_cast<std::uint64_t>(e);
      const EveTrack track = make_track(cfg, derive_seed(seed, Stream::TrainTrack, idx));
      const EpisodeLog log = run_policy_episode(cfg, params, track, false, rollout_rng, &batch);
      row.mean_reward += log.total_reward / hyper.episodes_per_iter;
      row.mean_secrecy += log.mean_secrecy / hyper.episodes_per_iter;
      row.mean_user_rate += log.mean_user_rate / hyper.episodes_per_iter;
      row.scr_violations += log.scr_violations;
    }
    gae(batch, hyper.gamma, hyper.gae_lambda);
    normalize_advantages(batch);
    ppo_update(params, opt, batch, h, minibatch_rng);
    result.curve.push_back(row);
    if (on_iteration) on_iteration(row);
    if (it % hyper.eval_every == 0 || it == hyper.iterations) consider(it);
  }
  result.last = params;
  return result;
}

inline TrainResult train(const ScenarioConfig& cfg, const PpoConfig& hyper, std::uint64_t seed) {
  return train(cfg, hyper, random_track_generator(), seed);
}

}  // namespace tdjsarc
