#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tdjsarc/config.hpp"
#include "tdjsarc/episode.hpp"
#include "tdjsarc/errors.hpp"
#include "tdjsarc/rng.hpp"
#include "tdjsarc/sar.hpp"

namespace tdjsarc {

// I frames tiling N slots (the first N mod I frames get one extra slot), each
// opening with L sensing slots.
inline std::vector<Action> equal_aperture_schedule(int N, int L, int I) {
  if (L < 1 || I < 1 || I > N) throw ValidationError("equal_aperture: need L >= 1 and 1 <= I <= N");
  const int base = N / I, extra = N % I;
  if (base <= L) throw ValidationError("equal_aperture: every frame needs T_i > L");
  std::vector<Action> a;
  a.reserve(static_cast<std::size_t>(N));
  for (int f = 0; f < I; ++f) {
    const int T = base + (f < extra ? 1 : 0);
    for (int k = 0; k < T; ++k) a.push_back(k < L ? Action::Sense : Action::Communicate);
  }
  return a;
}

inline bool equal_aperture_feasible(int N, int L, int I) { return L >= 1 && I >= 1 && I <= N && N / I > L; }

inline EpisodeLog equal_aperture(const ScenarioConfig& cfg, const EveTrack& track, int L, int I) {
  const auto actions = equal_aperture_schedule(cfg.N, L, I);
  return evaluate_schedule(cfg, actions, track);
}

struct GridRow {
  int L = 0;
  int I = 0;
  double mean_secrecy = 0.0;
  double std_secrecy = 0.0;  // across tracks
  double mean_user_rate = 0.0;
  double scr_violation_rate = 0.0;
  double r_min_satisfied = 0.0;  // fraction of tracks
  bool feasible = true;
  bool winner = false;
};

struct GridSearchResult {
  std::vector<GridRow> rows;  // every (L, I) pair, L-major; infeasible rows carry zeros
  int winner = -1;

  const GridRow& best() const { return rows.at(static_cast<std::size_t>(winner)); }
};

struct MethodSummary {
  double mean_secrecy = 0.0;
  double std_secrecy = 0.0;
  double mean_user_rate = 0.0;
  double scr_violation_rate = 0.0;  // penalized comm slots / comm slots
  double r_min_satisfied = 0.0;     // fraction of episodes
  int episodes = 0;
};

inline MethodSummary summarize(std::span<const EpisodeLog> logs) {
  MethodSummary s;
  s.episodes = static_cast<int>(logs.size());
  if (logs.empty()) return s;
  long comm = 0, viol = 0;
  for (const auto& l : logs) {
    s.mean_secrecy += l.mean_secrecy;
    s.mean_user_rate += l.mean_user_rate;
    s.r_min_satisfied += l.r_min_satisfied ? 1.0 : 0.0;
    comm += l.comm_slots;
    viol += l.scr_violations;
  }
  const double n = static_cast<double>(logs.size());
  s.mean_secrecy /= n;
  s.mean_user_rate /= n;
  s.r_min_satisfied /= n;
  s.scr_violation_rate = comm > 0 ? static_cast<double>(viol) / comm : 0.0;
  double var = 0.0;
  for (const auto& l : logs) var += (l.mean_secrecy - s.mean_secrecy) * (l.mean_secrecy - s.mean_secrecy);
  s.std_secrecy = std::sqrt(var / n);
  return s;
}

// Exhaustive search over (L, I). The winner maximizes mean secrecy over the
// given tracks among pairs that meet R_min on every track; if no pair does,
// among all feasible pairs. Ties keep the earlier (smaller L, then I) pair.
inline GridSearchResult equal_aperture_grid_search(const ScenarioConfig& cfg, std::span<const EveTrack> tracks,
                                                   int L_lo, int L_hi, int I_lo, int I_hi) {
  if (tracks.empty()) throw ValidationError("grid search: need at least one track");
  GridSearchResult g;
  for (int L = L_lo; L <= L_hi; ++L) {
    for (int I = I_lo; I <= I_hi; ++I) {
      if (!equal_aperture_feasible(cfg.N, L, I)) {
        g.rows.push_back({L, I, 0.0, 0.0, 0.0, 0.0, 0.0, false, false});
        continue;
      }
      const auto actions = equal_aperture_schedule(cfg.N, L, I);
      std::vector<EpisodeLog> logs;
      logs.reserve(tracks.size());
      for (const auto& t : tracks) logs.push_back(evaluate_schedule(cfg, actions, t));
      const MethodSummary s = summarize(logs);
      g.rows.push_back({L, I, s.mean_secrecy, s.std_secrecy, s.mean_user_rate, s.scr_violation_rate,
                        s.r_min_satisfied, true, false});
    }
  }
  if (std::none_of(g.rows.begin(), g.rows.end(), [](const GridRow& r) { return r.feasible; })) throw ValidationError("grid search: no feasible (L, I) pair");
  auto pick = [&](bool need_rmin) {
    int best = -1;
    for (std::size_t k = 0; k < g.rows.size(); ++k) {
      if (!g.rows[k].feasible || (need_rmin && g.rows[k].r_min_satisfied < 1.0)) continue;
      if (best < 0 || g.rows[k].mean_secrecy > g.rows[static_cast<std::size_t>(best)].mean_secrecy) {
        best = static_cast<int>(k);
      }
    }
    return best;
  };
  g.winner = pick(true);
  if (g.winner < 0) g.winner = pick(false);
  g.rows[static_cast<std::size_t>(g.winner)].winner = true;
  return g;
}

inline GridSearchResult equal_aperture_grid_search(const ScenarioConfig& cfg, const BaselineConfig& b,
                                                   std::span<const EveTrack> tracks) {
  return equal_aperture_grid_search(cfg, tracks, min_feasible_aperture(cfg), b.grid_L_max, 1, b.grid_I_max);
}

// One random frame sequence: apertures uniform in [L_min, L_max], comm
// sub-frames uniform in [1, C_max], truncated at N with the last slot
// communicating. A tail too short for a full aperture extends the previous
// communication sub-frame, so every aperture meets SCR_min.
inline std::vector<Action> random_schedule(const ScenarioConfig& cfg, int L_max, int C_max, Rng& rng) {
  const int L_min = min_feasible_aperture(cfg);
  if (L_max < L_min) L_max = L_min;
  if (cfg.N < L_min + 1) throw ValidationError("random_allocation: N too short for one feasible frame");
  std::uniform_int_distribution<int> draw_L(L_min, L_max);
  std::uniform_int_distribution<int> draw_C(1, C_max);
  std::vector<Action> a;
  a.reserve(static_cast<std::size_t>(cfg.N));
  while (static_cast<int>(a.size()) < cfg.N) {
    const int remaining = cfg.N - static_cast<int>(a.size());
    if (!a.empty() && remaining < L_min + 1) {
      a.insert(a.end(), static_cast<std::size_t>(remaining), Action::Communicate);
      break;
    }
    const int L = std::min(draw_L(rng), remaining - 1);
    const int C = std::min(draw_C(rng), remaining - L);
    a.insert(a.end(), static_cast<std::size_t>(L), Action::Sense);
    a.insert(a.end(), static_cast<std::size_t>(C), Action::Communicate);
  }
  return a;
}

struct RandomAllocationResult {
  MethodSummary summary;  // std_secrecy is across trials
  std::vector<double> trial_secrecy;
};

inline RandomAllocationResult random_allocation(const ScenarioConfig& cfg, const BaselineConfig& b,
                                                const EveTrack& track, std::uint64_t seed, int trials) {
  if (trials < 1) throw ValidationError("random_allocation: trials must be >= 1");
  std::vector<EpisodeLog> logs;
  logs.reserve(static_cast<std::size_t>(trials));
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, Stream::RandomBaseline, static_cast<std::uint64_t>(k)));
    const auto actions = random_schedule(cfg, b.random_L_max, b.random_C_max, rng);
    logs.push_back(evaluate_schedule(cfg, actions, track));
  }
  RandomAllocationResult r;
  r.summary = summarize(logs);
  for (const auto& l : logs) r.trial_secrecy.push_back(l.mean_secrecy);
  return r;
}

}  // namespace tdjsarc
