#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdjsarc/baselines.hpp"
#include "tdjsarc/config.hpp"
#include "tdjsarc/episode.hpp"
#include "tdjsarc/io.hpp"
#include "tdjsarc/ppo.hpp"
#include "tdjsarc/scenario.hpp"

namespace tdjsarc {

// Builds a track from a scenario spec:
//   {"generator": "circular", "radius": 55, "speed": 14, "seed": 1}
//   {"generator": "linear_oscillating", "heading": 0, "v_lo": 5, "v_hi": 20,
//    "period": 240, "start": [-200, -20], "seed": 1}
//   {"generator": "random", "seed": 1}
inline EveTrack track_from_spec(const ScenarioConfig& cfg, const nlohmann::json& spec) {
  using namespace detail;
  const std::string s = "scenario_spec";
  const auto& gen_field = require(spec, s, "generator");
  if (!gen_field.is_string()) throw ConfigError("scenario_spec.generator", "expected a string");
  const std::string gen = gen_field.get<std::string>();
  const auto seed_field = require(spec, s, "seed");
  if (!seed_field.is_number_integer() || (!seed_field.is_number_unsigned() && seed_field.get<std::int64_t>() < 0)) {
    throw ConfigError("scenario_spec.seed", "expected a non-negative integer");
  }
  const auto seed = seed_field.get<std::uint64_t>();
  try {
    if (gen == "circular") {
      return gen_eve_circular(cfg, number(spec, s, "radius"), number(spec, s, "speed"), seed);
    }
    if (gen == "linear_oscillating") {
      const auto& st = require(spec, s, "start");
      if (!st.is_array() || st.size() < 2) throw ConfigError("scenario_spec.start", "expected [x, y]");
      const Vec3 start(st[0].get<double>(), st[1].get<double>(), 0.0);
      return gen_eve_linear_oscillating(cfg, number(spec, s, "heading"), number(spec, s, "v_lo"),
                                        number(spec, s, "v_hi"), number(spec, s, "period"), start, seed);
    }
    if (gen == "random") return gen_eve_random(cfg, seed);
  } catch (const ValidationError& e) {
    throw ConfigError("scenario_spec", e.what());
  }
  throw ConfigError("scenario_spec.generator", "unknown generator \"" + gen + "\"");
}

inline nlohmann::json episode_summary(const EpisodeLog& log) {
  return {{"mean_secrecy", log.mean_secrecy},
          {"mean_user_rate", log.mean_user_rate},
          {"total_reward", log.total_reward},
          {"frames", log.schedule.I},
          {"comm_slots", log.comm_slots},
          {"scr_violations", log.scr_violations},
          {"r_min_satisfied", log.r_min_satisfied},
          {"data_frames_meet_scr", log.data_frames_meet_scr}};
}

inline constexpr const char* kMethodPpo = "ppo";
inline constexpr const char* kMethodEqualAperture = "equal_aperture";
inline constexpr const char* kMethodRandom = "random";

struct SweepRow {
  double speed = 0.0;
  std::string method;
  MethodSummary summary;
  int grid_L = 0;  // equal_aperture winner, 0 otherwise
  int grid_I = 0;
};

inline std::vector<EveTrack> sweep_tracks(const ScenarioConfig& cfg, const SweepConfig& sw, double speed,
                                          std::uint64_t seed) {
  std::vector<EveTrack> tracks;
  for (int k = 0; k < sw.tracks_per_speed; ++k) {
    tracks.push_back(
        gen_eve_circular(cfg, sw.radius, speed, derive_seed(seed, Stream::SweepTrack, static_cast<std::uint64_t>(k))));
  }
  return tracks;
}

inline SweepRow sweep_ppo(const ScenarioConfig& cfg, const PolicyParams& params, std::span<const EveTrack> tracks,
                          double speed) {
  std::vector<EpisodeLog> logs;
  for (const auto& t : tracks) logs.push_back(run_policy_episode(cfg, params, t));
  return {speed, kMethodPpo, summarize(logs)};
}

inline SweepRow sweep_equal_aperture(const ScenarioConfig& cfg, const BaselineConfig& b,
                                     std::span<const EveTrack> tracks, double speed) {
  const GridSearchResult g = equal_aperture_grid_search(cfg, b, tracks);
  const GridRow& w = g.best();
  MethodSummary s;
  s.mean_secrecy = w.mean_secrecy;
  s.std_secrecy = w.std_secrecy;
  s.mean_user_rate = w.mean_user_rate;
  s.scr_violation_rate = w.scr_violation_rate;
  s.r_min_satisfied = w.r_min_satisfied;
  s.episodes = static_cast<int>(tracks.size());
  return {speed, kMethodEqualAperture, s, w.L, w.I};
}

inline SweepRow sweep_random(const ScenarioConfig& cfg, const BaselineConfig& b, std::span<const EveTrack> tracks,
                             double speed, std::uint64_t seed) {
  MethodSummary s;
  std::vector<double> all;
  for (std::size_t k = 0; k < tracks.size(); ++k) {
    const auto r = random_allocation(cfg, b, tracks[k], derive_seed(seed, Stream::RandomBaseline, k), b.random_trials);
    s.mean_user_rate += r.summary.mean_user_rate / tracks.size();
    s.scr_violation_rate += r.summary.scr_violation_rate / tracks.size();
    s.r_min_satisfied += r.summary.r_min_satisfied / tracks.size();
    all.insert(all.end(), r.trial_secrecy.begin(), r.trial_secrecy.end());
  }
  for (double v : all) s.mean_secrecy += v / all.size();
  for (double v : all) s.std_secrecy += (v - s.mean_secrecy) * (v - s.mean_secrecy) / all.size();
  s.std_secrecy = std::sqrt(s.std_secrecy);
  s.episodes = static_cast<int>(all.size());
  return {speed, kMethodRandom, s};
}

// Fixed-speed circular tracks around the user; every method sees the same
// tracks. Speeds above v_e_max are rejected.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& e, const PolicyParams& params,
                                       std::span<const double> speeds, std::uint64_t seed) {
  for (double v : speeds) {
    if (!(v >= 0.0) || v > e.scenario.v_e_max) throw ConfigError("speeds", "speed " + fmt_num(v) + " outside [0, v_e_max]");
  }
  std::vector<SweepRow> rows;
  for (double v : speeds) {
    const auto tracks = sweep_tracks(e.scenario, e.sweep, v, seed);
    rows.push_back(sweep_ppo(e.scenario, params, tracks, v));
    rows.push_back(sweep_equal_aperture(e.scenario, e.baselines, tracks, v));
    rows.push_back(sweep_random(e.scenario, e.baselines, tracks, v, seed));
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  CsvWriter w(os, {"speed_mps", "method", "mean_secrecy", "std_secrecy", "mean_user_rate", "scr_violation_rate",
                   "r_min_satisfied"});
  for (const auto& r : rows) {
    w.row(r.speed, r.method, r.summary.mean_secrecy, r.summary.std_secrecy, r.summary.mean_user_rate,
          r.summary.scr_violation_rate, r.summary.r_min_satisfied);
  }
}

inline void write_grid_csv(std::ostream& os, const GridSearchResult& g) {
  CsvWriter w(os, {"L", "I", "feasible", "mean_secrecy", "std_secrecy", "mean_user_rate", "scr_violation_rate",
                   "r_min_satisfied", "winner"});
  for (const auto& r : g.rows) {
    w.row(r.L, r.I, r.feasible, r.mean_secrecy, r.std_secrecy, r.mean_user_rate, r.scr_violation_rate,
          r.r_min_satisfied, r.winner);
  }
}

inline void write_random_csv(std::ostream& os, const RandomAllocationResult& r) {
  CsvWriter w(os, {"trials", "mean_secrecy", "std_secrecy", "mean_user_rate", "scr_violation_rate",
                   "r_min_satisfied"});
  w.row(r.summary.episodes, r.summary.mean_secrecy, r.summary.std_secrecy, r.summary.mean_user_rate,
        r.summary.scr_violation_rate, r.summary.r_min_satisfied);
}

}  // namespace tdjsarc
