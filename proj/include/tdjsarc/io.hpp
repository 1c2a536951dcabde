#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdjsarc/config.hpp"
#include "tdjsarc/env.hpp"
#include "tdjsarc/episode.hpp"
#include "tdjsarc/ppo.hpp"

namespace tdjsarc {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt_num(int v) { return std::to_string(v); }
inline std::string fmt_num(long v) { return std::to_string(v); }

class CsvWriter {
public:
  CsvWriter(std::ostream& os, std::initializer_list<const char*> header) : os_(os), cols_(header.size()) {
    bool first = true;
    for (const char* h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }

  template <typename... Ts>
  void row(const Ts&... vs) {
    static_assert(sizeof...(Ts) > 0);
    if (sizeof...(Ts) != cols_) throw std::logic_error("CsvWriter: column count mismatch");
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(vs), first = false), ...);
    os_ << '\n';
  }

private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return fmt_num(v); }
  static std::string cell(int v) { return fmt_num(v); }
  static std::string cell(long v) { return fmt_num(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }

  std::ostream& os_;
  std::size_t cols_;
};

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

// Per-slot episode trace.
inline void write_trace_csv(std::ostream& os, const EpisodeLog& log) {
  CsvWriter w(os, {"n", "frame_i", "action", "alpha", "R_u", "R_e_worst", "R", "r_e_m", "scr_db_frozen",
                   "eve_speed_mps", "reward"});
  for (const auto& s : log.slots) {
    w.row(s.n, s.frame, static_cast<int>(s.action), s.alpha, s.R_u, s.R_e_worst, s.R, s.r_e, s.scr_db_frozen,
          s.eve_speed, s.reward);
  }
}

// Per-frame sensing-to-communication summary.
inline void write_frames_csv(std::ostream& os, const EpisodeLog& log) {
  CsvWriter w(os, {"frame_i", "L_i", "C_i", "s2c_ratio", "mean_speed"});
  int slot = 0;
  for (int f = 0; f < log.schedule.I; ++f) {
    const int T = log.schedule.T[f], L = log.schedule.L[f], C = T - L;
    double speed = 0.0;
    for (int k = 0; k < T; ++k) speed += log.slots[static_cast<std::size_t>(slot + k)].eve_speed;
    slot += T;
    w.row(f + 1, L, C, static_cast<double>(L) / C, speed / T);
  }
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& curve) {
  CsvWriter w(os, {"iteration", "mean_reward", "mean_secrecy", "mean_user_rate", "scr_violations"});
  for (const auto& r : curve) w.row(r.iteration, r.mean_reward, r.mean_secrecy, r.mean_user_rate, r.scr_violations);
}

inline constexpr const char* kCheckpointFormat = "tdjsarc-policy";
inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json net_to_json(const Mlp& net, const Eigen::VectorXd& p) {
  return {{"sizes", net.sizes()}, {"params", std::vector<double>(p.data(), p.data() + p.size())}};
}

inline void net_from_json(const nlohmann::json& j, int out_dim, Mlp& net, Eigen::VectorXd& p, const char* name) {
  const auto sizes = j.at("sizes").get<std::vector<int>>();
  if (sizes.size() < 2 || sizes.front() != kObsDim || sizes.back() != out_dim) {
    throw CheckpointError(std::string("checkpoint: ") + name + " shape mismatch");
  }
  net = Mlp(sizes);
  const auto v = j.at("params").get<std::vector<double>>();
  if (static_cast<int>(v.size()) != net.num_params()) {
    throw CheckpointError(std::string("checkpoint: ") + name + " parameter count does not match its shape");
  }
  p = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

struct Checkpoint {
  PolicyParams params;
  nlohmann::json config;
  std::string config_hash;
};

inline nlohmann::json checkpoint_to_json(const PolicyParams& p, const nlohmann::json& config) {
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["obs_dim"] = kObsDim;
  j["config_hash"] = config_hash(config);
  j["config"] = config;
  j["policy"] = detail::net_to_json(p.policy_net, p.policy);
  j["value"] = detail::net_to_json(p.value_net, p.value);
  j["obs_norm"] = {{"enabled", p.norm.enabled},
                   {"count", p.norm.count},
                   {"mean", p.norm.mean},
                   {"m2", p.norm.m2}};
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) throw CheckpointError("checkpoint: unknown format");
    if (j.at("version").get<int>() != kCheckpointVersion) throw CheckpointError("checkpoint: unsupported version");
    if (j.at("obs_dim").get<int>() != kObsDim) throw CheckpointError("checkpoint: observation shape mismatch");
    Checkpoint c;
    detail::net_from_json(j.at("policy"), 2, c.params.policy_net, c.params.policy, "policy");
    detail::net_from_json(j.at("value"), 1, c.params.value_net, c.params.value, "value");
    const auto& n = j.at("obs_norm");
    c.params.norm.enabled = n.at("enabled").get<bool>();
    c.params.norm.count = n.at("count").get<double>();
    c.params.norm.mean = n.at("mean").get<ObsArray>();
    c.params.norm.m2 = n.at("m2").get<ObsArray>();
    c.config = j.at("config");
    c.config_hash = j.at("config_hash").get<std::string>();
    if (c.config_hash != config_hash(c.config)) throw CheckpointError("checkpoint: config hash mismatch");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed (") + e.what() + ")");
  }
}

inline void save_checkpoint(const std::string& path, const PolicyParams& p, const nlohmann::json& config) {
  auto os = open_out(path);
  os << checkpoint_to_json(p, config).dump(1) << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace tdjsarc
