#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "tdjsarc/errors.hpp"
#include "tdjsarc/units.hpp"

namespace tdjsarc {

using Vec3 = Eigen::Vector3d;

enum class VelocityBoundMode { Cap, PaperMax };

// Physical and system constants. All quantities are linear; dB inputs are
// converted once when the config is loaded.
struct ScenarioConfig {
  int N = 2500;
  double delta_t = 0.1;     // s
  double r_r = 100.0;       // m
  double r_a = 200.0;       // m
  double v_a = 10.0;        // m/s
  double h = 100.0;         // m
  double lambda_r = 0.12;   // m
  double lambda_c = 0.12;   // m
  double B_r = 1e9;         // Hz
  double B_c = 1e8;         // Hz, metadata only
  double sigma_t = db_to_linear(5.0);
  double sigma_0 = db_to_linear(-5.0);
  double scr_min = db_to_linear(10.0);
  int M_t = 12;
  double beta_0 = db_to_linear(-30.0);
  double P_com_max = 1.0;   // W
  double sigma_u2 = dbm_to_watt(-50.0);
  double sigma_e2 = dbm_to_watt(-50.0);
  Vec3 q_u{-50.0, -20.0, 0.0};
  double v_e_max = 28.0;    // m/s
  double a_e_max = 2.0;     // m/s^2
  double R_min = 1.0;       // bits/s/Hz
  double rho_1 = 0.5;
  double rho_2 = 0.5;
  double eps_alpha = 0.01;
  double eps_theta = 0.01;  // rad
  double c = 3e8;           // m/s
  double phase0 = 0.0;      // rad, ABS orbit phase at slot 1
  VelocityBoundMode velocity_bound = VelocityBoundMode::Cap;

  int M_c() const { return M_t - 2; }
  double eta() const { return std::atan(r_a / h); }
  double delta_r() const { return c / (2.0 * B_r * std::sin(eta())); }

  void validate() const {
    auto need = [](bool ok, const char* field, const char* what) {
      if (!ok) throw ConfigError(std::string("scenario.") + field, what);
    };
    need(N > 2, "N", "must be > 2");
    need(delta_t > 0, "delta_t", "must be > 0");
    need(r_r > 0, "r_r", "must be > 0");
    need(r_a > r_r, "r_a", "must exceed r_r");
    need(h > 0, "h", "must be > 0");
    need(v_a > 0, "v_a", "must be > 0");
    need(lambda_r > 0, "lambda_r", "must be > 0");
    need(lambda_c > 0, "lambda_c", "must be > 0");
    need(B_r > 0, "B_r", "must be > 0");
    need(B_c > 0, "B_c", "must be > 0");
    need(M_t >= 3, "M_t", "must be >= 3");
    need(beta_0 > 0, "beta_0_db", "must be finite");
    need(P_com_max > 0, "P_com_max", "must be > 0");
    need(sigma_u2 > 0, "sigma_u2_dbm", "must be finite");
    need(sigma_e2 > 0, "sigma_e2_dbm", "must be finite");
    need(sigma_t > 0 && sigma_0 > 0, "sigma_t_dbsm", "must be finite");
    need(v_e_max > 0, "v_e_max", "must be > 0");
    need(a_e_max > 0, "a_e_max", "must be > 0");
    need(eps_alpha > 0 && eps_alpha <= 1, "eps_alpha", "must be in (0, 1]");
    need(eps_theta > 0, "eps_theta", "must be > 0");
    need(c > 0, "c", "must be > 0");
    need(q_u.z() == 0.0, "q_u", "user must be on the ground (z = 0)");
  }
};

struct PpoConfig {
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double lr = 3e-4;
  int epochs = 4;
  int minibatch = 256;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  int episodes_per_iter = 8;
  int iterations = 200;
  int eval_every = 10;
  int eval_episodes = 8;
  bool obs_norm = false;
  bool greedy_eval = true;
};

struct BaselineConfig {
  int grid_L_max = 40;
  int grid_I_max = 60;
  int random_L_max = 40;
  int random_C_max = 100;
  int random_trials = 1000;
};

struct SweepConfig {
  double radius = 55.0;
  int tracks_per_speed = 4;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  PpoConfig ppo;
  BaselineConfig baselines;
  SweepConfig sweep;
  nlohmann::json source;  // document as loaded, used for hashing and snapshots
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& section,
                                     const char* key) {
  const std::string path = section.empty() ? key : section + "." + key;
  if (!j.is_object() || !j.contains(key)) throw ConfigError(path, "missing field");
  return j.at(key);
}

inline double number(const nlohmann::json& j, const std::string& section, const char* key) {
  const auto& v = require(j, section, key);
  if (!v.is_number()) throw ConfigError(section + "." + key, "expected a number");
  return v.get<double>();
}

inline int integer(const nlohmann::json& j, const std::string& section, const char* key) {
  const auto& v = require(j, section, key);
  if (!v.is_number_integer()) throw ConfigError(section + "." + key, "expected an integer");
  return v.get<int>();
}

inline bool boolean(const nlohmann::json& j, const std::string& section, const char* key) {
  const auto& v = require(j, section, key);
  if (!v.is_boolean()) throw ConfigError(section + "." + key, "expected a boolean");
  return v.get<bool>();
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  using namespace detail;
  const std::string s = "scenario";
  ScenarioConfig c;
  c.N = integer(j, s, "N");
  c.delta_t = number(j, s, "delta_t");
  c.r_r = number(j, s, "r_r");
  c.r_a = number(j, s, "r_a");
  c.v_a = number(j, s, "v_a");
  c.h = number(j, s, "h");
  c.lambda_r = number(j, s, "lambda_r");
  c.lambda_c = number(j, s, "lambda_c");
  c.B_r = number(j, s, "B_r");
  c.B_c = number(j, s, "B_c");
  c.sigma_t = db_to_linear(number(j, s, "sigma_t_dbsm"));
  c.sigma_0 = db_to_linear(number(j, s, "sigma_0_db"));
  c.scr_min = db_to_linear(number(j, s, "scr_min_db"));
  c.M_t = integer(j, s, "M_t");
  c.beta_0 = db_to_linear(number(j, s, "beta_0_db"));
  c.P_com_max = number(j, s, "P_com_max");
  c.sigma_u2 = dbm_to_watt(number(j, s, "sigma_u2_dbm"));
  c.sigma_e2 = dbm_to_watt(number(j, s, "sigma_e2_dbm"));
  const auto& qu = require(j, s, "q_u");
  if (!qu.is_array() || qu.size() != 3) throw ConfigError("scenario.q_u", "expected [x, y, z]");
  c.q_u = Vec3(qu[0].get<double>(), qu[1].get<double>(), qu[2].get<double>());
  c.v_e_max = number(j, s, "v_e_max");
  c.a_e_max = number(j, s, "a_e_max");
  c.R_min = number(j, s, "R_min");
  c.rho_1 = number(j, s, "rho_1");
  c.rho_2 = number(j, s, "rho_2");
  c.eps_alpha = number(j, s, "eps_alpha");
  c.eps_theta = number(j, s, "eps_theta");
  c.c = number(j, s, "c");
  c.phase0 = number(j, s, "phase0");
  const auto mode = require(j, s, "velocity_bound").get<std::string>();
  if (mode == "cap") {
    c.velocity_bound = VelocityBoundMode::Cap;
  } else if (mode == "paper-max") {
    c.velocity_bound = VelocityBoundMode::PaperMax;
  } else {
    throw ConfigError("scenario.velocity_bound", "expected \"cap\" or \"paper-max\"");
  }
  c.validate();
  return c;
}

inline PpoConfig ppo_from_json(const nlohmann::json& j) {
  using namespace detail;
  const std::string s = "ppo";
  PpoConfig p;
  const auto& hidden = require(j, s, "hidden");
  if (!hidden.is_array() || hidden.empty()) throw ConfigError("ppo.hidden", "expected a non-empty array");
  p.hidden.clear();
  for (const auto& h : hidden) {
    if (!h.is_number_integer() || h.get<int>() < 1) throw ConfigError("ppo.hidden", "layer sizes must be positive integers");
    p.hidden.push_back(h.get<int>());
  }
  p.gamma = number(j, s, "gamma");
  p.gae_lambda = number(j, s, "gae_lambda");
  p.clip = number(j, s, "clip");
  p.lr = number(j, s, "lr");
  p.epochs = integer(j, s, "epochs");
  p.minibatch = integer(j, s, "minibatch");
  p.entropy_coef = number(j, s, "entropy_coef");
  p.value_coef = number(j, s, "value_coef");
  p.max_grad_norm = number(j, s, "max_grad_norm");
  p.episodes_per_iter = integer(j, s, "episodes_per_iter");
  p.iterations = integer(j, s, "iterations");
  p.eval_every = integer(j, s, "eval_every");
  p.eval_episodes = integer(j, s, "eval_episodes");
  p.obs_norm = boolean(j, s, "obs_norm");
  p.greedy_eval = boolean(j, s, "greedy_eval");
  if (!(p.gamma >= 0 && p.gamma < 1)) throw ConfigError("ppo.gamma", "must be in [0, 1)");
  if (!(p.gae_lambda >= 0 && p.gae_lambda <= 1)) throw ConfigError("ppo.gae_lambda", "must be in [0, 1]");
  if (p.epochs < 1) throw ConfigError("ppo.epochs", "must be >= 1");
  if (p.minibatch < 1) throw ConfigError("ppo.minibatch", "must be >= 1");
  if (p.episodes_per_iter < 1) throw ConfigError("ppo.episodes_per_iter", "must be >= 1");
  if (p.iterations < 0) throw ConfigError("ppo.iterations", "must be >= 0");
  if (p.eval_every < 1) throw ConfigError("ppo.eval_every", "must be >= 1");
  if (p.eval_episodes < 1) throw ConfigError("ppo.eval_episodes", "must be >= 1");
  return p;
}

inline BaselineConfig baselines_from_json(const nlohmann::json& j) {
  using namespace detail;
  const std::string s = "baselines";
  BaselineConfig b;
  b.grid_L_max = integer(j, s, "grid_L_max");
  b.grid_I_max = integer(j, s, "grid_I_max");
  b.random_L_max = integer(j, s, "random_L_max");
  b.random_C_max = integer(j, s, "random_C_max");
  b.random_trials = integer(j, s, "random_trials");
  if (b.random_trials < 1) throw ConfigError("baselines.random_trials", "must be >= 1");
  if (b.random_C_max < 1) throw ConfigError("baselines.random_C_max", "must be >= 1");
  return b;
}

inline SweepConfig sweep_from_json(const nlohmann::json& j) {
  using namespace detail;
  SweepConfig w;
  w.radius = number(j, "sweep", "radius");
  w.tracks_per_speed = integer(j, "sweep", "tracks_per_speed");
  if (w.radius <= 0) throw ConfigError("sweep.radius", "must be > 0");
  if (w.tracks_per_speed < 1) throw ConfigError("sweep.tracks_per_speed", "must be >= 1");
  return w;
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  ExperimentConfig e;
  e.scenario = scenario_from_json(detail::require(j, "", "scenario"));
  e.ppo = ppo_from_json(detail::require(j, "", "ppo"));
  e.baselines = baselines_from_json(detail::require(j, "", "baselines"));
  e.sweep = sweep_from_json(detail::require(j, "", "sweep"));
  e.source = j;
  return e;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", path + ": " + e.what());
  }
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  try {
    return experiment_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("", path + ": " + e.what());
  }
}

// FNV-1a over the canonical (sorted-key) dump of the config document.
inline std::string config_hash(const nlohmann::json& j) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : j.dump()) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << hash;
  return os.str();
}

}  // namespace tdjsarc
