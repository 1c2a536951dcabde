#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tdjsarc/experiment.hpp"

namespace fs = std::filesystem;
using namespace tdjsarc;

namespace {

nlohmann::json small_config() {
  nlohmann::json j = read_json_file(TDJSARC_CONFIG_DIR "/desk.json");
  j["scenario"]["N"] = 60;
  j["ppo"]["hidden"] = {8};
  j["ppo"]["iterations"] = 2;
  j["ppo"]["episodes_per_iter"] = 2;
  j["ppo"]["eval_every"] = 1;
  j["ppo"]["eval_episodes"] = 1;
  j["baselines"]["grid_L_max"] = 6;
  j["baselines"]["grid_I_max"] = 8;
  j["baselines"]["random_trials"] = 5;
  j["sweep"]["tracks_per_speed"] = 2;
  return j;
}

PolicyParams small_policy(std::uint64_t seed) {
  Rng rng(seed);
  return make_policy({8}, true, rng);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("tdjsarc_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

private:
  fs::path path_;
};

void write_file(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(1); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TDJSARC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Checkpoint, RoundTripIsExact) {
  PolicyParams p = small_policy(1);
  ObsArray o{1, 2, 3, 4, 5, 6};
  p.norm.update(o);
  p.norm.update(ObsArray{0.5, 0.1, 0.2, 0.3, 0.4, 0.7});
  const nlohmann::json cfg = small_config();
  const Checkpoint c = checkpoint_from_json(nlohmann::json::parse(checkpoint_to_json(p, cfg).dump()));
  EXPECT_EQ(c.params.policy, p.policy);
  EXPECT_EQ(c.params.value, p.value);
  EXPECT_EQ(c.params.policy_net.sizes(), p.policy_net.sizes());
  EXPECT_EQ(c.params.norm.mean, p.norm.mean);
  EXPECT_EQ(c.params.norm.m2, p.norm.m2);
  EXPECT_EQ(c.params.norm.count, p.norm.count);
  EXPECT_EQ(c.config, cfg);
  EXPECT_EQ(c.config_hash, config_hash(cfg));
}

TEST(Checkpoint, RejectsCorruption) {
  const PolicyParams p = small_policy(2);
  const nlohmann::json good = checkpoint_to_json(p, small_config());

  auto shape = good;
  shape["policy"]["sizes"] = {5, 8, 2};
  EXPECT_THROW(checkpoint_from_json(shape), CheckpointError);

  auto count = good;
  count["value"]["params"].erase(0);
  EXPECT_THROW(checkpoint_from_json(count), CheckpointError);

  auto hash = good;
  hash["config"]["scenario"]["N"] = 61;
  EXPECT_THROW(checkpoint_from_json(hash), CheckpointError);

  auto version = good;
  version["version"] = 99;
  EXPECT_THROW(checkpoint_from_json(version), CheckpointError);

  auto missing = good;
  missing.erase("obs_norm");
  EXPECT_THROW(checkpoint_from_json(missing), CheckpointError);

  EXPECT_THROW(load_checkpoint("/nonexistent/checkpoint.json"), CheckpointError);
}

TEST(Csv, Headers) {
  const auto e = experiment_from_json(small_config());
  const EveTrack t = gen_eve_random(e.scenario, 1);
  const EpisodeLog log = run_policy_episode(e.scenario, small_policy(3), t);
  std::ostringstream trace, frames, curve;
  write_trace_csv(trace, log);
  write_frames_csv(frames, log);
  write_curve_csv(curve, {});
  EXPECT_EQ(first_line(trace.str()), "n,frame_i,action,alpha,R_u,R_e_worst,R,r_e_m,scr_db_frozen,eve_speed_mps,reward");
  EXPECT_EQ(first_line(frames.str()), "frame_i,L_i,C_i,s2c_ratio,mean_speed");
  EXPECT_EQ(curve.str(), "iteration,mean_reward,mean_secrecy,mean_user_rate,scr_violations\n");
  const std::string t_str = trace.str();
  const auto lines = std::count(t_str.begin(), t_str.end(), '\n');
  EXPECT_EQ(lines, e.scenario.N + 1);

  std::ostringstream bad;
  CsvWriter w(bad, {"a", "b"});
  EXPECT_THROW(w.row(1), std::logic_error);
  w.row(1.5, true);
  EXPECT_EQ(bad.str(), "a,b\n1.5,1\n");
}

TEST(TrackSpec, BuildsAndRejects) {
  const auto e = experiment_from_json(small_config());
  const auto& c = e.scenario;
  EXPECT_EQ(track_from_spec(c, {{"generator", "circular"}, {"radius", 55}, {"speed", 14}, {"seed", 1}}).kind,
            TrackKind::Circular);
  EXPECT_EQ(track_from_spec(c, {{"generator", "random"}, {"seed", 3}}).kind, TrackKind::Random);
  const nlohmann::json lin = {{"generator", "linear_oscillating"}, {"heading", 0}, {"v_lo", 5}, {"v_hi", 20},
                              {"period", 240}, {"start", {-200, -20}}, {"seed", 1}};
  EXPECT_EQ(track_from_spec(c, lin).kind, TrackKind::LinearOscillating);

  auto expect_path = [&](const nlohmann::json& spec, const std::string& path) {
    try {
      track_from_spec(c, spec);
      ADD_FAILURE() << "accepted " << spec.dump();
    } catch (const ConfigError& err) {
      EXPECT_NE(std::string(err.what()).find(path), std::string::npos) << err.what();
    }
  };
  expect_path({{"generator", "spiral"}, {"seed", 1}}, "scenario_spec.generator");
  expect_path({{"seed", 1}}, "scenario_spec.generator");
  expect_path({{"generator", "random"}, {"seed", -1}}, "scenario_spec.seed");
  expect_path({{"generator", "circular"}, {"speed", 14}, {"seed", 1}}, "scenario_spec.radius");
  expect_path({{"generator", "circular"}, {"radius", 55}, {"speed", 40}, {"seed", 1}}, "scenario_spec");
  auto bad_start = lin;
  bad_start["start"] = {1};
  expect_path(bad_start, "scenario_spec.start");
}

TEST(Sweep, RowsMethodsAndSpeedBound) {
  auto j = small_config();
  j["scenario"]["N"] = 250;
  j["baselines"]["grid_L_max"] = 8;
  j["baselines"]["grid_I_max"] = 30;
  j["baselines"]["random_trials"] = 20;
  j["sweep"]["tracks_per_speed"] = 4;
  const auto e = experiment_from_json(j);
  const PolicyParams p = small_policy(4);
  const std::vector<double> speeds{0.0, 14.0};
  const auto rows = run_sweep(e, p, speeds, 7);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const char* expected[] = {kMethodPpo, kMethodEqualAperture, kMethodRandom};
    EXPECT_EQ(rows[k].method, expected[k % 3]);
    EXPECT_EQ(rows[k].speed, speeds[k / 3]);
    EXPECT_GE(rows[k].summary.mean_secrecy, 0.0);
  }
  EXPECT_GT(rows[1].grid_L, 0);
  // a parked eavesdropper is never harder to beat than a fast one
  EXPECT_GE(rows[1].summary.mean_secrecy, rows[4].summary.mean_secrecy);
  EXPECT_GE(rows[2].summary.mean_secrecy, rows[5].summary.mean_secrecy);

  const std::vector<double> too_fast{e.scenario.v_e_max + 1.0};
  EXPECT_THROW(run_sweep(e, p, too_fast, 7), ConfigError);
  const std::vector<double> negative{-1.0};
  EXPECT_THROW(run_sweep(e, p, negative, 7), ConfigError);

  std::ostringstream os;
  write_sweep_csv(os, rows);
  EXPECT_EQ(first_line(os.str()), "speed_mps,method,mean_secrecy,std_secrecy,mean_user_rate,scr_violation_rate,r_min_satisfied");
}

TEST(Eval, TraceConsistentWithSummary) {
  const auto e = experiment_from_json(small_config());
  const EveTrack t = gen_eve_circular(e.scenario, 55, 14, 1);
  const EpisodeLog log = run_policy_episode(e.scenario, small_policy(5), t);
  double sum = 0.0;
  for (const auto& s : log.slots) {
    sum += s.R;
    if (s.action == Action::Sense) {
      EXPECT_EQ(s.alpha, 0.0);
      EXPECT_EQ(s.R, 0.0);
    }
  }
  const auto j = episode_summary(log);
  EXPECT_NEAR(j["mean_secrecy"].get<double>(), sum / e.scenario.N, 1e-12);
  EXPECT_EQ(j["frames"].get<int>(), log.schedule.I);
}

TEST(Cli, ExitCodes) {
  TempDir d;
  write_file(d / "cfg.json", small_config());
  auto broken = small_config();
  broken["scenario"].erase("B_r");
  write_file(d / "broken.json", broken);
  write_file(d / "circle.json", {{"generator", "circular"}, {"radius", 55}, {"speed", 14}, {"seed", 1}});
  write_file(d / "bad_spec.json", {{"generator", "spiral"}, {"seed", 1}});
  const std::string cfg = (d / "cfg.json").string(), out = (d / "run").string();

  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("train"), 2);
  EXPECT_EQ(run_cli("train --config " + (d / "broken.json").string() + " --out " + out), 2);
  EXPECT_EQ(run_cli("train --config " + (d / "missing.json").string() + " --out " + out), 2);
  ASSERT_EQ(run_cli("train --config " + cfg + " --seed 3 --out " + out), 0);
  for (const char* f : {"curve.csv", "checkpoint.json", "config_snapshot.json"}) EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;

  const std::string ck = (fs::path(out) / "checkpoint.json").string();
  EXPECT_EQ(run_cli("eval --checkpoint " + ck + " --scenario " + (d / "circle.json").string() + " --out " + out), 0);
  for (const char* f : {"trace.csv", "frames.csv", "summary.json"}) EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
  EXPECT_EQ(run_cli("eval --checkpoint " + ck + " --scenario " + (d / "bad_spec.json").string() + " --out " + out), 2);
  EXPECT_EQ(run_cli("eval --checkpoint " + (d / "cfg.json").string() + " --scenario " + (d / "circle.json").string() +
                    " --out " + out),
            3);

  EXPECT_EQ(run_cli("sweep --checkpoint " + ck + " --speeds 0,14 --out " + out), 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "sweep.csv"));
  EXPECT_EQ(run_cli("sweep --checkpoint " + ck + " --speeds 0,99 --out " + out), 2);

  EXPECT_EQ(run_cli("baseline --config " + cfg + " --scenario " + (d / "circle.json").string() + " --out " + out), 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "grid.csv"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "random.csv"));
}

TEST(Cli, SameSeedByteIdenticalOutputs) {
  TempDir d;
  write_file(d / "cfg.json", small_config());
  write_file(d / "circle.json", {{"generator", "circular"}, {"radius", 55}, {"speed", 10}, {"seed", 2}});
  const std::string cfg = (d / "cfg.json").string();
  for (const char* run : {"a", "b"}) {
    const std::string out = (d / run).string();
    ASSERT_EQ(run_cli("train --config " + cfg + " --seed 9 --out " + out), 0);
    ASSERT_EQ(run_cli("eval --checkpoint " + out + "/checkpoint.json --scenario " + (d / "circle.json").string() +
                      " --out " + out),
              0);
    ASSERT_EQ(run_cli("sweep --checkpoint " + out + "/checkpoint.json --speeds 6,14 --seed 9 --out " + out), 0);
  }
  for (const char* f : {"curve.csv", "checkpoint.json", "trace.csv", "frames.csv", "summary.json", "sweep.csv"}) {
    EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
  }
}
