// tdjsarc: train / eval / sweep / baseline.
// Exit codes: 0 ok, 2 config error, 3 runtime error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdjsarc/tdjsarc.hpp"

namespace fs = std::filesystem;
using namespace tdjsarc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Args {
  std::string config;
  std::string scenario;
  std::string checkpoint;
  std::string out = "out";
  std::uint64_t seed = 1;
  std::vector<double> speeds;
};

std::string in_out(const Args& a, const char* name) { return (fs::path(a.out) / name).string(); }

void write_json(const std::string& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

// Config for eval/sweep: an explicit --config wins over the one stored in the
// checkpoint, so a policy trained at one horizon can be evaluated at another.
ExperimentConfig config_for(const Args& a, const Checkpoint& ck) {
  if (!a.config.empty()) return load_experiment_config(a.config);
  return experiment_from_json(ck.config);
}

int cmd_train(const Args& a) {
  const ExperimentConfig e = load_experiment_config(a.config);
  fs::create_directories(a.out);
  auto curve_os = open_out(in_out(a, "curve.csv"));
  CsvWriter curve(curve_os, {"iteration", "mean_reward", "mean_secrecy", "mean_user_rate", "scr_violations"});
  const TrainResult r = train(e.scenario, e.ppo, random_track_generator(), a.seed, [&](const CurveRow& row) {
    curve.row(row.iteration, row.mean_reward, row.mean_secrecy, row.mean_user_rate, row.scr_violations);
    curve_os.flush();
    std::cerr << "iter " << row.iteration << " reward " << fmt_num(row.mean_reward) << " secrecy "
              << fmt_num(row.mean_secrecy) << '\n';
  });
  save_checkpoint(in_out(a, "checkpoint.json"), r.best, e.source);
  write_json(in_out(a, "config_snapshot.json"),
             {{"config", e.source}, {"config_hash", config_hash(e.source)}, {"seed", a.seed},
              {"best_iteration", r.best_iteration}, {"best_score", r.best_score}});
  return 0;
}

int cmd_eval(const Args& a) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  const ExperimentConfig e = config_for(a, ck);
  const EveTrack track = track_from_spec(e.scenario, read_json_file(a.scenario));
  const EpisodeLog log = run_policy_episode(e.scenario, ck.params, track);
  fs::create_directories(a.out);
  {
    auto os = open_out(in_out(a, "trace.csv"));
    write_trace_csv(os, log);
  }
  {
    auto os = open_out(in_out(a, "frames.csv"));
    write_frames_csv(os, log);
  }
  nlohmann::json s = episode_summary(log);
  s["track"] = to_string(track.kind);
  s["checkpoint_config_hash"] = ck.config_hash;
  write_json(in_out(a, "summary.json"), s);
  return 0;
}

int cmd_sweep(const Args& a) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  const ExperimentConfig e = config_for(a, ck);
  if (a.speeds.empty()) throw ConfigError("speeds", "at least one speed required");
  const auto rows = run_sweep(e, ck.params, a.speeds, a.seed);
  fs::create_directories(a.out);
  auto os = open_out(in_out(a, "sweep.csv"));
  write_sweep_csv(os, rows);
  return 0;
}

int cmd_baseline(const Args& a) {
  const ExperimentConfig e = load_experiment_config(a.config);
  const EveTrack track = track_from_spec(e.scenario, read_json_file(a.scenario));
  const std::vector<EveTrack> tracks{track};
  const GridSearchResult g = equal_aperture_grid_search(e.scenario, e.baselines, tracks);
  const RandomAllocationResult r =
      random_allocation(e.scenario, e.baselines, track, a.seed, e.baselines.random_trials);
  fs::create_directories(a.out);
  {
    auto os = open_out(in_out(a, "grid.csv"));
    write_grid_csv(os, g);
  }
  auto os = open_out(in_out(a, "random.csv"));
  write_random_csv(os, r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-division SAR / secure communication scheduler"};
  app.require_subcommand(1);
  Args a;

  auto* train_cmd = app.add_subcommand("train", "train a PPO scheduling policy");
  train_cmd->add_option("--config", a.config, "experiment config (JSON)")->required();
  train_cmd->add_option("--seed", a.seed, "master seed");
  train_cmd->add_option("--out", a.out, "output directory");

  auto* eval_cmd = app.add_subcommand("eval", "run a trained policy on one scenario");
  eval_cmd->add_option("--checkpoint", a.checkpoint, "checkpoint.json")->required();
  eval_cmd->add_option("--scenario", a.scenario, "scenario spec (JSON)")->required();
  eval_cmd->add_option("--config", a.config, "override the checkpoint's config");
  eval_cmd->add_option("--seed", a.seed, "master seed");
  eval_cmd->add_option("--out", a.out, "output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "secrecy versus eavesdropper speed on circular tracks");
  sweep_cmd->add_option("--checkpoint", a.checkpoint, "checkpoint.json")->required();
  sweep_cmd->add_option("--speeds", a.speeds, "speeds in m/s")->delimiter(',')->required();
  sweep_cmd->add_option("--config", a.config, "override the checkpoint's config");
  sweep_cmd->add_option("--seed", a.seed, "master seed");
  sweep_cmd->add_option("--out", a.out, "output directory");

  auto* base_cmd = app.add_subcommand("baseline", "equal-aperture grid search and random allocation");
  base_cmd->add_option("--config", a.config, "experiment config (JSON)")->required();
  base_cmd->add_option("--scenario", a.scenario, "scenario spec (JSON)")->required();
  base_cmd->add_option("--seed", a.seed, "master seed");
  base_cmd->add_option("--out", a.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(a);
    if (*eval_cmd) return cmd_eval(a);
    if (*sweep_cmd) return cmd_sweep(a);
    if (*base_cmd) return cmd_baseline(a);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
