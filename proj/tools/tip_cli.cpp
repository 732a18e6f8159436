#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tip/config.hpp"
#include "tip/harness.hpp"

namespace fs = std::filesystem;

namespace
{

struct GlobalOptions
{
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_dir = ".";
};

void write_file(const fs::path & path, const std::string & content)
{
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::vector<double> parse_double_list(const std::string & csv)
{
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string & csv)
{
  std::vector<std::size_t> out;
  for (double v : parse_double_list(csv)) out.push_back(static_cast<std::size_t>(v));
  return out;
}

struct LoadedConfig
{
  tip::TrainConfig train;
  tip::GeneratorConfig gen;
};

LoadedConfig load_config(const GlobalOptions & global, const tip::KeyValueConfig & overrides)
{
  LoadedConfig cfg;
  cfg.train.t_future = 30;  // desk-scale default; config can restore 80
  cfg.gen.t_future = 30;
  if (!global.config_path.empty()) {
    tip::KeyValueConfig::from_file(global.config_path).apply(cfg.train, cfg.gen);
  }
  overrides.apply(cfg.train, cfg.gen);  // flags override file values
  if (global.seed) {
    cfg.train.seed = *global.seed;
    cfg.gen.seed = *global.seed;
  }
  return cfg;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"task-informed trajectory prediction toolkit"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "random seed (overrides config file)");
  app.add_option("--config", global.config_path, "flat key-value config file");
  app.add_option("--out", global.out_dir, "output directory");

  tip::KeyValueConfig overrides;
  auto add_override = [&](CLI::App * cmd, const std::string & flag, const std::string & key,
                          const std::string & help) {
    cmd->add_option_function<std::string>(
      flag, [&overrides, key](const std::string & v) { overrides.set(key, v); }, help);
  };

  // gen
  auto * gen = app.add_subcommand("gen", "generate a synthetic scenario dataset");
  add_override(gen, "--n-scenes", "n_scenes", "number of scenarios");
  add_override(gen, "--geometry", "geometry", "crossing|merging|oncoming");
  add_override(gen, "--t-future", "t_future", "future horizon steps");
  add_override(gen, "--noise-sigma", "noise_sigma", "observation noise sigma (m)");

  // train
  auto * train_cmd = app.add_subcommand("train", "train a predictor");
  std::string data_path;
  train_cmd->add_option("--data", data_path, "dataset file (default <out>/dataset.tipds)");
  add_override(train_cmd, "--task", "task", "warning|planning_selfish|planning_altruistic");
  add_override(train_cmd, "--alpha", "alpha", "task loss coefficient");
  add_override(train_cmd, "--epochs", "epochs", "training epochs");
  add_override(train_cmd, "--k-samples", "k_samples", "prediction samples K");
  add_override(train_cmd, "--utility-noise-sigma", "utility_noise_sigma", "train-time noise");

  // eval
  auto * eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string ckpt_path;
  std::string eval_data_path;
  eval_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file");
  eval_cmd->add_option("--data", eval_data_path, "dataset file");
  add_override(eval_cmd, "--task", "task", "task used for ground-truth labels");

  // sweeps
  auto * sweep_alpha = app.add_subcommand("sweep-alpha", "train/eval across alpha values");
  std::string alpha_list = "0,1,5,20,100";
  std::string sweep_data;
  sweep_alpha->add_option("--alphas", alpha_list, "comma-separated alpha grid");
  sweep_alpha->add_option("--data", sweep_data, "dataset file");
  add_override(sweep_alpha, "--task", "task", "task");
  add_override(sweep_alpha, "--epochs", "epochs", "training epochs");

  auto * sweep_k = app.add_subcommand("sweep-k", "train/eval TIP and TAP across K");
  std::string k_list = "1,2,4,8";
  std::string k_data;
  sweep_k->add_option("--ks", k_list, "comma-separated K grid");
  sweep_k->add_option("--data", k_data, "dataset file");
  add_override(sweep_k, "--task", "task", "task");
  add_override(sweep_k, "--epochs", "epochs", "training epochs");

  auto * noise_cmd = app.add_subcommand("noise-robustness", "train/eval across utility noise");
  std::string sigma_list = "0,0.25";
  std::string noise_data;
  noise_cmd->add_option("--sigmas", sigma_list, "comma-separated noise fractions");
  noise_cmd->add_option("--data", noise_data, "dataset file");
  add_override(noise_cmd, "--task", "task", "task");
  add_override(noise_cmd, "--epochs", "epochs", "training epochs");

  // let the global --seed/--config/--out flags appear after the subcommand too
  for (auto * sub : app.get_subcommands([](const CLI::App *) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    std::cerr << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  try {
    const LoadedConfig cfg = load_config(global, overrides);
    const fs::path out_dir(global.out_dir);
    const auto default_data = (out_dir / "dataset.tipds").string();

    if (gen->parsed()) {
      fs::create_directories(out_dir);
      const auto scenes = tip::generate_scenes(cfg.gen);
      tip::write_dataset(scenes, default_data, cfg.gen.digest_string());
      std::cout << "wrote " << scenes.size() << " scenes to " << default_data << "\n";
    } else if (train_cmd->parsed()) {
      const auto scenes = tip::read_dataset(data_path.empty() ? default_data : data_path);
      const auto t0 = std::chrono::steady_clock::now();
      tip::TrainResult result = tip::train(cfg.train, scenes);
      const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      fs::create_directories(out_dir);
      const auto ckpt = (out_dir / "checkpoint.tipckpt").string();
      tip::save_checkpoint(ckpt, result.model_cfg, result.params);
      write_file(out_dir / "train_log.txt", tip::training_log_text(result));
      for (const auto & e : result.log) {
        std::cout << "epoch " << e.epoch << " l_acc " << e.l_acc << " l_task " << e.l_task << "\n";
      }
      std::cout << "wall_s " << wall << "\n";
      std::cout << "wrote " << ckpt << "\n";
      if (result.aborted) {
        std::cerr << "training aborted on non-finite loss; last good checkpoint kept\n";
        return 1;
      }
    } else if (eval_cmd->parsed()) {
      if (ckpt_path.empty()) ckpt_path = (out_dir / "checkpoint.tipckpt").string();
      auto [model_cfg, params] = tip::load_checkpoint(ckpt_path);
      const auto scenes =
        tip::read_dataset(eval_data_path.empty() ? default_data : eval_data_path);
      auto [train_split, val_split] = tip::split_dataset(scenes, cfg.train.split_seed);
      (void)train_split;
      const auto report =
        tip::evaluate(model_cfg, params, val_split, cfg.train.task_spec());
      fs::create_directories(out_dir);
      write_file(out_dir / "metrics.txt", report.to_kv());
      write_file(out_dir / "metrics.csv", report.to_csv());
      std::cout << report.to_kv();
    } else if (sweep_alpha->parsed()) {
      const auto scenes = tip::read_dataset(sweep_data.empty() ? default_data : sweep_data);
      const auto rows =
        tip::experiment_alpha_sweep(cfg.train, parse_double_list(alpha_list), scenes);
      const auto csv = tip::sweep_table_csv(rows);
      fs::create_directories(out_dir);
      write_file(out_dir / "alpha_sweep.csv", csv);
      std::cout << csv;
    } else if (sweep_k->parsed()) {
      const auto scenes = tip::read_dataset(k_data.empty() ? default_data : k_data);
      const auto rows = tip::experiment_k_sweep(cfg.train, parse_size_list(k_list), scenes);
      const auto csv = tip::sweep_table_csv(rows);
      fs::create_directories(out_dir);
      write_file(out_dir / "k_sweep.csv", csv);
      std::cout << csv;
    } else if (noise_cmd->parsed()) {
      const auto scenes = tip::read_dataset(noise_data.empty() ? default_data : noise_data);
      const auto rows =
        tip::experiment_noise_robustness(cfg.train, parse_double_list(sigma_list), scenes);
      const auto csv = tip::sweep_table_csv(rows);
      fs::create_directories(out_dir);
      write_file(out_dir / "noise_robustness.csv", csv);
      std::cout << csv;
    }
  } catch (const tip::ConfigError & e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
