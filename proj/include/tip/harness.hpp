#ifndef TIP_HARNESS_HPP_
#define TIP_HARNESS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tip/losses.hpp"
#include "tip/metrics.hpp"
#include "tip/model.hpp"
#include "tip/simgen.hpp"
#include "tip/tasks.hpp"

namespace tip
{

struct TrainConfig
{
  TaskKind task = TaskKind::Warning;
  double alpha = 20.0;
  double beta = 5.0;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::size_t k_samples = 4;
  std::size_t n_agents = 2;
  std::size_t t_past = 11;
  std::size_t t_future = 30;
  double dropout_rate = 0.1;
  /// Gaussian training-time utility perturbation, as a fraction of |u|.
  double utility_noise_sigma = 0.0;
  double d_safe = 3.64;
  double d_warn = 3.64;
  /// Sample one reactive outcome per plan instead of averaging over the rule.
  bool single_sample_reactions = false;
  std::uint64_t split_seed = 1234;

  ModelConfig model_config() const;
  TaskSpec task_spec() const;
};

struct EpochLog
{
  std::size_t epoch = 0;
  double l_acc = 0.0;
  double l_task = 0.0;
};

struct TrainResult
{
  ModelConfig model_cfg;
  ModelParams params;
  std::vector<EpochLog> log;
  bool aborted = false;  // non-finite loss; params hold the last good state
};

struct NonFiniteLoss : std::runtime_error
{
  NonFiniteLoss() : std::runtime_error("training loss became non-finite") {}
};

/// Deterministic 80/20 split by scenario id. Throws on duplicate ids.
std::pair<std::vector<Scene>, std::vector<Scene>> split_dataset(
  const std::vector<Scene> & scenes, std::uint64_t split_seed);

/// Builds the full per-scene training loss (accuracy plus weighted task term)
/// on `tape`. The scene must already be normalized. Optionally reports the
/// two component values.
Tape::NodeId build_scene_loss(
  Tape & tape, const ParamNodes & p, const Scene & scene, const TrainConfig & cfg, bool train,
  Rng & rng, double * l_acc_out = nullptr, double * l_task_out = nullptr);

/// Trains on the 80% split of `dataset`. Fully determined by (cfg, dataset).
TrainResult train(const TrainConfig & cfg, const std::vector<Scene> & dataset);

/// Accuracy-only training loop with the task machinery compiled out of the
/// path entirely; used to pin down the alpha=0 equivalence.
TrainResult train_accuracy_only(const TrainConfig & cfg, const std::vector<Scene> & dataset);

/// Deterministic eval-mode metrics. Planning tasks report one-vs-one AUC over
/// the three plan classes, warning reports binary AUC.
MetricsReport evaluate(
  const ModelConfig & model_cfg, const ModelParams & params, const std::vector<Scene> & scenes,
  const TaskSpec & spec);

/// Trains on the train split and evaluates on the held-out split.
MetricsReport train_and_evaluate(
  const TrainConfig & cfg, const std::vector<Scene> & dataset, TrainResult * out_result = nullptr);

struct SweepRow
{
  std::string label;
  double alpha = 0.0;
  std::size_t k = 0;
  MetricsReport report;
};

std::string sweep_table_csv(const std::vector<SweepRow> & rows);

std::vector<SweepRow> experiment_alpha_sweep(
  const TrainConfig & base, const std::vector<double> & alphas,
  const std::vector<Scene> & dataset);

/// TIP (base alpha) and TAP (alpha=0) per K.
std::vector<SweepRow> experiment_k_sweep(
  const TrainConfig & base, const std::vector<std::size_t> & ks,
  const std::vector<Scene> & dataset);

std::vector<SweepRow> experiment_noise_robustness(
  const TrainConfig & base, const std::vector<double> & sigmas,
  const std::vector<Scene> & dataset);

std::string training_log_text(const TrainResult & result);

}  // namespace tip

#endif  // TIP_HARNESS_HPP_
