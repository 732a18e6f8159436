#ifndef TIP_MODEL_HPP_
#define TIP_MODEL_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tip/autodiff.hpp"
#include "tip/optim.hpp"
#include "tip/rng.hpp"
#include "tip/trajectory.hpp"

namespace tip
{

struct ConfigMismatch : std::runtime_error
{
  explicit ConfigMismatch(const std::string & what) : std::runtime_error("config mismatch: " + what)
  {
  }
};

struct NoTaskEncoder : std::runtime_error
{
  NoTaskEncoder() : std::runtime_error("model has no task information encoder") {}
};

struct ModelConfig
{
  std::size_t n_agents = 2;
  std::size_t t_past = 11;
  std::size_t t_future = 80;
  std::size_t k_samples = 4;
  std::size_t hidden = 32;
  double dropout_rate = 0.1;
  bool has_task_encoder = false;

  std::size_t sample_dim() const { return n_agents * t_future * 2; }
  std::size_t decoder_input_dim() const
  {
    return hidden * n_agents + (has_task_encoder ? hidden : 0);
  }
  std::size_t head_dim() const { return k_samples * sample_dim() + k_samples; }
};

/// All learnable weights, keyed by name. Map order is the canonical
/// initialization and serialization order.
struct ModelParams
{
  ParamMap tensors;
};

/// K weighted joint future samples; samples[k][agent][t] in meters, weights
/// form a probability vector.
struct PredictionSampleSet
{
  std::vector<std::vector<std::vector<Point2d>>> samples;
  std::vector<double> weights;

  std::size_t k() const { return samples.size(); }
};

/// Node handles for one registration of the parameters on a tape.
struct ParamNodes
{
  std::map<std::string, Tape::NodeId> ids;

  Tape::NodeId at(const std::string & name) const
  {
    auto it = ids.find(name);
    if (it == ids.end()) throw ConfigMismatch("missing parameter " + name);
    return it->second;
  }
};

/// Forward-pass output still attached to the tape.
struct ForwardNodes
{
  std::vector<Tape::NodeId> samples;  // each flat [agent][t][xy]
  Tape::NodeId weights = 0;           // softmaxed, length K
};

ModelParams init_params(const ModelConfig & cfg, Rng & rng);

ParamNodes register_params(Tape & tape, const ModelParams & params);

/// Per-agent MLP+LSTM encoding concatenated over agents (width hidden*N).
/// Missing agents and invalid steps contribute zero encodings.
Tape::NodeId encode_states(
  Tape & tape, const Scene & scene, const ParamNodes & p, const ModelConfig & cfg, bool train,
  Rng & rng);

/// Flattened-plan MLP encoding (width hidden).
Tape::NodeId encode_task_info(
  Tape & tape, const Trajectory & plan, const ParamNodes & p, const ModelConfig & cfg, bool train,
  Rng & rng);

ForwardNodes decode(Tape & tape, Tape::NodeId h, const ParamNodes & p, const ModelConfig & cfg);

/// Full forward pass in the normalized frame. `plan` is required when the
/// model has a task encoder and ignored otherwise.
ForwardNodes forward(
  Tape & tape, const Scene & scene, const Trajectory * plan, const ParamNodes & p,
  const ModelConfig & cfg, bool train, Rng & rng);

PredictionSampleSet extract_samples(
  const Tape & tape, const ForwardNodes & fwd, const ModelConfig & cfg, double dt = 0.1);

/// Eval-mode convenience: one forward pass on a private tape.
PredictionSampleSet predict(
  const Scene & scene, const Trajectory * plan, const ModelParams & params,
  const ModelConfig & cfg);

// -- checkpoint io ----------------------------------------------------------

struct CheckpointError : std::runtime_error
{
  explicit CheckpointError(const std::string & what) : std::runtime_error("checkpoint: " + what) {}
};

void save_checkpoint(const std::string & path, const ModelConfig & cfg, const ModelParams & params);
std::pair<ModelConfig, ModelParams> load_checkpoint(const std::string & path);

}  // namespace tip

#endif  // TIP_MODEL_HPP_
