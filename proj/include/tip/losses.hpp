#ifndef TIP_LOSSES_HPP_
#define TIP_LOSSES_HPP_

#include <stdexcept>
#include <vector>

#include "tip/autodiff.hpp"
#include "tip/model.hpp"
#include "tip/trajectory.hpp"

namespace tip
{

struct LossConfig
{
  double alpha = 20.0;  // task loss coefficient
  double beta = 5.0;    // safety coefficient (planning only)
};

struct EmptyGroundTruth : std::runtime_error
{
  EmptyGroundTruth() : std::runtime_error("ground truth has no valid step") {}
};

/// Mean displacement (joint ADE) between one flat sample node and the ground
/// truth, over valid (agent, step) pairs.
Tape::NodeId sample_distance(
  Tape & tape, Tape::NodeId sample, const std::vector<Trajectory> & gt, const ModelConfig & cfg);

/// Variety loss: -log w of the closest sample plus its mean displacement.
/// Ties for the closest sample break to the lowest index.
Tape::NodeId accuracy_loss(
  Tape & tape, const ForwardNodes & preds, const std::vector<Trajectory> & gt,
  const ModelConfig & cfg);

/// Softmax over decision utilities evaluated at the optimal decision.
Tape::NodeId task_reward(
  Tape & tape, const std::vector<Tape::NodeId> & utilities, std::size_t optimal_index);

/// L = acc + alpha * (-r_task).
Tape::NodeId total_loss(Tape & tape, Tape::NodeId acc, Tape::NodeId r_task, const LossConfig & cfg);

/// Plain-value softmax with max-subtraction, shared by evaluation paths.
std::vector<double> softmax_values(const std::vector<double> & logits);

double task_reward_value(const std::vector<double> & utilities, std::size_t optimal_index);

}  // namespace tip

#endif  // TIP_LOSSES_HPP_
