#include "tip/losses.hpp"

#include <algorithm>
#include <cmath>

namespace tip
{

Tape::NodeId sample_distance(
  Tape & tape, Tape::NodeId sample, const std::vector<Trajectory> & gt, const ModelConfig & cfg)
{
  std::vector<Tape::NodeId> dists;
  for (std::size_t i = 0; i < gt.size() && i < cfg.n_agents; ++i) {
    for (std::size_t t = 0; t < gt[i].size() && t < cfg.t_future; ++t) {
      if (!gt[i].is_valid(t)) continue;
      const std::size_t base = (i * cfg.t_future + t) * 2;
      Tape::NodeId pred = tape.slice(sample, base, 2);
      Tape::NodeId target = tape.constant(Tensor::vector({gt[i].points[t].x, gt[i].points[t].y}));
      dists.push_back(tape.euclidean_norm(tape.sub(pred, target)));
    }
  }
  if (dists.empty()) throw EmptyGroundTruth();
  return tape.mean(tape.concat(dists));
}

Tape::NodeId accuracy_loss(
  Tape & tape, const ForwardNodes & preds, const std::vector<Trajectory> & gt,
  const ModelConfig & cfg)
{
  std::vector<Tape::NodeId> dists;
  dists.reserve(preds.samples.size());
  for (const auto sid : preds.samples) {
    dists.push_back(sample_distance(tape, sid, gt, cfg));
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < dists.size(); ++k) {
    if (tape.scalar_value(dists[k]) < tape.scalar_value(dists[best])) best = k;
  }
  Tape::NodeId w_best = tape.slice(preds.weights, best, 1);
  return tape.add(tape.neg(tape.log_op(w_best)), dists[best]);
}

Tape::NodeId task_reward(
  Tape & tape, const std::vector<Tape::NodeId> & utilities, std::size_t optimal_index)
{
  Tape::NodeId probs = tape.softmax(tape.concat(utilities));
  return tape.slice(probs, optimal_index, 1);
}

Tape::NodeId total_loss(Tape & tape, Tape::NodeId acc, Tape::NodeId r_task, const LossConfig & cfg)
{
  return tape.add(acc, tape.scale(r_task, -cfg.alpha));
}

std::vector<double> softmax_values(const std::vector<double> & logits)
{
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    denom += out[i];
  }
  for (auto & v : out) v /= denom;
  return out;
}

double task_reward_value(const std::vector<double> & utilities, std::size_t optimal_index)
{
  return softmax_values(utilities)[optimal_index];
}

}  // namespace tip
