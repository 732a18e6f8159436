#include "tip/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tip
{

std::size_t argmax_lowest(const std::vector<double> & values)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

double u_efficiency(const Trajectory & plan) { return path_length(plan); }

namespace
{

double min_distance_plan_to_points(
  const Trajectory & plan, const std::vector<Point2d> & object_points)
{
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = std::min(plan.size(), object_points.size());
  for (std::size_t t = 0; t < n; ++t) {
    if (!plan.is_valid(t)) continue;
    best = std::min(best, distance(plan.points[t], object_points[t]));
  }
  return best;
}

double min_distance_points(const std::vector<Point2d> & a, const std::vector<Point2d> & b)
{
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t t = 0; t < n; ++t) {
    best = std::min(best, distance(a[t], b[t]));
  }
  return best;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double u_safety(
  const Trajectory & plan, const PredictionSampleSet & preds, std::size_t object_index,
  double d_safe)
{
  double expected = 0.0;
  for (std::size_t k = 0; k < preds.k(); ++k) {
    expected +=
      preds.weights[k] * min_distance_plan_to_points(plan, preds.samples[k][object_index]);
  }
  return std::min(d_safe, expected);
}

double u_planning(
  const Trajectory & plan, const PredictionSampleSet & preds, std::size_t object_index,
  const TaskSpec & spec)
{
  return u_efficiency(plan) + spec.beta * u_safety(plan, preds, object_index, spec.d_safe);
}

double u_planning_altruistic(
  const Trajectory & plan, const Trajectory & simulated_object_future,
  const PredictionSampleSet & preds, std::size_t object_index, const TaskSpec & spec)
{
  return path_length(simulated_object_future) +
         spec.beta * u_safety(plan, preds, object_index, spec.d_safe);
}

int collision_score_hard(
  const std::vector<std::vector<Point2d>> & joint_sample, std::size_t ego_index,
  const std::vector<std::size_t> & object_indices, double d_warn)
{
  for (const auto obj : object_indices) {
    if (min_distance_points(joint_sample[ego_index], joint_sample[obj]) < d_warn) {
      return 1;
    }
  }
  return 0;
}

double collision_score_soft(
  const std::vector<std::vector<Point2d>> & joint_sample, std::size_t ego_index,
  const std::vector<std::size_t> & object_indices, double d_warn)
{
  double best = 0.0;
  for (const auto obj : object_indices) {
    best = std::max(
      best, sigmoid(d_warn - min_distance_points(joint_sample[ego_index], joint_sample[obj])));
  }
  return best;
}

std::pair<double, double> warning_utilities(
  const PredictionSampleSet & preds, std::size_t ego_index,
  const std::vector<std::size_t> & object_indices, const TaskSpec & spec, bool soft)
{
  double r = 0.0;
  for (std::size_t k = 0; k < preds.k(); ++k) {
    const double score =
      soft ? collision_score_soft(preds.samples[k], ego_index, object_indices, spec.d_warn)
           : static_cast<double>(
               collision_score_hard(preds.samples[k], ego_index, object_indices, spec.d_warn));
    r += preds.weights[k] * score;
  }
  return {r, 1.0 - r};
}

namespace
{

double min_valid_distance(const Trajectory & a, const Trajectory & b)
{
  try {
    return min_pairwise_distance(a, b).first;
  } catch (const NoOverlap &) {
    return std::numeric_limits<double>::infinity();
  }
}

double gt_candidate_utility(
  const Scene & scene, const PlanCandidate & cand, const TaskSpec & spec)
{
  if (cand.object_futures.empty() || cand.object_futures.front().empty()) {
    throw MissingSimulatedFutures();
  }
  // planning reasons about the primary object agent
  const auto & outcomes = cand.object_futures.front();
  (void)scene;
  double utility = 0.0;
  for (const auto & outcome : outcomes) {
    const double closest = min_valid_distance(cand.plan, outcome.trajectory);
    const double safety = std::min(spec.d_safe, closest);
    const double efficiency = spec.kind == TaskKind::PlanningAltruistic
                                ? path_length(outcome.trajectory)
                                : path_length(cand.plan);
    utility += outcome.probability * (efficiency + spec.beta * safety);
  }
  return utility;
}

}  // namespace

Decision ground_truth_decision(
  const Scene & scene, const TaskSpec & spec, const PlanCandidateSet * candidates)
{
  Decision decision;
  if (spec.kind == TaskKind::Warning) {
    int r = 0;
    for (const auto obj : scene.object_indices) {
      if (min_valid_distance(scene.future[scene.ego_index], scene.future[obj]) < spec.d_warn) {
        r = 1;
        break;
      }
    }
    decision.utilities = {static_cast<double>(r), static_cast<double>(1 - r)};
    decision.index = r == 1 ? 0 : 1;  // index 0 = warn
    return decision;
  }
  if (candidates == nullptr || candidates->candidates.empty()) {
    throw MissingSimulatedFutures();
  }
  for (const auto & cand : candidates->candidates) {
    decision.utilities.push_back(gt_candidate_utility(scene, cand, spec));
  }
  decision.index = argmax_lowest(decision.utilities);
  return decision;
}

// -- graph utilities --------------------------------------------------------

namespace
{

Tape::NodeId min_plan_sample_distance_node(
  Tape & tape, const Trajectory & plan, Tape::NodeId sample, std::size_t object_index,
  const ModelConfig & cfg)
{
  std::vector<Tape::NodeId> dists;
  for (std::size_t t = 0; t < cfg.t_future && t < plan.size(); ++t) {
    if (!plan.is_valid(t)) continue;
    const std::size_t base = (object_index * cfg.t_future + t) * 2;
    Tape::NodeId pred = tape.slice(sample, base, 2);
    Tape::NodeId target = tape.constant(Tensor::vector({plan.points[t].x, plan.points[t].y}));
    dists.push_back(tape.euclidean_norm(tape.sub(pred, target)));
  }
  return tape.min_all(tape.concat(dists));
}

Tape::NodeId min_joint_distance_node(
  Tape & tape, Tape::NodeId sample, std::size_t agent_a, std::size_t agent_b,
  const ModelConfig & cfg)
{
  std::vector<Tape::NodeId> dists;
  for (std::size_t t = 0; t < cfg.t_future; ++t) {
    Tape::NodeId pa = tape.slice(sample, (agent_a * cfg.t_future + t) * 2, 2);
    Tape::NodeId pb = tape.slice(sample, (agent_b * cfg.t_future + t) * 2, 2);
    dists.push_back(tape.euclidean_norm(tape.sub(pa, pb)));
  }
  return tape.min_all(tape.concat(dists));
}

}  // namespace

Tape::NodeId u_safety_node(
  Tape & tape, const Trajectory & plan, const ForwardNodes & preds, std::size_t object_index,
  double d_safe, const ModelConfig & cfg)
{
  std::vector<Tape::NodeId> per_sample;
  per_sample.reserve(preds.samples.size());
  for (const auto sid : preds.samples) {
    per_sample.push_back(min_plan_sample_distance_node(tape, plan, sid, object_index, cfg));
  }
  Tape::NodeId expected = tape.sum(tape.mul(preds.weights, tape.concat(per_sample)));
  return tape.min_all(tape.concat({tape.constant_scalar(d_safe), expected}));
}

Tape::NodeId u_planning_node(
  Tape & tape, const Trajectory & plan, double efficiency, const ForwardNodes & preds,
  std::size_t object_index, const TaskSpec & spec, const ModelConfig & cfg)
{
  Tape::NodeId safety = u_safety_node(tape, plan, preds, object_index, spec.d_safe, cfg);
  return tape.add_const(tape.scale(safety, spec.beta), efficiency);
}

std::pair<Tape::NodeId, Tape::NodeId> warning_utilities_node(
  Tape & tape, const ForwardNodes & preds, std::size_t ego_index,
  const std::vector<std::size_t> & object_indices, const TaskSpec & spec, const ModelConfig & cfg)
{
  std::vector<Tape::NodeId> per_sample;
  for (const auto sid : preds.samples) {
    std::vector<Tape::NodeId> per_object;
    for (const auto obj : object_indices) {
      Tape::NodeId min_d = min_joint_distance_node(tape, sid, ego_index, obj, cfg);
      per_object.push_back(tape.sigmoid(tape.add_const(tape.neg(min_d), spec.d_warn)));
    }
    per_sample.push_back(tape.max_all(tape.concat(per_object)));
  }
  Tape::NodeId u_warn = tape.sum(tape.mul(preds.weights, tape.concat(per_sample)));
  Tape::NodeId u_not = tape.add_const(tape.neg(u_warn), 1.0);
  return {u_warn, u_not};
}

}  // namespace tip
