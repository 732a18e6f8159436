#ifndef TIP_TASKS_HPP_
#define TIP_TASKS_HPP_

#include <stdexcept>
#include <utility>
#include <vector>

#include "tip/autodiff.hpp"
#include "tip/model.hpp"
#include "tip/trajectory.hpp"

namespace tip
{

enum class TaskKind { PlanningSelfish, PlanningAltruistic, Warning };

struct TaskSpec
{
  TaskKind kind = TaskKind::Warning;
  double d_safe = 3.64;
  double d_warn = 3.64;
  double beta = 5.0;
};

enum class PlanLabel { Conservative, Normal, Aggressive };

/// One possible reactive future of an object agent, with its rule probability.
struct SimulatedOutcome
{
  double probability = 1.0;
  Trajectory trajectory;
};

struct PlanCandidate
{
  Trajectory plan;
  PlanLabel label = PlanLabel::Normal;
  /// Reactive object futures, indexed [object][outcome]. Probabilities per
  /// object sum to 1.
  std::vector<std::vector<SimulatedOutcome>> object_futures;
};

struct PlanCandidateSet
{
  std::vector<PlanCandidate> candidates;

  std::size_t size() const { return candidates.size(); }
};

/// A decision is the argmax of its utility vector (ties to lowest index).
struct Decision
{
  std::size_t index = 0;
  std::vector<double> utilities;
};

struct MissingSimulatedFutures : std::runtime_error
{
  MissingSimulatedFutures()
  : std::runtime_error("planning decision requires simulated reactive futures")
  {
  }
};

std::size_t argmax_lowest(const std::vector<double> & values);

// -- plain utilities (ground truth / evaluation) ----------------------------

double u_efficiency(const Trajectory & plan);

/// Expected closest distance between the plan and the predicted object
/// trajectory, capped at d_safe (cap applied outside the expectation).
double u_safety(
  const Trajectory & plan, const PredictionSampleSet & preds, std::size_t object_index,
  double d_safe);

double u_planning(
  const Trajectory & plan, const PredictionSampleSet & preds, std::size_t object_index,
  const TaskSpec & spec);

double u_planning_altruistic(
  const Trajectory & plan, const Trajectory & simulated_object_future,
  const PredictionSampleSet & preds, std::size_t object_index, const TaskSpec & spec);

/// 1 iff any object gets closer than d_warn to the ego at some step.
int collision_score_hard(
  const std::vector<std::vector<Point2d>> & joint_sample, std::size_t ego_index,
  const std::vector<std::size_t> & object_indices, double d_warn);

/// sigmoid(d_warn - min distance), max over objects.
double collision_score_soft(
  const std::vector<std::vector<Point2d>> & joint_sample, std::size_t ego_index,
  const std::vector<std::size_t> & object_indices, double d_warn);

/// (u_warn, u_not_warn) = (sum_k w_k r_k, 1 - that).
std::pair<double, double> warning_utilities(
  const PredictionSampleSet & preds, std::size_t ego_index,
  const std::vector<std::size_t> & object_indices, const TaskSpec & spec, bool soft);

/// Optimal decision from ground truth. For planning, candidate utilities are
/// probability-weighted averages over the stored reactive outcomes; for
/// warning, index 0 means warn and the utilities are the hard 0/1 pair.
Decision ground_truth_decision(
  const Scene & scene, const TaskSpec & spec, const PlanCandidateSet * candidates = nullptr);

// -- graph utilities (training) ---------------------------------------------

Tape::NodeId u_safety_node(
  Tape & tape, const Trajectory & plan, const ForwardNodes & preds, std::size_t object_index,
  double d_safe, const ModelConfig & cfg);

Tape::NodeId u_planning_node(
  Tape & tape, const Trajectory & plan, double efficiency, const ForwardNodes & preds,
  std::size_t object_index, const TaskSpec & spec, const ModelConfig & cfg);

/// (u_warn, u_not_warn) as tape nodes; soft scores keep the loss
/// differentiable through the sigmoid.
std::pair<Tape::NodeId, Tape::NodeId> warning_utilities_node(
  Tape & tape, const ForwardNodes & preds, std::size_t ego_index,
  const std::vector<std::size_t> & object_indices, const TaskSpec & spec, const ModelConfig & cfg);

}  // namespace tip

#endif  // TIP_TASKS_HPP_
