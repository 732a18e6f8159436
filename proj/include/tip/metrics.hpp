#ifndef TIP_METRICS_HPP_
#define TIP_METRICS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "tip/model.hpp"
#include "tip/tasks.hpp"
#include "tip/trajectory.hpp"

namespace tip
{

struct SingleClass : std::runtime_error
{
  SingleClass() : std::runtime_error("AUC needs at least two classes present") {}
};

struct DisplacementMetrics
{
  double min_ade = 0.0;
  double min_fde = 0.0;
  double w_ade = 0.0;
  double w_fde = 0.0;
};

struct MetricsReport
{
  double min_ade = 0.0;
  double min_fde = 0.0;
  double w_ade = 0.0;
  double w_fde = 0.0;
  double auc_roc = 0.0;
  std::size_t n_examples = 0;

  std::string to_kv() const;
  std::string to_csv() const;
};

/// Joint-averaged displacement errors. ADE averages over valid (agent, step)
/// pairs; FDE averages the last valid step per agent.
DisplacementMetrics displacement_metrics(
  const PredictionSampleSet & preds, const std::vector<Trajectory> & gt);

/// Threshold-sweep ROC AUC with exact tie handling; equals the pair-counting
/// statistic P(s+ > s-) + 0.5 P(tie) bit for bit.
double roc_auc_binary(const std::vector<double> & scores, const std::vector<int> & labels);

/// Hand-Till one-vs-one multiclass AUC: unweighted mean over unordered class
/// pairs of 0.5 (A(i|j) + A(j|i)).
double roc_auc_ovo(
  const std::vector<std::vector<double>> & score_vectors, const std::vector<int> & labels);

/// Warning-task evaluation point: hard expected collision score vs the
/// ground-truth near-collision label.
std::pair<double, bool> warning_task_scores(
  const PredictionSampleSet & preds, const Scene & scene, const TaskSpec & spec);

}  // namespace tip

#endif  // TIP_METRICS_HPP_
