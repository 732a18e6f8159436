#include "tip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tip/losses.hpp"

namespace tip
{

std::string MetricsReport::to_kv() const
{
  std::ostringstream out;
  out << "min_ade " << min_ade << "\n"
      << "min_fde " << min_fde << "\n"
      << "w_ade " << w_ade << "\n"
      << "w_fde " << w_fde << "\n"
      << "auc_roc " << auc_roc << "\n"
      << "n_examples " << n_examples << "\n";
  return out.str();
}

std::string MetricsReport::to_csv() const
{
  std::ostringstream out;
  out << "metric,value,n\n";
  out << "min_ade," << min_ade << "," << n_examples << "\n";
  out << "min_fde," << min_fde << "," << n_examples << "\n";
  out << "w_ade," << w_ade << "," << n_examples << "\n";
  out << "w_fde," << w_fde << "," << n_examples << "\n";
  out << "auc_roc," << auc_roc << "," << n_examples << "\n";
  return out.str();
}

DisplacementMetrics displacement_metrics(
  const PredictionSampleSet & preds, const std::vector<Trajectory> & gt)
{
  DisplacementMetrics out;
  double min_ade = std::numeric_limits<double>::infinity();
  double min_fde = std::numeric_limits<double>::infinity();
  double w_ade = 0.0;
  double w_fde = 0.0;
  bool any_valid = false;
  for (std::size_t k = 0; k < preds.k(); ++k) {
    double ade_sum = 0.0;
    std::size_t ade_n = 0;
    double fde_sum = 0.0;
    std::size_t fde_n = 0;
    for (std::size_t i = 0; i < gt.size() && i < preds.samples[k].size(); ++i) {
      std::ptrdiff_t last_valid = -1;
      for (std::size_t t = 0; t < gt[i].size() && t < preds.samples[k][i].size(); ++t) {
        if (!gt[i].is_valid(t)) continue;
        ade_sum += distance(preds.samples[k][i][t], gt[i].points[t]);
        ++ade_n;
        last_valid = static_cast<std::ptrdiff_t>(t);
      }
      if (last_valid >= 0) {
        const auto t = static_cast<std::size_t>(last_valid);
        fde_sum += distance(preds.samples[k][i][t], gt[i].points[t]);
        ++fde_n;
      }
    }
    if (ade_n == 0) continue;
    any_valid = true;
    const double ade = ade_sum / static_cast<double>(ade_n);
    const double fde = fde_sum / static_cast<double>(fde_n);
    min_ade = std::min(min_ade, ade);
    min_fde = std::min(min_fde, fde);
    w_ade += preds.weights[k] * ade;
    w_fde += preds.weights[k] * fde;
  }
  if (!any_valid) throw EmptyGroundTruth();
  out.min_ade = min_ade;
  out.min_fde = min_fde;
  out.w_ade = w_ade;
  out.w_fde = w_fde;
  return out;
}

double roc_auc_binary(const std::vector<double> & scores, const std::vector<int> & labels)
{
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(
    order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  unsigned long long pos = 0, neg = 0;
  for (int l : labels) (l ? pos : neg)++;
  if (pos == 0 || neg == 0) throw SingleClass();

  // trapezoidal sweep over distinct thresholds, accumulated in integer
  // half-cells so it matches the pair-counting statistic exactly
  unsigned long long area2 = 0;
  unsigned long long tp = 0, fp = 0, tp_prev = 0, fp_prev = 0;
  std::size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    while (i < n && scores[order[i]] == s) {
      (labels[order[i]] ? tp : fp)++;
      ++i;
    }
    area2 += (fp - fp_prev) * (tp + tp_prev);
    tp_prev = tp;
    fp_prev = fp;
  }
  return static_cast<double>(area2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double roc_auc_ovo(
  const std::vector<std::vector<double>> & score_vectors, const std::vector<int> & labels)
{
  std::vector<int> classes = labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw SingleClass();

  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      const int ci = classes[a];
      const int cj = classes[b];
      std::vector<double> s_i, s_j;
      std::vector<int> y_i, y_j;
      for (std::size_t e = 0; e < labels.size(); ++e) {
        if (labels[e] != ci && labels[e] != cj) continue;
        s_i.push_back(score_vectors[e][static_cast<std::size_t>(ci)]);
        y_i.push_back(labels[e] == ci ? 1 : 0);
        s_j.push_back(score_vectors[e][static_cast<std::size_t>(cj)]);
        y_j.push_back(labels[e] == cj ? 1 : 0);
      }
      total += 0.5 * (roc_auc_binary(s_i, y_i) + roc_auc_binary(s_j, y_j));
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

std::pair<double, bool> warning_task_scores(
  const PredictionSampleSet & preds, const Scene & scene, const TaskSpec & spec)
{
  const auto [u_warn, u_not] =
    warning_utilities(preds, scene.ego_index, scene.object_indices, spec, /*soft=*/false);
  (void)u_not;
  const Decision gt = ground_truth_decision(scene, spec);
  return {u_warn, gt.index == 0};
}

}  // namespace tip
