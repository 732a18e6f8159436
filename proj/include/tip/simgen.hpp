#ifndef TIP_SIMGEN_HPP_
#define TIP_SIMGEN_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tip/rng.hpp"
#include "tip/tasks.hpp"
#include "tip/trajectory.hpp"

namespace tip
{

enum class ConflictGeometry { Crossing, Merging, Oncoming };

std::string to_string(ConflictGeometry g);
ConflictGeometry geometry_from_string(const std::string & s);

struct GeneratorConfig
{
  std::size_t n_scenes = 2000;
  double speed_min = 3.0;
  double speed_max = 15.0;
  ConflictGeometry geometry = ConflictGeometry::Crossing;
  double arrival_gap_min = -2.0;
  double arrival_gap_max = 2.0;
  double noise_sigma = 0.05;  // applied to past observations
  std::uint64_t seed = 0;
  std::size_t t_past = 11;
  std::size_t t_future = 30;
  double dt = 0.1;
  /// Chance that the object's future is re-timed along its path, making the
  /// future multimodal given the past.
  double mode_switch_prob = 0.5;

  std::string digest_string() const;
};

struct DegenerateGeometry : std::runtime_error
{
  DegenerateGeometry() : std::runtime_error("paths fail to intersect within the horizon") {}
};

struct MotionLimits
{
  double v_max = 30.0;  // m/s
  double a_max = 3.0;   // m/s^2
};

/// Re-times a trajectory along its own path: arc-length progress is scaled by
/// `factor` per step, clipped to the speed and acceleration limits. Progress
/// beyond the original path extends along the final segment direction.
Trajectory rescale_progress(
  const Trajectory & traj, double factor, const MotionLimits & limits = {});

Scene generate_scene(Rng & rng, const GeneratorConfig & cfg, std::size_t index = 0);
std::vector<Scene> generate_scenes(const GeneratorConfig & cfg);

/// Conservative (0.8x), Normal (1.0x), Aggressive (1.2x) re-timings of the
/// observed ego future. Reactive object futures are attached separately.
PlanCandidateSet generate_plan_candidates(
  const Trajectory & ego_future, const MotionLimits & limits = {});

/// (progress factor, probability) pairs for the object's reaction to a plan.
std::vector<std::pair<double, double>> reaction_outcomes(PlanLabel label, Relation relation);

/// Samples one reactive rollout according to the rules; returns the future
/// unchanged when no rule matches.
Trajectory simulate_reaction_heuristic(
  PlanLabel label, const Trajectory & object_future, Relation relation, Rng & rng,
  const MotionLimits & limits = {});

/// Fills candidate object futures for every plan. Expectation mode stores all
/// rule outcomes with their probabilities; single-sample mode draws one.
void attach_simulated_reactions(
  PlanCandidateSet & candidates, const Trajectory & object_future, Relation relation,
  const MotionLimits & limits = {}, bool single_sample = false, Rng * rng = nullptr);

struct IdmParams
{
  double v0 = -1.0;  // desired speed; <0 means the object's original speed
  double headway = 1.5;
  double a = 1.4;
  double b = 2.0;
  double s0 = 2.0;
  double delta = 4.0;
  double conflict_radius = 3.64;
};

/// Longitudinal IDM rollout of the object along its own path. While the ego
/// plan occupies the conflict region and the object has not yet reached it,
/// the region boundary acts as a standing obstacle.
Trajectory simulate_reaction_idm(
  const Trajectory & plan, const Trajectory & object_future, Point2d conflict_point,
  const IdmParams & params = {});

// -- dataset serialization --------------------------------------------------

struct ParseError : std::runtime_error
{
  ParseError(std::size_t line, const std::string & what)
  : std::runtime_error("parse error at line " + std::to_string(line) + ": " + what)
  {
  }
};

struct VersionMismatch : std::runtime_error
{
  explicit VersionMismatch(const std::string & got)
  : std::runtime_error("unsupported dataset version: " + got)
  {
  }
};

void write_dataset(
  const std::vector<Scene> & scenes, const std::string & path, const std::string & digest = "");

/// Streaming line-by-line reader; memory use is one scene.
class DatasetReader
{
public:
  explicit DatasetReader(const std::string & path);
  std::optional<Scene> next();
  const std::string & digest() const { return digest_; }

private:
  std::ifstream in_;
  std::string digest_;
  std::size_t line_no_ = 1;
};

std::vector<Scene> read_dataset(const std::string & path);

}  // namespace tip

#endif  // TIP_SIMGEN_HPP_
