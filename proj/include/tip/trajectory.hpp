#ifndef TIP_TRAJECTORY_HPP_
#define TIP_TRAJECTORY_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tip
{

struct Point2d
{
  double x = 0.0;
  double y = 0.0;
};

inline Point2d operator+(Point2d a, Point2d b) { return {a.x + b.x, a.y + b.y}; }
inline Point2d operator-(Point2d a, Point2d b) { return {a.x - b.x, a.y - b.y}; }
inline Point2d operator*(Point2d a, double s) { return {a.x * s, a.y * s}; }

double distance(Point2d a, Point2d b);
double norm(Point2d a);

/// A 2D polyline sampled at a fixed time step, with a per-step validity mask.
/// Invalid points are never read by geometric operations.
struct Trajectory
{
  std::vector<Point2d> points;
  std::vector<bool> valid;
  double dt = 0.1;

  Trajectory() = default;
  Trajectory(std::vector<Point2d> pts, double dt_ = 0.1)
  : points(std::move(pts)), valid(points.size(), true), dt(dt_)
  {
  }
  Trajectory(std::vector<Point2d> pts, std::vector<bool> mask, double dt_ = 0.1)
  : points(std::move(pts)), valid(std::move(mask)), dt(dt_)
  {
  }

  std::size_t size() const { return points.size(); }
  bool is_valid(std::size_t t) const { return t < valid.size() && valid[t]; }
};

enum class Relation { ObjectYieldsEgo, EgoYieldsObject, None };

std::string to_string(Relation r);
Relation relation_from_string(const std::string & s);

/// One interactive scenario: per-agent past and future tracks plus an
/// interaction label between the ego agent and the object agents.
struct Scene
{
  std::vector<Trajectory> past;
  std::vector<Trajectory> future;
  std::size_t ego_index = 0;
  std::vector<std::size_t> object_indices;
  Relation relation = Relation::None;
  std::string id;

  std::size_t num_agents() const { return past.size(); }
  std::size_t t_past() const { return past.empty() ? 0 : past.front().size(); }
  std::size_t t_future() const { return future.empty() ? 0 : future.front().size(); }
  double dt() const { return past.empty() ? 0.1 : past.front().dt; }
};

/// Translation frame used to center a scene on the mean of the last observed
/// valid positions of all agents.
struct NormalizationFrame
{
  Point2d origin;

  Point2d to_world(Point2d p) const { return p + origin; }
  Point2d to_frame(Point2d p) const { return p - origin; }
};

struct NoValidAgents : std::runtime_error
{
  NoValidAgents() : std::runtime_error("no agent has a valid last-observed position") {}
};

struct NoOverlap : std::runtime_error
{
  NoOverlap() : std::runtime_error("trajectories share no jointly valid step") {}
};

std::pair<Scene, NormalizationFrame> normalize_scene(const Scene & scene);
Scene denormalize_scene(const Scene & scene, const NormalizationFrame & frame);

/// Minimum Euclidean distance over jointly valid steps and the earliest step
/// attaining it. Throws NoOverlap when the masks never overlap.
std::pair<double, std::size_t> min_pairwise_distance(const Trajectory & a, const Trajectory & b);

/// Sum of segment lengths between consecutive valid points.
double path_length(const Trajectory & traj);

}  // namespace tip

#endif  // TIP_TRAJECTORY_HPP_
