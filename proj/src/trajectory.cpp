#include "tip/trajectory.hpp"

#include <cmath>
#include <limits>

namespace tip
{

double distance(Point2d a, Point2d b) { return std::hypot(a.x - b.x, a.y - b.y); }

double norm(Point2d a) { return std::hypot(a.x, a.y); }

std::string to_string(Relation r)
{
  switch (r) {
    case Relation::ObjectYieldsEgo:
      return "object_yields_ego";
    case Relation::EgoYieldsObject:
      return "ego_yields_object";
    default:
      return "none";
  }
}

Relation relation_from_string(const std::string & s)
{
  if (s == "object_yields_ego") return Relation::ObjectYieldsEgo;
  if (s == "ego_yields_object") return Relation::EgoYieldsObject;
  if (s == "none") return Relation::None;
  throw std::invalid_argument("unknown relation: " + s);
}

namespace
{

Trajectory shift_trajectory(const Trajectory & traj, Point2d delta)
{
  Trajectory out = traj;
  for (std::size_t t = 0; t < out.size(); ++t) {
    if (out.is_valid(t)) {
      out.points[t] = out.points[t] + delta;
    }
  }
  return out;
}

}  // namespace

std::pair<Scene, NormalizationFrame> normalize_scene(const Scene & scene)
{
  Point2d sum;
  std::size_t count = 0;
  for (const auto & traj : scene.past) {
    if (traj.size() == 0) continue;
    const std::size_t last = traj.size() - 1;
    if (traj.is_valid(last)) {
      sum = sum + traj.points[last];
      ++count;
    }
  }
  if (count == 0) {
    throw NoValidAgents();
  }
  NormalizationFrame frame{{sum.x / static_cast<double>(count), sum.y / static_cast<double>(count)}};

  Scene out = scene;
  const Point2d delta{-frame.origin.x, -frame.origin.y};
  for (auto & traj : out.past) traj = shift_trajectory(traj, delta);
  for (auto & traj : out.future) traj = shift_trajectory(traj, delta);
  return {out, frame};
}

Scene denormalize_scene(const Scene & scene, const NormalizationFrame & frame)
{
  Scene out = scene;
  for (auto & traj : out.past) traj = shift_trajectory(traj, frame.origin);
  for (auto & traj : out.future) traj = shift_trajectory(traj, frame.origin);
  return out;
}

std::pair<double, std::size_t> min_pairwise_distance(const Trajectory & a, const Trajectory & b)
{
  if (a.size() != b.size()) {
    throw std::invalid_argument("min_pairwise_distance: length mismatch");
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_t = 0;
  bool found = false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (!a.is_valid(t) || !b.is_valid(t)) continue;
    const double d = distance(a.points[t], b.points[t]);
    if (!found || d < best) {
      best = d;
      best_t = t;
      found = true;
    }
  }
  if (!found) {
    throw NoOverlap();
  }
  return {best, best_t};
}

double path_length(const Trajectory & traj)
{
  double total = 0.0;
  bool have_prev = false;
  Point2d prev;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    if (!traj.is_valid(t)) continue;
    if (have_prev) {
      total += distance(prev, traj.points[t]);
    }
    prev = traj.points[t];
    have_prev = true;
  }
  return total;
}

}  // namespace tip
