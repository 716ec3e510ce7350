#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "frostman/core.hpp"

namespace frostman {

struct Ball {
  Point center;
  double radius = 0.0;

  Ball() = default;
  Ball(Point c, double r) : center(std::move(c)), radius(r) {
    if (radius <= 0.0) throw parameter_error("Ball: radius must be positive");
  }
};

// Openness is contextual per operation: open membership is strict,
// closed membership allows the boundary up to the global tolerance.
inline bool contains_open(const Ball& b, const Point& p) {
  return dist(b.center, p) < b.radius;
}

inline bool contains_closed(const Ball& b, const Point& p) {
  return dist(b.center, p) <= b.radius * (1.0 + kBoundaryRelTol);
}

// The inner third B_{r/3}(x); this is the supercovering membership test.
// Net maximality yields distances <= delta exactly, so the boundary
// tolerance applies here.
inline bool contains_inner_third(const Ball& b, const Point& p) {
  return dist(b.center, p) <= b.radius / 3.0 * (1.0 + kBoundaryRelTol);
}

inline bool balls_disjoint(const Ball& a, const Ball& b) {
  return dist(a.center, b.center) >=
         (a.radius + b.radius) * (1.0 - kBoundaryRelTol);
}

struct BallFamily {
  int ambient_dim = 1;
  std::vector<Ball> balls;
  // Subfamily index per ball (1-based); empty when the family is unlabeled.
  std::vector<int> labels;

  bool labeled() const { return !labels.empty(); }

  void check() const {
    for (const Ball& b : balls)
      if (static_cast<int>(b.center.size()) != ambient_dim)
        throw parameter_error("BallFamily: center dimension mismatch");
    if (labeled() && labels.size() != balls.size())
      throw parameter_error("BallFamily: every ball needs exactly one label");
  }

  std::vector<int> distinct_labels() const {
    std::vector<int> ids(labels);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }
};

struct PointCloud {
  int ambient_dim = 1;
  std::vector<Point> points;
  // Guaranteed covering radius at which the cloud represents its
  // underlying compact set.
  double resolution = 0.0;

  void check() const {
    for (const Point& p : points)
      if (static_cast<int>(p.size()) != ambient_dim)
        throw parameter_error("PointCloud: point dimension mismatch");
  }

  double diameter() const {
    double d2 = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        d2 = std::max(d2, dist2(points[i], points[j]));
    return std::sqrt(d2);
  }
};

// B_R(x) \ B_{R-r}(x): center x, radius r, size R.
struct Ring {
  Point center;
  double radius = 0.0;  // r
  double size = 0.0;    // R

  Ring(Point c, double r, double R) : center(std::move(c)), radius(r), size(R) {
    if (r <= 0.0 || R <= 0.0 || r > R * (1.0 + kBoundaryRelTol))
      throw parameter_error("Ring: need 0 < r <= R");
  }
};

namespace geom {

// Greedy maximal delta-separated subset, insertion in input order.
// Output is delta-separated and every input point lies within delta
// of some selected point.
inline PointCloud max_separated_net(const PointCloud& cloud, double delta) {
  if (delta <= 0.0) throw parameter_error("max_separated_net: delta <= 0");
  if (cloud.points.empty())
    throw precondition_error("max_separated_net: empty cloud");
  PointCloud net;
  net.ambient_dim = cloud.ambient_dim;
  net.resolution = cloud.resolution;
  const double d2 = delta * delta;
  for (const Point& p : cloud.points) {
    bool far = true;
    for (const Point& q : net.points)
      if (dist2(p, q) <= d2) {
        far = false;
        break;
      }
    if (far) net.points.push_back(p);
  }
  return net;
}

// Number of net points in the closed ball. When the net is declared
// (radius/3)-separated the count is asserted against the 100^d bound.
inline int packing_count(const PointCloud& net, const Ball& ball,
                         std::optional<double> declared_delta = std::nullopt) {
  int count = 0;
  for (const Point& p : net.points)
    if (contains_closed(ball, p)) ++count;
  if (declared_delta &&
      *declared_delta >= ball.radius / 3.0 * (1.0 - kBoundaryRelTol)) {
    const double cap = std::pow(100.0, net.ambient_dim);
    if (count > cap)
      throw error("packing_count: 100^d bound violated for delta = r/3");
  }
  return count;
}

// Greedy Vitali selection, largest radius first, ties by input order.
// Selected balls are pairwise disjoint and every input ball intersects
// a selected ball of radius at least its own.
inline BallFamily vitali_select(const BallFamily& family) {
  if (family.balls.empty())
    throw precondition_error("vitali_select: empty family");
  std::vector<std::size_t> order(family.balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return family.balls[i].radius > family.balls[j].radius;
  });
  BallFamily out;
  out.ambient_dim = family.ambient_dim;
  for (std::size_t idx : order) {
    const Ball& b = family.balls[idx];
    bool ok = true;
    for (const Ball& s : out.balls)
      if (!balls_disjoint(b, s)) {
        ok = false;
        break;
      }
    if (ok) out.balls.push_back(b);
  }
  return out;
}

// Greedy coloring of the ball-intersection graph, input order.
// Within each label the balls are pairwise disjoint; the label count
// never exceeds 1 + max intersection degree.
inline BallFamily split_into_disjoint(const BallFamily& family) {
  BallFamily out = family;
  out.labels.assign(family.balls.size(), 0);
  int max_label = 0;
  for (std::size_t i = 0; i < family.balls.size(); ++i) {
    int label = 1;
    for (;;) {
      bool ok = true;
      for (std::size_t j = 0; j < i; ++j)
        if (out.labels[j] == label &&
            !balls_disjoint(family.balls[i], family.balls[j])) {
          ok = false;
          break;
        }
      if (ok) break;
      ++label;
    }
    out.labels[i] = label;
    max_label = std::max(max_label, label);
  }
  return out;
}

struct SupercoverWitness {
  bool valid = false;
  std::optional<Point> uncovered;  // set when valid == false
};

// True iff every cloud point lies in the inner third of some family ball.
inline SupercoverWitness is_supercovering(const PointCloud& cloud,
                                          const BallFamily& family) {
  for (const Point& p : cloud.points) {
    bool covered = false;
    for (const Ball& b : family.balls)
      if (contains_inner_third(b, p)) {
        covered = true;
        break;
      }
    if (!covered) return {false, p};
  }
  return {true, std::nullopt};
}

// Greedy analogue of the Morse covering theorem: keep balls whose inner
// thirds are needed for coverage (largest first), then color the result.
// The label count is the measured multiplicity, not the theoretical
// theta(d).
inline BallFamily bounded_multiplicity_cover(const PointCloud& cloud,
                                             const BallFamily& family) {
  // Hypothesis: every cloud point lies in some ball's inner third.
  for (const Point& p : cloud.points) {
    bool hit = false;
    for (const Ball& b : family.balls)
      if (contains_inner_third(b, p)) {
        hit = true;
        break;
      }
    if (!hit) {
      std::ostringstream oss;
      oss << "bounded_multiplicity_cover: point (";
      for (std::size_t i = 0; i < p.size(); ++i)
        oss << (i ? ", " : "") << p[i];
      oss << ") not in any ball's inner third";
      throw precondition_error(oss.str());
    }
  }

  std::vector<std::size_t> order(family.balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return family.balls[i].radius > family.balls[j].radius;
  });

  // The keep rule uses strictly open inner thirds (a point exactly on
  // the boundary does not make a ball redundant); a tolerant repair
  // pass then handles boundary-exact points so the output is always a
  // supercovering.
  std::vector<bool> covered(cloud.points.size(), false);
  BallFamily kept;
  kept.ambient_dim = family.ambient_dim;
  for (std::size_t idx : order) {
    const Ball& b = family.balls[idx];
    bool needed = false;
    for (std::size_t k = 0; k < cloud.points.size(); ++k)
      if (!covered[k] && dist(b.center, cloud.points[k]) < b.radius / 3.0) {
        covered[k] = true;
        needed = true;
      }
    if (needed) kept.balls.push_back(b);
  }
  for (std::size_t k = 0; k < cloud.points.size(); ++k) {
    if (covered[k]) continue;
    bool held = false;
    for (const Ball& b : kept.balls)
      if (contains_inner_third(b, cloud.points[k])) {
        held = true;
        break;
      }
    if (held) continue;
    for (std::size_t idx : order)
      if (contains_inner_third(family.balls[idx], cloud.points[k])) {
        kept.balls.push_back(family.balls[idx]);
        break;
      }
  }
  return split_into_disjoint(kept);
}

struct RingVolume {
  double exact = 0.0;  // pi_d (R^d - (R-r)^d)
  double bound = 0.0;  // omega_{d-1} R^{d-1} r
};

inline RingVolume ring_volume(const Ring& ring, int d) {
  if (ring.radius > ring.size * (1.0 + kBoundaryRelTol))
    throw parameter_error("ring_volume: r > R");
  const double R = ring.size;
  const double r = ring.radius;
  RingVolume v;
  v.exact = unit_ball_volume(d) *
            (std::pow(R, d) - std::pow(std::max(0.0, R - r), d));
  v.bound = unit_sphere_area(d) * std::pow(R, d - 1) * r;
  return v;
}

}  // namespace geom
}  // namespace frostman
