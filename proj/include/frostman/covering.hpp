#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "frostman/core.hpp"
#include "frostman/gauge.hpp"
#include "frostman/geometry.hpp"

namespace frostman {

// Either r^alpha or a general gauge f(r) as the covering currency.
struct RadiusGauge {
  std::optional<double> alpha;
  GaugeFunction f;

  static RadiusGauge power(double a) {
    RadiusGauge g;
    g.alpha = a;
    return g;
  }
  static RadiusGauge from_gauge(GaugeFunction fn) {
    RadiusGauge g;
    g.f = std::move(fn);
    return g;
  }

  double operator()(double r) const {
    if (alpha) return std::pow(r, *alpha);
    return f(r);
  }

  std::string id() const {
    if (alpha) return "r^" + std::to_string(*alpha);
    switch (f.kind) {
      case GaugeFunction::Kind::power:
        return "power";
      case GaugeFunction::Kind::log_power:
        return "log_power";
      case GaugeFunction::Kind::table:
        return "table";
    }
    return "gauge";
  }
};

struct CoveringReport {
  std::string alpha_or_gauge;
  double budget_a = 0.0;
  std::vector<int> label_ids;          // sorted, one per subfamily
  std::vector<double> per_label_sums;  // sum of f(r_i) per subfamily
  double decay_ratio_q = 0.0;          // 0 when not applicable
  int label_count = 0;
  bool valid_supercover = false;
  std::map<std::string, double> constants;
};

// The annulus B_r \ B_{r/3} split into rings whose widths decrease
// geometrically: F^j = B_{r_j} \ B_{r_{j-1}}, width r*l*q^j.
struct RingDecomposition {
  Ball base_ball;
  double q = 0.5;
  double l = 0.0;  // 2(1-q)/3
  std::vector<double> ring_radii;

  RingDecomposition(Ball b, double q_param, int count)
      : base_ball(std::move(b)), q(q_param), l(2.0 * (1.0 - q_param) / 3.0) {
    if (q <= 0.0 || q >= 1.0)
      throw parameter_error("RingDecomposition: q must lie in (0,1)");
    const double r = base_ball.radius;
    double acc = r / 3.0;
    double width = r * l;
    ring_radii.reserve(count);
    for (int j = 0; j < count; ++j) {
      acc += width;
      ring_radii.push_back(acc);
      width *= q;
    }
  }

  double inner_radius(int j) const {
    return j == 0 ? base_ball.radius / 3.0 : ring_radii[j - 1];
  }
  double width(int j) const {
    return base_ball.radius * l * std::pow(q, j);
  }
};

namespace cover {

namespace detail {

// Vitali selection over the active subset, returning selected positions.
inline std::vector<std::size_t> vitali_indices(
    const std::vector<Ball>& balls, const std::vector<std::size_t>& active) {
  std::vector<std::size_t> order(active);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return balls[i].radius > balls[j].radius;
  });
  std::vector<std::size_t> selected;
  for (std::size_t idx : order) {
    bool ok = true;
    for (std::size_t s : selected)
      if (!balls_disjoint(balls[idx], balls[s])) {
        ok = false;
        break;
      }
    if (ok) selected.push_back(idx);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

}  // namespace detail

// Closed-ball covering of the cloud with centers in the cloud, radii
// <= epsilon, locally minimal sum of cost(r) under shrink / drop /
// recenter moves, starting from a greedy cover. Deterministic in seed.
inline BallFamily near_optimal_cover(const PointCloud& cloud, double epsilon,
                                     const RadiusGauge& cost,
                                     std::uint64_t seed, int iterations) {
  if (epsilon <= 0.0) throw parameter_error("near_optimal_cover: epsilon <= 0");
  const auto& pts = cloud.points;
  const std::size_t n = pts.size();
  BallFamily out;
  out.ambient_dim = cloud.ambient_dim;
  if (n == 0) return out;

  const double eps2 = epsilon * epsilon * (1.0 + 2.0 * kBoundaryRelTol);
  // balls below the cloud's resolution carry no information about the
  // underlying set, so the shrink moves stop there
  const double r_floor =
      std::max(kRadiusFloor, std::min(cloud.resolution, epsilon));
  std::vector<std::size_t> centers;
  std::vector<double> radii;

  // greedy start: most uncovered points per candidate center
  std::vector<bool> covered(n, false);
  std::size_t remaining = n;
  while (remaining > 0) {
    std::size_t best = 0;
    int best_count = -1;
    for (std::size_t c = 0; c < n; ++c) {
      int count = 0;
      for (std::size_t p = 0; p < n; ++p)
        if (!covered[p] && dist2(pts[c], pts[p]) <= eps2) ++count;
      if (count > best_count) {
        best_count = count;
        best = c;
      }
    }
    double rmax = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      if (!covered[p] && dist2(pts[best], pts[p]) <= eps2) {
        covered[p] = true;
        --remaining;
        rmax = std::max(rmax, dist(pts[best], pts[p]));
      }
    centers.push_back(best);
    radii.push_back(std::max(rmax, r_floor));
  }

  const auto covered_by = [&](std::size_t p, std::size_t ball) {
    const double r = radii[ball] * (1.0 + kBoundaryRelTol);
    return dist2(pts[centers[ball]], pts[p]) <= r * r;
  };
  const auto covered_elsewhere = [&](std::size_t p, std::size_t skip) {
    for (std::size_t b = 0; b < centers.size(); ++b)
      if (b != skip && covered_by(p, b)) return true;
    return false;
  };
  const auto shrink_ball = [&](std::size_t b) {
    // radius needed for the points only this ball covers
    double need = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      if (covered_by(p, b) && !covered_elsewhere(p, b))
        need = std::max(need, dist(pts[centers[b]], pts[p]));
    return std::max(need, r_floor);
  };

  for (std::size_t b = 0; b < centers.size(); ++b)
    radii[b] = std::min(radii[b], std::max(shrink_ball(b), r_floor));

  std::mt19937_64 rng(seed);
  for (int it = 0; it < iterations && !centers.empty(); ++it) {
    const std::size_t b = rng() % centers.size();
    const int move = static_cast<int>(rng() % 3);
    if (move == 0) {
      // drop if redundant
      bool redundant = true;
      for (std::size_t p = 0; p < n; ++p)
        if (covered_by(p, b) && !covered_elsewhere(p, b)) {
          redundant = false;
          break;
        }
      if (redundant) {
        centers.erase(centers.begin() + b);
        radii.erase(radii.begin() + b);
      }
    } else if (move == 1) {
      const double r = shrink_ball(b);
      if (r < radii[b]) radii[b] = r;
    } else {
      const std::size_t c = rng() % n;
      double need = 0.0;
      for (std::size_t p = 0; p < n; ++p)
        if (covered_by(p, b) && !covered_elsewhere(p, b))
          need = std::max(need, dist(pts[c], pts[p]));
      need = std::max(need, r_floor);
      if (need <= epsilon && cost(need) < cost(radii[b])) {
        centers[b] = c;
        radii[b] = need;
      }
    }
  }
  for (std::size_t b = 0; b < centers.size(); ++b)
    radii[b] = std::min(radii[b], std::max(shrink_ball(b), r_floor));

  for (std::size_t b = 0; b < centers.size(); ++b)
    out.balls.emplace_back(pts[centers[b]], radii[b]);
  return out;
}

struct PremeasureEstimate {
  double upper_bound = 0.0;
  BallFamily witness_cover;
};

// Covering upper bound on the delta-premeasure of the cloud's
// underlying set: sum of f(diam) over the best covering found.
inline PremeasureEstimate premeasure_estimate(const PointCloud& cloud,
                                              const RadiusGauge& gauge,
                                              double delta, std::uint64_t seed,
                                              int iterations) {
  if (delta < 2.0 * cloud.resolution)
    throw precondition_error("premeasure_estimate: delta below 2*resolution");
  // gauges are monotone, so minimizing sum f(r) also minimizes sum f(2r)
  BallFamily fam =
      near_optimal_cover(cloud, delta / 2.0, gauge, seed, iterations);
  PremeasureEstimate est;
  est.witness_cover = fam;
  for (const Ball& b : fam.balls) est.upper_bound += gauge(2.0 * b.radius);
  return est;
}

// Turns a raw Hausdorff-witness cover (small diameters, bounded
// alpha-sum) into a labeled ball cover with centers in the cloud and
// per-label sums <= 3^alpha * a.
inline std::pair<BallFamily, CoveringReport> cover_from_hausdorff(
    const PointCloud& cloud, const BallFamily& raw_cover, double epsilon,
    double alpha) {
  double a = 0.0;
  for (const Ball& b : raw_cover.balls) {
    const double diam = 2.0 * b.radius;
    if (diam >= epsilon / 1000.0)
      throw precondition_error(
          "cover_from_hausdorff: raw element diameter >= epsilon/1000");
    a += std::pow(diam, alpha);
  }
  BallFamily seeds;
  seeds.ambient_dim = cloud.ambient_dim;
  for (const Ball& b : raw_cover.balls) {
    for (std::size_t p = 0; p < cloud.points.size(); ++p)
      if (contains_closed(b, cloud.points[p])) {
        seeds.balls.emplace_back(cloud.points[p], 6.0 * b.radius);
        break;  // one center per raw element
      }
  }
  for (std::size_t p = 0; p < cloud.points.size(); ++p) {
    bool hit = false;
    for (const Ball& b : raw_cover.balls)
      if (contains_closed(b, cloud.points[p])) {
        hit = true;
        break;
      }
    if (!hit)
      throw precondition_error(
          "cover_from_hausdorff: raw cover misses a cloud point");
  }
  BallFamily labeled = geom::bounded_multiplicity_cover(cloud, seeds);

  CoveringReport rep;
  rep.alpha_or_gauge = "r^" + std::to_string(alpha);
  rep.budget_a = a;
  rep.decay_ratio_q = 0.0;
  std::map<int, double> sums;
  for (std::size_t i = 0; i < labeled.balls.size(); ++i)
    sums[labeled.labels[i]] += std::pow(labeled.balls[i].radius, alpha);
  for (const auto& [id, s] : sums) {
    rep.label_ids.push_back(id);
    rep.per_label_sums.push_back(s);
  }
  rep.label_count = static_cast<int>(sums.size());
  rep.valid_supercover = geom::is_supercovering(cloud, labeled).valid;
  rep.constants["a"] = a;
  rep.constants["per_label_bound"] = std::pow(3.0, alpha) * a;
  return {std::move(labeled), std::move(rep)};
}

// The geometric-decay supercovering: split the near-optimal base cover
// at radius epsilon/9, lay an epsilon-net layer over the large-ball
// part, triple the small-ball part and peel it by iterated Vitali
// selection. Per-label sums decay like q^j with q = 1 - 9^{-alpha}.
inline std::pair<BallFamily, CoveringReport> supercover_geometric(
    const PointCloud& cloud, double alpha, double epsilon, double a,
    std::uint64_t seed) {
  if (alpha <= 0.0) throw parameter_error("supercover_geometric: alpha <= 0");
  const int d = cloud.ambient_dim;
  const double q = 1.0 - std::pow(9.0, -alpha);
  const int net_labels = static_cast<int>(std::pow(100.0, d));

  const int iters = 2000 + 50 * static_cast<int>(cloud.points.size());
  BallFamily base =
      near_optimal_cover(cloud, epsilon, RadiusGauge::power(alpha), seed, iters);
  double base_sum = 0.0;
  for (const Ball& b : base.balls) base_sum += std::pow(b.radius, alpha);
  if (base_sum >= a)
    throw budget_error("supercover_geometric: budget a below base cover sum");

  std::vector<Ball> large, small;
  for (const Ball& b : base.balls)
    (b.radius >= epsilon / 9.0 ? large : small).push_back(b);

  BallFamily family;
  family.ambient_dim = d;

  // net layer over K_0, colored into at most 100^d subfamilies
  int used_net_labels = 0;
  if (!large.empty()) {
    PointCloud k0;
    k0.ambient_dim = d;
    k0.resolution = cloud.resolution;
    for (const Point& p : cloud.points)
      for (const Ball& b : large)
        if (contains_closed(b, p)) {
          k0.points.push_back(p);
          break;
        }
    if (!k0.points.empty()) {
      PointCloud net = geom::max_separated_net(k0, epsilon / 3.0);
      BallFamily c1;
      c1.ambient_dim = d;
      for (const Point& p : net.points) c1.balls.emplace_back(p, epsilon);
      c1 = geom::split_into_disjoint(c1);
      for (std::size_t i = 0; i < c1.balls.size(); ++i) {
        if (c1.labels[i] > net_labels)
          throw error("supercover_geometric: net coloring exceeded 100^d");
        used_net_labels = std::max(used_net_labels, c1.labels[i]);
        family.balls.push_back(c1.balls[i]);
        family.labels.push_back(c1.labels[i]);
      }
    }
  }

  // Vitali peeling of the tripled small-ball part
  std::vector<Ball> tripled;
  for (const Ball& b : small) tripled.emplace_back(b.center, 3.0 * b.radius);
  std::vector<std::size_t> active(tripled.size());
  std::iota(active.begin(), active.end(), 0);
  int peel = 0;
  while (!active.empty()) {
    const auto sel = detail::vitali_indices(tripled, active);
    ++peel;
    for (std::size_t idx : sel) {
      family.balls.push_back(tripled[idx]);
      family.labels.push_back(net_labels + peel);
    }
    std::vector<std::size_t> next;
    std::size_t si = 0;
    for (std::size_t idx : active) {
      if (si < sel.size() && sel[si] == idx) {
        ++si;
        continue;
      }
      next.push_back(idx);
    }
    active = std::move(next);
  }

  CoveringReport rep;
  rep.alpha_or_gauge = "r^" + std::to_string(alpha);
  rep.budget_a = a;
  rep.decay_ratio_q = q;
  std::map<int, double> sums;
  for (std::size_t i = 0; i < family.balls.size(); ++i)
    sums[family.labels[i]] += std::pow(family.balls[i].radius, alpha);
  double log_c = -std::numeric_limits<double>::infinity();
  for (const auto& [id, s] : sums) {
    rep.label_ids.push_back(id);
    rep.per_label_sums.push_back(s);
    log_c = std::max(log_c, std::log(s) - id * std::log(q) - std::log(a));
  }
  rep.label_count = static_cast<int>(sums.size());
  rep.valid_supercover = geom::is_supercovering(cloud, family).valid;
  rep.constants["q"] = q;
  rep.constants["base_sum"] = base_sum;
  rep.constants["net_labels_used"] = used_net_labels;
  rep.constants["peel_count"] = peel;
  rep.constants["log_C"] = log_c;
  rep.constants["C"] = std::exp(log_c);
  // theoretical closed-form upper bound for C
  rep.constants["log_C_bound"] = -(std::pow(100.0, d) + 1.0) * std::log(q) +
                                 alpha * std::log(3.0) +
                                 d * std::log(100.0) + d * std::log(9.0);
  return {std::move(family), std::move(rep)};
}

// The bounded-split supercovering: a bounded-multiplicity base cover
// plus, per base ball, geometric ring decompositions carrying separated
// nets. Works for alpha in (d-1, d] (or a d-falling gauge); the ring
// series converges exactly in that regime.
inline std::pair<BallFamily, CoveringReport> supercover_bounded(
    const PointCloud& cloud, const RadiusGauge& gauge, double epsilon,
    double a, double q_param, std::uint64_t seed) {
  const int d = cloud.ambient_dim;
  if (q_param <= 0.0 || q_param >= 1.0)
    throw parameter_error("supercover_bounded: q must lie in (0,1)");
  if (gauge.alpha) {
    if (*gauge.alpha <= d - 1)
      throw divergence_error(
          "supercover_bounded: alpha <= d-1, ring series diverges");
    if (*gauge.alpha > d)
      throw parameter_error("supercover_bounded: alpha > d");
  }
  const double q = q_param;
  const double l = 2.0 * (1.0 - q) / 3.0;
  const int colors = static_cast<int>(std::pow(100.0, d));

  const int iters = 2000 + 50 * static_cast<int>(cloud.points.size());
  BallFamily inner =
      near_optimal_cover(cloud, epsilon / 3.0, gauge, seed, iters);
  double inner_sum = 0.0;
  for (const Ball& b : inner.balls) inner_sum += gauge(b.radius);
  if (inner_sum >= a)
    throw budget_error("supercover_bounded: budget a below base cover sum");
  BallFamily tripled;
  tripled.ambient_dim = d;
  for (const Ball& b : inner.balls)
    tripled.balls.emplace_back(b.center, 3.0 * b.radius);
  BallFamily base = geom::bounded_multiplicity_cover(cloud, tripled);
  const auto base_ids = base.distinct_labels();
  const int m_base = static_cast<int>(base_ids.size());

  BallFamily family;
  family.ambient_dim = d;
  for (std::size_t i = 0; i < base.balls.size(); ++i) {
    family.balls.push_back(base.balls[i]);
    family.labels.push_back(base.labels[i]);
  }

  const double c0 = 2.0 * unit_sphere_area(d) * l /
                    (unit_ball_volume(d) * std::pow(l * q / 6.0, d));
  double net_ratio_max = 0.0;

  for (std::size_t bi = 0; bi < base.balls.size(); ++bi) {
    const Ball& bb = base.balls[bi];
    const int m = base.labels[bi];
    const double r = bb.radius;

    // cloud points in the annulus B_r \ B_{r/3}
    std::vector<std::pair<double, std::size_t>> annulus;
    double dmax = 0.0;
    for (std::size_t p = 0; p < cloud.points.size(); ++p) {
      const double dd = dist(bb.center, cloud.points[p]);
      if (dd >= r / 3.0 && dd < r) {
        annulus.emplace_back(dd, p);
        dmax = std::max(dmax, dd);
      }
    }
    if (annulus.empty()) continue;
    std::sort(annulus.begin(), annulus.end());

    double r_prev = r / 3.0;
    double width = r * l;
    std::size_t cursor = 0;
    for (int j = 0; cursor < annulus.size() && j < 100000; ++j) {
      const double r_j = r_prev + width;
      // points with r_prev <= dist < r_j
      PointCloud ring_pts;
      ring_pts.ambient_dim = d;
      ring_pts.resolution = cloud.resolution;
      while (cursor < annulus.size() && annulus[cursor].first < r_j) {
        if (annulus[cursor].first >= r_prev)
          ring_pts.points.push_back(cloud.points[annulus[cursor].second]);
        ++cursor;
      }
      if (!ring_pts.points.empty()) {
        // balls below the cloud's resolution carry no information about
        // the underlying set, so the ring radii stop shrinking there
        const double tau = std::min(
            std::max(r * l * std::pow(q, j + 1), cloud.resolution), r / 3.0);
        PointCloud net = geom::max_separated_net(ring_pts, tau / 3.0);
        if (gauge.alpha) {
          const double cap = c0 * std::pow(q, (1.0 - d) * j);
          net_ratio_max =
              std::max(net_ratio_max, net.points.size() / cap);
          if (static_cast<double>(net.points.size()) > cap)
            throw error("supercover_bounded: ring net exceeds C_0 q^{(1-d)j}");
        }
        BallFamily cj;
        cj.ambient_dim = d;
        for (const Point& p : net.points) cj.balls.emplace_back(p, tau);
        cj = geom::split_into_disjoint(cj);
        const int i_class = j % 3;
        for (std::size_t bix = 0; bix < cj.balls.size(); ++bix) {
          if (cj.labels[bix] > colors)
            throw error("supercover_bounded: ring coloring exceeded 100^d");
          const int label =
              m_base + ((m - 1) * 3 + i_class) * colors + cj.labels[bix];
          family.balls.push_back(cj.balls[bix]);
          family.labels.push_back(label);
        }
      }
      r_prev = r_j;
      width *= q;
      if (r_prev > dmax) break;
    }
  }

  CoveringReport rep;
  rep.alpha_or_gauge = gauge.id();
  rep.budget_a = a;
  rep.decay_ratio_q = q;
  std::map<int, double> sums;
  for (std::size_t i = 0; i < family.balls.size(); ++i)
    sums[family.labels[i]] += gauge(family.balls[i].radius);
  for (const auto& [id, s] : sums) {
    rep.label_ids.push_back(id);
    rep.per_label_sums.push_back(s);
  }
  rep.label_count = static_cast<int>(sums.size());
  rep.valid_supercover = geom::is_supercovering(cloud, family).valid;
  rep.constants["q"] = q;
  rep.constants["l"] = l;
  rep.constants["C_0"] = c0;
  rep.constants["base_labels"] = m_base;
  rep.constants["label_bound_C_1"] = m_base * (1.0 + 3.0 * colors);
  rep.constants["base_sum"] = inner_sum;
  rep.constants["net_ratio_max"] = net_ratio_max;
  if (gauge.alpha) {
    const double alpha = *gauge.alpha;
    rep.constants["C_2"] = c0 * std::pow(l, alpha) * std::pow(q, alpha) /
                           (1.0 - std::pow(q, alpha - d + 1));
  }
  return {std::move(family), std::move(rep)};
}

enum class VerifyMode { cover, supercover };

// Recomputes the report fields from scratch, independent of whichever
// constructor produced the family.
inline CoveringReport verify_covering(const PointCloud& cloud,
                                      const BallFamily& family,
                                      VerifyMode mode, const RadiusGauge& gauge,
                                      double budget, double q = 0.0) {
  CoveringReport rep;
  rep.alpha_or_gauge = gauge.id();
  rep.budget_a = budget;
  rep.decay_ratio_q = q;
  std::map<int, double> sums;
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < family.balls.size(); ++i) {
    const int label = family.labeled() ? family.labels[i] : 1;
    sums[label] += gauge(family.balls[i].radius);
    members[label].push_back(i);
  }
  int violations = 0;
  for (const auto& [label, idxs] : members)
    for (std::size_t x = 0; x < idxs.size(); ++x)
      for (std::size_t y = x + 1; y < idxs.size(); ++y)
        if (!balls_disjoint(family.balls[idxs[x]], family.balls[idxs[y]]))
          ++violations;
  for (const auto& [id, s] : sums) {
    rep.label_ids.push_back(id);
    rep.per_label_sums.push_back(s);
  }
  rep.label_count = static_cast<int>(sums.size());
  rep.valid_supercover = geom::is_supercovering(cloud, family).valid;
  if (mode == VerifyMode::cover) {
    bool all = true;
    for (const Point& p : cloud.points) {
      bool hit = false;
      for (const Ball& b : family.balls)
        if (contains_closed(b, p)) {
          hit = true;
          break;
        }
      if (!hit) {
        all = false;
        break;
      }
    }
    rep.constants["covers_cloud"] = all ? 1.0 : 0.0;
  }
  rep.constants["disjointness_violations"] = violations;
  if (q > 0.0 && budget > 0.0) {
    double log_c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.label_ids.size(); ++i)
      log_c = std::max(log_c, std::log(rep.per_label_sums[i]) -
                                  rep.label_ids[i] * std::log(q) -
                                  std::log(budget));
    rep.constants["log_C"] = log_c;
  }
  return rep;
}

}  // namespace cover
}  // namespace frostman
