#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "frostman/core.hpp"
#include "frostman/covering.hpp"
#include "frostman/gauge.hpp"
#include "frostman/geometry.hpp"
#include "frostman/measures.hpp"

namespace frostman {

// The tested estimate: sum over a disjoint family of |int psi d mu|
// bounded by constant * g(sum f(r_j)).
struct FrostmanHypothesis {
  RadialProfile profile;   // psi
  RadiusGauge gauge_sum;   // r^alpha or f(r)
  GaugeFunction weight;    // g
  double constant = 1.0;
};

// Machine-checkable record of one lemma's estimate chain with all
// constants explicit. A failed certificate (slack < 1 or valid ==
// false) is a first-class outcome.
struct Certificate {
  std::string bound_kind;  // "h-of-a", "g-of-a", "gauge", "tail"
  int target_points = 0;
  double premeasure_bound_a = 0.0;
  CoveringReport supercover_report;
  std::vector<double> frostman_sums_per_label;
  double final_bound = 0.0;
  double measured_mass = 0.0;
  double slack = 0.0;  // final_bound / measured_mass
  bool valid = false;
  std::map<std::string, double> constants;
  std::vector<std::string> notes;
};

namespace frost {

// Sum over one disjoint subfamily of |int psi((y-x_j)/r_j) d mu(y)|.
inline double frostman_sum(const DiscreteSignedMeasure& mu,
                           const BallFamily& family,
                           const RadialProfile& profile) {
  for (std::size_t i = 0; i < family.balls.size(); ++i)
    for (std::size_t j = i + 1; j < family.balls.size(); ++j)
      if (!balls_disjoint(family.balls[i], family.balls[j]))
        throw precondition_error("frostman_sum: balls " + std::to_string(i) +
                                 " and " + std::to_string(j) +
                                 " are not disjoint");
  double s = 0.0;
  for (const Ball& b : family.balls)
    s += std::abs(
        meas::smoothed_mass(mu, profile, b, meas::MassPart::signed_part));
  return s;
}

inline std::map<int, BallFamily> split_by_label(const BallFamily& family) {
  std::map<int, BallFamily> out;
  for (std::size_t i = 0; i < family.balls.size(); ++i) {
    const int label = family.labeled() ? family.labels[i] : 1;
    auto& sub = out[label];
    sub.ambient_dim = family.ambient_dim;
    sub.balls.push_back(family.balls[i]);
  }
  return out;
}

struct AdversarialResult {
  double worst_ratio = 0.0;
  BallFamily witness_family;
  bool hypothesis_violated = false;
};

// Stress-test of the hypothesis over random disjoint families with
// centers at atoms and log-grid radii, refined by hill climbing.
// Deterministic in seed; worst_ratio is best-so-far monotone.
inline AdversarialResult adversarial_search(const DiscreteSignedMeasure& mu,
                                            const FrostmanHypothesis& hyp,
                                            std::uint64_t seed, int iterations,
                                            int family_size_max,
                                            double r_min = 0.0) {
  if (iterations < 1)
    throw parameter_error("adversarial_search: iterations < 1");
  AdversarialResult out;
  out.witness_family.ambient_dim = mu.ambient_dim;
  if (mu.atoms.empty()) return out;

  const PointCloud support = mu.support_cloud(0.0);
  double diam = support.diameter();
  if (diam <= 0.0) diam = 1.0;
  if (r_min <= 0.0) r_min = std::max(kRadiusFloor, 1e-4 * diam);
  const int grid_n = 64;
  std::vector<double> radius_grid(grid_n);
  for (int i = 0; i < grid_n; ++i)
    radius_grid[i] =
        r_min * std::pow(diam / r_min, static_cast<double>(i) / (grid_n - 1));

  const auto ratio_of = [&](const BallFamily& fam) {
    double arg = 0.0;
    for (const Ball& b : fam.balls) arg += hyp.gauge_sum(b.radius);
    const double denom = hyp.constant * hyp.weight(arg);
    const double num = frostman_sum(mu, fam, hyp.profile);
    if (denom <= 0.0)
      return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return num / denom;
  };
  const auto disjoint_with = [](const BallFamily& fam, const Ball& b,
                                std::size_t skip) {
    for (std::size_t i = 0; i < fam.balls.size(); ++i)
      if (i != skip && !balls_disjoint(fam.balls[i], b)) return false;
    return true;
  };

  std::mt19937_64 rng(seed);
  BallFamily current;
  current.ambient_dim = mu.ambient_dim;
  for (int it = 0; it < iterations; ++it) {
    if (it % 16 == 0 || current.balls.empty()) {
      // fresh random family
      current.balls.clear();
      const int target = 1 + static_cast<int>(rng() % family_size_max);
      for (int t = 0; t < 4 * target &&
                      static_cast<int>(current.balls.size()) < target;
           ++t) {
        const Point& c = mu.atoms[rng() % mu.atoms.size()].x;
        const Ball b(c, radius_grid[rng() % grid_n]);
        if (disjoint_with(current, b, current.balls.size()))
          current.balls.push_back(b);
      }
      if (current.balls.empty()) continue;
    } else {
      // local move on the incumbent
      BallFamily cand = current;
      const int move = static_cast<int>(rng() % 3);
      if (move == 0 && !cand.balls.empty()) {
        const std::size_t i = rng() % cand.balls.size();
        cand.balls[i].radius = radius_grid[rng() % grid_n];
        if (!disjoint_with(cand, cand.balls[i], i)) continue;
      } else if (move == 1 && !cand.balls.empty()) {
        const std::size_t i = rng() % cand.balls.size();
        cand.balls[i].center = mu.atoms[rng() % mu.atoms.size()].x;
        if (!disjoint_with(cand, cand.balls[i], i)) continue;
      } else {
        if (static_cast<int>(cand.balls.size()) >= family_size_max) continue;
        const Ball b(mu.atoms[rng() % mu.atoms.size()].x,
                     radius_grid[rng() % grid_n]);
        if (!disjoint_with(cand, b, cand.balls.size())) continue;
        cand.balls.push_back(b);
      }
      if (ratio_of(cand) > ratio_of(current)) current = cand;
    }
    const double r = ratio_of(current);
    if (r > out.worst_ratio) {
      out.worst_ratio = r;
      out.witness_family = current;
    }
  }
  out.hypothesis_violated = out.worst_ratio > 1.0 + 1e-9;
  return out;
}

enum class TailClass { big_o, little_o, neither };

struct TailCheck {
  TailClass cls = TailClass::big_o;
  std::string note;
};

// Classifies phi(x) |x|^alpha on a log grid up to |x| = 10^6.
inline TailCheck tail_class_check(const RadialProfile& profile, double alpha,
                                  const std::vector<double>& radii_grid = {}) {
  TailCheck out;
  if (profile.compact_support()) {
    out.cls = TailClass::little_o;
    out.note = "compact support: trivially o(|x|^{-alpha})";
    return out;
  }
  std::vector<double> grid = radii_grid;
  if (grid.empty())
    for (int i = 0; i <= 60; ++i) grid.push_back(std::pow(10.0, 0.1 * i));
  std::vector<double> v;
  for (double x : grid) v.push_back(profile(x) * std::pow(x, alpha));
  const double vmax = *std::max_element(v.begin(), v.end());
  // compare the last decade against the one before it
  const std::size_t n = v.size();
  const double tail_now = v[n - 1];
  const double tail_prev = v[n - 11 < n ? n - 11 : 0];
  // bounded profiles may still creep toward their supremum, so only
  // genuine per-decade growth counts as unbounded
  if (tail_now > tail_prev * 1.05) {
    out.cls = TailClass::neither;
    out.note = "phi(x) |x|^alpha grows along the grid";
  } else if (tail_now < 0.5 * tail_prev && tail_now < 0.05 * vmax) {
    out.cls = TailClass::little_o;
  } else {
    out.cls = TailClass::big_o;
  }
  return out;
}

namespace detail {

// atoms of the selected sign lying within `radius` of some cloud point
inline DiscreteSignedMeasure restrict_near(const DiscreteSignedMeasure& mu,
                                           const PointCloud& cloud,
                                           double radius, bool positive_only) {
  DiscreteSignedMeasure out;
  out.ambient_dim = mu.ambient_dim;
  for (const Atom& a : mu.atoms) {
    if (positive_only && a.w <= 0.0) continue;
    for (const Point& p : cloud.points)
      if (dist(a.x, p) <= radius * (1.0 + kBoundaryRelTol)) {
        out.atoms.push_back(a);
        break;
      }
  }
  return out;
}

inline PointCloud cloud_of(const DiscreteSignedMeasure& mu, double resolution) {
  return mu.support_cloud(resolution);
}

}  // namespace detail

// Mechanization of the proof chain: premeasure estimate, restriction to
// the positive-dominant region, geometric-decay supercovering, per-label
// hypothesis checks, and the Dini-integral bound h(a).
inline Certificate certify_teor1(const DiscreteSignedMeasure& mu,
                                 const PointCloud& target, double alpha,
                                 double epsilon,
                                 const FrostmanHypothesis& hyp,
                                 std::uint64_t seed) {
  Certificate cert;
  cert.bound_kind = hyp.gauge_sum.alpha ? "h-of-a" : "gauge";
  cert.target_points = static_cast<int>(target.points.size());

  const int iters = 2000 + 50 * static_cast<int>(target.points.size());
  const double delta = std::max(epsilon, 2.0 * target.resolution);
  const auto pre =
      cover::premeasure_estimate(target, hyp.gauge_sum, delta, seed, iters);
  const double a = pre.upper_bound * 1.05 + 1e-12;
  cert.premeasure_bound_a = a;

  const double equiv_c = hyp.profile.equivalence_factor;
  const double eps_region = 1.0 / (2.0 * equiv_c);
  const int region_n = std::max(1, static_cast<int>(std::floor(0.5 / epsilon)));
  cert.constants["eps_region"] = eps_region;
  cert.constants["N"] = region_n;

  const PointCloud region =
      meas::positive_dominant_region(mu, eps_region, region_n);
  // positive-dominant atoms lying over the target set
  DiscreteSignedMeasure dominant;
  dominant.ambient_dim = mu.ambient_dim;
  for (const Atom& atom : mu.atoms) {
    if (atom.w <= 0.0) continue;
    bool in_region = false;
    for (const Point& p : region.points)
      if (dist(p, atom.x) < 1e-12) {
        in_region = true;
        break;
      }
    if (!in_region) continue;
    for (const Point& p : target.points)
      if (dist(p, atom.x) <=
          std::max(target.resolution, 1e-12) * (1.0 + kBoundaryRelTol)) {
        dominant.atoms.push_back(atom);
        break;
      }
  }
  cert.measured_mass = dominant.total_mass();

  if (dominant.atoms.empty()) {
    cert.final_bound = 0.0;
    cert.slack = std::numeric_limits<double>::infinity();
    cert.valid = true;
    cert.notes.push_back("no positive-dominant mass over the target set");
    return cert;
  }

  PointCloud k = dominant.support_cloud(target.resolution);
  auto [family, rep] = cover::supercover_geometric(
      k, hyp.gauge_sum.alpha ? *hyp.gauge_sum.alpha : 1.0, epsilon, a, seed);
  cert.supercover_report = rep;

  const double q = rep.decay_ratio_q;
  const double log_c_bound = rep.constants.at("log_C_bound");
  bool hyp_ok = true;
  bool decay_ok = true;
  const auto by_label = split_by_label(family);
  std::size_t li = 0;
  for (const auto& [label, sub] : by_label) {
    const double s = frostman_sum(mu, sub, hyp.profile);
    cert.frostman_sums_per_label.push_back(s);
    const double bound = hyp.constant * hyp.weight(rep.per_label_sums[li]);
    if (s > bound * (1.0 + 1e-9) + 1e-12) {
      hyp_ok = false;
      cert.notes.push_back("hypothesis violated at label " +
                           std::to_string(label));
    }
    if (std::log(rep.per_label_sums[li]) >
        log_c_bound + label * std::log(q) + std::log(a) + 1e-9) {
      decay_ok = false;
      cert.notes.push_back("geometric decay violated at label " +
                           std::to_string(label));
    }
    ++li;
  }

  // final bound along the proof chain: sum_j constant * g(C q^j a)
  const double log_c = rep.constants.at("log_C");
  double final_bound = 0.0;
  for (int label : rep.label_ids) {
    const double log_arg = log_c + label * std::log(q) + std::log(a);
    final_bound += hyp.constant * hyp.weight(std::exp(std::min(log_arg, 700.0)));
  }
  cert.final_bound = final_bound;

  const double h_max = std::max(a * 2.0, 1.0);
  const auto dini = gauge::dini_transform(hyp.weight, h_max, 1e-9);
  const double h_a = dini.h(a);
  cert.constants["h_a"] = h_a;
  cert.constants["kappa"] = h_a > 0.0 ? final_bound / h_a : 0.0;
  cert.constants["a"] = a;
  cert.constants["q"] = q;

  cert.slack = cert.measured_mass > 0.0
                   ? final_bound / cert.measured_mass
                   : std::numeric_limits<double>::infinity();
  cert.valid = rep.valid_supercover && hyp_ok && decay_ok;
  return cert;
}

// The bounded-split chain: dilated neighborhood V of the positive
// support bounds the negative slack, supercover_bounded gives C_1
// labels with sums <= C_2 a.
inline Certificate certify_teor2(const DiscreteSignedMeasure& mu,
                                 const PointCloud& target,
                                 const RadiusGauge& gauge_sum, double epsilon,
                                 const FrostmanHypothesis& hyp,
                                 std::uint64_t seed, double q_param = 0.5) {
  Certificate cert;
  cert.bound_kind = gauge_sum.alpha ? "g-of-a" : "gauge";
  cert.target_points = static_cast<int>(target.points.size());

  const int iters = 2000 + 50 * static_cast<int>(target.points.size());
  const double delta = std::max(epsilon, 2.0 * target.resolution);
  const auto pre =
      cover::premeasure_estimate(target, gauge_sum, delta, seed, iters);
  const double a = pre.upper_bound * 1.05 + 1e-12;
  cert.premeasure_bound_a = a;

  const DiscreteSignedMeasure positive = detail::restrict_near(
      mu, target, std::max(target.resolution, 1e-12), true);
  cert.measured_mass = positive.total_mass();
  if (positive.atoms.empty()) {
    cert.final_bound = 0.0;
    cert.slack = std::numeric_limits<double>::infinity();
    cert.valid = true;
    cert.notes.push_back("no positive mass over the target set");
    return cert;
  }

  // negative mass of the dilated neighborhood V
  const double dilation = 2.0 * std::max(target.resolution, 1e-12);
  double eps_neg = 0.0;
  for (const Atom& atom : mu.atoms) {
    if (atom.w >= 0.0) continue;
    for (const Atom& p : positive.atoms)
      if (dist(atom.x, p.x) < dilation) {
        eps_neg += -atom.w;
        break;
      }
  }
  cert.constants["eps_neg"] = eps_neg;
  cert.constants["dilation"] = dilation;

  PointCloud k = positive.support_cloud(target.resolution);
  auto [family, rep] =
      cover::supercover_bounded(k, gauge_sum, epsilon, a, q_param, seed);
  cert.supercover_report = rep;

  bool hyp_ok = true;
  double max_label_sum = 0.0;
  const auto by_label = split_by_label(family);
  std::size_t li = 0;
  for (const auto& [label, sub] : by_label) {
    const double s = frostman_sum(mu, sub, hyp.profile);
    cert.frostman_sums_per_label.push_back(s);
    const double bound = hyp.constant * hyp.weight(rep.per_label_sums[li]);
    if (s > bound * (1.0 + 1e-9) + 1e-12) {
      hyp_ok = false;
      cert.notes.push_back("hypothesis violated at label " +
                           std::to_string(label));
    }
    max_label_sum = std::max(max_label_sum, rep.per_label_sums[li]);
    ++li;
  }

  const double c1 = rep.label_count;
  const double arg = gauge_sum.alpha && rep.constants.count("C_2")
                         ? rep.constants.at("C_2") * a
                         : max_label_sum;
  bool sums_ok = true;
  if (gauge_sum.alpha && rep.constants.count("C_2"))
    for (double s : rep.per_label_sums)
      if (s > rep.constants.at("C_2") * a * (1.0 + 1e-9)) sums_ok = false;
  cert.final_bound = c1 * hyp.constant * hyp.weight(arg) + c1 * eps_neg;
  cert.constants["C_1"] = c1;
  cert.constants["C_1_bound"] = rep.constants.at("label_bound_C_1");
  if (rep.constants.count("C_2")) cert.constants["C_2"] = rep.constants.at("C_2");
  cert.constants["a"] = a;

  cert.slack = cert.measured_mass > 0.0
                   ? cert.final_bound / cert.measured_mass
                   : std::numeric_limits<double>::infinity();
  cert.valid = rep.valid_supercover && hyp_ok && sums_ok &&
               c1 <= rep.constants.at("label_bound_C_1");
  return cert;
}

// Non-compact profiles: the covering of Lemma pok1 at scale eps/N plus
// the explicit tail term a * delta(eps).
inline Certificate certify_teor3(const DiscreteSignedMeasure& mu,
                                 const PointCloud& target, double alpha,
                                 double epsilon,
                                 const FrostmanHypothesis& hyp,
                                 std::uint64_t seed) {
  Certificate cert;
  cert.bound_kind = "tail";
  cert.target_points = static_cast<int>(target.points.size());

  if (hyp.profile.compact_support()) {
    Certificate inner = certify_teor1(mu, target, alpha, epsilon, hyp, seed);
    inner.bound_kind = "tail";
    inner.constants["delta_eps"] = 0.0;
    inner.notes.push_back("compact profile: tail term vanishes, teor1 chain");
    return inner;
  }
  const TailCheck tail = tail_class_check(hyp.profile, alpha);
  if (tail.cls == TailClass::neither)
    throw precondition_error("certify_teor3: profile tail is neither O nor o");

  const double equiv_c = hyp.profile.equivalence_factor;
  const double eps_region = 1.0 / (2.0 * equiv_c);
  const int region_n = std::max(1, static_cast<int>(std::floor(0.5 / epsilon)));
  const PointCloud region =
      meas::positive_dominant_region(mu, eps_region, region_n);
  DiscreteSignedMeasure dominant;
  dominant.ambient_dim = mu.ambient_dim;
  for (const Atom& atom : mu.atoms) {
    if (atom.w <= 0.0) continue;
    bool in_region = false;
    for (const Point& p : region.points)
      if (dist(p, atom.x) < 1e-12) in_region = true;
    if (!in_region) continue;
    for (const Point& p : target.points)
      if (dist(p, atom.x) <=
          std::max(target.resolution, 1e-12) * (1.0 + kBoundaryRelTol)) {
        dominant.atoms.push_back(atom);
        break;
      }
  }
  cert.measured_mass = dominant.total_mass();
  if (dominant.atoms.empty()) {
    cert.final_bound = 0.0;
    cert.slack = std::numeric_limits<double>::infinity();
    cert.valid = true;
    cert.notes.push_back("no positive-dominant mass over the target set");
    return cert;
  }

  // covering at scale epsilon / N via the Hausdorff-witness route
  PointCloud k = dominant.support_cloud(target.resolution);
  const double scale = epsilon / region_n;
  const int iters = 2000 + 50 * static_cast<int>(k.points.size());
  // raw elements of radius <= scale/6 so the final balls (radius six
  // times the raw radius) stay within eps/N
  BallFamily raw = cover::near_optimal_cover(
      k, scale / 6.0, RadiusGauge::power(alpha), seed, iters);
  double rmax = kRadiusFloor;
  for (const Ball& b : raw.balls) rmax = std::max(rmax, b.radius);
  auto [family, rep] = cover::cover_from_hausdorff(k, raw, 3000.0 * rmax, alpha);
  cert.supercover_report = rep;
  const double a = rep.budget_a;
  cert.premeasure_bound_a = a;

  // tail term delta(eps) = |mu|(R^d) sup_{r <= eps/N} theta(1/(Nr)) / r^alpha
  const double tv = mu.total_variation();
  double sup = 0.0;
  const double r_hi = scale;
  for (int i = 0; i <= 240; ++i) {
    const double r = r_hi * std::pow(10.0, -6.0 * i / 240.0);
    sup = std::max(sup,
                   hyp.profile(1.0 / (region_n * r)) / std::pow(r, alpha));
  }
  const double delta_eps = tv * sup;
  cert.constants["delta_eps"] = delta_eps;
  cert.constants["N"] = region_n;
  cert.constants["a"] = a;
  cert.constants["tail_class"] =
      tail.cls == TailClass::little_o ? 1.0 : 0.0;  // 1 = little-o

  bool hyp_ok = true;
  const auto by_label = split_by_label(family);
  std::size_t li = 0;
  for (const auto& [label, sub] : by_label) {
    const double s = frostman_sum(mu, sub, hyp.profile);
    cert.frostman_sums_per_label.push_back(s);
    // the tail contributes at most sum r^alpha * delta(eps) per label
    const double bound = hyp.constant * hyp.weight(rep.per_label_sums[li]) +
                         rep.per_label_sums[li] * delta_eps;
    if (s > bound * (1.0 + 1e-9) + 1e-12) {
      hyp_ok = false;
      cert.notes.push_back("hypothesis violated at label " +
                           std::to_string(label));
    }
    ++li;
  }

  const double label_arg = std::pow(3.0, alpha) * a;
  cert.final_bound = rep.label_count * hyp.constant * hyp.weight(label_arg) +
                     a * delta_eps;
  cert.slack = cert.measured_mass > 0.0
                   ? cert.final_bound / cert.measured_mass
                   : std::numeric_limits<double>::infinity();
  cert.valid = rep.valid_supercover && hyp_ok;
  if (tail.cls == TailClass::big_o)
    cert.notes.push_back(
        "big-O tail: only the absolute-continuity claim is certified");
  return cert;
}

}  // namespace frost
}  // namespace frostman
