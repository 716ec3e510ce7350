#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "frostman/core.hpp"
#include "frostman/geometry.hpp"

namespace frostman {

struct Atom {
  Point x;
  double w = 0.0;
};

// Finite-atom stand-in for a signed measure of bounded variation.
struct DiscreteSignedMeasure {
  int ambient_dim = 1;
  std::vector<Atom> atoms;

  double total_variation() const {
    double s = 0.0;
    for (const Atom& a : atoms) s += std::abs(a.w);
    return s;
  }

  double total_mass() const {
    double s = 0.0;
    for (const Atom& a : atoms) s += a.w;
    return s;
  }

  PointCloud support_cloud(double resolution) const {
    PointCloud c;
    c.ambient_dim = ambient_dim;
    c.resolution = resolution;
    for (const Atom& a : atoms) c.points.push_back(a.x);
    return c;
  }
};

// The test function phi (or an equivalent psi). The plateau profile is
// 1 on [0, 3/4] with a cubic smoothstep down to 0 at 1; tail profiles
// are (1+t)^{-p} possibly times log(2+t)^s. `scale` builds equivalent
// profiles psi = scale * phi.
struct RadialProfile {
  enum class Kind { plateau, power_tail, power_log_tail };
  enum class TailClass { compact, big_o, little_o };

  Kind kind = Kind::plateau;
  double tail_exponent = 0.0;
  double log_exponent = 0.0;
  double scale = 1.0;
  double equivalence_factor = 1.0;  // C with phi <= psi <= C phi
  TailClass tail_class = TailClass::compact;

  static RadialProfile plateau() { return RadialProfile{}; }

  static RadialProfile power_tail(double p) {
    RadialProfile r;
    r.kind = Kind::power_tail;
    r.tail_exponent = p;
    r.tail_class = TailClass::big_o;  // relative to alpha = p
    return r;
  }

  static RadialProfile power_log_tail(double p, double s) {
    RadialProfile r;
    r.kind = Kind::power_log_tail;
    r.tail_exponent = p;
    r.log_exponent = s;
    return r;
  }

  RadialProfile scaled(double c) const {
    RadialProfile r = *this;
    r.scale *= c;
    r.equivalence_factor = std::max(r.equivalence_factor, c);
    return r;
  }

  bool compact_support() const { return kind == Kind::plateau; }

  double operator()(double t) const {
    t = std::abs(t);
    double v = 0.0;
    switch (kind) {
      case Kind::plateau: {
        if (t <= 0.75) {
          v = 1.0;
        } else if (t < 1.0) {
          const double u = (t - 0.75) / 0.25;
          v = 1.0 - (3.0 * u * u - 2.0 * u * u * u);
        }
        break;
      }
      case Kind::power_tail:
        v = std::pow(1.0 + t, -tail_exponent);
        break;
      case Kind::power_log_tail:
        v = std::pow(1.0 + t, -tail_exponent) *
            std::pow(std::log(2.0 + t), log_exponent);
        break;
    }
    return scale * v;
  }
};

namespace meas {

enum class MassPart { signed_part, positive, negative, variation };

inline double part_weight(double w, MassPart part) {
  switch (part) {
    case MassPart::signed_part:
      return w;
    case MassPart::positive:
      return w > 0.0 ? w : 0.0;
    case MassPart::negative:
      return w < 0.0 ? -w : 0.0;
    case MassPart::variation:
      return std::abs(w);
  }
  return 0.0;
}

// Mass of the selected part over the open ball (strict membership).
inline double ball_mass(const DiscreteSignedMeasure& mu, const Ball& ball,
                        MassPart part = MassPart::signed_part) {
  double s = 0.0;
  for (const Atom& a : mu.atoms)
    if (contains_open(ball, a.x)) s += part_weight(a.w, part);
  return s;
}

struct HahnDecomposition {
  DiscreteSignedMeasure mu_plus;
  DiscreteSignedMeasure mu_minus;  // stored with positive weights
  std::vector<Point> a_plus;
  std::vector<Point> a_minus;
};

inline HahnDecomposition hahn_split(const DiscreteSignedMeasure& mu) {
  HahnDecomposition h;
  h.mu_plus.ambient_dim = mu.ambient_dim;
  h.mu_minus.ambient_dim = mu.ambient_dim;
  for (const Atom& a : mu.atoms) {
    if (a.w > 0.0) {
      h.mu_plus.atoms.push_back(a);
      h.a_plus.push_back(a.x);
    } else if (a.w < 0.0) {
      h.mu_minus.atoms.push_back({a.x, -a.w});
      h.a_minus.push_back(a.x);
    }
  }
  return h;
}

// Atoms x of A_+ with mu_-(B_r(x)) <= eps * mu_+(B_r(x)) for every
// r < 1/N. The masses are step functions of r, so the condition is
// checked once per critical radius (distance from x to an atom).
inline PointCloud positive_dominant_region(const DiscreteSignedMeasure& mu,
                                           double epsilon, int N) {
  if (epsilon <= 0.0 || N < 1)
    throw parameter_error("positive_dominant_region: need eps > 0, N >= 1");
  PointCloud region;
  region.ambient_dim = mu.ambient_dim;
  const double r_cap = 1.0 / N;
  const double slack = 1e-15 * std::max(1.0, mu.total_variation());
  for (const Atom& center : mu.atoms) {
    if (center.w <= 0.0) continue;
    std::vector<std::pair<double, double>> by_dist;  // (distance, weight)
    for (const Atom& a : mu.atoms)
      by_dist.emplace_back(dist(center.x, a.x), a.w);
    std::sort(by_dist.begin(), by_dist.end());
    double plus = 0.0, minus = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < by_dist.size(); ++i) {
      if (by_dist[i].first >= r_cap) break;  // open balls of radius < 1/N
      plus += part_weight(by_dist[i].second, MassPart::positive);
      minus += part_weight(by_dist[i].second, MassPart::negative);
      // masses are constant on (d_i, d_{i+1}]; check once per step,
      // but only if some admissible radius exceeds d_i
      const bool last_at_this_dist =
          i + 1 == by_dist.size() || by_dist[i + 1].first > by_dist[i].first;
      if (last_at_this_dist && minus > epsilon * plus + slack) {
        ok = false;
        break;
      }
    }
    if (ok) region.points.push_back(center.x);
  }
  return region;
}

// Sum over atoms of weight(part) * profile(|y - center| / radius).
inline double smoothed_mass(const DiscreteSignedMeasure& mu,
                            const RadialProfile& profile, const Ball& ball,
                            MassPart part = MassPart::signed_part) {
  double s = 0.0;
  for (const Atom& a : mu.atoms)
    s += part_weight(a.w, part) * profile(dist(a.x, ball.center) / ball.radius);
  return s;
}

struct NocCheck {
  bool holds = false;
  double lhs = 0.0;  // int psi d mu_+
  double rhs = 0.0;  // 2 int psi d mu
  bool preconditions_ok = true;
  std::string note;
};

// int psi d mu_+ <= 2 int psi d mu, valid at positive-dominant points
// for psi sandwiched between phi and phi/(2 eps).
inline NocCheck noc_inequality_check(const DiscreteSignedMeasure& mu,
                                     const RadialProfile& phi,
                                     const RadialProfile& psi, const Point& x,
                                     double r, double epsilon) {
  NocCheck out;
  // sandwich check by sampling
  for (int i = 0; i <= 48; ++i) {
    const double t = i * 0.025;
    const double lo = phi(t);
    const double hi = lo / (2.0 * epsilon);
    const double v = psi(t);
    if (v < lo * (1.0 - 1e-9) - 1e-15 || v > hi * (1.0 + 1e-9) + 1e-15) {
      out.preconditions_ok = false;
      out.note = "psi violates phi <= psi <= phi/(2 eps) at t=" +
                 std::to_string(t);
      break;
    }
  }
  if (out.preconditions_ok) {
    // x must be positive-dominant at scale r
    const int N = std::max(1, static_cast<int>(std::floor(1.0 / r)) - 1);
    bool found = false;
    for (const Point& p :
         positive_dominant_region(mu, epsilon, std::max(N, 1)).points)
      if (dist(p, x) < 1e-12) found = true;
    if (!found) {
      out.preconditions_ok = false;
      out.note = "x not in the positive-dominant region at this scale";
    }
  }
  const Ball b(x, r);
  out.lhs = smoothed_mass(mu, psi, b, MassPart::positive);
  out.rhs = 2.0 * smoothed_mass(mu, psi, b, MassPart::signed_part);
  out.holds = out.lhs <= out.rhs + 1e-12 * std::max(1.0, std::abs(out.rhs));
  return out;
}

// Off-diagonal discrete energy sum_{i != j} w_i w_j |x_i - x_j|^{-alpha}.
inline double energy_integral(const DiscreteSignedMeasure& mu, double alpha) {
  if (alpha <= 0.0) throw parameter_error("energy_integral: alpha <= 0");
  for (const Atom& a : mu.atoms)
    if (a.w < 0.0)
      throw precondition_error("energy_integral: negative weight atom");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < mu.atoms.size(); ++j)
      s += 2.0 * mu.atoms[i].w * mu.atoms[j].w *
           std::pow(dist(mu.atoms[i].x, mu.atoms[j].x), -alpha);
  return s;
}

// Nonincreasing rearrangement of |d nu / d mu| with respect to mu,
// together with its running integral G.
struct Rearrangement {
  std::vector<double> values;  // nonincreasing density values
  std::vector<double> widths;  // mu-mass carried by each value
  double mu_total = 0.0;
  double nu_variation = 0.0;

  // G(t) = int_0^t |d nu/d mu|*(s) ds; piecewise linear and concave.
  double G(double t) const {
    if (t <= 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (t <= widths[i]) return acc + values[i] * t;
      acc += values[i] * widths[i];
      t -= widths[i];
    }
    return acc;
  }
};

inline Rearrangement monotone_rearrangement(const DiscreteSignedMeasure& nu,
                                            const DiscreteSignedMeasure& mu) {
  std::map<Point, double> mu_at;
  for (const Atom& a : mu.atoms) {
    if (a.w < 0.0)
      throw precondition_error("monotone_rearrangement: mu must be nonnegative");
    mu_at[a.x] = a.w;
  }
  std::map<Point, double> nu_at;
  for (const Atom& a : nu.atoms) {
    if (!mu_at.count(a.x))
      throw precondition_error(
          "monotone_rearrangement: nu atom off supp mu (nu not << mu)");
    nu_at[a.x] = a.w;
  }
  std::vector<std::pair<double, double>> dens;  // (|density|, mu weight)
  for (const Atom& a : mu.atoms) {
    const auto it = nu_at.find(a.x);
    const double nw = it == nu_at.end() ? 0.0 : it->second;
    dens.emplace_back(std::abs(nw) / a.w, a.w);
  }
  std::sort(dens.begin(), dens.end(),
            [](const auto& p, const auto& q) { return p.first > q.first; });
  Rearrangement out;
  for (const auto& [v, w] : dens) {
    out.values.push_back(v);
    out.widths.push_back(w);
    out.mu_total += w;
  }
  out.nu_variation = nu.total_variation();
  return out;
}

// --- example generators -------------------------------------------------

// Uniform measure on the level-`level` self-similar Cantor set in R^d
// (product construction; `ratio` is the kept-interval length, 1/3 for
// middle thirds, 1/4 for middle halves).
inline DiscreteSignedMeasure generate_cantor(int level, int d,
                                             double ratio = 1.0 / 3.0) {
  if (level < 0 || d < 1 || ratio <= 0.0 || ratio >= 0.5)
    throw parameter_error("generate_cantor: bad parameters");
  std::vector<double> coords;  // 1D left endpoints
  const std::size_t n1 = std::size_t{1} << level;
  coords.reserve(n1);
  for (std::size_t mask = 0; mask < n1; ++mask) {
    double x = 0.0;
    double step = 1.0 - ratio;
    for (int i = 0; i < level; ++i) {
      if (mask >> i & 1) x += step;
      step *= ratio;
    }
    coords.push_back(x);
  }
  std::sort(coords.begin(), coords.end());
  DiscreteSignedMeasure mu;
  mu.ambient_dim = d;
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= n1;
  const double w = 1.0 / static_cast<double>(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Point p(d);
    for (int j = 0; j < d; ++j) p[j] = coords[idx[j]];
    mu.atoms.push_back({std::move(p), w});
    for (int j = 0; j < d; ++j) {
      if (++idx[j] < n1) break;
      idx[j] = 0;
    }
  }
  return mu;
}

inline double cantor_resolution(int level, int d, double ratio = 1.0 / 3.0) {
  return std::pow(ratio, level) * std::sqrt(static_cast<double>(d));
}

// Discretization of |x|^{-beta} dx on (0, 1]: atoms at k/n with weight
// (k/n)^{-beta} / n. Integrable only for beta < 1.
inline DiscreteSignedMeasure generate_power_law(double beta, int n) {
  if (beta >= 1.0)
    throw parameter_error("generate_power_law: beta >= 1 is non-integrable");
  if (n < 1) throw parameter_error("generate_power_law: n < 1");
  DiscreteSignedMeasure mu;
  mu.ambient_dim = 1;
  for (int k = 1; k <= n; ++k) {
    const double x = static_cast<double>(k) / n;
    mu.atoms.push_back({{x}, std::pow(x, -beta) / n});
  }
  return mu;
}

// One measure per axis: the m_j-th order forward differences of the
// grid samples along axis j, boundary rows trimmed. Weights are raw
// differences (not divided by h^m) so the object is a measure.
inline std::vector<DiscreteSignedMeasure> generate_grid_gradient(
    const std::vector<double>& f_samples, const std::vector<int>& grid_shape,
    const std::vector<int>& orders, double h) {
  const int d = static_cast<int>(grid_shape.size());
  if (static_cast<int>(orders.size()) != d)
    throw parameter_error("generate_grid_gradient: orders/shape mismatch");
  std::size_t total = 1;
  std::vector<std::size_t> stride(d);
  for (int j = 0; j < d; ++j) {
    stride[j] = total;
    total *= grid_shape[j];
  }
  if (f_samples.size() != total)
    throw parameter_error("generate_grid_gradient: sample count mismatch");

  std::vector<DiscreteSignedMeasure> comps;
  for (int axis = 0; axis < d; ++axis) {
    const int m = orders[axis];
    DiscreteSignedMeasure comp;
    comp.ambient_dim = d;
    std::vector<int> idx(d, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      if (idx[axis] + m < grid_shape[axis]) {
        double w = 0.0;
        double binom = 1.0;
        for (int k = 0; k <= m; ++k) {
          const double sign = ((m - k) % 2 == 0) ? 1.0 : -1.0;
          w += sign * binom * f_samples[flat + k * stride[axis]];
          binom = binom * (m - k) / (k + 1);
        }
        Point p(d);
        for (int j = 0; j < d; ++j) p[j] = idx[j] * h;
        if (w != 0.0) comp.atoms.push_back({std::move(p), w});
      }
      for (int j = 0; j < d; ++j) {
        if (++idx[j] < grid_shape[j]) break;
        idx[j] = 0;
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

// n atoms uniform in [0,1]^d; each weight is uniform in (0,1] and flips
// sign with probability sign_mix.
inline DiscreteSignedMeasure generate_random(std::uint64_t seed, int n, int d,
                                             double sign_mix) {
  DiscreteSignedMeasure mu;
  mu.ambient_dim = d;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (int j = 0; j < d; ++j) p[j] = uni(rng);
    double w = uni(rng) + 1e-9;
    if (uni(rng) < sign_mix) w = -w;
    mu.atoms.push_back({std::move(p), w});
  }
  return mu;
}

}  // namespace meas
}  // namespace frostman
