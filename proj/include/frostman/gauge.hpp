#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "frostman/core.hpp"
#include "frostman/quadrature.hpp"

namespace frostman {

// A weight function g or gauge f: nondecreasing, g(0+) = 0, defined on
// (0, t_max]. Closed forms plus a tabulated kind with log-linear
// interpolation (power law between samples).
struct GaugeFunction {
  enum class Kind { power, log_power, table };

  Kind kind = Kind::power;
  // power:     t^{params[0]}
  // log_power: t^{params[0]} * log(1/t)^{params[1]}
  std::vector<double> params;
  double t_max = 1.0;
  std::vector<double> table_t;  // increasing, positive
  std::vector<double> table_g;  // positive

  static GaugeFunction power(double beta, double t_max = 1.0) {
    GaugeFunction g;
    g.kind = Kind::power;
    g.params = {beta};
    g.t_max = t_max;
    return g;
  }

  static GaugeFunction log_power(double beta, double gamma,
                                 double t_max = 1.0 / M_E) {
    GaugeFunction g;
    g.kind = Kind::log_power;
    g.params = {beta, gamma};
    g.t_max = std::min(t_max, 1.0 / M_E);
    return g;
  }

  static GaugeFunction tabulated(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size() || t.size() < 2)
      throw parameter_error("tabulated gauge: need matching samples, >= 2");
    GaugeFunction g;
    g.kind = Kind::table;
    g.table_t = std::move(t);
    g.table_g = std::move(v);
    g.t_max = g.table_t.back();
    return g;
  }

  static GaugeFunction identity(double t_max = 1.0) { return power(1.0, t_max); }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind) {
      case Kind::power:
        return std::pow(t, params[0]);
      case Kind::log_power:
        return std::pow(t, params[0]) * std::pow(std::log(1.0 / t), params[1]);
      case Kind::table: {
        if (t <= table_t.front())
          return table_g.front() *
                 std::pow(t / table_t.front(),
                          slope(table_t[0], table_t[1], table_g[0], table_g[1]));
        if (t >= table_t.back()) return table_g.back();
        auto it = std::upper_bound(table_t.begin(), table_t.end(), t);
        const std::size_t i = (it - table_t.begin()) - 1;
        const double s =
            slope(table_t[i], table_t[i + 1], table_g[i], table_g[i + 1]);
        return table_g[i] * std::pow(t / table_t[i], s);
      }
    }
    return 0.0;
  }

 private:
  static double slope(double t0, double t1, double g0, double g1) {
    return std::log(g1 / g0) / std::log(t1 / t0);
  }
};

namespace gauge {

struct RegularityCheck {
  bool is_regular = false;
  double ratio_lo = 0.0;  // min of g(cx)/g(x) over the grid
  double ratio_hi = 0.0;  // max
};

// Samples the defining property g(x) =~ g(cx) on the grid. This is a
// sampled verification, not a proof; the grid is part of the fixture.
inline RegularityCheck check_regular(const GaugeFunction& g, double c,
                                     const std::vector<double>& grid) {
  if (c <= 1.0) throw parameter_error("check_regular: need c > 1");
  if (grid.empty()) throw parameter_error("check_regular: empty grid");
  RegularityCheck out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double prev = -1.0;
  bool monotone = true;
  for (double x : grid) {
    const double gx = g(x);
    if (gx <= 0.0)
      throw parameter_error("check_regular: degenerate gauge, g = 0 at x > 0");
    if (gx < prev * (1.0 - kBoundaryRelTol)) monotone = false;
    prev = gx;
    if (c * x <= g.t_max * (1.0 + kBoundaryRelTol)) {
      const double ratio = g(std::min(c * x, g.t_max)) / gx;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  out.ratio_lo = lo;
  out.ratio_hi = hi;
  const bool vanishes = g(grid.front()) < 0.5 * g(g.t_max);
  out.is_regular = monotone && std::isfinite(hi) && lo > 0.0 && vanishes;
  return out;
}

namespace detail {

// Slab-by-slab integration of w(t)/t over dyadic scales t in
// (0, x_max]. Divergence is declared when the running window of 10
// consecutive slab integrals fails to drop below the Cauchy tolerance
// within the scale budget, or when the slabs grow.
struct DyadicIntegral {
  std::vector<double> slab;   // slab[k] = integral over [x 2^{-k-1}, x 2^{-k}]
  double tail = 0.0;          // geometric estimate below the deepest node
  double total = 0.0;
  double tail_ratio = 0.5;    // measured decay ratio of the deepest slabs
};

inline DyadicIntegral integrate_dyadic(const std::function<double(double)>& w,
                                       double x_max, double rel_tol,
                                       int max_scales = 900,
                                       double cauchy_tol = 1e-3) {
  DyadicIntegral out;
  const auto f = [&](double t) { return w(t) / t; };
  double acc = 0.0;
  std::deque<double> window;
  int grow_streak = 0;
  for (int k = 0; k < max_scales; ++k) {
    const double hi = x_max * std::pow(0.5, k);
    const double lo = 0.5 * hi;
    if (lo <= 0.0) break;
    const double rough = std::abs(f(0.5 * (lo + hi))) * (hi - lo);
    const double tol = std::max(1e-300, 0.125 * rel_tol * std::max(rough, acc));
    const double I = quad::integrate(f, lo, hi, tol);
    out.slab.push_back(I);
    acc += I;
    window.push_back(I);
    if (window.size() > 10) window.pop_front();

    if (k > 0) {
      grow_streak = (I > out.slab[k - 1] * (1.0 + 1e-9)) ? grow_streak + 1 : 0;
      if (grow_streak >= 10 || I > 1e30)
        throw divergence_error("Dini integral diverges: growing slab integrals");
      const double ratio = I / out.slab[k - 1];
      if (k >= 25 && ratio < 0.999 && I > 0.0) {
        const double tail = I * ratio / (1.0 - ratio);
        if (tail <= 0.1 * rel_tol * acc || I < 1e-280) {
          out.tail = tail;
          out.tail_ratio = ratio;
          out.total = acc + tail;
          return out;
        }
      }
      if (I == 0.0) {
        out.total = acc;
        return out;
      }
    }
  }
  double wsum = 0.0;
  for (double v : window) wsum += v;
  if (wsum >= cauchy_tol)
    throw divergence_error(
        "Dini integral diverges: slab Cauchy test failed at scale budget");
  const double ratio = out.slab.back() / out.slab[out.slab.size() - 2];
  if (ratio >= 0.999)
    throw divergence_error("Dini integral diverges: no geometric tail decay");
  out.tail = out.slab.back() * ratio / (1.0 - ratio);
  out.tail_ratio = ratio;
  out.total = acc + out.tail;
  return out;
}

}  // namespace detail

// h(x) = int_0^x g(t)/t dt, tabulated on dyadic nodes with exact slab
// refinement at evaluation time.
struct DiniTransform {
  GaugeFunction source;
  double x_max = 1.0;
  double rel_tol = 1e-9;
  std::vector<double> nodes;   // x_max * 2^{-k}
  std::vector<double> values;  // h at nodes
  double tail_ratio = 0.5;

  double h(double x) const {
    if (x <= 0.0) return 0.0;
    if (x > x_max * (1.0 + kBoundaryRelTol))
      throw parameter_error("DiniTransform: x beyond tabulated range");
    x = std::min(x, x_max);
    const auto f = [this](double t) { return source(t) / t; };
    if (x < nodes.back()) {
      // below the deepest node: power-law extrapolation from the tail
      const double beta = -std::log2(tail_ratio);
      return values.back() * std::pow(x / nodes.back(), beta);
    }
    std::size_t k = std::min<std::size_t>(
        nodes.size() - 1,
        static_cast<std::size_t>(std::floor(std::log2(x_max / x))) + 1);
    while (nodes[k] > x * (1.0 + kBoundaryRelTol) && k + 1 < nodes.size()) ++k;
    const double base = nodes[k];
    if (x <= base * (1.0 + kBoundaryRelTol)) return values[k];
    const double tol = std::max(1e-300, 0.125 * rel_tol * values[k]);
    return values[k] + quad::integrate(f, base, x, tol);
  }
};

inline DiniTransform dini_transform(const GaugeFunction& g, double x_max,
                                    double rel_tol) {
  if (x_max <= 0.0) throw parameter_error("dini_transform: x_max <= 0");
  DiniTransform out;
  out.source = g;
  out.x_max = x_max;
  out.rel_tol = rel_tol;
  const auto d = detail::integrate_dyadic([&g](double t) { return g(t); },
                                          x_max, rel_tol);
  // cumulative sums from the deepest slab upward
  const std::size_t n = d.slab.size();
  out.nodes.resize(n + 1);
  out.values.resize(n + 1);
  out.nodes[n] = x_max * std::pow(0.5, static_cast<double>(n));
  out.values[n] = d.tail;
  for (std::size_t k = n; k-- > 0;) {
    out.nodes[k] = x_max * std::pow(0.5, static_cast<double>(k));
    out.values[k] = out.values[k + 1] + d.slab[k];
  }
  out.tail_ratio = d.tail_ratio;
  return out;
}

struct DFallingCheck {
  bool is_d_falling = false;
  double comparability_lo = 0.0;  // min of x^{d-1} int_0^x f/t^d / f(x)
  double comparability_hi = 0.0;
  std::string reason;
};

// Tests the two defining conditions of a d-falling gauge on the grid:
// convergence of int_0^1 f(t)/t^d dt and the comparability
// x^{d-1} int_0^x f(t)/t^d dt =~ f(x).
inline DFallingCheck check_d_falling(const GaugeFunction& f, int d,
                                     const std::vector<double>& grid) {
  if (grid.empty()) throw parameter_error("check_d_falling: empty grid");
  DFallingCheck out;
  const auto reduced = [&f, d](double t) {
    return f(t) / std::pow(t, d - 1);
  };
  DiniTransform hd;
  try {
    GaugeFunction wrapped = f;  // evaluated through the reduced weight below
    const auto dy = detail::integrate_dyadic(reduced, f.t_max, 1e-7);
    hd.source = wrapped;
    hd.x_max = f.t_max;
    hd.rel_tol = 1e-7;
    const std::size_t n = dy.slab.size();
    hd.nodes.resize(n + 1);
    hd.values.resize(n + 1);
    hd.nodes[n] = f.t_max * std::pow(0.5, static_cast<double>(n));
    hd.values[n] = dy.tail;
    for (std::size_t k = n; k-- > 0;) {
      hd.nodes[k] = f.t_max * std::pow(0.5, static_cast<double>(k));
      hd.values[k] = hd.values[k + 1] + dy.slab[k];
    }
    hd.tail_ratio = dy.tail_ratio;
  } catch (const divergence_error& e) {
    out.is_d_falling = false;
    out.reason = e.what();
    return out;
  }
  // hd tabulates int_0^x f(t)/t^d dt at dyadic nodes; refine by slabs of
  // the reduced weight.
  const auto hd_at = [&](double x) {
    // nearest tabulated node below x, then one exact slab
    if (x <= 0.0) return 0.0;
    x = std::min(x, hd.x_max);
    std::size_t k = 0;
    while (k + 1 < hd.nodes.size() && hd.nodes[k] > x * (1.0 + kBoundaryRelTol))
      ++k;
    if (hd.nodes[k] > x) {
      const double beta = -std::log2(hd.tail_ratio);
      return hd.values.back() * std::pow(x / hd.nodes.back(), beta);
    }
    const auto w = [&](double t) { return reduced(t) / t; };
    const double tol = std::max(1e-300, 1e-8 * std::max(hd.values[k], 1e-30));
    return hd.values[k] + quad::integrate(w, hd.nodes[k], x, tol);
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double x : grid) {
    const double fx = f(x);
    if (fx <= 0.0)
      throw parameter_error("check_d_falling: degenerate gauge on grid");
    const double ratio = std::pow(x, d - 1) * hd_at(x) / fx;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  out.comparability_lo = lo;
  out.comparability_hi = hi;
  out.is_d_falling = std::isfinite(hi) && lo > 0.0;
  if (!out.is_d_falling) out.reason = "comparability ratio unbounded on grid";
  return out;
}

}  // namespace gauge
}  // namespace frostman
