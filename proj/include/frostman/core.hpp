#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace frostman {

// Coordinates are dimensionless; a point is its coordinate vector.
using Point = std::vector<double>;

// Relative tolerance for membership tests at ball boundaries.
inline constexpr double kBoundaryRelTol = 1e-9;

// Smallest admissible ball radius (covering a single point needs
// arbitrarily small balls; we clamp here instead of going to zero).
inline constexpr double kRadiusFloor = 1e-12;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation's stated precondition does not hold for the given input.
struct precondition_error : error {
  using error::error;
};

// The Hausdorff budget `a` is below what the constructed cover needs.
struct budget_error : error {
  using error::error;
};

// A series or integral required to converge was found divergent.
struct divergence_error : error {
  using error::error;
};

struct parameter_error : error {
  using error::error;
};

inline double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(const Point& a, const Point& b) {
  return std::sqrt(dist2(a, b));
}

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

// Surface area of the unit sphere in R^d (omega_{d-1}).
inline double unit_sphere_area(int d) {
  return d * unit_ball_volume(d);
}

// FNV-1a, used for content hashes in run manifests.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace frostman
