#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "frostman/geometry.hpp"

using namespace frostman;

namespace {

PointCloud cloud1d(std::vector<double> xs, double res = 0.0) {
  PointCloud c;
  c.ambient_dim = 1;
  c.resolution = res;
  for (double x : xs) c.points.push_back({x});
  return c;
}

PointCloud random_cloud(std::uint64_t seed, int n, int d) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  PointCloud c;
  c.ambient_dim = d;
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (int j = 0; j < d; ++j) p[j] = uni(rng);
    c.points.push_back(p);
  }
  return c;
}

void check_net_properties(const PointCloud& cloud, const PointCloud& net,
                          double delta) {
  for (std::size_t i = 0; i < net.points.size(); ++i)
    for (std::size_t j = i + 1; j < net.points.size(); ++j)
      CHECK(dist(net.points[i], net.points[j]) > delta);
  for (const Point& p : cloud.points) {
    double best = 1e300;
    for (const Point& q : net.points) best = std::min(best, dist(p, q));
    CHECK(best <= delta);
  }
}

}  // namespace

TEST_CASE("max_separated_net basics") {
  const auto single = cloud1d({0.3});
  const auto net = geom::max_separated_net(single, 0.5);
  CHECK(net.points.size() == 1);
  CHECK(net.points[0][0] == 0.3);

  CHECK_THROWS_AS(geom::max_separated_net(cloud1d({}), 0.5),
                  precondition_error);
  CHECK_THROWS_AS(geom::max_separated_net(single, 0.0), parameter_error);
}

TEST_CASE("max_separated_net on the 11-point grid") {
  std::vector<double> xs;
  for (int i = 0; i <= 10; ++i) xs.push_back(0.1 * i);
  const auto cloud = cloud1d(xs);
  const auto net = geom::max_separated_net(cloud, 0.35);
  REQUIRE(net.points.size() == 3);
  CHECK(net.points[0][0] == doctest::Approx(0.0));
  CHECK(net.points[1][0] == doctest::Approx(0.4));
  CHECK(net.points[2][0] == doctest::Approx(0.8));
  check_net_properties(cloud, net, 0.35);
}

TEST_CASE("max_separated_net on a 2d grid with packing bound") {
  PointCloud cloud;
  cloud.ambient_dim = 2;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j)
      cloud.points.push_back({0.05 * i, 0.05 * j});
  const auto net = geom::max_separated_net(cloud, 0.3);
  check_net_properties(cloud, net, 0.3);
  const int count = geom::packing_count(net, Ball({0.5, 0.5}, 0.9), 0.3);
  CHECK(count <= 100 * 100);
  CHECK(count == static_cast<int>(net.points.size()));  // whole net inside
}

TEST_CASE("packing_count") {
  PointCloud net = cloud1d({0.0});
  CHECK(geom::packing_count(net, Ball({0.0}, 1.0)) == 1);

  // eps/3-separated net in a ball of radius eps
  const double eps = 0.3;
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(0.02 * i);
  const auto n1 = geom::max_separated_net(cloud1d(xs), eps / 3.0);
  const int c1 = geom::packing_count(n1, Ball({1.0}, eps), eps / 3.0);
  CHECK(c1 <= 100);

  // 2d: linear scan oracle
  const auto cloud2 = random_cloud(11, 400, 2);
  const auto n2 = geom::max_separated_net(cloud2, 0.1);
  const Ball b({0.4, 0.6}, 0.3);
  int oracle = 0;
  for (const Point& p : n2.points)
    if (dist(p, b.center) <= b.radius * (1.0 + kBoundaryRelTol)) ++oracle;
  CHECK(geom::packing_count(n2, b, 0.1) == oracle);
  CHECK(oracle <= 100 * 100);
}

TEST_CASE("vitali_select") {
  BallFamily one;
  one.ambient_dim = 1;
  one.balls.emplace_back(Point{0.0}, 1.0);
  CHECK(geom::vitali_select(one).balls.size() == 1);

  BallFamily two;
  two.ambient_dim = 1;
  two.balls.emplace_back(Point{0.0}, 1.0);
  two.balls.emplace_back(Point{3.0}, 1.0);
  CHECK(geom::vitali_select(two).balls.size() == 2);

  BallFamily fam;
  fam.ambient_dim = 1;
  fam.balls.emplace_back(Point{0.0}, 1.0);
  fam.balls.emplace_back(Point{0.5}, 1.0);
  fam.balls.emplace_back(Point{1.6}, 0.4);
  const auto sel = geom::vitali_select(fam);
  REQUIRE(sel.balls.size() == 2);
  CHECK(sel.balls[0].center[0] == 0.0);  // tie broken by input order
  CHECK(sel.balls[1].center[0] == 1.6);
  // tripled selected balls cover every input ball (interval arithmetic)
  for (const Ball& b : fam.balls) {
    bool covered = false;
    for (const Ball& s : sel.balls)
      if (s.center[0] - 3.0 * s.radius <= b.center[0] - b.radius &&
          b.center[0] + b.radius <= s.center[0] + 3.0 * s.radius)
        covered = true;
    CHECK(covered);
  }
}

TEST_CASE("vitali_select properties on random families") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    BallFamily fam;
    fam.ambient_dim = 2;
    for (int i = 0; i < 30; ++i)
      fam.balls.emplace_back(Point{uni(rng), uni(rng)}, 0.02 + 0.2 * uni(rng));
    const auto sel = geom::vitali_select(fam);
    for (std::size_t i = 0; i < sel.balls.size(); ++i)
      for (std::size_t j = i + 1; j < sel.balls.size(); ++j)
        CHECK(balls_disjoint(sel.balls[i], sel.balls[j]));
    // every input ball meets a selected ball of radius >= its own
    for (const Ball& b : fam.balls) {
      bool hit = false;
      for (const Ball& s : sel.balls)
        if (s.radius >= b.radius * (1.0 - kBoundaryRelTol) &&
            dist(s.center, b.center) < s.radius + b.radius)
          hit = true;
      CHECK(hit);
    }
  }
}

TEST_CASE("bounded_multiplicity_cover") {
  PointCloud pt = cloud1d({0.0});
  BallFamily fam;
  fam.ambient_dim = 1;
  fam.balls.emplace_back(Point{0.1}, 1.0);  // inner third B_{1/3}(0.1) holds 0
  auto out = geom::bounded_multiplicity_cover(pt, fam);
  CHECK(out.balls.size() == 1);
  CHECK(out.distinct_labels().size() == 1);

  // both balls needed, they intersect -> 2 labels
  PointCloud two = cloud1d({0.0, 1.0});
  BallFamily fam2;
  fam2.ambient_dim = 1;
  fam2.balls.emplace_back(Point{0.0}, 3.0);
  fam2.balls.emplace_back(Point{1.0}, 3.0);
  auto out2 = geom::bounded_multiplicity_cover(two, fam2);
  CHECK(out2.balls.size() == 2);
  CHECK(out2.distinct_labels().size() == 2);

  // hypothesis violation
  PointCloud far = cloud1d({0.0, 10.0});
  CHECK_THROWS_AS(geom::bounded_multiplicity_cover(far, fam2),
                  precondition_error);
}

TEST_CASE("bounded_multiplicity_cover on random 2d clouds") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  PointCloud cloud = random_cloud(7, 50, 2);
  BallFamily fam;
  fam.ambient_dim = 2;
  for (const Point& p : cloud.points) {
    const double r = 0.05 + 0.25 * uni(rng);
    // center offset keeps the point inside the inner third
    Point c = p;
    c[0] += (uni(rng) - 0.5) * r / 3.0;
    fam.balls.emplace_back(c, r);
  }
  const auto out = geom::bounded_multiplicity_cover(cloud, fam);
  CHECK(geom::is_supercovering(cloud, out).valid);
  // per-label pairwise disjointness oracle
  for (std::size_t i = 0; i < out.balls.size(); ++i)
    for (std::size_t j = i + 1; j < out.balls.size(); ++j)
      if (out.labels[i] == out.labels[j])
        CHECK(balls_disjoint(out.balls[i], out.balls[j]));
}

TEST_CASE("split_into_disjoint") {
  BallFamily disj;
  disj.ambient_dim = 1;
  disj.balls.emplace_back(Point{0.0}, 1.0);
  disj.balls.emplace_back(Point{5.0}, 1.0);
  CHECK(geom::split_into_disjoint(disj).distinct_labels() ==
        std::vector<int>{1});

  BallFamily inter;
  inter.ambient_dim = 1;
  inter.balls.emplace_back(Point{0.0}, 1.0);
  inter.balls.emplace_back(Point{1.0}, 1.0);
  CHECK(geom::split_into_disjoint(inter).distinct_labels() ==
        std::vector<int>{1, 2});

  // eps-balls on an eps/3-separated net need at most 100^d labels
  const double eps = 0.2;
  std::vector<double> xs;
  for (int i = 0; i <= 200; ++i) xs.push_back(0.01 * i);
  const auto net = geom::max_separated_net(cloud1d(xs), eps / 3.0);
  BallFamily c1;
  c1.ambient_dim = 1;
  for (const Point& p : net.points) c1.balls.emplace_back(p, eps);
  const auto colored = geom::split_into_disjoint(c1);
  CHECK(colored.distinct_labels().size() <= 100);
  for (std::size_t i = 0; i < colored.balls.size(); ++i)
    for (std::size_t j = i + 1; j < colored.balls.size(); ++j)
      if (colored.labels[i] == colored.labels[j])
        CHECK(balls_disjoint(colored.balls[i], colored.balls[j]));
}

TEST_CASE("ring_volume") {
  // d = 1 full ball: exact = bound = 2R
  const auto v1 = geom::ring_volume(Ring({0.0}, 2.0, 2.0), 1);
  CHECK(v1.exact == doctest::Approx(4.0));
  CHECK(v1.bound == doctest::Approx(4.0));

  const auto v2 = geom::ring_volume(Ring({0.0, 0.0}, 0.5, 1.0), 2);
  CHECK(v2.exact == doctest::Approx(M_PI * 0.75));
  CHECK(v2.bound == doctest::Approx(2.0 * M_PI * 0.5));

  const auto v3 = geom::ring_volume(Ring({0.0, 0.0, 0.0}, 0.1, 2.0), 3);
  CHECK(v3.bound == doctest::Approx(4.0 * M_PI * 4.0 * 0.1));
  CHECK(v3.exact <= v3.bound);

  CHECK_THROWS_AS(Ring({0.0}, 2.0, 1.0), parameter_error);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const double R = 0.1 + 3.0 * uni(rng);
    const double r = R * uni(rng);
    if (r <= 0.0) continue;
    const auto v = geom::ring_volume(Ring(Point(d, 0.0), r, R), d);
    CHECK(v.exact <= v.bound * (1.0 + 1e-12));
  }
}

TEST_CASE("is_supercovering") {
  BallFamily fam;
  fam.ambient_dim = 1;
  fam.balls.emplace_back(Point{0.0}, 3.0);
  CHECK(geom::is_supercovering(cloud1d({}), fam).valid);
  CHECK(geom::is_supercovering(cloud1d({0.0}), fam).valid);

  BallFamily small;
  small.ambient_dim = 1;
  small.balls.emplace_back(Point{0.0}, 2.0);
  const auto w = geom::is_supercovering(cloud1d({0.0, 1.0}), small);
  CHECK(!w.valid);
  REQUIRE(w.uncovered.has_value());
  CHECK((*w.uncovered)[0] == 1.0);
}

TEST_CASE("determinism") {
  const auto cloud = random_cloud(3, 100, 2);
  const auto n1 = geom::max_separated_net(cloud, 0.2);
  const auto n2 = geom::max_separated_net(cloud, 0.2);
  CHECK(n1.points == n2.points);
}
