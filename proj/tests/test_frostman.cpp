#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "frostman/frostman.hpp"
#include "frostman/json_io.hpp"

using namespace frostman;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

FrostmanHypothesis cantor_hypothesis(double constant = 8.0) {
  FrostmanHypothesis hyp;
  hyp.profile = RadialProfile::plateau();
  hyp.gauge_sum = RadiusGauge::power(kCantorDim);
  hyp.weight = GaugeFunction::identity(64.0);
  hyp.constant = constant;
  return hyp;
}

DiscreteSignedMeasure scaled_measure(const DiscreteSignedMeasure& mu,
                                     double c) {
  DiscreteSignedMeasure out = mu;
  for (Atom& a : out.atoms) a.w *= c;
  return out;
}

}  // namespace

TEST_CASE("frostman_sum basics") {
  DiscreteSignedMeasure delta;
  delta.ambient_dim = 1;
  delta.atoms.push_back({{0.0}, 2.0});
  BallFamily one;
  one.ambient_dim = 1;
  one.balls.emplace_back(Point{0.0}, 1.0);
  CHECK(frost::frostman_sum(delta, one, RadialProfile::plateau()) ==
        doctest::Approx(2.0));

  // signed cancellation inside the plateau
  DiscreteSignedMeasure pair;
  pair.ambient_dim = 1;
  pair.atoms.push_back({{0.0}, 1.0});
  pair.atoms.push_back({{0.1}, -1.0});
  CHECK(frost::frostman_sum(pair, one, RadialProfile::plateau()) ==
        doctest::Approx(0.0));
}

TEST_CASE("frostman_sum over the four level-2 Cantor branches") {
  // balls of radius 3^-2 centered at the block midpoints: every atom of
  // its block sits in the plateau, every other atom outside the support
  const auto mu = meas::generate_cantor(5, 1);
  const double r = std::pow(3.0, -2.0);
  BallFamily branches;
  branches.ambient_dim = 1;
  for (double left : {0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0})
    branches.balls.emplace_back(Point{left + 1.0 / 18.0}, r);
  CHECK(frost::frostman_sum(mu, branches, RadialProfile::plateau()) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frostman_sum additivity and the disjointness guard") {
  const auto mu = meas::generate_cantor(4, 1);
  BallFamily fam;
  fam.ambient_dim = 1;
  fam.balls.emplace_back(Point{0.0}, 0.05);
  fam.balls.emplace_back(Point{0.5}, 0.05);
  fam.balls.emplace_back(Point{1.0}, 0.05);
  double parts = 0.0;
  for (const Ball& b : fam.balls) {
    BallFamily single;
    single.ambient_dim = 1;
    single.balls.push_back(b);
    parts += frost::frostman_sum(mu, single, RadialProfile::plateau());
  }
  CHECK(frost::frostman_sum(mu, fam, RadialProfile::plateau()) ==
        doctest::Approx(parts).epsilon(1e-12));

  BallFamily overlap;
  overlap.ambient_dim = 1;
  overlap.balls.emplace_back(Point{0.0}, 1.0);
  overlap.balls.emplace_back(Point{0.5}, 1.0);
  CHECK_THROWS_AS(frost::frostman_sum(mu, overlap, RadialProfile::plateau()),
                  precondition_error);
}

TEST_CASE("split_by_label partitions the family") {
  BallFamily fam;
  fam.ambient_dim = 1;
  fam.balls.emplace_back(Point{0.0}, 0.1);
  fam.balls.emplace_back(Point{1.0}, 0.1);
  fam.balls.emplace_back(Point{2.0}, 0.1);
  fam.labels = {2, 1, 2};
  const auto parts = frost::split_by_label(fam);
  REQUIRE(parts.size() == 2);
  CHECK(parts.at(1).balls.size() == 1);
  CHECK(parts.at(2).balls.size() == 2);
}

TEST_CASE("adversarial_search respects a true Frostman bound") {
  const auto mu = meas::generate_cantor(6, 1);
  const double r_min = meas::cantor_resolution(6, 1);
  const auto res =
      frost::adversarial_search(mu, cantor_hypothesis(8.0), 7, 400, 6, r_min);
  CHECK(!res.hypothesis_violated);
  CHECK(res.worst_ratio > 0.02);  // the search actually probed mass
  CHECK(res.worst_ratio <= 1.0 + 1e-9);
}

TEST_CASE("adversarial_search flags a point mass") {
  DiscreteSignedMeasure dirac;
  dirac.ambient_dim = 1;
  dirac.atoms.push_back({{0.0}, 10.0});
  FrostmanHypothesis hyp;
  hyp.profile = RadialProfile::plateau();
  hyp.gauge_sum = RadiusGauge::power(1.0);
  hyp.weight = GaugeFunction::identity(10.0);
  hyp.constant = 1.0;
  const auto res = frost::adversarial_search(dirac, hyp, 1, 200, 4);
  CHECK(res.hypothesis_violated);
  CHECK(res.worst_ratio > 1.0);
  CHECK(!res.witness_family.balls.empty());
}

TEST_CASE("adversarial_search scales exactly with the measure") {
  const auto mu = meas::generate_cantor(5, 1);
  const auto hyp = cantor_hypothesis(2.0);
  const double r_min = meas::cantor_resolution(5, 1);
  const auto base = frost::adversarial_search(mu, hyp, 3, 300, 5, r_min);
  const auto tripled =
      frost::adversarial_search(scaled_measure(mu, 3.0), hyp, 3, 300, 5, r_min);
  CHECK(tripled.worst_ratio ==
        doctest::Approx(3.0 * base.worst_ratio).epsilon(1e-12));
}

TEST_CASE("adversarial_search is monotone in the iteration budget") {
  const auto mu = meas::generate_cantor(5, 1);
  const auto hyp = cantor_hypothesis(2.0);
  const auto short_run = frost::adversarial_search(mu, hyp, 11, 50, 5);
  const auto long_run = frost::adversarial_search(mu, hyp, 11, 400, 5);
  CHECK(long_run.worst_ratio >= short_run.worst_ratio - 1e-15);
  CHECK_THROWS_AS(frost::adversarial_search(mu, hyp, 1, 0, 5),
                  parameter_error);
}

TEST_CASE("tail_class_check") {
  const auto compact = frost::tail_class_check(RadialProfile::plateau(), 1.0);
  CHECK(compact.cls == frost::TailClass::little_o);
  CHECK(!compact.note.empty());

  const auto profile = RadialProfile::power_tail(1.0);
  CHECK(frost::tail_class_check(profile, 0.5).cls ==
        frost::TailClass::little_o);
  CHECK(frost::tail_class_check(profile, 1.0).cls == frost::TailClass::big_o);
  CHECK(frost::tail_class_check(profile, 1.5).cls ==
        frost::TailClass::neither);
}

TEST_CASE("certify_teor1 on the Cantor measure") {
  const auto mu = meas::generate_cantor(5, 1);
  const auto target = mu.support_cloud(meas::cantor_resolution(5, 1));
  const auto cert = frost::certify_teor1(mu, target, kCantorDim,
                                         std::pow(3.0, -3.0),
                                         cantor_hypothesis(8.0), 1);
  CHECK(cert.valid);
  CHECK(cert.bound_kind == "h-of-a");
  CHECK(cert.measured_mass == doctest::Approx(1.0));
  CHECK(cert.slack >= 1.0);
  CHECK(cert.premeasure_bound_a > 0.0);
  CHECK(cert.supercover_report.valid_supercover);
  CHECK(cert.constants.at("h_a") > 0.0);
  // every recorded per-label Frostman sum obeys the hypothesis
  REQUIRE(cert.frostman_sums_per_label.size() ==
          cert.supercover_report.per_label_sums.size());
  for (std::size_t i = 0; i < cert.frostman_sums_per_label.size(); ++i)
    CHECK(cert.frostman_sums_per_label[i] <=
          8.0 * cert.supercover_report.per_label_sums[i] * (1.0 + 1e-9) +
              1e-12);
}

TEST_CASE("certify_teor1 with no dominant mass over the target") {
  DiscreteSignedMeasure neg;
  neg.ambient_dim = 1;
  neg.atoms.push_back({{0.5}, -1.0});
  PointCloud target;
  target.ambient_dim = 1;
  target.points.push_back({0.5});
  const auto cert = frost::certify_teor1(neg, target, 1.0, 0.1,
                                         cantor_hypothesis(4.0), 1);
  CHECK(cert.valid);
  CHECK(cert.measured_mass == 0.0);
  CHECK(std::isinf(cert.slack));
  REQUIRE(!cert.notes.empty());
}

TEST_CASE("certify_teor2 on a uniform grid measure") {
  DiscreteSignedMeasure mu;
  mu.ambient_dim = 1;
  const int n = 200;
  for (int i = 0; i < n; ++i)
    mu.atoms.push_back({{static_cast<double>(i) / n}, 1.0 / n});
  const auto target = mu.support_cloud(1.0 / n);
  FrostmanHypothesis hyp;
  hyp.profile = RadialProfile::plateau();
  hyp.gauge_sum = RadiusGauge::power(1.0);
  hyp.weight = GaugeFunction::identity(1e4);
  hyp.constant = 4.0;
  const auto cert = frost::certify_teor2(mu, target, RadiusGauge::power(1.0),
                                         0.1, hyp, 1);
  CHECK(cert.valid);
  CHECK(cert.measured_mass == doctest::Approx(1.0));
  CHECK(cert.slack >= 1.0);
  CHECK(cert.constants.at("C_1") <= cert.constants.at("C_1_bound"));
  CHECK(cert.constants.at("eps_neg") == 0.0);
}

TEST_CASE("certify_teor2 with only negative mass") {
  DiscreteSignedMeasure neg;
  neg.ambient_dim = 1;
  neg.atoms.push_back({{0.3}, -2.0});
  PointCloud target;
  target.ambient_dim = 1;
  target.points.push_back({0.3});
  const auto cert = frost::certify_teor2(neg, target, RadiusGauge::power(1.0),
                                         0.1, cantor_hypothesis(4.0), 1);
  CHECK(cert.valid);
  CHECK(cert.measured_mass == 0.0);
  CHECK(std::isinf(cert.slack));
}

TEST_CASE("certify_teor3 reduces to teor1 for compact profiles") {
  const auto mu = meas::generate_cantor(4, 1);
  const auto target = mu.support_cloud(meas::cantor_resolution(4, 1));
  const auto hyp = cantor_hypothesis(8.0);
  const auto c3 = frost::certify_teor3(mu, target, kCantorDim,
                                       std::pow(3.0, -2.0), hyp, 1);
  const auto c1 = frost::certify_teor1(mu, target, kCantorDim,
                                       std::pow(3.0, -2.0), hyp, 1);
  CHECK(c3.bound_kind == "tail");
  CHECK(c3.constants.at("delta_eps") == 0.0);
  CHECK(c3.final_bound == doctest::Approx(c1.final_bound).epsilon(1e-12));
  bool noted = false;
  for (const auto& n : c3.notes)
    if (n.find("compact profile") != std::string::npos) noted = true;
  CHECK(noted);
}

TEST_CASE("certify_teor3 with decaying and borderline tails") {
  const auto mu = meas::generate_cantor(4, 1);
  const auto target = mu.support_cloud(meas::cantor_resolution(4, 1));
  FrostmanHypothesis hyp;
  hyp.profile = RadialProfile::power_tail(kCantorDim + 2.0);
  hyp.gauge_sum = RadiusGauge::power(kCantorDim);
  hyp.weight = GaugeFunction::identity(64.0);
  hyp.constant = 16.0;
  const auto cert =
      frost::certify_teor3(mu, target, kCantorDim, 0.1, hyp, 1);
  CHECK(cert.valid);
  CHECK(cert.constants.at("delta_eps") > 0.0);
  CHECK(std::isfinite(cert.final_bound));
  CHECK(cert.constants.at("tail_class") == 1.0);  // little-o
  for (const auto& n : cert.notes)
    CHECK(n.find("big-O tail") == std::string::npos);

  // exactly critical tail: certified, but flagged as big-O only
  FrostmanHypothesis border = hyp;
  border.profile = RadialProfile::power_tail(kCantorDim);
  const auto bc =
      frost::certify_teor3(mu, target, kCantorDim, 0.1, border, 1);
  bool flagged = false;
  for (const auto& n : bc.notes)
    if (n.find("big-O tail") != std::string::npos) flagged = true;
  CHECK(flagged);
  CHECK(bc.constants.at("tail_class") == 0.0);

  // growing tail is rejected outright
  FrostmanHypothesis bad = hyp;
  bad.profile = RadialProfile::power_tail(kCantorDim - 0.3);
  CHECK_THROWS_AS(frost::certify_teor3(mu, target, kCantorDim, 0.1, bad, 1),
                  precondition_error);
}

TEST_CASE("geometric series of weights is controlled by the Dini integral") {
  // sum_{j>=1} g(q^j a) <= h(a) / log(1/q) for regular weights
  for (double q : {2.0 / 3.0, 8.0 / 9.0}) {
    std::vector<GaugeFunction> weights = {GaugeFunction::power(0.5),
                                          GaugeFunction::power(1.0),
                                          GaugeFunction::log_power(1.0, 1.0)};
    for (const auto& g : weights) {
      const double a = 0.9 * g.t_max;
      const auto dini = gauge::dini_transform(g, g.t_max, 1e-10);
      double series = 0.0;
      double t = a;
      for (int j = 1; j < 4000; ++j) {
        t *= q;
        const double term = g(t);
        series += term;
        if (term < 1e-17) break;
      }
      CHECK(series <= dini.h(a) / std::log(1.0 / q) * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("certificates serialize byte-identically across runs") {
  const auto mu = meas::generate_cantor(4, 1);
  const auto target = mu.support_cloud(meas::cantor_resolution(4, 1));
  const auto hyp = cantor_hypothesis(8.0);
  const auto c1 = frost::certify_teor1(mu, target, kCantorDim, 0.1, hyp, 9);
  const auto c2 = frost::certify_teor1(mu, target, kCantorDim, 0.1, hyp, 9);
  CHECK(io::to_json(c1).dump(2) == io::to_json(c2).dump(2));
}
