#include "halfspace/localization.hpp"

#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <vector>

#include "halfspace/errors.hpp"
#include "halfspace/geometry.hpp"
#include "halfspace/rng.hpp"

using namespace halfspace;

namespace {

UnitVector basis_vector(int d, int axis) {
  Vec v = Vec::Zero(d);
  v[axis] = 1.0;
  return UnitVector(std::move(v));
}

// A unit vector at the requested angle from w, leaning towards a fresh
// random direction.
UnitVector tilted(const UnitVector& w, double theta, Rng& rng) {
  const int d = w.dim();
  Vec g(d);
  for (int i = 0; i < d; ++i) g[i] = rng.gaussian();
  g -= g.dot(w.coords()) * w.coords();
  g.normalize();
  return UnitVector(std::cos(theta) * w.coords() + std::sin(theta) * g);
}

LabeledSample realizable_sample(const UnitVector& w_star, int n, int seed) {
  const auto pts = sample_uniform_sphere(w_star.dim(), n, seed);
  std::vector<double> ys;
  ys.reserve(pts.size());
  for (const auto& x : pts) ys.push_back(x.dot(w_star) > 0.0 ? 1.0 : -1.0);
  return LabeledSample(pts, std::move(ys));
}

// Points restricted to {|<w_center, x>| <= band}, labeled by w_star.
LabeledSample band_sample(const UnitVector& w_center, const UnitVector& w_star,
                          double band, int n, int seed) {
  std::vector<UnitVector> xs;
  std::vector<double> ys;
  Rng rng(seed);
  const int d = w_center.dim();
  while (static_cast<int>(xs.size()) < n) {
    Vec g(d);
    for (int i = 0; i < d; ++i) g[i] = rng.gaussian();
    UnitVector x{std::move(g)};
    if (std::abs(x.dot(w_center)) > band) continue;
    ys.push_back(x.dot(w_star) > 0.0 ? 1.0 : -1.0);
    xs.push_back(std::move(x));
  }
  return LabeledSample(std::move(xs), std::move(ys));
}

}  // namespace

TEST_CASE("average initializer recovers the target direction from labels") {
  const UnitVector w_star = basis_vector(3, 0);
  const UnitVector w = average_initializer(realizable_sample(w_star, 10000, 61));
  CHECK(angle(w, w_star) <= 0.15);
}

TEST_CASE("average initializer degenerate and trivial cases") {
  const UnitVector x = UnitVector([] {
    Vec v(4);
    v << 0.5, -0.5, 0.5, 0.5;
    return v;
  }());

  // a single positively labeled point is returned as-is
  const UnitVector one = average_initializer(LabeledSample({x}, {1.0}));
  CHECK((one.coords() - x.coords()).norm() < 1e-14);

  // flipping every label flips the result exactly
  const LabeledSample s = realizable_sample(basis_vector(4, 1), 500, 62);
  std::vector<double> flipped = s.labels();
  for (double& y : flipped) y = -y;
  const UnitVector a = average_initializer(s);
  const UnitVector b = average_initializer(LabeledSample(s.points(), std::move(flipped)));
  CHECK((a.coords().array() == (-b.coords()).array()).all());

  // exactly cancelling labels sum to zero
  CHECK_THROWS_AS(average_initializer(LabeledSample({x, x}, {1.0, -1.0})),
                  DegenerateSampleError);
  CHECK_THROWS_AS(average_initializer(LabeledSample({}, {})),
                  DegenerateSampleError);
}

TEST_CASE("hinge minimization: degenerate inputs and the radius-zero point set") {
  const UnitVector w = basis_vector(5, 0);
  const LabeledSample s = realizable_sample(w, 50, 63);

  const UnitVector same = hinge_minimize_in_band(s, w, 0.5, 0.0);
  CHECK((same.coords().array() == w.coords().array()).all());

  CHECK_THROWS_AS(hinge_minimize_in_band(s, w, 0.0, 0.1), InvalidArgumentError);
  CHECK_THROWS_AS(hinge_minimize_in_band(s, w, 0.5, -0.1), InvalidArgumentError);
  CHECK_THROWS_AS(hinge_minimize_in_band(s, w, 0.5, 0.1, 0), InvalidArgumentError);
  CHECK_THROWS_AS(hinge_minimize_in_band(s, basis_vector(4, 0), 0.5, 0.1),
                  InvalidArgumentError);
  CHECK_THROWS_AS(hinge_minimize_in_band(LabeledSample({}, {}), w, 0.5, 0.1),
                  DegenerateSampleError);
}

TEST_CASE("hinge minimization improves the angle on noiseless band data") {
  Rng rng(640);
  for (int trial = 0; trial < 20; ++trial) {
    const UnitVector w_star = sample_uniform_sphere(10, 1, 700 + trial)[0];
    const UnitVector w_prev = tilted(w_star, 0.2, rng);
    const LabeledSample s = band_sample(w_prev, w_star, 0.3, 1000, 800 + trial);
    const UnitVector w = hinge_minimize_in_band(s, w_prev, 0.3, 0.3);
    CHECK(std::abs(w.coords().norm() - 1.0) < 1e-12);
    CHECK(angle(w, w_star) < angle(w_prev, w_star));
  }
}

TEST_CASE("hinge minimization follows uniformly positive labels") {
  const UnitVector w_prev = basis_vector(8, 0);
  const auto pts = sample_uniform_sphere(8, 3000, 65);
  std::vector<UnitVector> xs;
  for (const auto& x : pts)
    if (std::abs(x.dot(w_prev)) <= 0.5) xs.push_back(x);
  Vec mean = Vec::Zero(8);
  for (const auto& x : xs) mean += x.coords();
  const std::vector<double> ys(xs.size(), 1.0);
  const UnitVector w =
      hinge_minimize_in_band(LabeledSample(xs, ys), w_prev, 0.5, 1.0);
  CHECK(w.coords().dot(mean.normalized()) > 0.0);
}

TEST_CASE("localized learning drives the realizable error far down") {
  const UnitVector w_star = sample_uniform_sphere(5, 1, 66)[0];
  LabelOracle oracle(NoiseModel::realizable(w_star), 67);
  const UnitVector w = abl_learn(oracle, 0.01);
  CHECK(std::abs(w.coords().norm() - 1.0) < 1e-12);
  CHECK(disagreement_mass(w, w_star) <= 0.02);
}

TEST_CASE("localized learning tolerates a one-percent flip rate") {
  const UnitVector w_star = sample_uniform_sphere(10, 1, 68)[0];
  LabelOracle oracle(NoiseModel::rcn(w_star, 0.01), 69);
  const UnitVector w = abl_learn(oracle, 0.05);
  CHECK(disagreement_mass(w, w_star) <= 0.15);
}

TEST_CASE("label counts grow logarithmically in the noise target") {
  const UnitVector w_star = sample_uniform_sphere(5, 1, 70)[0];
  BandScheduleConfig cfg;
  cfg.samples_per_round = 200;

  LabelOracle coarse(NoiseModel::rcn(w_star, 0.005), 71);
  abl_learn(coarse, 1e-2, cfg);
  LabelOracle fine(NoiseModel::rcn(w_star, 0.005), 71);
  abl_learn(fine, 1e-3, cfg);

  // every round filled its quota: labels = (rounds + 1) * samples_per_round
  CHECK(coarse.labels_used() == 200 * (1 + 8));
  CHECK(fine.labels_used() == 200 * (1 + 11));
  CHECK(static_cast<double>(fine.labels_used()) / coarse.labels_used() <= 2.0);
  CHECK(fine.labels_used() < fine.draws_used());
}

TEST_CASE("the median angle shrinks round over round") {
  // Band widths scaled to 1/sqrt(d) keep every round informative (the label
  // carries directional information only once the band coordinate stops
  // dominating it), and trust radii near the current error scale keep a noisy
  // round from undoing earlier progress.
  const int kSeeds = 20, kRounds = 5;
  std::vector<std::vector<double>> angles(kRounds + 1);
  for (int s = 0; s < kSeeds; ++s) {
    const UnitVector w_star = sample_uniform_sphere(10, 1, 7200 + s)[0];
    const NoiseModel model = NoiseModel::rcn(w_star, 0.01);

    // a run stopped after k rounds reproduces the k-th iterate of the full
    // schedule (the draw stream and the per-round parameters only depend on
    // the round index), so the trajectory comes from reruns of growing length
    for (int k = 0; k <= kRounds; ++k) {
      LabelOracle oracle(model, 7300 + s);
      UnitVector w = basis_vector(10, 0);
      if (k == 0) {
        std::vector<UnitVector> xs;
        std::vector<double> ys;
        for (int i = 0; i < 600; ++i) {
          auto [x, y] = oracle.draw_labeled();
          xs.push_back(std::move(x));
          ys.push_back(y);
        }
        w = average_initializer(LabeledSample(std::move(xs), std::move(ys)));
      } else {
        BandScheduleConfig cfg;
        cfg.rounds = k;
        cfg.samples_per_round = 600;
        cfg.initial_band = 1.0 / std::sqrt(10.0);
        for (int j = 1; j <= k; ++j)
          cfg.constraint_radius_schedule.push_back(0.5 * std::pow(2.0, -j));
        w = abl_learn(oracle, 0.1, cfg);
      }
      angles[k].push_back(angle(w, w_star));
    }
  }
  std::vector<double> medians;
  for (auto& column : angles) {
    std::sort(column.begin(), column.end());
    medians.push_back((column[kSeeds / 2 - 1] + column[kSeeds / 2]) / 2.0);
  }
  for (int k = 0; k < kRounds; ++k) CHECK(medians[k + 1] <= medians[k]);
}

TEST_CASE("draw budgets: hard failure before the initializer, soft stop after") {
  const UnitVector w_star = basis_vector(5, 0);
  LabelOracle starved(NoiseModel::realizable(w_star), 73);
  CHECK_THROWS_AS(abl_learn(starved, 0.1, {}, 10), BudgetError);

  BandScheduleConfig cfg;
  cfg.samples_per_round = 100;
  LabelOracle tight(NoiseModel::realizable(w_star), 74);
  const UnitVector w = abl_learn(tight, 0.1, cfg, 150);
  CHECK(std::abs(w.coords().norm() - 1.0) < 1e-12);
  CHECK(tight.draws_used() <= 150);
}

TEST_CASE("schedule validation rejects malformed configs") {
  const UnitVector w_star = basis_vector(4, 0);
  LabelOracle oracle(NoiseModel::realizable(w_star), 75);

  CHECK_THROWS_AS(abl_learn(oracle, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(abl_learn(oracle, 1.5), InvalidArgumentError);

  BandScheduleConfig cfg;
  cfg.shrink = 1.0;
  CHECK_THROWS_AS(abl_learn(oracle, 0.1, cfg), InvalidArgumentError);
  cfg = {};
  cfg.samples_per_round = 0;
  CHECK_THROWS_AS(abl_learn(oracle, 0.1, cfg), InvalidArgumentError);
  cfg = {};
  cfg.rounds = 3;
  cfg.constraint_radius_schedule = {0.5, 0.5};
  CHECK_THROWS_AS(abl_learn(oracle, 0.1, cfg), InvalidArgumentError);
  cfg.constraint_radius_schedule = {0.5, 0.5, -1.0};
  CHECK_THROWS_AS(abl_learn(oracle, 0.1, cfg), InvalidArgumentError);
  cfg = {};
  cfg.initial_band = 0.0;
  CHECK_THROWS_AS(abl_learn(oracle, 0.1, cfg), InvalidArgumentError);
}

TEST_CASE("the full learner is a deterministic function of the oracle seed") {
  const UnitVector w_star = sample_uniform_sphere(6, 1, 76)[0];
  const NoiseModel model = NoiseModel::rcn(w_star, 0.02);
  LabelOracle o1(model, 77);
  LabelOracle o2(model, 77);
  const UnitVector w1 = abl_learn(o1, 0.1);
  const UnitVector w2 = abl_learn(o2, 0.1);
  CHECK((w1.coords().array() == w2.coords().array()).all());
  CHECK(o1.draws_used() == o2.draws_used());
  CHECK(o1.labels_used() == o2.labels_used());
}
