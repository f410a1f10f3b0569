#include "halfspace/localization.hpp"

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "halfspace/errors.hpp"

namespace halfspace {
namespace {

// Feasibility projection onto B(w_prev, radius) intersected with the unit
// ball. Alternating projections: both balls contain w_prev (one as its
// center, one since ||w_prev|| = 1), so the intersection is nonempty and the
// alternation converges geometrically; a handful of sweeps is ample for the
// subgradient method, which only needs feasible iterates.
Vec project_feasible(Vec v, const Vec& center, double radius) {
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double to_center = (v - center).norm();
    if (to_center > radius) v = center + (v - center) * (radius / to_center);
    const double norm = v.norm();
    if (norm > 1.0) v /= norm;
    if ((v - center).norm() <= radius * (1.0 + 1e-12) && v.norm() <= 1.0 + 1e-12)
      break;
  }
  return v;
}

std::string count_message(const char* what, std::int64_t needed,
                          std::int64_t available) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%s: needed %lld draws, budget had %lld left",
                what, static_cast<long long>(needed),
                static_cast<long long>(available));
  return buf;
}

}  // namespace

UnitVector average_initializer(const LabeledSample& sample) {
  if (sample.size() < 1)
    throw DegenerateSampleError("average_initializer: empty sample");
  Vec s = Vec::Zero(sample.dim());
  for (std::int64_t i = 0; i < sample.size(); ++i)
    s += sample.labels()[i] * sample.points()[i].coords();
  if (!(s.norm() > 0.0))
    throw DegenerateSampleError(
        "average_initializer: labeled points sum to zero");
  return UnitVector(std::move(s));
}

UnitVector hinge_minimize_in_band(const LabeledSample& sample,
                                  const UnitVector& w_prev, double band,
                                  double radius, int iterations) {
  if (!(band > 0.0))
    throw InvalidArgumentError("hinge_minimize_in_band: band must be > 0");
  if (!(radius >= 0.0))
    throw InvalidArgumentError("hinge_minimize_in_band: radius must be >= 0");
  if (iterations < 1)
    throw InvalidArgumentError("hinge_minimize_in_band: iterations must be >= 1");
  if (sample.size() < 1)
    throw DegenerateSampleError("hinge_minimize_in_band: empty band sample");
  if (sample.dim() != w_prev.dim())
    throw InvalidArgumentError("hinge_minimize_in_band: dimension mismatch");
  if (radius == 0.0) return w_prev;

  const std::int64_t m = sample.size();
  const int d = sample.dim();

  // Rows a_i = y_i x_i / band, so the objective is mean(max(0, 1 - A w)).
  Eigen::MatrixXd a(m, d);
  for (std::int64_t i = 0; i < m; ++i)
    a.row(i) = (sample.labels()[i] / band) * sample.points()[i].coords();

  const auto objective = [&](const Vec& w) {
    return (1.0 - (a * w).array()).max(0.0).mean();
  };

  const Vec& center = w_prev.coords();
  Vec w = center;
  Vec best_w = w;
  double best_obj = objective(w);
  Vec tail_sum = Vec::Zero(d);
  std::int64_t tail_count = 0;

  // Classic D/(G sqrt(t)) step: diameter ~ 2 radius, subgradient norm ~ 1/band.
  const double step_scale = 2.0 * radius * band;
  for (int t = 1; t <= iterations; ++t) {
    const Vec margins = a * w;
    Vec g = Vec::Zero(d);
    for (std::int64_t i = 0; i < m; ++i)
      if (margins[i] < 1.0) g -= a.row(i).transpose();
    g /= static_cast<double>(m);
    w = project_feasible(w - (step_scale / std::sqrt(double(t))) * g, center,
                         radius);
    const double obj = objective(w);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
    }
    if (2 * t > iterations) {
      tail_sum += w;
      ++tail_count;
    }
  }

  Vec averaged = project_feasible(tail_sum / static_cast<double>(tail_count),
                                  center, radius);
  if (objective(averaged) < best_obj) best_w = std::move(averaged);
  if (!(best_w.norm() > 1e-12)) return w_prev;
  return UnitVector(std::move(best_w));
}

UnitVector abl_learn(LabelOracle& oracle, double eta,
                     const BandScheduleConfig& cfg, std::int64_t draw_budget) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw InvalidArgumentError("abl_learn: eta must be in (0, 1]");
  if (cfg.rounds < 0)
    throw InvalidArgumentError("abl_learn: rounds must be >= 0");
  if (!(cfg.initial_band > 0.0 && cfg.initial_band <= 1.0))
    throw InvalidArgumentError("abl_learn: initial_band must be in (0, 1]");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0))
    throw InvalidArgumentError("abl_learn: shrink must be in (0, 1)");
  if (cfg.samples_per_round < 1)
    throw InvalidArgumentError("abl_learn: samples_per_round must be >= 1");
  if (cfg.hinge_iterations < 1)
    throw InvalidArgumentError("abl_learn: hinge_iterations must be >= 1");
  if (draw_budget < 1)
    throw InvalidArgumentError("abl_learn: draw_budget must be >= 1");

  const int rounds =
      cfg.rounds > 0
          ? cfg.rounds
          : static_cast<int>(std::ceil(std::log2(1.0 / eta))) + 1;
  std::vector<double> radii = cfg.constraint_radius_schedule;
  if (radii.empty()) {
    for (int k = 1; k <= rounds; ++k)
      radii.push_back(M_PI * std::pow(2.0, -k));
  } else if (static_cast<int>(radii.size()) < rounds) {
    throw InvalidArgumentError(
        "abl_learn: constraint_radius_schedule shorter than the round count");
  }
  for (double r : radii)
    if (!(r > 0.0))
      throw InvalidArgumentError("abl_learn: trust radii must be > 0");

  std::int64_t left = draw_budget;
  if (left < cfg.samples_per_round)
    throw BudgetError(count_message("abl_learn initializer",
                                    cfg.samples_per_round, left));

  std::vector<UnitVector> xs;
  std::vector<double> ys;
  xs.reserve(cfg.samples_per_round);
  ys.reserve(cfg.samples_per_round);
  for (std::int64_t i = 0; i < cfg.samples_per_round; ++i) {
    auto [x, y] = oracle.draw_labeled();
    xs.push_back(std::move(x));
    ys.push_back(y);
  }
  left -= cfg.samples_per_round;
  UnitVector w = average_initializer(LabeledSample(std::move(xs), std::move(ys)));

  for (int k = 1; k <= rounds; ++k) {
    const double band = cfg.initial_band * std::pow(cfg.shrink, k);
    std::vector<UnitVector> bx;
    std::vector<double> by;
    while (static_cast<std::int64_t>(bx.size()) < cfg.samples_per_round &&
           left > 0) {
      const UnitVector& x = oracle.draw();
      --left;
      if (std::abs(x.dot(w)) <= band) {
        by.push_back(oracle.reveal());
        bx.push_back(x);
      }
    }
    if (static_cast<std::int64_t>(bx.size()) < kMinBandPoints) break;
    w = hinge_minimize_in_band(LabeledSample(std::move(bx), std::move(by)), w,
                               band, radii[k - 1], cfg.hinge_iterations);
  }
  return w;
}

}  // namespace halfspace
