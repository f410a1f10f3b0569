#pragma once

#include <cstdint>
#include <vector>

#include "halfspace/evaluation.hpp"
#include "halfspace/geometry.hpp"
#include "halfspace/regression.hpp"

namespace halfspace {

// Schedule for the band-localized learner: round k works inside the band
// {|<w_k, x>| <= initial_band * shrink^k} and trusts the previous iterate up
// to constraint_radius_schedule[k-1].
struct BandScheduleConfig {
  // 0 means "derive from the noise target": ceil(log2(1/eta)) + 1 rounds.
  int rounds = 0;
  double initial_band = 1.0;
  double shrink = 0.5;
  // Empty means the default trust radii pi * 2^-k for round k = 1, 2, ...
  // When set explicitly it must cover every round.
  std::vector<double> constraint_radius_schedule;
  std::int64_t samples_per_round = 500;
  // Subgradient iterations per hinge solve.
  int hinge_iterations = 1000;
};

// Cap on unlabeled draws a single abl_learn call may spend.
inline constexpr std::int64_t kDefaultAblDrawBudget = 10'000'000;

// A band round that cannot gather this many points within the draw budget
// ends the schedule early (the current iterate is returned as-is).
inline constexpr std::int64_t kMinBandPoints = 50;

// normalize(sum_i y_i x_i) -- the crude first approximation: under the uniform
// marginal E[y x] is proportional to the target direction.
UnitVector average_initializer(const LabeledSample& sample);

// Approximately minimizes the band-scaled empirical hinge loss
//
//   (1/m) sum_i max(0, 1 - y_i <w, x_i> / band)
//
// over {||w - w_prev|| <= radius} intersected with the unit ball, then
// normalizes the minimizer back to the sphere. The caller is responsible for
// having restricted the sample to {|<w_prev, x>| <= band}. radius = 0 is the
// degenerate single-point feasible set and returns w_prev unchanged.
// Deterministic: projected subgradient with iterate averaging, fixed schedule.
UnitVector hinge_minimize_in_band(const LabeledSample& sample,
                                  const UnitVector& w_prev, double band,
                                  double radius, int iterations = 1000);

// Label-efficient localized learning: an averaging start on fully labeled
// draws, then one hinge minimization per band round. Labels are revealed only
// for points that land in the current band, so the label count stays near
// (rounds + 1) * samples_per_round while draws pay for the band rejection.
// Throws BudgetError if the draw budget cannot even cover the initializer.
UnitVector abl_learn(LabelOracle& oracle, double eta,
                     const BandScheduleConfig& cfg = {},
                     std::int64_t draw_budget = kDefaultAblDrawBudget);

}  // namespace halfspace
