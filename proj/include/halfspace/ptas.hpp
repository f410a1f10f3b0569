#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>

#include "halfspace/evaluation.hpp"
#include "halfspace/geometry.hpp"
#include "halfspace/localization.hpp"
#include "halfspace/regression.hpp"

namespace halfspace {

// Tunable constants of the parameter schedule; the theory fixes only the
// shape of the formulas, so all four are exposed to config and to the
// calibrate sweep.
struct PtasConstants {
  double c_gamma = 2.0;
  double c_beta = 1.0;
  double c_r = 1.0;
  // Constant-factor guarantee assumed of the localization step (its error is
  // treated as <= alpha0 * eta); also sets the branch point of the schedule.
  double alpha0 = 2.0;
};

// Largest monomial feature count the schedule may demand. The degree formula
// grows like log^3(1/mu)/mu^2 and would ask for hundreds of thousands of
// features at moderate dimension, so the effective degree is the largest one
// whose feature count fits this budget.
inline constexpr std::int64_t kDefaultPtasFeatureBudget = 500;

inline constexpr std::int64_t kDefaultStripDrawBudget = 1'000'000;

struct PtasParams {
  int degree = 1;               // r after the feature-budget clamp
  double regression_slack = 0;  // beta
  double strip_half_width = 1;  // gamma
  PtasConstants constants;
  int degree_schedule = 1;      // r the formula asked for, before the clamp
  nlohmann::json to_json() const;
};

// Schedule for a noise target eta and excess-risk factor mu on S^{d-1}.
//
//   eta > 1/(2(1+alpha0)):  gamma = 1 (no localization),
//                           beta = mu eta / 2,
//                           r = ceil(c_r log^2(e + 1/mu) / mu^2)
//   otherwise:              gamma = c_gamma eta sqrt(log(e + 1/mu)) / sqrt(d),
//                           beta = mu / (4 c_beta sqrt(log(e + 1/mu))),
//                           r = ceil(c_r log^3(e + 1/mu) / mu^2)
//
// gamma is clamped into (0, 1]; r is clamped down to the feature budget.
PtasParams choose_parameters(double eta, double mu, int d,
                             const PtasConstants& constants = {},
                             std::int64_t max_features = kDefaultPtasFeatureBudget);

// h(x) = sign(<w, x>) outside the strip, the polynomial sign inside it.
struct CombinedClassifier {
  UnitVector halfspace;
  StripSpec strip;
  PolynomialClassifier inner;

  double predict(const UnitVector& x) const {
    if (std::abs(x.dot(strip.center)) > strip.half_width)
      return x.dot(halfspace) > 0.0 ? 1.0 : -1.0;
    return inner.predict(x);
  }
};

// Draws from the oracle, keeps points inside the strip, and reveals labels
// only for kept points; stops at m kept. Throws BudgetError (with both
// counts) if the budget runs out first.
LabeledSample strip_rejection_sample(LabelOracle& oracle, const StripSpec& strip,
                                     std::int64_t m, std::int64_t budget);

struct PtasConfig {
  PtasConstants constants;
  BandScheduleConfig localization;
  // Rescale the localization schedule to the instance: bands shrink from
  // 1/sqrt(d) (a full-width band carries almost no directional label signal)
  // and trust radii from 0.5 * 2^-k. Explicit constraint_radius_schedule or
  // auto_tune_localization = false restore the caller's schedule.
  bool auto_tune_localization = true;
  std::int64_t abl_draw_budget = kDefaultAblDrawBudget;
  std::int64_t strip_samples = 0;  // 0 -> 50 * C(d + r, r)
  std::int64_t strip_draw_budget = kDefaultStripDrawBudget;
  std::int64_t max_features = kDefaultPtasFeatureBudget;
  std::int64_t validation_size = 0;  // 0 -> ceil(10 / eta^2)
  // Paper-faithful final selection: a fair coin instead of the validation
  // comparison.
  bool coin_flip_selection = false;
  std::uint64_t coin_seed = 1;
  L1SolverOptions regression;
};

struct PtasResult {
  UnitVector halfspace;  // the localization iterate (= combined.halfspace)
  CombinedClassifier combined;
  std::string chosen;  // "combined" or "halfspace"
  nlohmann::json report;

  double predict(const UnitVector& x) const {
    if (chosen == "halfspace")
      return x.dot(halfspace) > 0.0 ? 1.0 : -1.0;
    return combined.predict(x);
  }
};

// The full pipeline: localize, choose the schedule, sample the strip, fit the
// strip polynomial, then return whichever of {halfspace, combined} validates
// better on fresh draws (ties go to combined). The report carries the chosen
// parameters, exact draw/label accounting, and both validation errors.
PtasResult ptas_learn(LabelOracle& oracle, double eta, double mu,
                      const PtasConfig& cfg = {});

// A learner that, handed a noise target eta, returns a classifier.
using NoiseTargetLearner = std::function<ClassifierFn(double eta)>;

struct ApproxRatioResult {
  ClassifierFn classifier;
  double eta = 0.0;
  nlohmann::json report;
};

// Turns a noise-tolerant learner into an approximation-ratio one: runs the
// learner at eta = k epsilon for k = 1..ceil(1/epsilon) (clamped to 1), scores
// every candidate on the same validation stream, and returns the best
// (ties to the smallest eta).
ApproxRatioResult noise_tolerance_to_approx_ratio(
    const NoiseTargetLearner& learner, double epsilon,
    const NoiseModel& validation_model, std::int64_t validation_samples,
    std::uint64_t validation_seed);

}  // namespace halfspace
