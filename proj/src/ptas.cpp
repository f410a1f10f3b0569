#include "halfspace/ptas.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "halfspace/errors.hpp"
#include "halfspace/rng.hpp"

namespace halfspace {
namespace {

void validate_constants(const PtasConstants& c) {
  if (!(c.c_gamma > 0.0 && c.c_beta > 0.0 && c.c_r > 0.0))
    throw InvalidArgumentError("schedule constants must be > 0");
  if (!(c.alpha0 > 1.0))
    throw InvalidArgumentError("alpha0 must be > 1");
}

int ceil_to_int(double x) {
  const double c = std::ceil(x);
  if (c > 1e9) throw CapacityError("schedule degree overflows");
  return static_cast<int>(c);
}

}  // namespace

nlohmann::json PtasParams::to_json() const {
  return {{"degree", degree},
          {"degree_schedule", degree_schedule},
          {"regression_slack", regression_slack},
          {"strip_half_width", strip_half_width},
          {"constants",
           {{"c_gamma", constants.c_gamma},
            {"c_beta", constants.c_beta},
            {"c_r", constants.c_r},
            {"alpha0", constants.alpha0}}}};
}

PtasParams choose_parameters(double eta, double mu, int d,
                             const PtasConstants& constants,
                             std::int64_t max_features) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw InvalidArgumentError("choose_parameters: eta must be in (0, 1]");
  if (!(mu > 0.0 && mu <= 1.0))
    throw InvalidArgumentError("choose_parameters: mu must be in (0, 1]");
  if (d < 2) throw InvalidArgumentError("choose_parameters: d must be >= 2");
  validate_constants(constants);
  if (max_features < 2)
    throw InvalidArgumentError("choose_parameters: max_features must be >= 2");

  const double lg = std::log(std::exp(1.0) + 1.0 / mu);
  PtasParams p;
  p.constants = constants;
  if (eta > 1.0 / (2.0 * (1.0 + constants.alpha0))) {
    p.strip_half_width = 1.0;
    p.regression_slack = mu * eta / 2.0;
    p.degree_schedule = ceil_to_int(constants.c_r * lg * lg / (mu * mu));
  } else {
    p.strip_half_width =
        std::min(1.0, constants.c_gamma * eta * std::sqrt(lg) / std::sqrt(d));
    p.regression_slack = mu / (4.0 * constants.c_beta * std::sqrt(lg));
    p.degree_schedule = ceil_to_int(constants.c_r * lg * lg * lg / (mu * mu));
  }
  if (p.degree_schedule < 1) p.degree_schedule = 1;

  int r = 0;
  for (int cand = 1; cand <= p.degree_schedule; ++cand) {
    if (feature_count(d, cand) > max_features) break;
    r = cand;
  }
  if (r == 0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "choose_parameters: %d linear features already exceed the "
                  "budget of %lld",
                  d + 1, static_cast<long long>(max_features));
    throw CapacityError(buf);
  }
  p.degree = r;
  return p;
}

LabeledSample strip_rejection_sample(LabelOracle& oracle, const StripSpec& strip,
                                     std::int64_t m, std::int64_t budget) {
  if (m < 1) throw InvalidArgumentError("strip_rejection_sample: m must be >= 1");
  if (budget < m)
    throw InvalidArgumentError("strip_rejection_sample: budget must be >= m");
  if (strip.center.dim() != oracle.dim())
    throw InvalidArgumentError("strip_rejection_sample: dimension mismatch");

  std::vector<UnitVector> xs;
  std::vector<double> ys;
  xs.reserve(m);
  ys.reserve(m);
  std::int64_t drawn = 0;
  while (static_cast<std::int64_t>(xs.size()) < m && drawn < budget) {
    const UnitVector& x = oracle.draw();
    ++drawn;
    if (std::abs(x.dot(strip.center)) <= strip.half_width) {
      ys.push_back(oracle.reveal());
      xs.push_back(x);
    }
  }
  if (static_cast<std::int64_t>(xs.size()) < m) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "strip_rejection_sample: kept %lld of %lld after %lld draws",
                  static_cast<long long>(xs.size()), static_cast<long long>(m),
                  static_cast<long long>(drawn));
    throw BudgetError(buf);
  }
  return LabeledSample(std::move(xs), std::move(ys));
}

PtasResult ptas_learn(LabelOracle& oracle, double eta, double mu,
                      const PtasConfig& cfg) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw InvalidArgumentError("ptas_learn: eta must be in (0, 1]");
  if (!(mu > 0.0 && mu <= 1.0))
    throw InvalidArgumentError("ptas_learn: mu must be in (0, 1]");

  const int d = oracle.dim();
  const std::int64_t draws0 = oracle.draws_used();
  const std::int64_t labels0 = oracle.labels_used();

  BandScheduleConfig loc = cfg.localization;
  if (cfg.auto_tune_localization) {
    loc.initial_band = std::min(1.0, 1.0 / std::sqrt(static_cast<double>(d)));
    if (loc.constraint_radius_schedule.empty()) {
      const int rounds =
          loc.rounds > 0
              ? loc.rounds
              : static_cast<int>(std::ceil(std::log2(1.0 / eta))) + 1;
      for (int k = 1; k <= rounds; ++k)
        loc.constraint_radius_schedule.push_back(0.5 * std::pow(2.0, -k));
    }
  }
  UnitVector w = abl_learn(oracle, eta, loc, cfg.abl_draw_budget);
  const std::int64_t labels_abl = oracle.labels_used() - labels0;

  const PtasParams params =
      choose_parameters(eta, mu, d, cfg.constants, cfg.max_features);
  StripSpec strip(w, params.strip_half_width);
  const std::int64_t m_strip =
      cfg.strip_samples > 0 ? cfg.strip_samples
                            : 50 * feature_count(d, params.degree);

  const std::int64_t labels_pre_strip = oracle.labels_used();
  const LabeledSample strip_sample =
      strip_rejection_sample(oracle, strip, m_strip, cfg.strip_draw_budget);
  const std::int64_t labels_strip = oracle.labels_used() - labels_pre_strip;

  const PolynomialClassifier inner =
      kkms_learn(strip_sample, params.degree, cfg.regression);
  CombinedClassifier combined{w, std::move(strip), inner};

  const std::int64_t n_validation =
      cfg.validation_size > 0
          ? cfg.validation_size
          : static_cast<std::int64_t>(std::ceil(10.0 / (eta * eta)));
  const std::int64_t labels_pre_val = oracle.labels_used();
  std::int64_t mistakes_halfspace = 0, mistakes_combined = 0;
  for (std::int64_t i = 0; i < n_validation; ++i) {
    const auto [x, y] = oracle.draw_labeled();
    if ((x.dot(w) > 0.0 ? 1.0 : -1.0) != y) ++mistakes_halfspace;
    if (combined.predict(x) != y) ++mistakes_combined;
  }
  const double val_halfspace =
      static_cast<double>(mistakes_halfspace) / n_validation;
  const double val_combined =
      static_cast<double>(mistakes_combined) / n_validation;
  const std::int64_t labels_validation = oracle.labels_used() - labels_pre_val;

  std::string chosen;
  if (cfg.coin_flip_selection)
    chosen = Rng(cfg.coin_seed).uniform() < 0.5 ? "halfspace" : "combined";
  else
    chosen = val_combined <= val_halfspace ? "combined" : "halfspace";

  nlohmann::json params_json = params.to_json();
  params_json["strip_samples"] = m_strip;
  params_json["validation_size"] = n_validation;
  nlohmann::json report = {
      {"params", std::move(params_json)},
      {"labels_used", oracle.labels_used() - labels0},
      {"draws_used", oracle.draws_used() - draws0},
      {"labels_localization", labels_abl},
      {"labels_strip", labels_strip},
      {"labels_validation", labels_validation},
      {"validation_error_halfspace", val_halfspace},
      {"validation_error_combined", val_combined},
      {"chosen", chosen}};
  return PtasResult{std::move(w), std::move(combined), std::move(chosen),
                    std::move(report)};
}

ApproxRatioResult noise_tolerance_to_approx_ratio(
    const NoiseTargetLearner& learner, double epsilon,
    const NoiseModel& validation_model, std::int64_t validation_samples,
    std::uint64_t validation_seed) {
  if (!learner)
    throw InvalidArgumentError("noise_tolerance_to_approx_ratio: null learner");
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw InvalidArgumentError(
        "noise_tolerance_to_approx_ratio: epsilon must be in (0, 1]");
  if (validation_samples < 2)
    throw InvalidArgumentError(
        "noise_tolerance_to_approx_ratio: validation_samples must be >= 2");

  const int k_max = static_cast<int>(std::ceil(1.0 / epsilon));
  ApproxRatioResult best;
  double best_error = 2.0;
  nlohmann::json candidates = nlohmann::json::array();
  for (int k = 1; k <= k_max; ++k) {
    const double eta = std::min(1.0, k * epsilon);
    ClassifierFn c = learner(eta);
    const ErrorEstimate e =
        mc_error(c, validation_model, validation_samples, validation_seed);
    candidates.push_back({{"eta", eta}, {"validation_error", e.mean}});
    if (e.mean < best_error) {
      best_error = e.mean;
      best.classifier = std::move(c);
      best.eta = eta;
    }
  }
  best.report = {{"epsilon", epsilon},
                 {"candidates", std::move(candidates)},
                 {"chosen_eta", best.eta},
                 {"chosen_error", best_error}};
  return best;
}

}  // namespace halfspace
