#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "halfspace/geometry.hpp"
#include "halfspace/rng.hpp"

namespace halfspace {

// Label noise layered on top of the target halfspace h(x) = sign(<w*,x>).
// realizable: labels are h exactly. rcn: every label flips independently with
// probability p < 1/2. band_flip: labels flip with probability `rate`, but
// only inside |<w*,x>| <= width -- the same error budget as rcn with
// p = rate * band mass, concentrated where a halfspace learner hurts most.
class NoiseModel {
 public:
  enum class Kind { realizable, rcn, band_flip };

  static NoiseModel realizable(UnitVector target);
  static NoiseModel rcn(UnitVector target, double flip_probability);
  static NoiseModel band_flip(UnitVector target, double width, double rate);

  Kind kind() const { return kind_; }
  const UnitVector& target() const { return target_; }
  int dim() const { return target_.dim(); }
  double flip_probability() const;  // rcn only
  double width() const;             // band_flip only
  double rate() const;              // band_flip only

  // Probability that a fresh label at x disagrees with sign(<w*,x>).
  double flip_chance(const UnitVector& x) const;

 private:
  NoiseModel(Kind kind, UnitVector target, double a, double b);
  Kind kind_;
  UnitVector target_;
  double a_;  // rcn flip probability / band_flip width
  double b_;  // band_flip rate
};

// Stateful sample source for a noise model: points uniform on the sphere,
// labels decided at draw time but revealed (and counted) only on request, so
// rejection-sampling callers pay labels only for the points they keep. Each
// draw consumes the same random-stream length regardless of the model, so a
// fixed seed yields the same point sequence under every noise model.
class LabelOracle {
 public:
  LabelOracle(NoiseModel model, std::uint64_t seed);

  // Fresh uniform point. The reference is valid until the next draw.
  const UnitVector& draw();
  // Label of the most recent draw; counts toward labels_used() once per draw
  // no matter how often it is called. Throws if nothing has been drawn.
  double reveal();
  std::pair<UnitVector, double> draw_labeled();

  std::int64_t draws_used() const { return draws_; }
  std::int64_t labels_used() const { return labels_; }
  const NoiseModel& model() const { return model_; }
  int dim() const { return model_.dim(); }

 private:
  NoiseModel model_;
  Rng rng_;
  std::optional<UnitVector> last_point_;
  double last_label_ = 0.0;
  bool last_counted_ = false;
  std::int64_t draws_ = 0;
  std::int64_t labels_ = 0;
};

// Closed-form Pr(sign(<w,x>) != y) under realizable or rcn noise, via the
// disagreement mass t = angle(w, w*)/pi: realizable t, rcn p + (1-2p)t.
// band_flip has no closed form here; callers fall back to mc_error (signalled
// by InvalidArgumentError).
double exact_halfspace_error(const NoiseModel& model, const UnitVector& w);

struct ErrorEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sqrt(mean (1-mean) / n)
  std::int64_t n = 0;

  nlohmann::json to_json() const;
};

// A classifier under test: returns a label whose sign is compared against
// the drawn label (any positive value reads as +1, else -1).
using ClassifierFn = std::function<double(const UnitVector&)>;

// Empirical error over n fresh draws from the model. Deterministic per seed
// and independent of the worker count (fixed chunking, forked sub-streams).
ErrorEstimate mc_error(const ClassifierFn& classifier, const NoiseModel& model,
                       std::int64_t n, std::uint64_t seed);

// One band configuration for the end-to-end sign-approximation rows: the
// band half-width gamma around w, the angle theta between w and w*, and the
// l1 tolerance tau of the approximation build.
struct BandCheckCase {
  int dimension;
  double half_width;
  double angle;
  double tolerance;
};

struct LemmaSuiteConfig {
  std::uint64_t seed = 20260815;
  // Draws per Monte Carlo row; each estimate carries its own standard error,
  // so shrinking this only widens the acceptance bands.
  std::int64_t mc_samples = 200000;
  // Draws for the uniform-lift row; 0 means "use mc_samples".
  std::int64_t lift_samples = 0;
  // The gaussian-envelope and normalization rows cover d in [2, this].
  int envelope_dimension_max = 100;
  // Grid points per dimension for the gaussian-envelope rows.
  int envelope_grid = 1000;
  // z-grid points per band-density configuration.
  int band_grid = 41;
  // End-to-end band cases; empty selects the built-in default matrix.
  std::vector<BandCheckCase> band_cases;
  // Exact group names to run; empty runs every group. Unknown names throw.
  std::vector<std::string> groups;
};

struct LemmaCheckRow {
  std::string group;   // e.g. "geometry.gauss-envelope"
  std::string item;    // e.g. "d=17 t=0.25"
  std::string status;  // "pass" | "fail" | "precondition-violation"
  double observed = 0.0;
  double bound = 0.0;
};

struct LemmaReport {
  std::vector<LemmaCheckRow> rows;

  std::int64_t passed() const;
  std::int64_t failed() const;
  std::int64_t violations() const;
  bool all_pass() const;  // no "fail" rows (violations are skips, not failures)

  // group,item,status,observed,bound with CRLF line endings; doubles printed
  // with %.17g so identical runs are byte-identical.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Re-measures, against fresh grids and fresh Monte Carlo draws, every
// distributional and approximation-theoretic guarantee the geometry and
// polynomial modules advertise: unit norms, density normalization, the
// gaussian envelope on the projected density, band-density peak/tail
// envelopes, the angle-vs-error and far-disagreement inequalities, Jackson
// and booster certificates, composition agreement, the off-window growth
// envelope, short-tail l1 certificates, the uniform-sphere lift, and the
// band-restricted sign approximation built end to end. Rows are emitted in a
// fixed order and all randomness forks from config.seed, so a given config
// reproduces its report byte for byte. Band cases whose parameters violate
// the approximation's premises produce "precondition-violation" rows rather
// than failures.
LemmaReport verify_lemma_suite(const LemmaSuiteConfig& config = {});

}  // namespace halfspace
