#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "halfspace/geometry.hpp"

namespace halfspace {

// Labeled points on a common sphere; labels are exactly +-1 and lengths match.
class LabeledSample {
 public:
  LabeledSample(std::vector<UnitVector> points, std::vector<double> labels);

  int dim() const { return points_.empty() ? 0 : points_[0].dim(); }
  std::int64_t size() const { return static_cast<std::int64_t>(points_.size()); }
  const std::vector<UnitVector>& points() const { return points_; }
  const std::vector<double>& labels() const { return labels_; }

 private:
  std::vector<UnitVector> points_;
  std::vector<double> labels_;
};

// Hard limit on the number of monomial features C(d+r, r); requests beyond it
// raise CapacityError naming the offending count.
inline constexpr std::int64_t kDefaultFeatureCap = 20000;

// C(d+r, r) = number of d-variate monomials of total degree <= r, computed
// overflow-safely (saturates at a value above any realistic cap).
std::int64_t feature_count(int d, int r);

// All monomials of total degree <= r evaluated at x, in graded-lex order
// (degree ascending, then exponent vectors lexicographically descending with
// x1 most significant): 1, x1, .., xd, x1^2, x1 x2, ... The ordering is the
// shared contract for every coefficient vector in this module.
Eigen::VectorXd monomial_features(const UnitVector& x, int r,
                                  std::int64_t feature_cap = kDefaultFeatureCap);

// Feature matrix with one row per point, columns in monomial_features order.
Eigen::MatrixXd feature_matrix(const std::vector<UnitVector>& xs, int r,
                               std::int64_t feature_cap = kDefaultFeatureCap);

// A d-variate polynomial of total degree <= r, stored densely against the
// graded-lex monomial basis.
class MultivariatePolynomial {
 public:
  MultivariatePolynomial(int dimension, int degree, Eigen::VectorXd coefficients);

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }

  // Exponent vector (length d) of each basis monomial, graded-lex order.
  std::vector<std::vector<int>> exponents() const;

  double eval(const UnitVector& x) const;
  Eigen::VectorXd eval_batch(const std::vector<UnitVector>& xs) const;

  // {"dimension", "degree", "terms": [{"exponents": [..], "coefficient": c}
  // for each nonzero term]}; round-trips bit-exactly through from_json.
  nlohmann::json to_json() const;
  static MultivariatePolynomial from_json(const nlohmann::json& j);

 private:
  int dimension_;
  int degree_;
  Eigen::VectorXd coeffs_;
};

// x -> sign(poly(x) - threshold), with sign(0) = -1 (the global convention).
struct PolynomialClassifier {
  MultivariatePolynomial poly;
  double threshold;

  double predict(const UnitVector& x) const {
    return poly.eval(x) > threshold ? 1.0 : -1.0;
  }
};

// Mean absolute residual (1/m) sum |P(x_i) - y_i| -- the regression objective.
double mean_l1_loss(const MultivariatePolynomial& p, const LabeledSample& s);

// Fraction of samples with predict(x_i) != y_i.
double empirical_01_error(const PolynomialClassifier& c, const LabeledSample& s);

struct L1SolverOptions {
  std::int64_t feature_cap = kDefaultFeatureCap;
  // Interior-point iteration budget; exhausting it before the duality gap
  // closes raises OptimizationFailure.
  int max_iterations = 100;
  // Convergence target for the mean-loss duality gap. The gap is a
  // certificate: the returned mean absolute loss exceeds the true l1 optimum
  // by at most this much.
  double optimality_gap = 1e-8;
};

// Minimizes (1/m) sum |<c, phi(x_i)> - y_i| over degree-r polynomials, to
// within 1e-6 of the optimum (the duality-gap target sits two orders below
// that; verified against an exact vertex oracle in tests). Deterministic: no
// randomness, fixed schedule.
MultivariatePolynomial l1_regression(const LabeledSample& s, int r,
                                     const L1SolverOptions& opts = {});

// Minimizes empirical 0-1 error of x -> sign(P(x) - a) over a. The 0-1 loss
// is piecewise constant in a with breakpoints at the sample values, so the
// candidate set {midpoints of consecutive sorted P(x_i)} + {below-min,
// above-max sentinels} + {0} contains an exact minimizer. Ties break toward
// smallest |a|, then smallest a.
PolynomialClassifier threshold_search(const MultivariatePolynomial& p,
                                      const LabeledSample& s);

// l1 polynomial regression followed by the exact threshold search.
PolynomialClassifier kkms_learn(const LabeledSample& s, int r,
                                const L1SolverOptions& opts = {});

// CSV interchange: header "x1,..,xd,y", one row per sample, full round-trip
// precision. Reader accepts CRLF and RFC-4180 quoted fields.
void write_samples_csv(const std::string& path, const LabeledSample& s);
LabeledSample read_samples_csv(const std::string& path);

}  // namespace halfspace
