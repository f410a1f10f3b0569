#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace halfspace {

// How a coefficient vector is to be read. Monomial: coefficients[k] * x^k,
// evaluated by Horner. Chebyshev: coefficients[k] * T_k(x) on [-1,1],
// evaluated by Clenshaw. High-degree interpolants must use the Chebyshev
// basis: monomial storage loses all accuracy beyond degree ~40 because the
// basis condition number grows like (1+sqrt 2)^n.
enum class PolyBasis { monomial, chebyshev };

class UnivariatePolynomial {
 public:
  static constexpr int kDefaultDegreeCap = 10000;

  UnivariatePolynomial();  // the zero polynomial
  explicit UnivariatePolynomial(std::vector<double> monomial_coefficients,
                                int degree_cap = kDefaultDegreeCap);
  static UnivariatePolynomial chebyshev(std::vector<double> coefficients,
                                        int degree_cap = kDefaultDegreeCap);

  PolyBasis basis() const { return basis_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double eval(double x) const;
  // Same values as eval, batched; the backbone of grid certification and
  // Monte Carlo loops (the per-point recurrences are interleaved in blocks so
  // the compiler can vectorize across points).
  void eval_batch(std::span<const double> xs, std::span<double> out) const;

 private:
  UnivariatePolynomial(PolyBasis basis, std::vector<double> coeffs, int degree_cap);
  PolyBasis basis_;
  std::vector<double> coeffs_;  // trailing zeros trimmed; empty = zero poly
};

// Expanded composition outer(inner(x)) in monomial coefficients. Both inputs
// must be monomial; the product degree must stay within the cap.
UnivariatePolynomial compose(const UnivariatePolynomial& outer,
                             const UnivariatePolynomial& inner,
                             int degree_cap = UnivariatePolynomial::kDefaultDegreeCap);

// A polynomial kept in factored form: either a single polynomial, or
// outer(inner(x / scale)) with both parts again factored. Evaluation of the
// factored form is the defining semantics; expanding the composition is
// optional (and usually numerically ruinous at the degrees involved).
class PolynomialExpr {
 public:
  PolynomialExpr();  // zero
  static PolynomialExpr leaf(UnivariatePolynomial p);
  static PolynomialExpr composed(PolynomialExpr outer, PolynomialExpr inner, double scale);

  double eval(double x) const;
  void eval_batch(std::span<const double> xs, std::span<double> out) const;
  std::int64_t degree() const;

  bool is_leaf() const;
  const UnivariatePolynomial& leaf_poly() const;  // requires is_leaf()

  nlohmann::json to_json() const;
  static PolynomialExpr from_json(const nlohmann::json& j);

 private:
  struct Node;
  explicit PolynomialExpr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// Grid-measured evidence that a sign approximation meets its contract on
// `domain`: sup |p - sign| over the grid points outside the dead zone,
// sup |p| over the whole domain, and (when certified against a density) the
// measured l1 error.
struct ApproximationCertificate {
  std::int64_t grid_size = 0;
  double sup_error_outside = 0.0;
  double sup_abs_inside = 0.0;
  std::optional<double> l1_error;
  double domain_lo = 0.0;
  double domain_hi = 0.0;

  nlohmann::json to_json() const;
};

struct CertifiedPoly {
  PolynomialExpr poly;
  ApproximationCertificate certificate;
};

// A density on [lo, hi] usable as an l1 weight.
struct DensityHandle {
  std::function<double(double)> pdf;
  double lo = -1.0;
  double hi = 1.0;
};

// Degree-<=r Chebyshev-node interpolant of an L-Lipschitz f on [-1,1],
// certified against the 6L/r sup bound on a 1e5 grid. If certification fails
// the degree is escalated by 1.5x (up to 3 retries) while still certifying
// against the original 6L/r; persistent failure raises ConstructionFailure
// with the measured sup error.
UnivariatePolynomial jackson_approx(const std::function<double(double)>& f, double L,
                                    int r, int degree_cap = 250000);

// Odd polynomial of degree O(log 1/tau) that sharpens a rough +-1 signal:
// |p| < 1+tau on [-1.5, 1.5] and |p - sign| < tau on [-1.5,-0.5] u [0.5,1.5],
// both certified on a 1e5 grid. Truncated Taylor series of the Gaussian CDF,
// built in extended precision and stored in the Chebyshev basis (the only
// representation whose double coefficients can carry the polynomial for small
// tau). Raises PrecisionFailure when tau is below what the construction
// arithmetic can certify (~1e-5).
CertifiedPoly booster_poly(double tau);

// Sign approximation on [-a, a] with dead zone [-gamma a, gamma a]:
// |p| < 1+tau everywhere on the domain and |p - sign| < tau outside the dead
// zone. Built as booster(tau) composed with a Jackson ramp of degree
// ceil(12/gamma), certified on a 1e5 grid.
CertifiedPoly sign_approx_truncated(double a, double gamma, double tau);

// l1 approximation of sign against a bounded, sub-Gaussian density:
// requires rho <= 2/sigma and rho(x) <= (2/sigma) exp(-x^2/(32 sigma^2))
// (spot-checked on a grid) and tau <= sigma/(2 gamma). Picks the window
// half-width r_deg * tau * sigma with r_deg = ceil(mult * log(e+1/tau)/tau^2),
// runs sign_approx_truncated with inner tolerance tau/100 and dead zone
// tau*sigma/100, and certifies integral |p - sign| rho <= tau by quadrature,
// escalating the window multiplier 1.5x (up to 3 retries) on failure.
CertifiedPoly sign_approx_shorttail(double sigma, double gamma, double tau,
                                    const DensityHandle& rho,
                                    double rdeg_multiplier = 1.0);

// The coarse off-window envelope b * |2x/a|^deg(p), valid whenever
// |p| <= b on [-a, a]; callers use it as |p(x)| <= growth_bound(...).
double growth_bound(const UnivariatePolynomial& p, double a, double b, double x);

// Quadrature value of integral |p(x) - sign(x)| rho(x) dx over [lo, hi],
// split at zero. The subdivision cap is high because |p - sign| wiggles at
// the scale of 1/degree for certified approximants.
double l1_error_vs_sign(const PolynomialExpr& p, const DensityHandle& rho,
                        double lo, double hi, double abs_tol = 1e-6,
                        int max_subdivisions = 100000);

}  // namespace halfspace
