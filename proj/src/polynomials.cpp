#include "halfspace/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <sstream>
#include <utility>

#include <fftw3.h>
#include <nlohmann/json.hpp>

#include "halfspace/errors.hpp"
#include "halfspace/quadrature.hpp"

namespace halfspace {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Fixed-size floating-point expansions (Shewchuk-style error-free transforms).
//
// A value is carried as a short sum of nonoverlapping doubles, least
// significant first. Four retained components give ~200 bits, which is what
// the alternating Gaussian-CDF series needs: its partial sums reach
// exp(y^2/2) while the total stays O(1), so ~y^2/2 * log2(e) bits cancel.
// ---------------------------------------------------------------------------

inline double two_sum(double a, double b, double& err) {
  const double s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  err = (a - av) + (b - bv);
  return s;
}

// Requires |a| >= |b| (or a == 0).
inline double fast_two_sum(double a, double b, double& err) {
  const double s = a + b;
  err = b - (s - a);
  return s;
}

inline double two_prod(double a, double b, double& err) {
  const double p = a * b;
  err = std::fma(a, b, -p);
  return p;
}

struct Xp {
  static constexpr int kCap = 18;
  static constexpr int kKeep = 4;
  double c[kCap];
  int n = 0;
};

inline Xp xp_from(double d) {
  Xp e;
  e.c[0] = d;
  e.n = 1;
  return e;
}

// Sum of the components, smallest first; adequate as a rounded approximation.
inline double xp_approx(const Xp& e) {
  double s = 0.0;
  for (int i = 0; i < e.n; ++i) s += e.c[i];
  return s;
}

// Add one double into an expansion (GROW-EXPANSION).
inline Xp xp_grow(const Xp& e, double b) {
  Xp h;
  double q = b;
  for (int i = 0; i < e.n; ++i) q = two_sum(q, e.c[i], h.c[i]);
  h.c[e.n] = q;
  h.n = e.n + 1;
  return h;
}

// Multiply an expansion by a double (SCALE-EXPANSION).
inline Xp xp_scale_raw(const Xp& e, double b) {
  Xp h;
  if (e.n == 0) return h;
  double q = two_prod(e.c[0], b, h.c[0]);
  int idx = 1;
  for (int i = 1; i < e.n; ++i) {
    double t_err;
    const double t_hi = two_prod(e.c[i], b, t_err);
    double s_err;
    const double s = two_sum(q, t_err, s_err);
    h.c[idx++] = s_err;
    q = fast_two_sum(t_hi, s, h.c[idx++]);
  }
  h.c[idx++] = q;
  h.n = idx;
  return h;
}

// Canonical form (COMPRESS): zero components squeezed out, the top component
// within one ulp of the full sum. Then keep only the most significant kKeep
// components; the discarded tail is below 2^-200 of the total.
inline Xp xp_norm(const Xp& e) {
  if (e.n == 0) return xp_from(0.0);
  double g[Xp::kCap];
  double q = e.c[e.n - 1];
  int bottom = e.n - 1;
  for (int i = e.n - 2; i >= 0; --i) {
    double small;
    const double big = fast_two_sum(q, e.c[i], small);
    if (small != 0.0) {
      g[bottom--] = big;
      q = small;
    } else {
      q = big;
    }
  }
  g[bottom] = q;
  Xp h;
  int top = 0;
  for (int i = bottom + 1; i < e.n; ++i) {
    double small;
    const double big = fast_two_sum(g[i], q, small);
    if (small != 0.0) h.c[top++] = small;
    q = big;
  }
  h.c[top++] = q;
  h.n = top;
  if (h.n > Xp::kKeep) {
    for (int i = 0; i < Xp::kKeep; ++i) h.c[i] = h.c[h.n - Xp::kKeep + i];
    h.n = Xp::kKeep;
  }
  return h;
}

inline Xp xp_add(const Xp& a, const Xp& b) {
  Xp h = a;
  for (int i = 0; i < b.n; ++i) h = xp_grow(h, b.c[i]);
  return xp_norm(h);
}

inline Xp xp_scale(const Xp& a, double b) { return xp_norm(xp_scale_raw(a, b)); }

// a * (z_hi + z_lo) where (z_hi, z_lo) is an exact two-term product.
inline Xp xp_mul2(const Xp& a, double z_hi, double z_lo) {
  const Xp hi = xp_norm(xp_scale_raw(a, z_hi));
  const Xp lo = xp_norm(xp_scale_raw(a, z_lo));
  return xp_add(hi, lo);
}

// a / b by iterative refinement: four correction rounds leave a relative
// residual below 2^-208.
inline Xp xp_div(const Xp& a, double b) {
  Xp r = a;
  Xp q = xp_from(0.0);
  for (int round = 0; round < 4; ++round) {
    const double qi = xp_approx(r) / b;
    q = xp_add(q, xp_from(qi));
    double p_err;
    const double p_hi = two_prod(qi, b, p_err);
    Xp prod;
    prod.c[0] = -p_err;
    prod.c[1] = -p_hi;
    prod.n = 2;
    r = xp_add(r, prod);
  }
  return xp_norm(q);
}

// ---------------------------------------------------------------------------
// Batched evaluation kernels. Points are processed in fixed blocks of 16 with
// the per-point recurrence in the inner dimension, so the compiler can
// vectorize across points; at the degrees certification uses (10^4..10^5)
// the scalar recurrences would be latency-bound.
// ---------------------------------------------------------------------------

constexpr std::size_t kBlock = 16;

void horner_batch(const double* c, std::size_t n, const double* xs, double* out,
                  std::size_t m) {
  for (std::size_t base = 0; base < m; base += kBlock) {
    const std::size_t w = std::min(kBlock, m - base);
    double xb[kBlock], acc[kBlock];
    for (std::size_t l = 0; l < kBlock; ++l) xb[l] = (l < w) ? xs[base + l] : 0.0;
    for (std::size_t l = 0; l < kBlock; ++l) acc[l] = c[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
      const double ck = c[k];
      for (std::size_t l = 0; l < kBlock; ++l) acc[l] = acc[l] * xb[l] + ck;
    }
    for (std::size_t l = 0; l < w; ++l) out[base + l] = acc[l];
  }
}

void clenshaw_batch(const double* c, std::size_t n, const double* xs, double* out,
                    std::size_t m) {
  for (std::size_t base = 0; base < m; base += kBlock) {
    const std::size_t w = std::min(kBlock, m - base);
    double xb[kBlock], x2[kBlock], b1[kBlock], b2[kBlock];
    for (std::size_t l = 0; l < kBlock; ++l) xb[l] = (l < w) ? xs[base + l] : 0.0;
    for (std::size_t l = 0; l < kBlock; ++l) {
      x2[l] = 2.0 * xb[l];
      b1[l] = 0.0;
      b2[l] = 0.0;
    }
    for (std::size_t k = n - 1; k >= 1; --k) {
      const double ck = c[k];
      for (std::size_t l = 0; l < kBlock; ++l) {
        const double t = x2[l] * b1[l] - b2[l] + ck;
        b2[l] = b1[l];
        b1[l] = t;
      }
    }
    for (std::size_t l = 0; l < w; ++l) out[base + l] = xb[l] * b1[l] - b2[l] + c[0];
  }
}

// ---------------------------------------------------------------------------
// Chebyshev interpolation at extrema nodes via DCT-I.
// ---------------------------------------------------------------------------

// Node j of n+1 extrema nodes cos(pi j / n), mirrored so that node n-j is the
// exact negative of node j.
double cheb_node(int j, int n) {
  if (2 * j < n) return std::cos(M_PI * static_cast<double>(j) / n);
  if (2 * j == n) return 0.0;
  return -std::cos(M_PI * static_cast<double>(n - j) / n);
}

// Chebyshev coefficients of the degree-n interpolant through values[j] at the
// extrema nodes, via FFTW's REDFT00 (out[m] = v_0 + (-1)^m v_n +
// 2 sum_{j=1}^{n-1} v_j cos(pi j m / n), so c_m = out[m]/n with the two end
// coefficients halved).
std::vector<double> dct_chebyshev_coeffs(const std::vector<double>& values) {
  const int count = static_cast<int>(values.size());
  const int n = count - 1;
  std::vector<double> in(count), out(count);
  fftw_plan plan =
      fftw_plan_r2r_1d(count, in.data(), out.data(), FFTW_REDFT00, FFTW_ESTIMATE);
  std::copy(values.begin(), values.end(), in.begin());
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  std::vector<double> coeffs(count);
  const double inv = 1.0 / n;
  for (int m = 0; m <= n; ++m) coeffs[m] = out[m] * inv;
  coeffs[0] *= 0.5;
  coeffs[n] *= 0.5;
  return coeffs;
}

std::vector<double> uniform_grid(double lo, double hi, std::int64_t n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::int64_t i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + step * i;
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

constexpr std::int64_t kCertGridSize = 100001;

double sign_of(double x) { return x > 0.0 ? 1.0 : -1.0; }

// Measured sup |p - sign| over grid points with |x| >= dead_zone and sup |p|
// over the whole grid.
struct SignSup {
  double outside = 0.0;
  double abs_all = 0.0;
};

SignSup measure_sign_sup(const PolynomialExpr& p, const std::vector<double>& xs,
                         double dead_zone) {
  std::vector<double> vals(xs.size());
  p.eval_batch(xs, vals);
  SignSup sup;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(vals[i]))
      throw NumericFailure("sign approximation evaluated non-finite on its domain");
    sup.abs_all = std::max(sup.abs_all, std::abs(vals[i]));
    if (std::abs(xs[i]) >= dead_zone)
      sup.outside = std::max(sup.outside, std::abs(vals[i] - sign_of(xs[i])));
  }
  return sup;
}

}  // namespace

// ---------------------------------------------------------------------------
// UnivariatePolynomial
// ---------------------------------------------------------------------------

UnivariatePolynomial::UnivariatePolynomial() : basis_(PolyBasis::monomial) {}

UnivariatePolynomial::UnivariatePolynomial(PolyBasis basis, std::vector<double> coeffs,
                                           int degree_cap)
    : basis_(basis), coeffs_(std::move(coeffs)) {
  if (degree_cap < 0) throw InvalidArgumentError("degree cap must be nonnegative");
  for (double c : coeffs_)
    if (!std::isfinite(c))
      throw InvalidArgumentError("polynomial coefficients must be finite");
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
  const auto deg = static_cast<std::int64_t>(coeffs_.size()) - 1;
  if (deg > degree_cap)
    throw CapacityError("polynomial degree " + std::to_string(deg) +
                        " exceeds the cap " + std::to_string(degree_cap));
}

UnivariatePolynomial::UnivariatePolynomial(std::vector<double> monomial_coefficients,
                                           int degree_cap)
    : UnivariatePolynomial(PolyBasis::monomial, std::move(monomial_coefficients),
                           degree_cap) {}

UnivariatePolynomial UnivariatePolynomial::chebyshev(std::vector<double> coefficients,
                                                     int degree_cap) {
  return UnivariatePolynomial(PolyBasis::chebyshev, std::move(coefficients), degree_cap);
}

double UnivariatePolynomial::eval(double x) const {
  double out;
  eval_batch(std::span<const double>(&x, 1), std::span<double>(&out, 1));
  return out;
}

void UnivariatePolynomial::eval_batch(std::span<const double> xs,
                                      std::span<double> out) const {
  if (xs.size() != out.size())
    throw InvalidArgumentError("eval_batch: input and output sizes differ");
  if (xs.empty()) return;
  if (coeffs_.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  if (basis_ == PolyBasis::monomial)
    horner_batch(coeffs_.data(), coeffs_.size(), xs.data(), out.data(), xs.size());
  else
    clenshaw_batch(coeffs_.data(), coeffs_.size(), xs.data(), out.data(), xs.size());
}

UnivariatePolynomial compose(const UnivariatePolynomial& outer,
                             const UnivariatePolynomial& inner, int degree_cap) {
  if (outer.basis() != PolyBasis::monomial || inner.basis() != PolyBasis::monomial)
    throw InvalidArgumentError("compose requires monomial-basis operands");
  const auto& oc = outer.coefficients();
  const auto& ic = inner.coefficients();
  if (oc.empty()) return UnivariatePolynomial();
  if (ic.empty()) return UnivariatePolynomial({oc[0]}, degree_cap);
  const std::int64_t product_degree =
      static_cast<std::int64_t>(outer.degree()) * inner.degree();
  if (product_degree > degree_cap)
    throw CapacityError("compose: product degree " + std::to_string(product_degree) +
                        " exceeds the cap " + std::to_string(degree_cap));
  std::vector<double> res{oc.back()};
  for (std::size_t k = oc.size() - 1; k-- > 0;) {
    std::vector<double> next(res.size() + ic.size() - 1, 0.0);
    for (std::size_t i = 0; i < res.size(); ++i)
      for (std::size_t j = 0; j < ic.size(); ++j) next[i + j] += res[i] * ic[j];
    next[0] += oc[k];
    res = std::move(next);
  }
  for (double c : res)
    if (!std::isfinite(c)) throw NumericFailure("compose: coefficient overflow");
  return UnivariatePolynomial(std::move(res), degree_cap);
}

// ---------------------------------------------------------------------------
// PolynomialExpr
// ---------------------------------------------------------------------------

struct PolynomialExpr::Node {
  bool leaf = true;
  UnivariatePolynomial poly;
  std::shared_ptr<const Node> outer;
  std::shared_ptr<const Node> inner;
  double scale = 1.0;

  // Deserialized leaves may legitimately carry the high degrees the factored
  // constructions produce, so the cap here is just an absurdity guard.
  static constexpr int kSerializedDegreeCap = 1 << 22;

  double eval(double x) const {
    if (leaf) return poly.eval(x);
    return outer->eval(inner->eval(x / scale));
  }

  void eval_batch(std::span<const double> xs, std::span<double> out) const {
    if (leaf) {
      poly.eval_batch(xs, out);
      return;
    }
    std::vector<double> scaled(xs.size());
    const double inv = 1.0 / scale;
    for (std::size_t i = 0; i < xs.size(); ++i) scaled[i] = xs[i] * inv;
    std::vector<double> mid(xs.size());
    inner->eval_batch(scaled, mid);
    outer->eval_batch(mid, out);
  }

  std::int64_t degree() const {
    if (leaf) return poly.degree();
    const std::int64_t douter = outer->degree();
    if (douter < 0) return -1;
    const std::int64_t dinner = inner->degree();
    if (dinner < 0) return 0;
    return douter * dinner;
  }

  nlohmann::json to_json() const {
    if (leaf) {
      return nlohmann::json{
          {"form", "leaf"},
          {"basis", poly.basis() == PolyBasis::monomial ? "monomial" : "chebyshev"},
          {"coefficients", poly.coefficients()}};
    }
    return nlohmann::json{{"form", "composed"},
                          {"scale", scale},
                          {"outer", outer->to_json()},
                          {"inner", inner->to_json()}};
  }

  static std::shared_ptr<const Node> from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("form") || !j.at("form").is_string())
      throw InvalidArgumentError("polynomial json: missing form");
    const std::string form = j.at("form").get<std::string>();
    auto node = std::make_shared<Node>();
    if (form == "leaf") {
      if (!j.contains("basis") || !j.at("basis").is_string() ||
          !j.contains("coefficients") || !j.at("coefficients").is_array())
        throw InvalidArgumentError("polynomial json: malformed leaf");
      const std::string basis = j.at("basis").get<std::string>();
      std::vector<double> coeffs;
      coeffs.reserve(j.at("coefficients").size());
      for (const auto& c : j.at("coefficients")) {
        if (!c.is_number())
          throw InvalidArgumentError("polynomial json: bad coefficient");
        coeffs.push_back(c.get<double>());
      }
      if (basis == "monomial")
        node->poly = UnivariatePolynomial(std::move(coeffs), kSerializedDegreeCap);
      else if (basis == "chebyshev")
        node->poly =
            UnivariatePolynomial::chebyshev(std::move(coeffs), kSerializedDegreeCap);
      else
        throw InvalidArgumentError("polynomial json: unknown basis " + basis);
      return node;
    }
    if (form == "composed") {
      if (!j.contains("scale") || !j.at("scale").is_number() || !j.contains("outer") ||
          !j.contains("inner"))
        throw InvalidArgumentError("polynomial json: malformed composition");
      node->leaf = false;
      node->scale = j.at("scale").get<double>();
      if (!std::isfinite(node->scale) || node->scale == 0.0)
        throw InvalidArgumentError("polynomial json: scale must be finite and nonzero");
      node->outer = from_json(j.at("outer"));
      node->inner = from_json(j.at("inner"));
      return node;
    }
    throw InvalidArgumentError("polynomial json: unknown form " + form);
  }
};

PolynomialExpr::PolynomialExpr() : node_(std::make_shared<const Node>()) {}

PolynomialExpr::PolynomialExpr(std::shared_ptr<const Node> node)
    : node_(std::move(node)) {}

PolynomialExpr PolynomialExpr::leaf(UnivariatePolynomial p) {
  auto node = std::make_shared<Node>();
  node->poly = std::move(p);
  return PolynomialExpr(std::move(node));
}

PolynomialExpr PolynomialExpr::composed(PolynomialExpr outer, PolynomialExpr inner,
                                        double scale) {
  if (!std::isfinite(scale) || scale == 0.0)
    throw InvalidArgumentError("composed: scale must be finite and nonzero");
  auto node = std::make_shared<Node>();
  node->leaf = false;
  node->outer = outer.node_;
  node->inner = inner.node_;
  node->scale = scale;
  return PolynomialExpr(std::move(node));
}

double PolynomialExpr::eval(double x) const { return node_->eval(x); }

void PolynomialExpr::eval_batch(std::span<const double> xs, std::span<double> out) const {
  if (xs.size() != out.size())
    throw InvalidArgumentError("eval_batch: input and output sizes differ");
  if (xs.empty()) return;
  node_->eval_batch(xs, out);
}

std::int64_t PolynomialExpr::degree() const { return node_->degree(); }

bool PolynomialExpr::is_leaf() const { return node_->leaf; }

const UnivariatePolynomial& PolynomialExpr::leaf_poly() const {
  if (!node_->leaf) throw InvalidArgumentError("leaf_poly called on a composition");
  return node_->poly;
}

nlohmann::json PolynomialExpr::to_json() const { return node_->to_json(); }

PolynomialExpr PolynomialExpr::from_json(const nlohmann::json& j) {
  return PolynomialExpr(Node::from_json(j));
}

nlohmann::json ApproximationCertificate::to_json() const {
  nlohmann::json j{{"grid_size", grid_size},
                   {"sup_error_outside", sup_error_outside},
                   {"sup_abs_inside", sup_abs_inside},
                   {"domain", {domain_lo, domain_hi}}};
  if (l1_error)
    j["l1_error"] = *l1_error;
  else
    j["l1_error"] = nullptr;
  return j;
}

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

UnivariatePolynomial jackson_approx(const std::function<double(double)>& f, double L,
                                    int r, int degree_cap) {
  if (!(L >= 0.0) || !std::isfinite(L))
    throw InvalidArgumentError("jackson_approx: Lipschitz constant must be finite and >= 0");
  if (r < 1) throw InvalidArgumentError("jackson_approx: degree must be >= 1");
  if (r > degree_cap)
    throw CapacityError("jackson_approx: degree " + std::to_string(r) +
                        " exceeds the cap " + std::to_string(degree_cap));

  const std::vector<double> grid = uniform_grid(-1.0, 1.0, kCertGridSize);
  std::vector<double> fg(grid.size());
  double sup_f = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fg[i] = f(grid[i]);
    if (!std::isfinite(fg[i]))
      throw NumericFailure("jackson_approx: target is not finite on [-1,1]");
    sup_f = std::max(sup_f, std::abs(fg[i]));
  }
  // The sup bound is checked with a tiny additive slack so that exactly
  // achievable targets (L = 0, or f already a polynomial) are not rejected
  // over grid-evaluation rounding.
  const double bound = 6.0 * L / r + 1e-10 * std::max(1.0, sup_f);

  int deg = r;
  double measured = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (attempt > 0)
      deg = std::min(static_cast<int>(std::ceil(1.5 * deg)), degree_cap);
    std::vector<double> values(static_cast<std::size_t>(deg) + 1);
    for (int j = 0; j <= deg; ++j) {
      values[static_cast<std::size_t>(j)] = f(cheb_node(j, deg));
      if (!std::isfinite(values[static_cast<std::size_t>(j)]))
        throw NumericFailure("jackson_approx: target is not finite at a node");
    }
    UnivariatePolynomial p =
        UnivariatePolynomial::chebyshev(dct_chebyshev_coeffs(values), degree_cap);
    std::vector<double> pv(grid.size());
    p.eval_batch(grid, pv);
    measured = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      measured = std::max(measured, std::abs(pv[i] - fg[i]));
    if (measured <= bound) return p;
    if (deg >= degree_cap) break;
  }
  throw ConstructionFailure("jackson_approx: measured sup error " + fmt(measured) +
                            " exceeds the certified bound " + fmt(bound) +
                            " after degree escalation");
}

CertifiedPoly booster_poly(double tau) {
  if (!(tau > 0.0) || !(tau <= 0.5) || !std::isfinite(tau))
    throw InvalidArgumentError("booster_poly: tolerance must be in (0, 1/2]");

  const double sigma = 2.0 * std::sqrt(2.0 * std::log(4.0 / (std::sqrt(2.0 * M_PI) * tau)));
  const double ymax = 1.5 * sigma;
  const auto k1 = static_cast<std::int64_t>(std::ceil(2.0 * (ymax * ymax) * M_E));
  const auto k2 = static_cast<std::int64_t>(std::ceil(std::log2(4.0 / tau)));
  const std::int64_t k = std::max(k1, k2);
  const std::int64_t deg = 2 * k - 1;
  if (deg > UnivariatePolynomial::kDefaultDegreeCap)
    throw CapacityError("booster_poly: degree " + std::to_string(deg) +
                        " exceeds the cap");

  // Construction error budget: the Horner recurrence over k terms carries a
  // relative 2^-200 per step against partial sums that peak near
  // sqrt(2/pi) * exp(ymax^2/2) * ymax. If that cannot land under tau/16 the
  // result would be unverifiable, so refuse up front.
  const double log_err = std::log(static_cast<double>(k)) - 200.0 * std::log(2.0) +
                         0.5 * ymax * ymax + std::log(0.8 * ymax);
  if (log_err > std::log(tau / 16.0))
    throw PrecisionFailure(
        "booster_poly: tolerance " + fmt(tau) +
        " is below what the construction arithmetic can certify (~1e-5)");

  // Odd-series coefficients around sqrt(2/pi): A_0 = sqrt(2/pi),
  // A_n = -A_{n-1} (2n-1) / (2n (2n+1)); the polynomial is
  // y * sum_n A_n (y^2)^n evaluated at y = sigma x. The raw A_n underflow the
  // double exponent range while their terms at ymax are still large, so the
  // series is carried in the rescaled variable w = y^2 / 2^m with 2^m >=
  // ymax^2: B_n = A_n 2^{mn} stays representable for every term that
  // matters, and both rescalings are exact powers of two. Once |B_n| drops
  // below 1e-280 the remaining terms contribute under 1e-245 even at w = 1
  // and the coefficient is pinned to exact zero before denormals degrade it.
  const int m_exp = std::ilogb(ymax * ymax) + 1;
  std::vector<Xp> b(static_cast<std::size_t>(k));
  {
    Xp root;  // sqrt(2/pi) to ~215 bits, least significant component first
    root.c[0] = 0x1.2706d8c0471b5p-167;
    root.c[1] = -0x1.c7402c7d60cfbp-111;
    root.c[2] = -0x1.cbc0d30ebfd15p-55;
    root.c[3] = 0x1.9884533d43651p-1;
    root.n = 4;
    b[0] = root;
    for (std::int64_t n = 1; n < k; ++n) {
      const double num = -(2.0 * static_cast<double>(n) - 1.0);
      const double den =
          2.0 * static_cast<double>(n) * (2.0 * static_cast<double>(n) + 1.0);
      Xp scaled = b[static_cast<std::size_t>(n - 1)];
      for (int i = 0; i < scaled.n; ++i) scaled.c[i] = std::ldexp(scaled.c[i], m_exp);
      Xp next = xp_div(xp_scale(scaled, num), den);
      if (std::abs(next.c[next.n - 1]) < 1e-280) next = xp_from(0.0);
      b[static_cast<std::size_t>(n)] = next;
    }
  }

  // Values at the extrema nodes of the degree-(2k-1) interpolant on
  // [-1.5, 1.5] (2k nodes, so the interpolant reproduces the polynomial
  // exactly up to the evaluation arithmetic). Oddness is exact, so only half
  // the nodes are evaluated.
  const auto count = static_cast<std::size_t>(deg) + 1;
  std::vector<double> values(count);
  for (std::int64_t j = 0; j < k; ++j) {
    const double t = cheb_node(static_cast<int>(j), static_cast<int>(deg));
    const double y = ymax * t;
    double z_lo;
    const double z_hi = two_prod(y, y, z_lo);
    const double w_hi = std::ldexp(z_hi, -m_exp);
    const double w_lo = std::ldexp(z_lo, -m_exp);
    Xp acc = b[static_cast<std::size_t>(k - 1)];
    for (std::int64_t n = k - 2; n >= 0; --n)
      acc = xp_add(xp_mul2(acc, w_hi, w_lo), b[static_cast<std::size_t>(n)]);
    const double v = xp_approx(xp_scale(acc, y));
    values[static_cast<std::size_t>(j)] = v;
    values[static_cast<std::size_t>(deg - j)] = -v;
  }

  UnivariatePolynomial cheb = UnivariatePolynomial::chebyshev(
      dct_chebyshev_coeffs(values), UnivariatePolynomial::kDefaultDegreeCap);
  PolynomialExpr expr = PolynomialExpr::composed(
      PolynomialExpr::leaf(std::move(cheb)),
      PolynomialExpr::leaf(UnivariatePolynomial({0.0, 1.0})), 1.5);

  const std::vector<double> grid = uniform_grid(-1.5, 1.5, kCertGridSize);
  const SignSup sup = measure_sign_sup(expr, grid, 0.5);
  if (sup.outside >= tau || sup.abs_all >= 1.0 + tau)
    throw ConstructionFailure("booster_poly: certification failed (sup outside " +
                              fmt(sup.outside) + ", sup abs " + fmt(sup.abs_all) + ")");
  ApproximationCertificate cert;
  cert.grid_size = kCertGridSize;
  cert.sup_error_outside = sup.outside;
  cert.sup_abs_inside = sup.abs_all;
  cert.domain_lo = -1.5;
  cert.domain_hi = 1.5;
  return CertifiedPoly{std::move(expr), cert};
}

CertifiedPoly sign_approx_truncated(double a, double gamma, double tau) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw InvalidArgumentError("sign_approx_truncated: window must be finite and > 0");
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw InvalidArgumentError("sign_approx_truncated: dead zone must be in (0, 1)");
  if (!(tau > 0.0) || !(tau <= 0.5))
    throw InvalidArgumentError("sign_approx_truncated: tolerance must be in (0, 1/2]");

  CertifiedPoly booster = booster_poly(tau);

  // A ramp that rises over the dead zone keeps the outer polynomial's
  // argument within +-0.5 of +-1 outside it: the approximation error of the
  // degree-ceil(12/gamma) interpolant is at most (6/gamma)/(12/gamma) = 1/2.
  const auto r = static_cast<int>(std::ceil(12.0 / gamma));
  auto ramp = [gamma](double x) { return std::clamp(x / gamma, -1.0, 1.0); };
  UnivariatePolynomial q = jackson_approx(ramp, 1.0 / gamma, r);

  PolynomialExpr expr =
      PolynomialExpr::composed(booster.poly, PolynomialExpr::leaf(std::move(q)), a);

  const std::vector<double> grid = uniform_grid(-a, a, kCertGridSize);
  const SignSup sup = measure_sign_sup(expr, grid, gamma * a);
  if (sup.outside >= tau || sup.abs_all >= 1.0 + tau)
    throw ConstructionFailure("sign_approx_truncated: certification failed (sup outside " +
                              fmt(sup.outside) + ", sup abs " + fmt(sup.abs_all) + ")");
  ApproximationCertificate cert;
  cert.grid_size = kCertGridSize;
  cert.sup_error_outside = sup.outside;
  cert.sup_abs_inside = sup.abs_all;
  cert.domain_lo = -a;
  cert.domain_hi = a;
  return CertifiedPoly{std::move(expr), cert};
}

CertifiedPoly sign_approx_shorttail(double sigma, double gamma, double tau,
                                    const DensityHandle& rho, double rdeg_multiplier) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidArgumentError("sign_approx_shorttail: sigma must be finite and > 0");
  if (!(gamma > 0.0) || !(gamma <= 1.0))
    throw InvalidArgumentError("sign_approx_shorttail: gamma must be in (0, 1]");
  if (!(tau > 0.0) || !(tau <= 0.5))
    throw InvalidArgumentError("sign_approx_shorttail: tolerance must be in (0, 1/2]");
  if (!(rdeg_multiplier > 0.0) || !std::isfinite(rdeg_multiplier))
    throw InvalidArgumentError("sign_approx_shorttail: multiplier must be finite and > 0");
  if (!rho.pdf) throw InvalidArgumentError("sign_approx_shorttail: density is empty");
  if (!(rho.lo < rho.hi) || !std::isfinite(rho.lo) || !std::isfinite(rho.hi))
    throw InvalidArgumentError("sign_approx_shorttail: density domain is invalid");
  if (tau > sigma / (2.0 * gamma))
    throw InvalidArgumentError(
        "sign_approx_shorttail: requires tau <= sigma / (2 gamma)");

  // Spot-check the declared bounds: bounded by 2/sigma and sub-Gaussian with
  // scale parameter matching the window analysis.
  {
    const double cap = 2.0 / sigma;
    const std::vector<double> spots = uniform_grid(rho.lo, rho.hi, 2048);
    for (double x : spots) {
      const double v = rho.pdf(x);
      if (!std::isfinite(v) || v < 0.0)
        throw InvalidArgumentError("sign_approx_shorttail: density is not finite/nonnegative");
      if (v > cap * (1.0 + 1e-9))
        throw InvalidArgumentError("sign_approx_shorttail: density exceeds 2/sigma at x=" +
                                   fmt(x));
      const double envelope = cap * std::exp(-x * x / (32.0 * sigma * sigma));
      if (v > envelope * (1.0 + 1e-9) + 1e-300)
        throw InvalidArgumentError(
            "sign_approx_shorttail: density exceeds its sub-Gaussian envelope at x=" +
            fmt(x));
    }
  }

  double mult = rdeg_multiplier;
  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt < 4; ++attempt) {
    const auto r_deg = static_cast<std::int64_t>(
        std::ceil(mult * std::log(M_E + 1.0 / tau) / (tau * tau)));
    const double a = static_cast<double>(r_deg) * tau * sigma;
    const double gamma_in = 1.0 / (100.0 * static_cast<double>(r_deg));
    const double tau_in = tau / 100.0;
    try {
      CertifiedPoly p = sign_approx_truncated(a, gamma_in, tau_in);
      const double l1 = l1_error_vs_sign(p.poly, rho, rho.lo, rho.hi,
                                         std::max(1e-6, tau * 1e-3), 100000);
      if (l1 <= tau) {
        p.certificate.l1_error = l1;
        return p;
      }
      last_failure = "measured l1 error " + fmt(l1) + " exceeds " + fmt(tau);
    } catch (const NumericFailure& e) {
      // A window too narrow for the density's support makes the polynomial
      // blow up inside the integral; widening the window is the designed
      // response, not an error.
      last_failure = e.what();
    } catch (const ConstructionFailure& e) {
      last_failure = e.what();
    }
    mult *= 1.5;
  }
  throw ConstructionFailure("sign_approx_shorttail: failed after 4 attempts: " +
                            last_failure);
}

double growth_bound(const UnivariatePolynomial& p, double a, double b, double x) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw InvalidArgumentError("growth_bound: window must be finite and > 0");
  if (!(b >= 0.0) || !std::isfinite(b))
    throw InvalidArgumentError("growth_bound: bound must be finite and >= 0");
  if (!std::isfinite(x)) throw InvalidArgumentError("growth_bound: point must be finite");
  const double t = std::abs(2.0 * x / a);
  if (t <= 1.0) return b;
  const auto deg = static_cast<double>(std::max(p.degree(), 0));
  return std::exp(std::log(b) + deg * std::log(t));
}

double l1_error_vs_sign(const PolynomialExpr& p, const DensityHandle& rho, double lo,
                        double hi, double abs_tol, int max_subdivisions) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgumentError("l1_error_vs_sign: requires finite lo < hi");
  if (!rho.pdf) throw InvalidArgumentError("l1_error_vs_sign: density is empty");
  BatchIntegrand g = [&p, &rho](std::span<const double> xs, std::span<double> out) {
    p.eval_batch(xs, out);
    for (std::size_t i = 0; i < xs.size(); ++i)
      out[i] = std::abs(out[i] - sign_of(xs[i])) * rho.pdf(xs[i]);
  };
  const bool split = lo < 0.0 && hi > 0.0;
  const double tol = split ? 0.5 * abs_tol : abs_tol;
  double total = 0.0;
  auto piece = [&](double aa, double bb) {
    const QuadratureResult res = integrate_batched(g, aa, bb, tol, max_subdivisions);
    if (!res.converged)
      throw NumericFailure("l1_error_vs_sign: quadrature did not converge (estimate " +
                           fmt(res.abs_error) + ")");
    total += res.value;
  };
  if (split) {
    piece(lo, 0.0);
    piece(0.0, hi);
  } else {
    piece(lo, hi);
  }
  return total;
}

}  // namespace halfspace
