#include "halfspace/regression.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "halfspace/errors.hpp"

namespace halfspace {
namespace {

// ---------------------------------------------------------------------------
// Monomial basis bookkeeping. Exponent vectors are enumerated once per (d, r)
// in graded-lex order together with parent links (every degree-k monomial is
// one variable times a degree-(k-1) monomial), so a feature row costs one
// multiply per monomial.
// ---------------------------------------------------------------------------

struct Basis {
  int d = 0;
  int r = 0;
  std::int64_t p = 0;
  std::vector<std::int32_t> parent;  // -1 for the constant term
  std::vector<std::int32_t> var;
  std::vector<std::vector<int>> expo;
};

// Exponent vectors with sum exactly `degree_left` from position `pos` on, in
// lex-descending order (largest exponent on the earliest variable first).
void enumerate_exponents(int d, int degree_left, int pos, std::vector<int>& e,
                         std::vector<std::vector<int>>& out) {
  if (pos == d - 1) {
    e[pos] = degree_left;
    out.push_back(e);
    return;
  }
  for (int k = degree_left; k >= 0; --k) {
    e[pos] = k;
    enumerate_exponents(d, degree_left - k, pos + 1, e, out);
  }
}

std::shared_ptr<const Basis> build_basis(int d, int r) {
  auto b = std::make_shared<Basis>();
  b->d = d;
  b->r = r;
  std::vector<int> e(static_cast<std::size_t>(d), 0);
  for (int k = 0; k <= r; ++k) enumerate_exponents(d, k, 0, e, b->expo);
  b->p = static_cast<std::int64_t>(b->expo.size());

  std::map<std::vector<int>, std::int32_t> index;
  for (std::int64_t i = 0; i < b->p; ++i) index[b->expo[static_cast<std::size_t>(i)]] = static_cast<std::int32_t>(i);
  b->parent.resize(static_cast<std::size_t>(b->p));
  b->var.resize(static_cast<std::size_t>(b->p));
  for (std::int64_t i = 0; i < b->p; ++i) {
    const auto& ex = b->expo[static_cast<std::size_t>(i)];
    int last = -1;
    for (int j = 0; j < d; ++j)
      if (ex[static_cast<std::size_t>(j)] > 0) last = j;
    if (last < 0) {
      b->parent[static_cast<std::size_t>(i)] = -1;
      b->var[static_cast<std::size_t>(i)] = 0;
      continue;
    }
    std::vector<int> pe = ex;
    --pe[static_cast<std::size_t>(last)];
    b->parent[static_cast<std::size_t>(i)] = index.at(pe);
    b->var[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(last);
  }
  return b;
}

std::shared_ptr<const Basis> get_basis(int d, int r, std::int64_t cap) {
  if (d < 2) throw InvalidArgumentError("monomial basis needs dimension >= 2, got " + std::to_string(d));
  if (r < 0) throw InvalidArgumentError("monomial basis needs degree >= 0, got " + std::to_string(r));
  const std::int64_t p = feature_count(d, r);
  if (p > cap)
    throw CapacityError("monomial feature count C(d+r, r) = " + std::to_string(p) +
                        " exceeds the cap " + std::to_string(cap) + " (d = " + std::to_string(d) +
                        ", r = " + std::to_string(r) + ")");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const Basis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({d, r});
  if (it != cache.end()) return it->second;
  auto b = build_basis(d, r);
  cache[{d, r}] = b;
  return b;
}

void fill_feature_row(const Basis& b, const Eigen::VectorXd& x, double* row) {
  for (std::int64_t i = 0; i < b.p; ++i) {
    const auto pi = b.parent[static_cast<std::size_t>(i)];
    row[i] = pi < 0 ? 1.0 : row[pi] * x[b.var[static_cast<std::size_t>(i)]];
  }
}

}  // namespace

std::int64_t feature_count(int d, int r) {
  if (d < 1 || r < 0) throw InvalidArgumentError("feature_count needs d >= 1, r >= 0");
  std::int64_t c = 1;
  for (int i = 1; i <= r; ++i) {
    // c <- c * (d + i) / i is integral at every step (it is C(d+i, i));
    // saturate rather than overflow.
    if (c > std::numeric_limits<std::int64_t>::max() / (d + i))
      return std::numeric_limits<std::int64_t>::max() / 2;
    c = c * (d + i) / i;
  }
  return c;
}

LabeledSample::LabeledSample(std::vector<UnitVector> points, std::vector<double> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (points_.size() != labels_.size())
    throw InvalidArgumentError("sample has " + std::to_string(points_.size()) + " points but " +
                               std::to_string(labels_.size()) + " labels");
  for (double y : labels_)
    if (y != 1.0 && y != -1.0) throw InvalidArgumentError("labels must be exactly +1 or -1");
  for (const auto& pt : points_)
    if (pt.dim() != points_[0].dim())
      throw InvalidArgumentError("all sample points must share one dimension");
}

Eigen::VectorXd monomial_features(const UnitVector& x, int r, std::int64_t feature_cap) {
  const auto b = get_basis(x.dim(), r, feature_cap);
  Eigen::VectorXd f(b->p);
  fill_feature_row(*b, x.coords(), f.data());
  return f;
}

Eigen::MatrixXd feature_matrix(const std::vector<UnitVector>& xs, int r, std::int64_t feature_cap) {
  if (xs.empty()) throw InvalidArgumentError("feature_matrix needs at least one point");
  const auto b = get_basis(xs[0].dim(), r, feature_cap);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), b->p);
  Eigen::VectorXd row(b->p);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fill_feature_row(*b, xs[i].coords(), row.data());
    X.row(static_cast<Eigen::Index>(i)) = row;
  }
  return X;
}

MultivariatePolynomial::MultivariatePolynomial(int dimension, int degree, Eigen::VectorXd coefficients)
    : dimension_(dimension), degree_(degree), coeffs_(std::move(coefficients)) {
  if (dimension_ < 2) throw InvalidArgumentError("polynomial dimension must be >= 2");
  if (degree_ < 0) throw InvalidArgumentError("polynomial degree must be >= 0");
  const std::int64_t p = feature_count(dimension_, degree_);
  if (coeffs_.size() != p)
    throw InvalidArgumentError("coefficient vector has " + std::to_string(coeffs_.size()) +
                               " entries; the degree-" + std::to_string(degree_) + " basis in " +
                               std::to_string(dimension_) + " variables has " + std::to_string(p));
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i)
    if (!std::isfinite(coeffs_[i])) throw InvalidArgumentError("polynomial coefficients must be finite");
}

std::vector<std::vector<int>> MultivariatePolynomial::exponents() const {
  return get_basis(dimension_, degree_, std::numeric_limits<std::int64_t>::max())->expo;
}

double MultivariatePolynomial::eval(const UnitVector& x) const {
  if (x.dim() != dimension_)
    throw InvalidArgumentError("polynomial in " + std::to_string(dimension_) +
                               " variables evaluated at a dim-" + std::to_string(x.dim()) + " point");
  const auto b = get_basis(dimension_, degree_, std::numeric_limits<std::int64_t>::max());
  Eigen::VectorXd f(b->p);
  fill_feature_row(*b, x.coords(), f.data());
  return f.dot(coeffs_);
}

Eigen::VectorXd MultivariatePolynomial::eval_batch(const std::vector<UnitVector>& xs) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
  const auto b = get_basis(dimension_, degree_, std::numeric_limits<std::int64_t>::max());
  Eigen::VectorXd f(b->p);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].dim() != dimension_)
      throw InvalidArgumentError("eval_batch point dimension mismatch");
    fill_feature_row(*b, xs[i].coords(), f.data());
    out[static_cast<Eigen::Index>(i)] = f.dot(coeffs_);
  }
  return out;
}

nlohmann::json MultivariatePolynomial::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  const auto expo = exponents();
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0.0) continue;
    terms.push_back({{"exponents", expo[static_cast<std::size_t>(i)]}, {"coefficient", coeffs_[i]}});
  }
  return {{"dimension", dimension_}, {"degree", degree_}, {"terms", std::move(terms)}};
}

MultivariatePolynomial MultivariatePolynomial::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dimension") || !j.contains("degree") || !j.contains("terms") ||
      !j["terms"].is_array())
    throw InvalidArgumentError("multivariate polynomial JSON needs dimension, degree, terms[]");
  const int d = j["dimension"].get<int>();
  const int r = j["degree"].get<int>();
  const auto b = get_basis(d, r, std::numeric_limits<std::int64_t>::max());
  std::map<std::vector<int>, std::int64_t> index;
  for (std::int64_t i = 0; i < b->p; ++i) index[b->expo[static_cast<std::size_t>(i)]] = i;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(b->p);
  for (const auto& term : j["terms"]) {
    if (!term.contains("exponents") || !term.contains("coefficient"))
      throw InvalidArgumentError("polynomial term needs exponents and coefficient");
    const auto ex = term["exponents"].get<std::vector<int>>();
    const auto it = index.find(ex);
    if (it == index.end()) throw InvalidArgumentError("polynomial term exponents outside the basis");
    c[static_cast<Eigen::Index>(it->second)] = term["coefficient"].get<double>();
  }
  return MultivariatePolynomial(d, r, std::move(c));
}

double mean_l1_loss(const MultivariatePolynomial& p, const LabeledSample& s) {
  if (s.size() < 1) throw InvalidArgumentError("mean_l1_loss needs a nonempty sample");
  const Eigen::VectorXd v = p.eval_batch(s.points());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += std::abs(v[i] - s.labels()[static_cast<std::size_t>(i)]);
  return sum / static_cast<double>(s.size());
}

double empirical_01_error(const PolynomialClassifier& c, const LabeledSample& s) {
  if (s.size() < 1) throw InvalidArgumentError("empirical_01_error needs a nonempty sample");
  const Eigen::VectorXd v = c.poly.eval_batch(s.points());
  std::int64_t wrong = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double pred = v[i] > c.threshold ? 1.0 : -1.0;
    if (pred != s.labels()[static_cast<std::size_t>(i)]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(s.size());
}

MultivariatePolynomial l1_regression(const LabeledSample& s, int r, const L1SolverOptions& opts) {
  if (s.size() < 1) throw InvalidArgumentError("l1_regression needs at least one sample");
  if (opts.optimality_gap <= 0.0 || !std::isfinite(opts.optimality_gap))
    throw InvalidArgumentError("optimality_gap must be positive");
  if (opts.max_iterations < 1) throw InvalidArgumentError("max_iterations must be >= 1");
  const int d = s.dim();
  Eigen::MatrixXd X = feature_matrix(s.points(), r, opts.feature_cap);
  const Eigen::Index m = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) y[i] = s.labels()[static_cast<std::size_t>(i)];

  // Column equilibration. On band-restricted inputs the powers of the band
  // coordinate live on scales gamma^k apart, so the Hessian diagonal spans
  // many orders of magnitude and a ridge relative to its largest entry would
  // crush every small-scale direction (the solver then crawls). Rescaling
  // each column to unit max-abs is a pure reparameterization of the same
  // objective; coefficients are mapped back on exit.
  Eigen::VectorXd col_scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double cs = X.col(j).cwiseAbs().maxCoeff();
    col_scale[j] = cs > 0.0 ? cs : 1.0;
  }
  X.array().rowwise() /= col_scale.transpose().array();

  // Ridge least-squares warm start.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  const double ls_ridge = std::max(1e-10 * gram.diagonal().maxCoeff(), 1e-12);
  gram.diagonal().array() += ls_ridge;
  Eigen::VectorXd c = Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower>(gram).solve(X.transpose() * y);

  // Primal-dual interior point on the LP form of least absolute deviations:
  //
  //   min 1'u + 1'v  s.t.  Xc - y = v - u, u >= 0, v >= 0
  //   max -y'lam     s.t.  X'lam = 0, -1 <= lam <= 1
  //
  // with perturbed complementarity u(1+lam) = mu, v(1-lam) = mu. Eliminating
  // the slack updates turns each Newton step into one p x p system
  // X' D^-1 X dc = rhs with d = u/(1+lam) + v/(1-lam); a Mehrotra
  // predictor-corrector reuses its factorization. Unlike active-set style
  // smoothing schemes, the iteration count does not degrade on the (heavily
  // degenerate) vertex structure of band-restricted sign regressions.
  Eigen::VectorXd resid = X * c - y;
  Eigen::VectorXd u = (-resid).cwiseMax(0.0).array() + 1.0;
  Eigen::VectorXd v = resid.cwiseMax(0.0).array() + 1.0;  // v - u = resid
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);

  const double md = static_cast<double>(m);
  const double feas_tol = 1e-8 * (1.0 + y.lpNorm<Eigen::Infinity>());
  Eigen::MatrixXd xs(m, p), h(p, p);
  Eigen::VectorXd zp(m), zm(m), dinv(m), q(m), dc(p), dlam(m), du(m), dv(m),
      dc2(p), dlam2(m), du2(m), dv2(m);
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    resid = X * c - y;
    zp = 1.0 + lam.array();  // dual slack of u
    zm = 1.0 - lam.array();  // dual slack of v
    const Eigen::VectorXd r_prim = resid - v + u;
    const Eigen::VectorXd r_dual = X.transpose() * lam;
    // Stop on complementarity + primal feasibility. Dual infeasibility is not
    // driven to zero separately: the ridge-regularized normal equations leave
    // a conditioning-limited floor in X'lam, whose leakage into the gap
    // certificate is orders of magnitude below the gap target itself.
    const double gap = u.dot(zp) + v.dot(zm);
    if (gap / md <= opts.optimality_gap &&
        r_prim.lpNorm<Eigen::Infinity>() <= feas_tol) {
      converged = true;
      break;
    }

    dinv = 1.0 / (u.array() / zp.array() + v.array() / zm.array());
    xs = dinv.cwiseSqrt().asDiagonal() * X;
    h.setZero();
    h.selfadjointView<Eigen::Lower>().rankUpdate(xs.transpose());
    h.diagonal().array() += std::max(1e-12 * h.diagonal().maxCoeff(), 1e-30);
    const Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower> ldlt(h);

    // Affine predictor (mu = 0): the complementarity residuals collapse so
    // that q = r_prim - u + v = resid.
    const auto solve_direction = [&](const Eigen::VectorXd& rc_u,
                                     const Eigen::VectorXd& rc_v,
                                     Eigen::VectorXd& out_dc,
                                     Eigen::VectorXd& out_dlam,
                                     Eigen::VectorXd& out_du,
                                     Eigen::VectorXd& out_dv) {
      q = r_prim + (rc_u.array() / zp.array() - rc_v.array() / zm.array()).matrix();
      out_dc = ldlt.solve(-r_dual - X.transpose() * (dinv.asDiagonal() * q));
      out_dlam = dinv.asDiagonal() * (X * out_dc + q);
      out_du = ((rc_u.array() - u.array() * out_dlam.array()) / zp.array()).matrix();
      out_dv = ((rc_v.array() + v.array() * out_dlam.array()) / zm.array()).matrix();
    };
    const auto step_lengths = [&](const Eigen::VectorXd& sdu,
                                  const Eigen::VectorXd& sdv,
                                  const Eigen::VectorXd& sdlam, double frac) {
      double ap = 1.0, ad = 1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (sdu[i] < 0.0) ap = std::min(ap, -frac * u[i] / sdu[i]);
        if (sdv[i] < 0.0) ap = std::min(ap, -frac * v[i] / sdv[i]);
        if (sdlam[i] < 0.0) ad = std::min(ad, -frac * zp[i] / sdlam[i]);
        if (sdlam[i] > 0.0) ad = std::min(ad, frac * zm[i] / sdlam[i]);
      }
      return std::pair<double, double>(ap, ad);
    };

    solve_direction(-u.cwiseProduct(zp), -v.cwiseProduct(zm), dc, dlam, du, dv);
    const auto [ap_aff, ad_aff] = step_lengths(du, dv, dlam, 1.0);
    const double gap_aff = (u + ap_aff * du).dot(zp + ad_aff * dlam) +
                           (v + ap_aff * dv).dot(zm - ad_aff * dlam);
    const double mu = gap / (2.0 * md);
    double sigma = gap_aff / std::max(gap, 1e-300);
    sigma = std::clamp(sigma * sigma * sigma, 1e-8, 0.99);

    // Corrector: recenter to sigma*mu and absorb the predictor's
    // second-order complementarity terms; same factorization.
    solve_direction(
        (sigma * mu - (u.array() * zp.array()) - (du.array() * dlam.array()))
            .matrix(),
        (sigma * mu - (v.array() * zm.array()) + (dv.array() * dlam.array()))
            .matrix(),
        dc2, dlam2, du2, dv2);
    const auto [ap, ad] = step_lengths(du2, dv2, dlam2, 0.995);
    // Breakdown guard: once mu underflows the scaling matrix, directions stop
    // being finite; keep the last clean iterate and let the floor test below
    // decide whether it qualifies.
    if (!(dc2.allFinite() && du2.allFinite() && dv2.allFinite() && dlam2.allFinite())) break;
    c += ap * dc2;
    u += ap * du2;
    v += ap * dv2;
    lam += ad * dlam2;
  }
  if (!converged) {
    resid = X * c - y;
    const double gap = u.dot((1.0 + lam.array()).matrix()) + v.dot((1.0 - lam.array()).matrix());
    if (gap / md <= 100.0 * opts.optimality_gap &&
        (resid - v + u).lpNorm<Eigen::Infinity>() <= feas_tol) {
      converged = true;
    } else {
      const double achieved = resid.cwiseAbs().sum() / md;
      throw OptimizationFailure("l1 solver budget of " + std::to_string(opts.max_iterations) +
                                " interior-point steps exhausted; achieved mean loss " +
                                std::to_string(achieved));
    }
  }
  c.array() /= col_scale.array();
  return MultivariatePolynomial(d, r, std::move(c));
}

PolynomialClassifier threshold_search(const MultivariatePolynomial& p, const LabeledSample& s) {
  if (s.size() < 1) throw InvalidArgumentError("threshold_search needs at least one sample");
  const Eigen::VectorXd raw = p.eval_batch(s.points());
  const auto m = static_cast<std::size_t>(s.size());
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raw[static_cast<Eigen::Index>(a)] < raw[static_cast<Eigen::Index>(b)];
  });
  std::vector<double> v(m);
  std::vector<std::int64_t> plus_prefix(m + 1, 0);
  std::int64_t plus_total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = raw[static_cast<Eigen::Index>(order[i])];
    const bool plus = s.labels()[order[i]] == 1.0;
    plus_prefix[i + 1] = plus_prefix[i] + (plus ? 1 : 0);
    plus_total += plus ? 1 : 0;
  }
  const std::int64_t minus_total = static_cast<std::int64_t>(m) - plus_total;

  // Mistakes for threshold a: +1 points predicted -1 (value <= a) plus -1
  // points predicted +1 (value > a); cut = #values <= a.
  auto mistakes_at = [&](double a) {
    const auto cut = static_cast<std::int64_t>(std::upper_bound(v.begin(), v.end(), a) - v.begin());
    return plus_prefix[static_cast<std::size_t>(cut)] + (minus_total - (cut - plus_prefix[static_cast<std::size_t>(cut)]));
  };

  std::vector<double> candidates;
  candidates.push_back(v.front() - 1.0);  // below-min sentinel: everything +1
  candidates.push_back(v.back() + 1.0);   // above-max sentinel: everything -1
  candidates.push_back(0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (v[i] == v[i + 1]) continue;
    double mid = v[i] + 0.5 * (v[i + 1] - v[i]);
    if (mid >= v[i + 1]) mid = v[i];  // adjacent doubles: keep the cut exact
    candidates.push_back(mid);
  }

  double best_a = candidates[0];
  std::int64_t best_err = mistakes_at(best_a);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double a = candidates[i];
    const std::int64_t err = mistakes_at(a);
    const bool better = err < best_err ||
                        (err == best_err && (std::abs(a) < std::abs(best_a) ||
                                             (std::abs(a) == std::abs(best_a) && a < best_a)));
    if (better) {
      best_a = a;
      best_err = err;
    }
  }
  return PolynomialClassifier{p, best_a};
}

PolynomialClassifier kkms_learn(const LabeledSample& s, int r, const L1SolverOptions& opts) {
  return threshold_search(l1_regression(s, r, opts), s);
}

void write_samples_csv(const std::string& path, const LabeledSample& s) {
  std::ofstream out(path);
  if (!out) throw InvalidArgumentError("cannot open " + path + " for writing");
  const int d = s.dim();
  for (int j = 0; j < d; ++j) out << "x" << (j + 1) << ",";
  out << "y\n";
  char buf[40];
  for (std::int64_t i = 0; i < s.size(); ++i) {
    const auto& x = s.points()[static_cast<std::size_t>(i)].coords();
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", x[j]);
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", s.labels()[static_cast<std::size_t>(i)]);
    out << buf << "\n";
  }
  if (!out) throw InvalidArgumentError("write to " + path + " failed");
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

LabeledSample read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgumentError(path + ": empty file");
  const auto header = split_csv_row(line);
  if (header.size() < 3 || header.back() != "y")
    throw InvalidArgumentError(path + ": header must be x1,..,xd,y");
  const int d = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < d; ++j)
    if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j + 1))
      throw InvalidArgumentError(path + ": header must be x1,..,xd,y");

  std::vector<UnitVector> points;
  std::vector<double> labels;
  std::int64_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != static_cast<std::size_t>(d) + 1)
      throw InvalidArgumentError(path + ": row " + std::to_string(row) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " + std::to_string(d + 1));
    Vec x(d);
    for (int j = 0; j <= d; ++j) {
      const std::string& f = fields[static_cast<std::size_t>(j)];
      char* end = nullptr;
      const double val = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0')
        throw InvalidArgumentError(path + ": row " + std::to_string(row) + ": bad number '" + f + "'");
      if (j < d)
        x[j] = val;
      else
        labels.push_back(val);
    }
    points.emplace_back(std::move(x));
  }
  return LabeledSample(std::move(points), std::move(labels));
}

}  // namespace halfspace
