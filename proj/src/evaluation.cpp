#include "halfspace/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "halfspace/errors.hpp"
#include "halfspace/parallel.hpp"
#include "halfspace/polynomials.hpp"
#include "halfspace/quadrature.hpp"

namespace halfspace {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_of(double x) { return x > 0.0 ? 1.0 : -1.0; }

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Same spacing convention as the construction-side certification grids, so
// re-measured sups land on the very same points.
std::vector<double> uniform_grid(double lo, double hi, std::int64_t n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::int64_t i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + step * i;
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

double flip_chance_at(const NoiseModel& m, double target_margin) {
  switch (m.kind()) {
    case NoiseModel::Kind::realizable:
      return 0.0;
    case NoiseModel::Kind::rcn:
      return m.flip_probability();
    case NoiseModel::Kind::band_flip:
      return std::abs(target_margin) <= m.width() ? m.rate() : 0.0;
  }
  return 0.0;
}

// A fresh seed for a library call that takes one, derived the same way forked
// sub-streams are.
std::uint64_t derive_seed(const Rng& base, std::uint64_t stream) {
  Rng r = base.fork(stream);
  return r.bits();
}

}  // namespace

NoiseModel::NoiseModel(Kind kind, UnitVector target, double a, double b)
    : kind_(kind), target_(std::move(target)), a_(a), b_(b) {}

NoiseModel NoiseModel::realizable(UnitVector target) {
  return NoiseModel(Kind::realizable, std::move(target), 0.0, 0.0);
}

NoiseModel NoiseModel::rcn(UnitVector target, double flip_probability) {
  if (!(flip_probability >= 0.0 && flip_probability < 0.5))
    throw InvalidArgumentError("rcn: flip probability must lie in [0, 1/2)");
  return NoiseModel(Kind::rcn, std::move(target), flip_probability, 0.0);
}

NoiseModel NoiseModel::band_flip(UnitVector target, double width, double rate) {
  if (!(width > 0.0 && width <= 1.0))
    throw InvalidArgumentError("band_flip: width must lie in (0, 1]");
  if (!(rate >= 0.0 && rate <= 1.0))
    throw InvalidArgumentError("band_flip: rate must lie in [0, 1]");
  return NoiseModel(Kind::band_flip, std::move(target), width, rate);
}

double NoiseModel::flip_probability() const {
  if (kind_ != Kind::rcn)
    throw InvalidArgumentError("flip_probability: not an rcn model");
  return a_;
}

double NoiseModel::width() const {
  if (kind_ != Kind::band_flip)
    throw InvalidArgumentError("width: not a band_flip model");
  return a_;
}

double NoiseModel::rate() const {
  if (kind_ != Kind::band_flip)
    throw InvalidArgumentError("rate: not a band_flip model");
  return b_;
}

double NoiseModel::flip_chance(const UnitVector& x) const {
  if (x.dim() != dim())
    throw InvalidArgumentError("flip_chance: dimension mismatch");
  return flip_chance_at(*this, x.dot(target_));
}

LabelOracle::LabelOracle(NoiseModel model, std::uint64_t seed)
    : model_(std::move(model)), rng_(seed) {}

const UnitVector& LabelOracle::draw() {
  const int d = model_.dim();
  Vec g(d);
  for (int j = 0; j < d; ++j) g[j] = rng_.gaussian();
  last_point_.emplace(std::move(g));
  // The flip coin is spent on every draw, revealed or not, so the point
  // stream is the same under every noise model sharing a seed.
  const double coin = rng_.uniform();
  double y = sign_of(last_point_->dot(model_.target()));
  if (coin < model_.flip_chance(*last_point_)) y = -y;
  last_label_ = y;
  last_counted_ = false;
  ++draws_;
  return *last_point_;
}

double LabelOracle::reveal() {
  if (!last_point_)
    throw InvalidArgumentError("reveal: nothing has been drawn yet");
  if (!last_counted_) {
    ++labels_;
    last_counted_ = true;
  }
  return last_label_;
}

std::pair<UnitVector, double> LabelOracle::draw_labeled() {
  UnitVector x = draw();
  return {std::move(x), reveal()};
}

double exact_halfspace_error(const NoiseModel& model, const UnitVector& w) {
  const double t = disagreement_mass(w, model.target());
  switch (model.kind()) {
    case NoiseModel::Kind::realizable:
      return t;
    case NoiseModel::Kind::rcn: {
      const double p = model.flip_probability();
      return p + (1.0 - 2.0 * p) * t;
    }
    case NoiseModel::Kind::band_flip:
      throw InvalidArgumentError(
          "exact_halfspace_error: band_flip noise has no closed form; use mc_error");
  }
  throw InvalidArgumentError("exact_halfspace_error: unknown noise kind");
}

nlohmann::json ErrorEstimate::to_json() const {
  return nlohmann::json{{"mean", mean}, {"stderr", std_error}, {"n", n}};
}

ErrorEstimate mc_error(const ClassifierFn& classifier, const NoiseModel& model,
                       std::int64_t n, std::uint64_t seed) {
  if (!classifier) throw InvalidArgumentError("mc_error: classifier is empty");
  if (n < 1) throw InvalidArgumentError("mc_error: needs at least one draw");
  const int d = model.dim();
  Rng base(seed);
  const std::int64_t mistakes = parallel_reduce<std::int64_t>(
      static_cast<std::uint64_t>(n), 0,
      [&](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
        Rng rng = base.fork(chunk);
        std::int64_t m = 0;
        Vec g(d);
        for (std::uint64_t i = lo; i < hi; ++i) {
          for (int j = 0; j < d; ++j) g[j] = rng.gaussian();
          UnitVector x(g);
          const double coin = rng.uniform();
          double y = sign_of(x.dot(model.target()));
          if (coin < model.flip_chance(x)) y = -y;
          if ((classifier(x) > 0.0 ? 1.0 : -1.0) != y) ++m;
        }
        return m;
      },
      [](std::int64_t a, std::int64_t b) { return a + b; });
  ErrorEstimate e;
  e.n = n;
  e.mean = static_cast<double>(mistakes) / static_cast<double>(n);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  return e;
}

// ---------------------------------------------------------------------------
// Lemma-verification suite
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<const char*, 14> kSuiteGroups = {
    "geometry.norm",         "geometry.normalization",
    "geometry.gauss-envelope", "geometry.band-peak",
    "geometry.band-tail",    "geometry.angle-error",
    "geometry.far-disagreement", "poly.jackson",
    "poly.booster",          "poly.compose",
    "poly.growth",           "poly.shorttail-l1",
    "poly.uniform-lift",     "band.sign-l1"};

struct SuiteContext {
  const LemmaSuiteConfig& cfg;
  Rng base;
  std::vector<LemmaCheckRow> rows;

  bool want(const char* group) const {
    if (cfg.groups.empty()) return true;
    return std::find(cfg.groups.begin(), cfg.groups.end(), group) != cfg.groups.end();
  }
  void add(const char* group, std::string item, bool pass, double observed, double bound) {
    rows.push_back({group, std::move(item), pass ? "pass" : "fail", observed, bound});
  }
  void add_violation(const char* group, std::string item, double observed, double bound) {
    rows.push_back({group, std::move(item), "precondition-violation", observed, bound});
  }
};

// Random unit wstar plus a companion w at exactly `theta` radians from it.
std::pair<Vec, Vec> angled_pair(Rng& rng, int d, double theta) {
  Vec wstar(d), u(d);
  do {
    for (int j = 0; j < d; ++j) wstar[j] = rng.gaussian();
  } while (wstar.norm() < 1e-9);
  wstar.normalize();
  do {
    for (int j = 0; j < d; ++j) u[j] = rng.gaussian();
    u -= u.dot(wstar) * wstar;
  } while (u.norm() < 1e-9);
  u.normalize();
  return {wstar, std::cos(theta) * wstar + std::sin(theta) * u};
}

void norm_rows(SuiteContext& s) {
  if (!s.want("geometry.norm")) return;
  int idx = 0;
  for (int d : {2, 3, 10, 100}) {
    const auto pts = sample_uniform_sphere(d, 1000, derive_seed(s.base, 1000 + idx));
    double worst = 0.0;
    for (const auto& u : pts)
      worst = std::max(worst, std::abs(u.coords().norm() - 1.0));
    s.add("geometry.norm", "d=" + std::to_string(d) + " n=1000", worst <= 1e-12, worst,
          1e-12);
    ++idx;
  }
}

void normalization_rows(SuiteContext& s) {
  if (!s.want("geometry.normalization")) return;
  for (int d = 2; d <= s.cfg.envelope_dimension_max; ++d) {
    double obs = kInf;
    try {
      // Integrate in the angle variable, where the integrand is the smooth
      // cos^{d-2} for every d (the t-form is endpoint-singular at d = 2).
      auto f = [d](double phi) {
        return marginal_density(d, 1.0, std::sin(phi)) * std::cos(phi);
      };
      const double mass = integrate_or_throw(f, -M_PI / 2.0, M_PI / 2.0, 1e-10, 20000);
      obs = std::abs(mass - 1.0);
    } catch (const NumericFailure&) {
    }
    s.add("geometry.normalization", "d=" + std::to_string(d), obs <= 1e-9, obs, 1e-9);
  }
}

void envelope_rows(SuiteContext& s) {
  if (!s.want("geometry.gauss-envelope")) return;
  const int grid = s.cfg.envelope_grid;
  for (int d = 2; d <= s.cfg.envelope_dimension_max; ++d) {
    // The d = 2 arc-length density diverges near |t| = 1 while the envelope
    // stays bounded, so that dimension is checked on the interior only.
    const double tmax = (d == 2) ? 0.9 : 1.0;
    for (int i = 0; i < grid; ++i) {
      const double t = -tmax + 2.0 * tmax * i / static_cast<double>(grid - 1);
      const bool ok = marginal_density_bound_check(d, t);
      const double dens = marginal_density(d, 1.0, t);
      const double env = std::sqrt(static_cast<double>(d)) * std::exp(-t * t * d / 4.0);
      s.add("geometry.gauss-envelope", "d=" + std::to_string(d) + " t=" + fmt6(t), ok,
            dens, env);
    }
  }
}

void band_density_rows(SuiteContext& s) {
  const bool wp = s.want("geometry.band-peak");
  const bool wt = s.want("geometry.band-tail");
  if (!wp && !wt) return;
  struct Cfg {
    int d;
    double gamma, theta;
  };
  // d >= 4 throughout: the tail envelope leans on the gaussian bound for the
  // (d-1)-dimensional cross-section.
  static constexpr Cfg cfgs[] = {
      {10, 0.1, 0.4}, {30, 0.05, 0.2}, {6, 0.2, 1.0}, {15, 0.1, 2.6}};
  const int grid = s.cfg.band_grid;
  for (const auto& c : cfgs) {
    const StripDensityParams params(c.d, c.gamma, c.theta);
    const double peak = std::sqrt(static_cast<double>(c.d)) /
                        (std::sin(c.theta) * std::sqrt(1.0 - c.gamma * c.gamma));
    const std::string tag = "d=" + std::to_string(c.d) + " gamma=" + fmt6(c.gamma) +
                            " theta=" + fmt6(c.theta);
    for (int i = 0; i < grid; ++i) {
      const double z = -1.0 + 2.0 * i / static_cast<double>(grid - 1);
      const double dens = strip_projected_density(params, z);
      if (wp)
        s.add("geometry.band-peak", tag + " z=" + fmt6(z), dens <= peak, dens, peak);
      if (wt && std::abs(z) >= c.gamma) {
        const double gap = std::abs(z) - c.gamma;
        const double env = peak * std::exp(-(c.d - 1) * gap * gap /
                                           (4.0 * std::sin(c.theta) * std::sin(c.theta)));
        s.add("geometry.band-tail", tag + " z=" + fmt6(z),
              strip_density_tail_check(params, z), dens, env);
      }
    }
  }
}

void disagreement_rows(SuiteContext& s) {
  const bool wa = s.want("geometry.angle-error");
  const bool wf = s.want("geometry.far-disagreement");
  if (!wa && !wf) return;
  const std::int64_t n = s.cfg.mc_samples;
  static constexpr double kR[3] = {0.5, 1.0, 2.0};
  static constexpr const char* kNoiseName[4] = {"realizable", "rcn(0.1)",
                                                "band_flip(0.2,0.5)", "rcn(0.3)"};
  std::vector<LemmaCheckRow> far;
  int cfg_index = 0;
  for (int d : {10, 50}) {
    for (double theta : {0.1, 0.3, 1.0}) {
      Rng stream = s.base.fork(2000 + static_cast<std::uint64_t>(cfg_index));
      const auto [wstar, w] = angled_pair(stream, d, theta);
      // Cycle the noise kinds: the angle inequality holds under any labels.
      const NoiseModel model = [&] {
        switch (cfg_index % 4) {
          case 0:
            return NoiseModel::realizable(UnitVector(wstar));
          case 1:
            return NoiseModel::rcn(UnitVector(wstar), 0.1);
          case 2:
            return NoiseModel::band_flip(UnitVector(wstar), 0.2, 0.5);
          default:
            return NoiseModel::rcn(UnitVector(wstar), 0.3);
        }
      }();

      struct Acc {
        std::int64_t s1 = 0, s2 = 0;
        std::array<std::int64_t, 3> far{};
      };
      const Acc acc = parallel_reduce<Acc>(
          static_cast<std::uint64_t>(n), Acc{},
          [&](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
            Rng rng = stream.fork(chunk);
            Acc a;
            Vec g(d);
            for (std::uint64_t i = lo; i < hi; ++i) {
              for (int j = 0; j < d; ++j) g[j] = rng.gaussian();
              g.normalize();
              const double pw = g.dot(w);
              const double ps = g.dot(wstar);
              const double coin = rng.uniform();
              double y = sign_of(ps);
              if (coin < flip_chance_at(model, ps)) y = -y;
              const int mistakes = static_cast<int>(sign_of(pw) != y) +
                                   static_cast<int>(sign_of(ps) != y);
              a.s1 += mistakes;
              a.s2 += mistakes * mistakes;
              if (sign_of(pw) != sign_of(ps))
                for (int k = 0; k < 3; ++k)
                  if (std::abs(pw) > kR[k] * theta) ++a.far[k];
            }
            return a;
          },
          [](Acc x, const Acc& y) {
            x.s1 += y.s1;
            x.s2 += y.s2;
            for (int k = 0; k < 3; ++k) x.far[k] += y.far[k];
            return x;
          });

      const std::string tag = "d=" + std::to_string(d) + " theta=" + fmt6(theta);
      if (wa) {
        const double mean = static_cast<double>(acc.s1) / static_cast<double>(n);
        const double var =
            (static_cast<double>(acc.s2) - static_cast<double>(n) * mean * mean) /
            static_cast<double>(n - 1);
        const double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
        const double bound = mean + 3.0 * se;
        const double obs = theta / M_PI;
        s.add("geometry.angle-error", tag + " " + kNoiseName[cfg_index % 4], obs <= bound,
              obs, bound);
      }
      if (wf) {
        for (int k = 0; k < 3; ++k) {
          const double phat = static_cast<double>(acc.far[k]) / static_cast<double>(n);
          const double se = std::sqrt(phat * (1.0 - phat) / static_cast<double>(n));
          const double bound =
              (4.0 * theta / M_PI) * std::exp(-kR[k] * kR[k] * d / 8.0) + 3.0 * se;
          far.push_back({"geometry.far-disagreement", tag + " r=" + fmt6(kR[k]),
                         phat <= bound ? "pass" : "fail", phat, bound});
        }
      }
      ++cfg_index;
    }
  }
  for (auto& r : far) s.rows.push_back(std::move(r));
}

void jackson_rows(SuiteContext& s) {
  if (!s.want("poly.jackson")) return;
  struct Target {
    const char* name;
    double (*f)(double);
    double L;
    int r;
  };
  static constexpr Target targets[] = {
      {"cos(3x)", [](double x) { return std::cos(3.0 * x); }, 3.0, 40},
      {"|x|", [](double x) { return std::abs(x); }, 1.0, 60},
      {"clamp(5x)", [](double x) { return std::clamp(5.0 * x, -1.0, 1.0); }, 5.0, 80},
  };
  const std::vector<double> grid = uniform_grid(-1.0, 1.0, 20001);
  std::vector<double> vals(grid.size());
  for (const auto& t : targets) {
    const double bound = 6.0 * t.L / static_cast<double>(t.r) + 1e-8;
    std::string item =
        std::string(t.name) + " L=" + fmt6(t.L) + " r=" + std::to_string(t.r);
    try {
      const UnivariatePolynomial p = jackson_approx(t.f, t.L, t.r);
      p.eval_batch(grid, vals);
      double sup = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        sup = std::max(sup, std::abs(vals[i] - t.f(grid[i])));
      s.add("poly.jackson", std::move(item), sup <= bound, sup, bound);
    } catch (const Error&) {
      s.add("poly.jackson", std::move(item), false, kInf, bound);
    }
  }
}

void booster_rows(SuiteContext& s) {
  if (!s.want("poly.booster")) return;
  const std::vector<double> grid = uniform_grid(-1.5, 1.5, 100001);
  std::vector<double> vals(grid.size());
  for (double tau : {0.5, 0.25, 0.1}) {
    const std::string tag = "tau=" + fmt6(tau);
    try {
      const CertifiedPoly cp = booster_poly(tau);
      cp.poly.eval_batch(grid, vals);
      double sup_all = 0.0, sup_out = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        sup_all = std::max(sup_all, std::abs(vals[i]));
        if (std::abs(grid[i]) >= 0.5)
          sup_out = std::max(sup_out, std::abs(vals[i] - sign_of(grid[i])));
      }
      s.add("poly.booster", tag + " bounded", sup_all < 1.0 + tau, sup_all, 1.0 + tau);
      s.add("poly.booster", tag + " outside", sup_out < tau, sup_out, tau);
    } catch (const Error&) {
      s.add("poly.booster", tag + " bounded", false, kInf, 1.0 + tau);
      s.add("poly.booster", tag + " outside", false, kInf, tau);
    }
  }
}

void compose_rows(SuiteContext& s) {
  if (!s.want("poly.compose")) return;
  const std::vector<double> grid = uniform_grid(-1.0, 1.0, 1001);
  auto check = [&](const char* name, const UnivariatePolynomial& outer,
                   const UnivariatePolynomial& inner) {
    const UnivariatePolynomial c = compose(outer, inner);
    double worst = 0.0;
    for (double x : grid)
      worst = std::max(worst, std::abs(c.eval(x) - outer.eval(inner.eval(x))));
    s.add("poly.compose", name, worst <= 1e-8, worst, 1e-8);
  };
  check("cubic in quadratic", UnivariatePolynomial({0.5, -1.0, 0.25, 2.0}),
        UnivariatePolynomial({0.0, 1.5, -0.5}));
  Rng rng = s.base.fork(5000);
  std::vector<double> oc(7), ic(6);
  for (auto& c : oc) c = rng.uniform(-1.0, 1.0);
  for (auto& c : ic) c = rng.uniform(-0.25, 0.25);
  check("random deg 6 in deg 5", UnivariatePolynomial(oc), UnivariatePolynomial(ic));
}

void growth_rows(SuiteContext& s) {
  if (!s.want("poly.growth")) return;
  struct Item {
    std::string name;
    UnivariatePolynomial p;
    double a;
  };
  std::vector<Item> items;
  {
    Rng rng = s.base.fork(5001);
    std::vector<double> c(13);
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    items.push_back({"random monomial deg 12", UnivariatePolynomial(c), 0.7});
  }
  items.push_back({"interpolant of |x| r=60",
                   jackson_approx([](double x) { return std::abs(x); }, 1.0, 60), 1.0});
  items.push_back(
      {"interpolant of cos(3x) r=40",
       jackson_approx([](double x) { return std::cos(3.0 * x); }, 3.0, 40), 1.0});
  items.push_back({"chebyshev mix deg 8",
                   UnivariatePolynomial::chebyshev(
                       {0.3, -0.5, 0.2, 0.7, -0.1, 0.05, 0.4, -0.2, 0.15}),
                   1.3});
  static constexpr double kScale[] = {1.02, 1.05, 1.1, 1.15, 1.2};
  for (const auto& it : items) {
    const std::vector<double> grid = uniform_grid(-it.a, it.a, 10001);
    std::vector<double> vals(grid.size());
    it.p.eval_batch(grid, vals);
    double b = 0.0;
    for (double v : vals) b = std::max(b, std::abs(v));
    double worst = 0.0;
    for (double t : kScale)
      for (double sgn : {-1.0, 1.0}) {
        const double x = sgn * t * it.a;
        worst = std::max(worst, std::abs(it.p.eval(x)) / growth_bound(it.p, it.a, b, x));
      }
    s.add("poly.growth", it.name, worst <= 1.0, worst, 1.0);
  }
}

void shorttail_rows(SuiteContext& s) {
  if (!s.want("poly.shorttail-l1")) return;
  struct Cfg {
    double sigma, gamma, tau;
  };
  // The second window starts too narrow for its density and must escalate.
  static constexpr Cfg cfgs[] = {{0.3, 0.05, 0.5}, {0.16, 0.05, 0.5}};
  for (const auto& c : cfgs) {
    DensityHandle rho;
    const double sg = c.sigma;
    rho.pdf = [sg](double x) { return (1.0 / sg) * std::exp(-x * x / (32.0 * sg * sg)); };
    const std::string item = "sigma=" + fmt6(c.sigma) + " gamma=" + fmt6(c.gamma) +
                             " tau=" + fmt6(c.tau);
    try {
      const CertifiedPoly cp = sign_approx_shorttail(c.sigma, c.gamma, c.tau, rho);
      const double l1 = cp.certificate.l1_error.value_or(kInf);
      s.add("poly.shorttail-l1", item, l1 <= c.tau, l1, c.tau);
    } catch (const Error&) {
      s.add("poly.shorttail-l1", item, false, kInf, c.tau);
    }
  }
}

void lift_rows(SuiteContext& s) {
  if (!s.want("poly.uniform-lift")) return;
  const int d = 20;
  const double tau = 0.25;
  const double sigma = 1.0 / std::sqrt(static_cast<double>(d));
  const std::int64_t n = s.cfg.lift_samples > 0 ? s.cfg.lift_samples : s.cfg.mc_samples;
  DensityHandle rho;
  rho.pdf = [](double z) { return marginal_density(d, 1.0, z); };
  CertifiedPoly cp;
  try {
    cp = sign_approx_shorttail(sigma, 0.05, tau, rho);
  } catch (const Error&) {
    s.add("poly.uniform-lift", "d=20 tau=0.25 build", false, kInf, tau);
    return;
  }
  const double l1 = cp.certificate.l1_error.value_or(kInf);
  s.add("poly.uniform-lift", "d=20 tau=0.25 build", l1 <= tau, l1, tau);

  // The same l1 distance, estimated from scratch: project fresh sphere points
  // onto the target and average |sign - p|.
  Rng stream = s.base.fork(3000);
  struct Acc {
    double sum = 0.0, sumsq = 0.0;
  };
  const Acc acc = parallel_reduce<Acc>(
      static_cast<std::uint64_t>(n), Acc{},
      [&](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
        Rng rng = stream.fork(chunk);
        std::vector<double> zs;
        zs.reserve(hi - lo);
        for (std::uint64_t i = lo; i < hi; ++i) {
          double g1 = 0.0, ss = 0.0;
          for (int j = 0; j < d; ++j) {
            const double g = rng.gaussian();
            if (j == 0) g1 = g;
            ss += g * g;
          }
          zs.push_back(g1 / std::sqrt(ss));
        }
        std::vector<double> vs(zs.size());
        cp.poly.eval_batch(zs, vs);
        Acc a;
        for (std::size_t k = 0; k < zs.size(); ++k) {
          const double dv = std::abs(vs[k] - sign_of(zs[k]));
          a.sum += dv;
          a.sumsq += dv * dv;
        }
        return a;
      },
      [](Acc x, const Acc& y) {
        x.sum += y.sum;
        x.sumsq += y.sumsq;
        return x;
      });
  const double mean = acc.sum / static_cast<double>(n);
  const double var = (acc.sumsq - static_cast<double>(n) * mean * mean) /
                     static_cast<double>(std::max<std::int64_t>(n - 1, 1));
  const double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  s.add("poly.uniform-lift", "d=20 tau=0.25 mc n=" + std::to_string(n),
        mean <= tau + 3.0 * se, mean, tau + 3.0 * se);
}

void band_sign_rows(SuiteContext& s) {
  if (!s.want("band.sign-l1")) return;
  std::vector<BandCheckCase> cases = s.cfg.band_cases;
  if (cases.empty()) cases = {{10, 0.1, 0.4, 0.5}, {25, 0.08, 0.9, 0.4}};
  int idx = 0;
  for (const auto& c : cases) {
    if (c.dimension < 3)
      throw InvalidArgumentError("band case: dimension must be >= 3");
    if (!(c.half_width > 0.0 && c.half_width <= 1.0))
      throw InvalidArgumentError("band case: half-width must lie in (0, 1]");
    if (!(c.angle > 0.0 && c.angle < M_PI))
      throw InvalidArgumentError("band case: angle must lie in (0, pi)");
    if (!(c.tolerance > 0.0 && c.tolerance <= 0.5))
      throw InvalidArgumentError("band case: tolerance must lie in (0, 1/2]");
    const int d = c.dimension;
    const double gamma = c.half_width;
    const double theta = c.angle;
    const double tau = c.tolerance;
    const double sigma = std::sin(theta) / std::sqrt(static_cast<double>(d));
    const std::string tag = "d=" + std::to_string(d) + " gamma=" + fmt6(gamma) +
                            " theta=" + fmt6(theta) + " tau=" + fmt6(tau);

    // The approximation's premises; out-of-range cases are recorded and
    // skipped, not failed.
    bool violated = false;
    if (!(gamma < 0.5)) {
      s.add_violation("band.sign-l1", tag + " premise gamma<1/2", gamma, 0.5);
      violated = true;
    }
    if (!(tau < sigma / (2.0 * gamma))) {
      s.add_violation("band.sign-l1", tag + " premise tau<sin(theta)/(2 gamma sqrt(d))",
                      tau, sigma / (2.0 * gamma));
      violated = true;
    }
    if (violated) {
      ++idx;
      continue;
    }

    const StripDensityParams params(d, gamma, theta);
    DensityHandle rho;
    rho.pdf = [params](double z) { return strip_projected_density(params, z); };
    // The band reaches |z| = gamma |cos theta| + sin(theta) sqrt(1 - gamma^2)
    // along the target; beyond that the density is identically zero.
    const double reach =
        std::min(1.0, gamma * std::abs(std::cos(theta)) +
                          std::sin(theta) * std::sqrt(1.0 - gamma * gamma));
    rho.lo = -reach;
    rho.hi = reach;

    CertifiedPoly cp;
    try {
      cp = sign_approx_shorttail(sigma, gamma, tau, rho);
    } catch (const Error&) {
      s.add("band.sign-l1", tag + " build", false, kInf, tau);
      ++idx;
      continue;
    }
    const double l1 = cp.certificate.l1_error.value_or(kInf);
    s.add("band.sign-l1", tag + " build", l1 <= tau, l1, tau);

    // End-to-end: uniform points kept inside the band around w, measured
    // against the sign along wstar.
    const std::int64_t n = s.cfg.mc_samples;
    Rng stream = s.base.fork(4000 + static_cast<std::uint64_t>(idx));
    const auto [wstar, w] = angled_pair(stream, d, theta);
    struct Acc {
      std::int64_t kept = 0;
      double sum = 0.0, sumsq = 0.0;
    };
    const Acc acc = parallel_reduce<Acc>(
        static_cast<std::uint64_t>(n), Acc{},
        [&](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
          Rng rng = stream.fork(chunk);
          std::vector<double> zs;
          Vec g(d);
          for (std::uint64_t i = lo; i < hi; ++i) {
            for (int j = 0; j < d; ++j) g[j] = rng.gaussian();
            g.normalize();
            if (std::abs(g.dot(w)) <= gamma) zs.push_back(g.dot(wstar));
          }
          std::vector<double> vs(zs.size());
          cp.poly.eval_batch(zs, vs);
          Acc a;
          a.kept = static_cast<std::int64_t>(zs.size());
          for (std::size_t k = 0; k < zs.size(); ++k) {
            const double dv = std::abs(vs[k] - sign_of(zs[k]));
            a.sum += dv;
            a.sumsq += dv * dv;
          }
          return a;
        },
        [](Acc x, const Acc& y) {
          x.kept += y.kept;
          x.sum += y.sum;
          x.sumsq += y.sumsq;
          return x;
        });

    if (acc.kept >= 2) {
      const double kept = static_cast<double>(acc.kept);
      const double mean = acc.sum / kept;
      const double var = (acc.sumsq - kept * mean * mean) / (kept - 1.0);
      const double se = std::sqrt(std::max(var, 0.0) / kept);
      s.add("band.sign-l1", tag + " mc-lift n=" + std::to_string(acc.kept),
            mean <= tau + 3.0 * se, mean, tau + 3.0 * se);
    } else {
      s.add("band.sign-l1", tag + " mc-lift n=" + std::to_string(acc.kept), false, kInf,
            tau);
    }

    const double mass = strip_mass(d, gamma);
    const double phat = static_cast<double>(acc.kept) / static_cast<double>(n);
    const double mse = std::sqrt(mass * (1.0 - mass) / static_cast<double>(n));
    s.add("band.sign-l1", tag + " band-mass", std::abs(phat - mass) <= 3.0 * mse,
          std::abs(phat - mass), 3.0 * mse);
    ++idx;
  }
}

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::int64_t LemmaReport::passed() const {
  return std::count_if(rows.begin(), rows.end(),
                       [](const LemmaCheckRow& r) { return r.status == "pass"; });
}

std::int64_t LemmaReport::failed() const {
  return std::count_if(rows.begin(), rows.end(),
                       [](const LemmaCheckRow& r) { return r.status == "fail"; });
}

std::int64_t LemmaReport::violations() const {
  return std::count_if(rows.begin(), rows.end(), [](const LemmaCheckRow& r) {
    return r.status == "precondition-violation";
  });
}

bool LemmaReport::all_pass() const { return failed() == 0; }

std::string LemmaReport::to_csv() const {
  std::string out = "group,item,status,observed,bound\r\n";
  for (const auto& r : rows) {
    out += csv_field(r.group);
    out += ',';
    out += csv_field(r.item);
    out += ',';
    out += r.status;
    out += ',';
    out += fmt17(r.observed);
    out += ',';
    out += fmt17(r.bound);
    out += "\r\n";
  }
  return out;
}

nlohmann::json LemmaReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"group", r.group},
                         {"item", r.item},
                         {"status", r.status},
                         {"observed", r.observed},
                         {"bound", r.bound}});
  return nlohmann::json{{"rows", std::move(rows_json)},
                        {"passed", passed()},
                        {"failed", failed()},
                        {"precondition_violations", violations()},
                        {"all_pass", all_pass()}};
}

LemmaReport verify_lemma_suite(const LemmaSuiteConfig& config) {
  if (config.mc_samples < 2)
    throw InvalidArgumentError("verify_lemma_suite: mc_samples must be >= 2");
  if (config.lift_samples < 0)
    throw InvalidArgumentError("verify_lemma_suite: lift_samples must be >= 0");
  if (config.envelope_dimension_max < 2 || config.envelope_dimension_max > 1000)
    throw InvalidArgumentError(
        "verify_lemma_suite: envelope dimension cap must lie in [2, 1000]");
  if (config.envelope_grid < 2 || config.band_grid < 2)
    throw InvalidArgumentError("verify_lemma_suite: grids need at least two points");
  for (const auto& g : config.groups)
    if (std::find_if(kSuiteGroups.begin(), kSuiteGroups.end(),
                     [&](const char* k) { return g == k; }) == kSuiteGroups.end())
      throw InvalidArgumentError("verify_lemma_suite: unknown group \"" + g + "\"");

  SuiteContext s{config, Rng(config.seed), {}};
  norm_rows(s);
  normalization_rows(s);
  envelope_rows(s);
  band_density_rows(s);
  disagreement_rows(s);
  jackson_rows(s);
  booster_rows(s);
  compose_rows(s);
  growth_rows(s);
  shorttail_rows(s);
  lift_rows(s);
  band_sign_rows(s);
  return LemmaReport{std::move(s.rows)};
}

}  // namespace halfspace
