#include "halfspace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "halfspace/errors.hpp"
#include "halfspace/parallel.hpp"
#include "halfspace/quadrature.hpp"
#include "halfspace/rng.hpp"

namespace halfspace {
namespace {

constexpr int kMaxDim = 1000000;  // memory sanity cap

void check_dim(int d) {
  if (d < 2) throw InvalidArgumentError("dimension must be at least 2");
  if (d > kMaxDim) throw InvalidArgumentError("dimension exceeds the 1e6 cap");
}

// log of c_d = 1 / B(1/2, (d-1)/2), the normalizer of the projected density.
double log_marginal_normalizer(int d) {
  return std::lgamma(0.5 * d) - 0.5 * std::log(M_PI) - std::lgamma(0.5 * (d - 1));
}

}  // namespace

UnitVector::UnitVector(Vec v) : v_(std::move(v)) {
  check_dim(static_cast<int>(v_.size()));
  if (!v_.allFinite()) throw InvalidArgumentError("unit vector: non-finite coordinates");
  const double n = v_.norm();
  if (!(n > 0)) throw InvalidArgumentError("unit vector: zero norm");
  v_ /= n;
}

StripSpec::StripSpec(UnitVector center_, double half_width_)
    : center(std::move(center_)), half_width(half_width_) {
  if (!(half_width > 0.0 && half_width <= 1.0))
    throw InvalidArgumentError("band half-width must lie in (0, 1]");
}

StripDensityParams::StripDensityParams(int dimension_, double half_width_, double angle_)
    : dimension(dimension_), half_width(half_width_), angle(angle_) {
  check_dim(dimension);
  if (dimension < 3)
    throw InvalidArgumentError("projected band density requires dimension >= 3");
  if (!(half_width > 0.0 && half_width <= 1.0))
    throw InvalidArgumentError("band half-width must lie in (0, 1]");
  if (!(angle > 0.0 && angle < M_PI))
    throw InvalidArgumentError("angle must lie in (0, pi)");
}

std::vector<UnitVector> sample_uniform_sphere(int d, std::int64_t n, std::uint64_t seed) {
  check_dim(d);
  if (n < 1) throw InvalidArgumentError("sample count must be positive");

  std::vector<Vec> raw(n);
  Rng base(seed);
  parallel_reduce<int>(
      static_cast<std::uint64_t>(n), 0,
      [&](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
        Rng rng = base.fork(chunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
          Vec v(d);
          for (int j = 0; j < d; ++j) v[j] = rng.gaussian();
          raw[i] = std::move(v);
        }
        return 0;
      },
      [](int a, int b) { return a + b; });

  std::vector<UnitVector> out;
  out.reserve(n);
  for (auto& v : raw) out.emplace_back(std::move(v));
  return out;
}

double angle(const UnitVector& w, const UnitVector& w_star) {
  if (w.dim() != w_star.dim())
    throw InvalidArgumentError("angle: dimension mismatch");
  const double ip = std::clamp(w.dot(w_star), -1.0, 1.0);
  return std::acos(ip);
}

double disagreement_mass(const UnitVector& w, const UnitVector& w_star) {
  return angle(w, w_star) / M_PI;
}

double marginal_density(int d, double radius, double t) {
  check_dim(d);
  if (!(radius > 0)) throw InvalidArgumentError("marginal density: radius must be positive");
  const double u = t / radius;
  const double au = std::abs(u);
  if (au > 1.0) return 0.0;

  // (1-u)(1+u) is exact near the endpoints, unlike 1-u*u.
  const double one_minus_u2 = (1.0 - au) * (1.0 + au);
  const double expo = 0.5 * (d - 3);
  if (one_minus_u2 == 0.0) {
    if (expo < 0.0) return std::numeric_limits<double>::infinity();  // d = 2 edge
    if (expo == 0.0) return std::exp(log_marginal_normalizer(d)) / radius;
    return 0.0;
  }
  const double log_val = log_marginal_normalizer(d) + expo * std::log(one_minus_u2);
  return std::exp(log_val) / radius;
}

bool marginal_density_bound_check(int d, double t) {
  check_dim(d);
  if (std::abs(t) > 1.0) throw InvalidArgumentError("bound check: |t| must be <= 1");
  const double envelope = std::sqrt(double(d)) * std::exp(-t * t * d / 4.0);
  return marginal_density(d, 1.0, t) <= envelope;
}

double strip_mass(int d, double gamma) {
  check_dim(d);
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw InvalidArgumentError("band half-width must lie in (0, 1]");

  // Integrate the marginal in the angle variable: with t = sin(phi) the
  // integrand becomes c_d cos^{d-2}(phi), smooth for every d >= 2.
  const double log_c = log_marginal_normalizer(d);
  const double upper = std::asin(std::min(1.0, gamma));
  auto f = [&](double phi) {
    const double c = std::cos(phi);
    if (c <= 0.0) return 0.0;
    return std::exp(log_c + (d - 2) * std::log(c));
  };
  const double mass = 2.0 * integrate_or_throw(f, 0.0, upper, 2.5e-10);
  return std::min(mass, 1.0);
}

double strip_projected_density(const StripDensityParams& p, double z) {
  if (std::abs(z) > 1.0 + 1e-12)
    throw InvalidArgumentError("band density: |z| must be <= 1");
  z = std::clamp(z, -1.0, 1.0);

  const int d = p.dimension;
  const double gamma = p.half_width;
  // The density is even in cos(theta) (the band is symmetric under w -> -w),
  // so fold angles past pi/2 back.
  const double c = std::abs(std::cos(p.angle));
  const double s = std::sin(p.angle);

  if (gamma >= 1.0 - 1e-15) return marginal_density(d, 1.0, z);  // whole sphere
  if (gamma * c < 1e-14) return marginal_density(d - 1, s, z);   // degenerate limit

  const double A = strip_mass(d, gamma);
  // Cross-section radius at offset u along w: s(u) = sin(theta) sqrt(1-(u/c)^2),
  // bounded below by sin(theta) sqrt(1-gamma^2) on the integration range.
  auto integrand = [&](double u) {
    const double ratio = u / c;
    const double radicand = std::max(0.0, (1.0 - ratio) * (1.0 + ratio));
    const double su = s * std::sqrt(radicand);
    if (su <= 0.0) return 0.0;
    return marginal_density(d, c, u) * marginal_density(d - 1, su, z - u);
  };
  const double lim = gamma * c;
  return integrate_or_throw(integrand, -lim, lim, 1e-8) / A;
}

bool strip_density_tail_check(const StripDensityParams& p, double z) {
  if (std::abs(z) < p.half_width)
    throw InvalidArgumentError("tail check applies outside the band projection: |z| >= gamma");
  const double s = std::sin(p.angle);
  const double g2 = (1.0 - p.half_width) * (1.0 + p.half_width);
  if (g2 <= 0.0) return true;  // gamma = 1: the bound degenerates to +infinity
  const double peak = std::sqrt(double(p.dimension)) / (s * std::sqrt(g2));
  const double gap = std::abs(z) - p.half_width;
  const double bound = peak * std::exp(-(p.dimension - 1) * gap * gap / (4.0 * s * s));
  return strip_projected_density(p, z) <= bound;
}

}  // namespace halfspace
