#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace halfspace {

using Vec = Eigen::VectorXd;

// A point (or hypothesis) on the unit sphere S^{d-1}. The constructor
// normalizes, so instances always have unit norm; d is limited to [2, 1e6].
class UnitVector {
 public:
  explicit UnitVector(Vec v);

  int dim() const { return static_cast<int>(v_.size()); }
  const Vec& coords() const { return v_; }
  double dot(const UnitVector& o) const { return v_.dot(o.v_); }

 private:
  Vec v_;
};

// The band T_{d,gamma}(w) = {u on the sphere : |<w,u>| <= gamma}.
struct StripSpec {
  StripSpec(UnitVector center_, double half_width_);
  UnitVector center;
  double half_width;  // gamma in (0, 1]
};

// Parameters of the density of <w*, x> for x uniform on a band around w,
// where angle = angle(w, w*). Needs d >= 3: the cross-section of the band at
// fixed <w, x> is a lower-dimensional sphere.
struct StripDensityParams {
  StripDensityParams(int dimension_, double half_width_, double angle_);
  int dimension;
  double half_width;  // gamma in (0, 1]
  double angle;       // in (0, pi)
};

// n i.i.d. uniform points on S^{d-1} (normalized Gaussian vectors),
// deterministic given the seed.
std::vector<UnitVector> sample_uniform_sphere(int d, std::int64_t n, std::uint64_t seed);

// Angle between two unit vectors, inner product clamped to [-1,1] first.
double angle(const UnitVector& w, const UnitVector& w_star);

// Probability that the halfspaces of w and w_star disagree on a uniform
// point: angle/pi exactly.
double disagreement_mass(const UnitVector& w, const UnitVector& w_star);

// Density of <e, x> at t for x uniform on the radius-r sphere in R^d:
// (1/r) c_d (1-(t/r)^2)^{(d-3)/2} on [-r, r], zero outside. The normalizer
// c_d is evaluated in log space (log-Beta) so large d stays stable.
double marginal_density(int d, double radius, double t);

// True iff marginal_density(d, 1, t) <= sqrt(d) * exp(-t^2 d / 4).
// Holds everywhere for d >= 3; for d = 2 the density blows up near |t| = 1
// while the right side stays bounded, so there it only holds on the interior.
bool marginal_density_bound_check(int d, double t);

// Probability of the band {|<w,x>| <= gamma}: integral of the marginal
// density over [-gamma, gamma], computed in the angle variable where the
// integrand is the smooth cos^{d-2}, so tolerances down to 1e-9 are reachable
// for every d (including the endpoint-singular d = 2).
double strip_mass(int d, double gamma);

// Density of z = <w*, x> for x uniform on the band around w. Evaluates the
// convolution of the band-restricted marginal along w with the sphere
// cross-section marginal, by adaptive quadrature (abs tol 1e-8).
double strip_projected_density(const StripDensityParams& params, double z);

// True iff the density at z (|z| >= gamma) is below its peak bound
// sqrt(d)/(sin(theta) sqrt(1-gamma^2)) damped by
// exp(-(d-1)(|z|-gamma)^2/(4 sin^2 theta)).
bool strip_density_tail_check(const StripDensityParams& params, double z);

}  // namespace halfspace
