#include "halfspace/geometry.hpp"

#include <cmath>
#include <doctest.h>
#include <vector>

#include "halfspace/errors.hpp"
#include "halfspace/quadrature.hpp"
#include "halfspace/rng.hpp"
#include "test_util.hpp"

using namespace halfspace;

namespace {

UnitVector basis_vector(int d, int axis) {
  Vec v = Vec::Zero(d);
  v[axis] = 1.0;
  return UnitVector(std::move(v));
}

// w rotated by theta towards the next axis.
UnitVector rotated(int d, double theta) {
  Vec v = Vec::Zero(d);
  v[0] = std::cos(theta);
  v[1] = std::sin(theta);
  return UnitVector(std::move(v));
}

}  // namespace

TEST_CASE("unit vectors normalize on construction and reject bad input") {
  Vec v(3);
  v << 3.0, 4.0, 0.0;
  UnitVector u(v);
  CHECK(std::abs(u.coords().norm() - 1.0) < 1e-12);
  CHECK(u.coords()[0] == doctest::Approx(0.6));

  CHECK_THROWS_AS(UnitVector(Vec::Zero(3)), InvalidArgumentError);
  CHECK_THROWS_AS(UnitVector(Vec::Ones(1)), InvalidArgumentError);
  Vec nan3 = Vec::Ones(3);
  nan3[1] = std::nan("");
  CHECK_THROWS_AS((void)UnitVector(nan3), InvalidArgumentError);
}

TEST_CASE("sphere sampling is deterministic and marginally uniform (d=3)") {
  auto a = sample_uniform_sphere(3, 5, 77);
  auto b = sample_uniform_sphere(3, 5, 77);
  for (int i = 0; i < 5; ++i) CHECK(a[i].coords() == b[i].coords());
  CHECK_THROWS_AS(sample_uniform_sphere(1, 5, 0), InvalidArgumentError);
  CHECK_THROWS_AS(sample_uniform_sphere(3, 0, 0), InvalidArgumentError);

  // For d=3 the first coordinate of a uniform sphere point is uniform on
  // [-1,1] (Archimedes), giving an exact reference CDF.
  const int n = 1000000;
  auto pts = sample_uniform_sphere(3, n, 20240817);
  std::vector<double> first;
  first.reserve(n);
  double mean = 0;
  for (const auto& p : pts) {
    first.push_back(p.coords()[0]);
    mean += p.coords()[0];
  }
  mean /= n;
  CHECK(std::abs(mean) < 0.005);
  const double ks =
      test_util::ks_statistic(first, [](double t) { return 0.5 * (1.0 + t); });
  CHECK(ks < 0.005);
}

TEST_CASE("angles: identical, orthogonal, antipodal, mismatched") {
  auto e1 = basis_vector(4, 0), e2 = basis_vector(4, 1);
  CHECK(angle(e1, e1) == doctest::Approx(0.0));
  CHECK(angle(e1, e2) == doctest::Approx(M_PI / 2));
  Vec neg = -e1.coords();
  CHECK(angle(e1, UnitVector(neg)) == doctest::Approx(M_PI));
  CHECK_THROWS_AS(angle(e1, basis_vector(5, 0)), InvalidArgumentError);

  CHECK(disagreement_mass(e1, e2) == doctest::Approx(0.5));
  CHECK(disagreement_mass(e1, e1) == doctest::Approx(0.0));
}

TEST_CASE("disagreement mass matches brute-force sampling (d=5, theta=0.3)") {
  const int d = 5, n = 1000000;
  auto w = basis_vector(d, 0);
  auto ws = rotated(d, 0.3);
  REQUIRE(angle(w, ws) == doctest::Approx(0.3));

  auto pts = sample_uniform_sphere(d, n, 555);
  int disagree = 0;
  for (const auto& x : pts) {
    const bool sw = w.dot(x) > 0;
    const bool sws = ws.dot(x) > 0;
    if (sw != sws) ++disagree;
  }
  const double freq = double(disagree) / n;
  CHECK(std::abs(freq - 0.3 / M_PI) < 0.002);
}

TEST_CASE("projected density closed forms and scaling") {
  // d=3: the projection is exactly uniform on [-1,1].
  CHECK(marginal_density(3, 1.0, 0.7) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(marginal_density(3, 1.0, -0.2) == doctest::Approx(0.5).epsilon(1e-12));
  // d=2: arc-length measure, 1/pi at the center.
  CHECK(std::abs(marginal_density(2, 1.0, 0.0) - 1.0 / M_PI) < 1e-9);
  // Outside the support the density vanishes.
  CHECK(marginal_density(7, 1.0, 1.2) == 0.0);
  CHECK(marginal_density(7, 0.5, 0.7) == 0.0);

  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + int(rng.below(60));
    const double t = rng.uniform(-1.0, 1.0);
    const double r = std::exp(rng.uniform(-2.0, 2.0));
    // symmetry
    CHECK(marginal_density(d, 1.0, t) == doctest::Approx(marginal_density(d, 1.0, -t)));
    // radius-r sphere rescaling
    CHECK(marginal_density(d, r, r * t) ==
          doctest::Approx(marginal_density(d, 1.0, t) / r).epsilon(1e-12));
  }
  CHECK_THROWS_AS(marginal_density(5, 0.0, 0.1), InvalidArgumentError);
}

TEST_CASE("projected density integrates to one across dimensions") {
  for (int d : {2, 3, 4, 5, 10, 37, 100}) {
    CHECK(std::abs(strip_mass(d, 1.0) - 1.0) <= 1e-9);
  }
}

TEST_CASE("projected density matches a Monte Carlo histogram (d=6)") {
  const int d = 6, n = 200000;
  auto pts = sample_uniform_sphere(d, n, 4242);
  std::vector<double> proj;
  proj.reserve(n);
  for (const auto& p : pts) proj.push_back(p.coords()[0]);

  const int grid_n = 1001;
  std::vector<double> dens(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    const double t = -1.0 + 2.0 * i / (grid_n - 1);
    dens[i] = marginal_density(d, 1.0, t);
  }
  test_util::GridCdf cdf(-1.0, 1.0, dens);
  CHECK(test_util::ks_statistic(proj, cdf) < 0.01);
}

TEST_CASE("gaussian envelope on the projected density") {
  // Holds on the full support for every d >= 3.
  for (int d = 3; d <= 100; ++d) {
    for (int i = 0; i < 1000; ++i) {
      const double t = -1.0 + 2.0 * i / 999.0;
      CHECK(marginal_density_bound_check(d, t));
    }
  }
  // Spot values.
  CHECK(marginal_density_bound_check(3, 0.0));
  CHECK(marginal_density_bound_check(20, 0.5));
  CHECK(marginal_density_bound_check(50, 0.99));

  // d=2 boundary: the arc-length density diverges near |t|=1 while the
  // envelope stays bounded, so the inequality only holds on the interior.
  for (int i = 0; i < 1000; ++i) {
    const double t = -0.9 + 1.8 * i / 999.0;
    CHECK(marginal_density_bound_check(2, t));
  }
  CHECK_FALSE(marginal_density_bound_check(2, 0.95));  // 1.0197 > 0.9006
}

TEST_CASE("band mass: closed forms, Monte Carlo, and the min(gamma sqrt d, 1) floor") {
  CHECK(strip_mass(17, 1.0) == doctest::Approx(1.0));
  CHECK(std::abs(strip_mass(3, 0.3) - 0.3) <= 1e-9);  // uniform projection
  CHECK(std::abs(strip_mass(2, 0.5) - 2.0 * std::asin(0.5) / M_PI) <= 1e-9);
  CHECK_THROWS_AS(strip_mass(10, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(strip_mass(10, 1.5), InvalidArgumentError);

  {
    const int d = 100, n = 200000;
    const double gamma = 0.05;
    auto pts = sample_uniform_sphere(d, n, 99);
    int inside = 0;
    for (const auto& p : pts)
      if (std::abs(p.coords()[0]) <= gamma) ++inside;
    CHECK(std::abs(double(inside) / n - strip_mass(d, gamma)) < 0.007);
  }

  // Band mass is at least 0.45 * min(gamma sqrt(d), 1) on a (d, gamma) sweep;
  // the worst observed ratio is ~0.5 near gamma*sqrt(d)=1 at d=2.
  for (int d : {2, 3, 5, 10, 30, 100, 1000}) {
    for (double gamma : {0.01, 0.05, 0.2, 1.0 / std::sqrt(double(d)), 0.6, 1.0}) {
      if (gamma > 1.0) continue;
      const double floor = 0.45 * std::min(gamma * std::sqrt(double(d)), 1.0);
      CHECK(strip_mass(d, gamma) >= floor);
    }
  }
}

TEST_CASE("band projected density: validation, symmetry, normalization") {
  CHECK_THROWS_AS(StripDensityParams(2, 0.1, 0.4), InvalidArgumentError);
  CHECK_THROWS_AS(StripDensityParams(10, 0.0, 0.4), InvalidArgumentError);
  CHECK_THROWS_AS(StripDensityParams(10, 0.1, 0.0), InvalidArgumentError);
  CHECK_THROWS_AS(StripDensityParams(10, 0.1, M_PI), InvalidArgumentError);

  StripDensityParams p(10, 0.1, 0.4);
  CHECK_THROWS_AS(strip_projected_density(p, 1.5), InvalidArgumentError);

  // Even in z, and equal for theta and pi-theta.
  StripDensityParams p_mirror(10, 0.1, M_PI - 0.4);
  for (double z : {0.05, 0.15, 0.3, 0.45}) {
    CHECK(strip_projected_density(p, z) ==
          doctest::Approx(strip_projected_density(p, -z)).epsilon(1e-9));
    CHECK(strip_projected_density(p, z) ==
          doctest::Approx(strip_projected_density(p_mirror, z)).epsilon(1e-9));
  }

  // Integrates to 1.
  auto whole = integrate([&](double z) { return strip_projected_density(p, z); },
                         -1.0, 1.0, 1e-6, 2000);
  CHECK(std::abs(whole.value - 1.0) <= 1e-4);

  // gamma=1 degenerates to the plain sphere marginal.
  StripDensityParams whole_sphere(8, 1.0, 0.7);
  CHECK(strip_projected_density(whole_sphere, 0.3) ==
        doctest::Approx(marginal_density(8, 1.0, 0.3)).epsilon(1e-10));
}

TEST_CASE("band projected density matches strip-conditioned sampling (d=10)") {
  const int d = 10;
  const double gamma = 0.1, theta = 0.4;
  StripDensityParams params(d, gamma, theta);

  // Draw uniform points, keep those inside the band around w = e1, project
  // onto w* at angle theta.
  auto w = basis_vector(d, 0);
  auto ws = rotated(d, theta);
  const int want = 200000;
  std::vector<double> proj;
  proj.reserve(want);
  Rng rng(31415);
  while (int(proj.size()) < want) {
    Vec v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.gaussian();
    v /= v.norm();
    if (std::abs(v[0]) <= gamma) proj.push_back(ws.coords().dot(v));
  }

  const int grid_n = 1201;
  const double zmax = 0.6;  // support ends near gamma*cos+sin ~ 0.48
  std::vector<double> dens(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    const double z = -zmax + 2 * zmax * i / (grid_n - 1);
    dens[i] = strip_projected_density(params, z);
  }
  test_util::GridCdf cdf(-zmax, zmax, dens);
  CHECK(test_util::ks_statistic(proj, cdf) < 0.01);
}

TEST_CASE("band density peak and tail envelopes") {
  // Peak bound from the cross-section radius floor; tail bound additionally
  // needs the gaussian envelope on the (d-1)-sphere, so d >= 4 here.
  struct Config {
    int d;
    double gamma, theta;
  };
  for (const auto& cfg : {Config{10, 0.1, 0.4}, Config{30, 0.05, 0.2},
                          Config{6, 0.2, 1.0}, Config{15, 0.1, 2.6}}) {
    StripDensityParams p(cfg.d, cfg.gamma, cfg.theta);
    const double peak =
        std::sqrt(double(cfg.d)) /
        (std::sin(cfg.theta) * std::sqrt(1.0 - cfg.gamma * cfg.gamma));
    for (int i = 0; i <= 40; ++i) {
      const double z = -1.0 + 2.0 * i / 40.0;
      CHECK(strip_projected_density(p, z) <= peak);
      if (std::abs(z) >= cfg.gamma) CHECK(strip_density_tail_check(p, z));
    }
  }
  StripDensityParams p(10, 0.1, 0.4);
  CHECK(strip_density_tail_check(p, 0.1));  // boundary: exp factor is 1
  CHECK(strip_density_tail_check(p, 0.5));
  CHECK_THROWS_AS(strip_density_tail_check(p, 0.05), InvalidArgumentError);
}
