#include "halfspace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "halfspace/errors.hpp"

namespace halfspace {
namespace {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1] (positive half).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the embedded rule (nodes kXgk[1], kXgk[3], kXgk[5], kXgk[7]).
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  double value;   // K15 estimate
  double err;     // error estimate
  std::uint64_t seq;  // insertion order, for a deterministic heap
};

struct WorstFirst {
  bool operator()(const Interval& x, const Interval& y) const {
    if (x.err != y.err) return x.err < y.err;  // larger error on top
    return x.seq > y.seq;                      // then older interval on top
  }
};

Interval evaluate(const BatchIntegrand& f, double a, double b,
                  std::uint64_t seq) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double xs[15], fv[15];
  for (int i = 0; i < 7; ++i) {
    xs[i] = mid - half * kXgk[i];
    xs[14 - i] = mid + half * kXgk[i];
  }
  xs[7] = mid;
  f(std::span<const double>(xs, 15), std::span<double>(fv, 15));
  for (double v : fv) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand is not finite inside [" << a << ", " << b << "]";
      throw NumericFailure(msg.str());
    }
  }

  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
  for (int i = 0; i < 4; ++i) {
    const int j = 2 * i + 1;
    if (j < 7) resg += kWg[i] * (fv[j] + fv[14 - j]);
  }

  // QUADPACK-style scaled error estimate: robust for rough integrands.
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fv[7] - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
  resasc *= half;

  double err = std::abs(resk - resg) * half;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));

  return Interval{a, b, resk * half, err, seq};
}

}  // namespace

QuadratureResult integrate_batched(const BatchIntegrand& f, double a, double b,
                                   double abs_tol, int max_subdivisions) {
  if (!(a < b)) throw InvalidArgumentError("integrate: requires a < b");
  if (!(abs_tol > 0)) throw InvalidArgumentError("integrate: requires abs_tol > 0");

  std::priority_queue<Interval, std::vector<Interval>, WorstFirst> queue;
  std::uint64_t seq = 0;
  queue.push(evaluate(f, a, b, seq++));

  double total_value = queue.top().value;
  double total_err = queue.top().err;
  double floored_err = 0.0;  // error stuck in ulp-width intervals
  int subdivisions = 0;

  while (total_err + floored_err > abs_tol && !queue.empty() &&
         subdivisions < max_subdivisions) {
    const Interval worst = queue.top();
    queue.pop();

    // Below this width the extreme Kronrod nodes (offset ~0.004*width from the
    // interval ends) would round onto the endpoints themselves, which breaks
    // integrands with endpoint singularities.
    const double width = worst.b - worst.a;
    const double scale = std::max({1.0, std::abs(worst.a), std::abs(worst.b)});
    if (width < 256.0 * std::numeric_limits<double>::epsilon() * scale) {
      // Cannot be meaningfully bisected; park its error and move on.
      total_err -= worst.err;
      floored_err += worst.err;
      continue;
    }

    const double mid = 0.5 * (worst.a + worst.b);
    const Interval left = evaluate(f, worst.a, mid, seq++);
    const Interval right = evaluate(f, mid, worst.b, seq++);
    ++subdivisions;

    total_value += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    queue.push(left);
    queue.push(right);
  }

  QuadratureResult result;
  result.value = total_value;
  result.abs_error = total_err + floored_err;
  result.subdivisions = subdivisions;
  result.converged = result.abs_error <= abs_tol;
  return result;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_subdivisions) {
  auto batched = [&f](std::span<const double> xs, std::span<double> out) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  };
  return integrate_batched(batched, a, b, abs_tol, max_subdivisions);
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_subdivisions) {
  const QuadratureResult r = integrate(f, a, b, abs_tol, max_subdivisions);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << a << ", " << b
        << "]: estimated error " << r.abs_error << " > tolerance " << abs_tol
        << " after " << r.subdivisions << " subdivisions";
    throw NumericFailure(msg.str());
  }
  return r.value;
}

}  // namespace halfspace
