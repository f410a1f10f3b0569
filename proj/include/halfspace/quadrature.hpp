#pragma once

#include <functional>
#include <span>

namespace halfspace {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;   // estimated absolute error
  int subdivisions = 0;     // bisections performed
  bool converged = false;   // abs_error <= requested tolerance
};

// Evaluates the integrand at all points of xs into out (same length). Lets
// expensive integrands (high-degree polynomials) amortize per-call overhead
// across the 15 nodes of each quadrature panel.
using BatchIntegrand = std::function<void(std::span<const double>, std::span<double>)>;

QuadratureResult integrate_batched(const BatchIntegrand& f, double a, double b,
                                   double abs_tol = 1e-8, int max_subdivisions = 10000);

// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] to an absolute
// tolerance. Worst-error-first bisection with a deterministic tie-break;
// intervals are never split below a few ulps of width. Integrands returning
// NaN/Inf raise NumericFailure. Endpoint singularities are fine as long as f
// is finite at every interior point (the nodes never touch a, b).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-8, int max_subdivisions = 10000);

// Same, but throws NumericFailure (with diagnostics) when the tolerance was
// not reached within the subdivision budget.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-8, int max_subdivisions = 10000);

}  // namespace halfspace
