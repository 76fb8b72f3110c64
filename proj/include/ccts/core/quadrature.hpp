#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ccts {

// Nodes and weights for E[f(Z)], Z ~ N(0, 1): E[f(Z)] ~= sum_i w_i f(x_i).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule of the given order, rescaled to the standard normal.
// Exact for polynomials up to degree 2*order - 1. Cached per order.
const QuadratureRule& gauss_hermite(std::size_t order);

struct IntegrationOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  std::size_t max_intervals = 4000;
};

// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. Interior
// `breakpoints` (e.g. kinks of f) are honoured as interval boundaries.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints = {},
                 const IntegrationOptions& opts = {});

// E[f(mean + sd * Z)] for Z ~ N(0, 1), by adaptive integration over
// +-12 standard deviations. sd == 0 returns f(mean). `breakpoints` are in the
// original (not standardized) coordinate.
double gaussian_expectation(const std::function<double(double)>& f, double mean,
                            double sd, std::span<const double> breakpoints = {},
                            const IntegrationOptions& opts = {});

}  // namespace ccts
