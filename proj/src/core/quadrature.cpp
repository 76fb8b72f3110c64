#include "ccts/core/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include "ccts/core/error.hpp"

namespace ccts {
namespace {

// Physicists' Gauss-Hermite nodes by Newton iteration on the orthonormal
// recurrence, with the classic asymptotic starting guesses.
QuadratureRule compute_gauss_hermite(std::size_t n) {
  constexpr double kPim4 = 0.7511255444649425;  // pi^(-1/4)
  std::vector<double> x(n), w(n);
  const std::size_t m = (n + 1) / 2;
  const double nd = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = kPim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = std::sqrt(2.0) * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] * inv_sqrt_pi;
  }
  return rule;
}

constexpr double kXgk[8] = {0.991455371120812639206854697526329,
                            0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926,
                            0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013,
                            0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245,
                            0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970,
                            0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518,
                            0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550,
                            0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649,
                            0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

const QuadratureRule& gauss_hermite(std::size_t order) {
  if (order == 0) throw ConfigError("Gauss-Hermite order must be >= 1");
  static std::mutex mu;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_hermite(order)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints,
                 const IntegrationOptions& opts) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Piece> heap;
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // A few equal sub-intervals per piece so narrow features are seen.
    constexpr int kInitialSplits = 4;
    const double step = (cuts[i + 1] - cuts[i]) / kInitialSplits;
    for (int k = 0; k < kInitialSplits; ++k) {
      const double lo = cuts[i] + step * k;
      const double hi = k + 1 == kInitialSplits ? cuts[i + 1] : lo + step;
      Piece p = gk15(f, lo, hi);
      total += p.value;
      error += p.error;
      heap.push(p);
    }
  }
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
         heap.size() < opts.max_intervals) {
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    const Piece left = gk15(f, worst.a, mid);
    const Piece right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated cancellation error.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

double gaussian_expectation(const std::function<double(double)>& f, double mean,
                            double sd, std::span<const double> breakpoints,
                            const IntegrationOptions& opts) {
  if (sd < 0) throw ConfigError("gaussian_expectation: negative sd");
  if (sd == 0) return f(mean);
  constexpr double kReach = 12.0;
  constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
  std::vector<double> std_breaks;
  std_breaks.reserve(breakpoints.size() + 1);
  std_breaks.push_back(0.0);
  for (double b : breakpoints) std_breaks.push_back((b - mean) / sd);
  return integrate(
      [&](double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z) * f(mean + sd * z); },
      -kReach, kReach, std_breaks, opts);
}

}  // namespace ccts
