#include "hypt/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "hypt/error.hpp"

namespace hypt {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    const double pk = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
    p0 = p1;
    p1 = pk;
  }
  const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussRule gauss_legendre(std::size_t n) {
  require(n >= 1, ErrorCode::kInvalidArgument, "Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi's initial guess, then Newton.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double step = p / dp;
      x -= step;
      if (std::fabs(step) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

namespace {

// Singularity at a only.
double graded_left(const std::function<double(double)>& f, double a, double b,
                   std::size_t levels, const GaussRule& rule) {
  const double h = b - a;
  double sum = 0.0;
  // Innermost piece first so small contributions are not swamped.
  const double inner = h * std::ldexp(1.0, -static_cast<int>(levels));
  sum += integrate_gauss(f, a, a + inner, rule);
  for (std::size_t i = levels; i-- > 0;) {
    const double lo = h * std::ldexp(1.0, -static_cast<int>(i + 1));
    const double hi = h * std::ldexp(1.0, -static_cast<int>(i));
    sum += integrate_gauss(f, a + lo, a + hi, rule);
  }
  return sum;
}

}  // namespace

double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        bool singular_at_a, bool singular_at_b, std::size_t levels,
                        const GaussRule& rule) {
  if (!(b > a)) return 0.0;
  if (singular_at_a && singular_at_b) {
    const double mid = 0.5 * (a + b);
    return integrate_graded(f, a, mid, true, false, levels, rule) +
           integrate_graded(f, mid, b, false, true, levels, rule);
  }
  if (singular_at_a) return graded_left(f, a, b, levels, rule);
  if (singular_at_b) {
    // Reflect so the singular end sits at the left. Points b - t are only
    // distinct from b while t is well above ulp(b); deeper shells would sample
    // f(b) itself, so the depth is capped there. The dropped sliver is
    // O(ulp(b) log ulp(b)) for a logarithmic singularity.
    const double resolvable = 1024.0 * (std::nextafter(std::fabs(b), std::numeric_limits<double>::infinity()) - std::fabs(b));
    std::size_t depth = 0;
    while (depth < levels && (b - a) * std::ldexp(1.0, -static_cast<int>(depth + 1)) >= resolvable) {
      ++depth;
    }
    const auto reflected = [&f, a, b](double t) { return f(a + b - t); };
    return graded_left(reflected, a, b, depth, rule);
  }
  return integrate_gauss(f, a, b, rule);
}

}  // namespace hypt
