#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hypt {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre nodes and weights (Newton iteration on P_n).
GaussRule gauss_legendre(std::size_t n);

/// Integral of f over [a, b] with a fixed Gauss rule.
double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       const GaussRule& rule);

/// Integral of f over [a, b] where f may have an integrable (logarithmic)
/// singularity at a, at b, or both. The mesh is graded geometrically with
/// ratio 1/2 toward each singular end: `levels` dyadic shells plus the
/// innermost remainder, each integrated with `rule`.
double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        bool singular_at_a, bool singular_at_b, std::size_t levels,
                        const GaussRule& rule);

}  // namespace hypt
