#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hypt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Point of the circle I/~ with -1 ~ 1, stored by its representative in [-1, 1).
class CirclePoint {
 public:
  explicit CirclePoint(double x) : x_(canonical(x)) {}

  double value() const noexcept { return x_; }

  static double canonical(double x) noexcept;
  /// Arc-length distance min(|x - y|, 2 - |x - y|).
  static double distance(double x, double y) noexcept;

 private:
  double x_;
};

/// Phase space of a one-dimensional map: either the interval [lo, hi] or the
/// circle [lo, hi) with lo ~ hi.
struct Domain {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;

  double length() const noexcept { return hi - lo; }
  double canonical(double x) const noexcept;
  double distance(double x, double y) const noexcept;
  bool contains(double x) const noexcept;
  /// Maps u in [0, 1) affinely onto the domain (uniform Lebesgue sampling).
  double from_unit(double u) const noexcept { return lo + length() * u; }
  long double from_unit(long double u) const noexcept {
    return static_cast<long double>(lo) +
           (static_cast<long double>(hi) - static_cast<long double>(lo)) * u;
  }
};

/// Constants (B, beta) of the non-degeneracy conditions (s1)-(s3).
struct NonDegeneracyParams {
  double B = 4.0;
  double beta = 0.5;

  void validate() const;
};

/// (sigma, delta, b) of the hyperbolic-time predicate.
struct HyperbolicParams {
  double sigma = 0.0;
  double delta = 0.0;
  double b = 0.0;

  /// 0 < sigma < 1, delta > 0, b > 0.
  void validate() const;
  /// Additionally enforces b < min{1/2, 1/(4 beta)}.
  void validate_for(const NonDegeneracyParams& nd) const;

  double log_sigma() const noexcept { return std::log(sigma); }
};

/// Upper bound min{1/2, 1/(4 beta)} on b.
double max_b(double beta) noexcept;

/// A one-dimensional map f together with log||Df^{-1}||, its exceptional set S
/// and (optionally) its inverse branches.
///
/// Implementations must be immutable: every member is const and the library
/// calls them concurrently from ensemble workers.
class MapModel {
 public:
  virtual ~MapModel() = default;

  const std::string& name() const noexcept { return name_; }
  const Domain& domain() const noexcept { return domain_; }
  std::span<const double> exceptional_set() const noexcept { return exceptional_; }
  /// Nominal non-degeneracy constants for this map.
  const NonDegeneracyParams& nondegeneracy() const noexcept { return nondegeneracy_; }
  const HyperbolicParams& default_params() const noexcept { return defaults_; }

  /// f(x), canonical representative in, canonical representative out.
  virtual double eval(double x) const = 0;
  /// Same map in x87 extended precision, used where the orbit must keep more
  /// random bits than a double holds (push-forward of Lebesgue measure).
  virtual long double eval_extended(long double x) const {
    return eval(static_cast<double>(x));
  }

  /// log||Df(x)^{-1}|| = -log|f'(x)|; +infinity exactly on S.
  double log_inv_deriv(double x) const;
  /// L(x + dx) - L(x) without cancellation, for |dx| much smaller than dist(x, S).
  virtual double log_inv_deriv_delta(double x, double dx) const;

  bool in_exceptional_set(double x) const noexcept;
  /// Distance to S, +infinity when S is empty.
  double dist_to_s(double x) const noexcept;
  /// dist(x, S) if that is <= delta, otherwise 1.
  double dist_delta(double x, double delta) const noexcept;

  virtual int branch_count() const noexcept { return 0; }
  /// g_i(x); throws on a bad index or x outside the branch domain.
  double inverse_branch(int branch, double x) const;
  virtual bool in_branch_domain(int branch, double x) const noexcept;
  /// Index of the branch whose image contains x, or -1.
  virtual int branch_of(double x) const noexcept;
  /// g_i(x + dx) - g_i(x) without cancellation.
  virtual double inverse_branch_delta(int branch, double x, double dx) const;

 protected:
  MapModel(std::string name, Domain domain, std::vector<double> exceptional,
           NonDegeneracyParams nondegeneracy, HyperbolicParams defaults);

  /// -log|f'(x)| off S.
  virtual double log_inv_deriv_regular(double x) const = 0;
  virtual double inverse_branch_unchecked(int branch, double x) const;

 private:
  std::string name_;
  Domain domain_;
  std::vector<double> exceptional_;
  NonDegeneracyParams nondegeneracy_;
  HyperbolicParams defaults_;
};

/// x -> 2 sqrt(x) - 1 for x >= 0 and 1 - 2 sqrt|x| otherwise, on the circle
/// [-1, 1) with -1 ~ 1. f'(x) = |x|^{-1/2}; S = {0, -1}.
class CircleIntermittentMap final : public MapModel {
 public:
  CircleIntermittentMap();

  double eval(double x) const override;
  long double eval_extended(long double x) const override;
  double log_inv_deriv_delta(double x, double dx) const override;

  int branch_count() const noexcept override { return 2; }
  bool in_branch_domain(int branch, double x) const noexcept override;
  int branch_of(double x) const noexcept override;
  double inverse_branch_delta(int branch, double x, double dx) const override;

 protected:
  double log_inv_deriv_regular(double x) const override;
  double inverse_branch_unchecked(int branch, double x) const override;
};

/// x -> 2x mod 1 on the circle [0, 1); S is empty.
class DoublingMap final : public MapModel {
 public:
  DoublingMap();

  double eval(double x) const override;
  long double eval_extended(long double x) const override;
  double log_inv_deriv_delta(double, double) const override { return 0.0; }

  int branch_count() const noexcept override { return 2; }
  int branch_of(double x) const noexcept override;
  double inverse_branch_delta(int branch, double x, double dx) const override;

 protected:
  double log_inv_deriv_regular(double x) const override;
  double inverse_branch_unchecked(int branch, double x) const override;
};

/// x -> 1 - a x^2 on [-1, 1], 0 < a <= 2; S = {0}.
class QuadraticMap final : public MapModel {
 public:
  explicit QuadraticMap(double a);

  double a() const noexcept { return a_; }
  double eval(double x) const override;
  long double eval_extended(long double x) const override;
  double log_inv_deriv_delta(double x, double dx) const override;

  int branch_count() const noexcept override { return 2; }
  bool in_branch_domain(int branch, double x) const noexcept override;
  int branch_of(double x) const noexcept override;
  double inverse_branch_delta(int branch, double x, double dx) const override;

 protected:
  double log_inv_deriv_regular(double x) const override;
  double inverse_branch_unchecked(int branch, double x) const override;

 private:
  double a_;
};

/// Manneville-Pomeau map x -> x + x^{1+s} mod 1 on the circle [0, 1), s > 0.
/// The derivative jumps at 0 ~ 1, so S = {0}. No inverse branches.
class MannevilleMap final : public MapModel {
 public:
  explicit MannevilleMap(double s);

  double eval(double x) const override;
  long double eval_extended(long double x) const override;

 protected:
  double log_inv_deriv_regular(double x) const override;

 private:
  double s_;
};

/// Builds a map from its registry name: "circle-intermittent", "doubling",
/// "quadratic(a)", "manneville(s)". Throws ErrorCode::kUnknownMap.
std::shared_ptr<const MapModel> make_map(std::string_view spec);

/// Registry names accepted by make_map (parameterised ones in template form).
std::vector<std::string> registered_maps();

/// Outcome of one sampled inequality of the non-degeneracy conditions.
/// ratio is LHS/RHS (or the analogous quotient for lower bounds); the
/// inequality holds at a sample iff ratio <= 1.
struct ConditionProbe {
  std::uint64_t evaluated = 0;
  std::uint64_t failed = 0;
  double worst_ratio = 0.0;
  double worst_x = std::numeric_limits<double>::quiet_NaN();

  bool passed() const noexcept { return failed == 0; }
};

struct NonDegeneracyReport {
  bool vacuous = false;  // S is empty
  ConditionProbe s1;
  ConditionProbe s2;
  ConditionProbe s3;

  bool passed() const noexcept {
    return vacuous || (s1.passed() && s2.passed() && s3.passed());
  }
};

/// Sampled probe of (s1)-(s3) with the supplied (B, beta). Half of the
/// samples are uniform on the domain, the other half are log-uniform in the
/// distance to a random point of S so that the singular scales are visited.
NonDegeneracyReport check_nondegeneracy(const MapModel& map,
                                        const NonDegeneracyParams& params,
                                        std::uint64_t sample_count,
                                        std::uint64_t rng_seed);

}  // namespace hypt
