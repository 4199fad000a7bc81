#include "hypt/map_models.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "hypt/counter_rng.hpp"
#include "hypt/error.hpp"

namespace hypt {

namespace {

double wrap(double x, double lo, double hi) noexcept {
  if (x >= lo && x < hi) return x;
  const double period = hi - lo;
  double y = x - period * std::floor((x - lo) / period);
  if (y >= hi) y -= period;
  if (y < lo) y = lo;
  return y;
}

long double wrap_extended(long double x, long double lo, long double hi) noexcept {
  if (x >= lo && x < hi) return x;
  const long double period = hi - lo;
  long double y = x - period * std::floor((x - lo) / period);
  if (y >= hi) y -= period;
  if (y < lo) y = lo;
  return y;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double CirclePoint::canonical(double x) noexcept { return wrap(x, -1.0, 1.0); }

double CirclePoint::distance(double x, double y) noexcept {
  const double d = std::fabs(canonical(x) - canonical(y));
  return std::min(d, 2.0 - d);
}

double Domain::canonical(double x) const noexcept {
  return periodic ? wrap(x, lo, hi) : x;
}

double Domain::distance(double x, double y) const noexcept {
  const double d = std::fabs(canonical(x) - canonical(y));
  return periodic ? std::min(d, length() - d) : d;
}

bool Domain::contains(double x) const noexcept {
  return periodic ? (x >= lo && x < hi) : (x >= lo && x <= hi);
}

void NonDegeneracyParams::validate() const {
  require(B > 1.0, ErrorCode::kInvalidArgument,
          "non-degeneracy constant B must satisfy B > 1 (got " + format_double(B) + ")");
  require(beta > 0.0, ErrorCode::kInvalidArgument,
          "non-degeneracy exponent beta must satisfy beta > 0 (got " +
              format_double(beta) + ")");
}

double max_b(double beta) noexcept { return std::min(0.5, 1.0 / (4.0 * beta)); }

void HyperbolicParams::validate() const {
  require(sigma > 0.0 && sigma < 1.0, ErrorCode::kInvalidArgument,
          "sigma must satisfy 0 < sigma < 1 (got " + format_double(sigma) + ")");
  require(delta > 0.0, ErrorCode::kInvalidArgument,
          "delta must satisfy delta > 0 (got " + format_double(delta) + ")");
  require(b > 0.0, ErrorCode::kInvalidArgument,
          "b must satisfy b > 0 (got " + format_double(b) + ")");
}

void HyperbolicParams::validate_for(const NonDegeneracyParams& nd) const {
  validate();
  nd.validate();
  const double bound = max_b(nd.beta);
  require(b < bound, ErrorCode::kInvalidArgument,
          "b must satisfy 0 < b < min{1/2, 1/(4*beta)} = " + format_double(bound) +
              " for beta = " + format_double(nd.beta) + " (got b = " + format_double(b) +
              ")");
}

MapModel::MapModel(std::string name, Domain domain, std::vector<double> exceptional,
                   NonDegeneracyParams nondegeneracy, HyperbolicParams defaults)
    : name_(std::move(name)),
      domain_(domain),
      exceptional_(std::move(exceptional)),
      nondegeneracy_(nondegeneracy),
      defaults_(defaults) {}

double MapModel::log_inv_deriv(double x) const {
  if (in_exceptional_set(x)) return kInfinity;
  return log_inv_deriv_regular(domain_.canonical(x));
}

double MapModel::log_inv_deriv_delta(double x, double dx) const {
  return log_inv_deriv(x + dx) - log_inv_deriv(x);
}

bool MapModel::in_exceptional_set(double x) const noexcept {
  const double c = domain_.canonical(x);
  return std::any_of(exceptional_.begin(), exceptional_.end(),
                     [c](double s) { return s == c; });
}

double MapModel::dist_to_s(double x) const noexcept {
  double best = kInfinity;
  for (double s : exceptional_) best = std::min(best, domain_.distance(x, s));
  return best;
}

double MapModel::dist_delta(double x, double delta) const noexcept {
  const double d = dist_to_s(x);
  return d <= delta ? d : 1.0;
}

double MapModel::inverse_branch(int branch, double x) const {
  require(branch >= 0 && branch < branch_count(), ErrorCode::kOutOfRange,
          "inverse branch index " + std::to_string(branch) + " out of range for map '" +
              name_ + "' with " + std::to_string(branch_count()) + " branches");
  require(in_branch_domain(branch, x), ErrorCode::kOutOfRange,
          "x = " + format_double(x) + " outside the domain of inverse branch " +
              std::to_string(branch) + " of map '" + name_ + "'");
  return inverse_branch_unchecked(branch, x);
}

bool MapModel::in_branch_domain(int branch, double x) const noexcept {
  return branch >= 0 && branch < branch_count() && domain_.contains(x);
}

int MapModel::branch_of(double) const noexcept { return -1; }

double MapModel::inverse_branch_delta(int branch, double x, double dx) const {
  return inverse_branch(branch, x + dx) - inverse_branch(branch, x);
}

double MapModel::inverse_branch_unchecked(int, double) const {
  fail(ErrorCode::kOutOfRange, "map '" + name_ + "' exposes no inverse branches");
}

// ---------------------------------------------------------------------------

CircleIntermittentMap::CircleIntermittentMap()
    : MapModel("circle-intermittent", Domain{-1.0, 1.0, true}, {0.0, -1.0},
               NonDegeneracyParams{4.0, 0.5},
               HyperbolicParams{std::exp(-0.25), 0.1, 0.25}) {}

double CircleIntermittentMap::eval(double x) const {
  const double c = CirclePoint::canonical(x);
  const double y = c >= 0.0 ? 2.0 * std::sqrt(c) - 1.0 : 1.0 - 2.0 * std::sqrt(-c);
  return CirclePoint::canonical(y);
}

long double CircleIntermittentMap::eval_extended(long double x) const {
  const long double c = wrap_extended(x, -1.0L, 1.0L);
  const long double y = c >= 0.0L ? 2.0L * std::sqrt(c) - 1.0L : 1.0L - 2.0L * std::sqrt(-c);
  return wrap_extended(y, -1.0L, 1.0L);
}

double CircleIntermittentMap::log_inv_deriv_regular(double x) const {
  return 0.5 * std::log(std::fabs(x));
}

double CircleIntermittentMap::log_inv_deriv_delta(double x, double dx) const {
  return 0.5 * std::log1p(dx / x);
}

// Both branch formulas extend continuously to the closed interval, where
// they hit S or the fixed point: g1(-1) = 0, g1(1) = 1, g2(-1) = -1, g2(1) = 0.
bool CircleIntermittentMap::in_branch_domain(int branch, double x) const noexcept {
  return (branch == 0 || branch == 1) && x >= -1.0 && x <= 1.0;
}

int CircleIntermittentMap::branch_of(double x) const noexcept {
  if (x > 0.0 && x < 1.0) return 0;
  if (x < 0.0 && x > -1.0) return 1;
  return -1;
}

double CircleIntermittentMap::inverse_branch_unchecked(int branch, double x) const {
  if (branch == 0) {
    const double h = 0.5 * (1.0 + x);
    return h * h;
  }
  const double h = 0.5 * (1.0 - x);
  return -h * h;
}

double CircleIntermittentMap::inverse_branch_delta(int branch, double x, double dx) const {
  // ((1+x+dx)^2 - (1+x)^2)/4 and -((1-x-dx)^2 - (1-x)^2)/4, factored.
  if (branch == 0) return 0.25 * dx * (2.0 * (1.0 + x) + dx);
  return 0.25 * dx * (2.0 * (1.0 - x) - dx);
}

// ---------------------------------------------------------------------------

DoublingMap::DoublingMap()
    : MapModel("doubling", Domain{0.0, 1.0, true}, {}, NonDegeneracyParams{4.0, 0.5},
               HyperbolicParams{0.5, 0.1, 0.25}) {}

double DoublingMap::eval(double x) const {
  double y = 2.0 * wrap(x, 0.0, 1.0);
  if (y >= 1.0) y -= 1.0;
  return y;
}

long double DoublingMap::eval_extended(long double x) const {
  long double y = 2.0L * wrap_extended(x, 0.0L, 1.0L);
  if (y >= 1.0L) y -= 1.0L;
  return y;
}

double DoublingMap::log_inv_deriv_regular(double) const { return -std::log(2.0); }

int DoublingMap::branch_of(double x) const noexcept {
  if (x < 0.0 || x >= 1.0) return -1;
  return x < 0.5 ? 0 : 1;
}

double DoublingMap::inverse_branch_unchecked(int branch, double x) const {
  return 0.5 * (x + branch);
}

double DoublingMap::inverse_branch_delta(int, double, double dx) const { return 0.5 * dx; }

// ---------------------------------------------------------------------------

QuadraticMap::QuadraticMap(double a)
    : MapModel("quadratic(" + format_double(a) + ")", Domain{-1.0, 1.0, false}, {0.0},
               NonDegeneracyParams{std::max({4.0, 2.0 * a + 1.0, 1.0 / a}), 1.0},
               HyperbolicParams{std::exp(-0.25), 0.1, 0.125}),
      a_(a) {
  require(a > 0.0 && a <= 2.0, ErrorCode::kInvalidArgument,
          "quadratic map parameter must satisfy 0 < a <= 2 (got " + format_double(a) + ")");
}

double QuadraticMap::eval(double x) const { return 1.0 - a_ * x * x; }

long double QuadraticMap::eval_extended(long double x) const {
  return 1.0L - static_cast<long double>(a_) * x * x;
}

double QuadraticMap::log_inv_deriv_regular(double x) const {
  return -std::log(2.0 * a_ * std::fabs(x));
}

double QuadraticMap::log_inv_deriv_delta(double x, double dx) const {
  return -std::log1p(dx / x);
}

bool QuadraticMap::in_branch_domain(int branch, double x) const noexcept {
  return (branch == 0 || branch == 1) && x >= 1.0 - a_ && x <= 1.0;
}

int QuadraticMap::branch_of(double x) const noexcept {
  if (x > 0.0 && x <= 1.0) return 0;
  if (x < 0.0 && x >= -1.0) return 1;
  return -1;
}

double QuadraticMap::inverse_branch_unchecked(int branch, double x) const {
  const double r = std::sqrt((1.0 - x) / a_);
  return branch == 0 ? r : -r;
}

double QuadraticMap::inverse_branch_delta(int branch, double x, double dx) const {
  const double u0 = std::max(0.0, (1.0 - x) / a_);
  const double u1 = std::max(0.0, (1.0 - x - dx) / a_);
  const double denom = std::sqrt(u0) + std::sqrt(u1);
  if (denom == 0.0) return 0.0;
  const double d = (-dx / a_) / denom;
  return branch == 0 ? d : -d;
}

// ---------------------------------------------------------------------------

MannevilleMap::MannevilleMap(double s)
    : MapModel("manneville(" + format_double(s) + ")", Domain{0.0, 1.0, true}, {0.0},
               NonDegeneracyParams{std::max(4.0, 2.0 + 2.0 * s), 1.0},
               HyperbolicParams{std::exp(-0.1), 0.1, 0.125}),
      s_(s) {
  require(s > 0.0, ErrorCode::kInvalidArgument,
          "manneville parameter must satisfy s > 0 (got " + format_double(s) + ")");
}

double MannevilleMap::eval(double x) const {
  const double c = wrap(x, 0.0, 1.0);
  return wrap(c + std::pow(c, 1.0 + s_), 0.0, 1.0);
}

long double MannevilleMap::eval_extended(long double x) const {
  const long double c = wrap_extended(x, 0.0L, 1.0L);
  return wrap_extended(c + std::pow(c, 1.0L + static_cast<long double>(s_)), 0.0L, 1.0L);
}

double MannevilleMap::log_inv_deriv_regular(double x) const {
  return -std::log1p((1.0 + s_) * std::pow(x, s_));
}

// ---------------------------------------------------------------------------

namespace {

double parse_parameter(std::string_view spec, std::string_view prefix) {
  std::string_view inner = spec.substr(prefix.size());
  require(!inner.empty() && inner.back() == ')', ErrorCode::kUnknownMap,
          "malformed map name '" + std::string(spec) + "'");
  inner.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), value);
  require(ec == std::errc{} && ptr == inner.data() + inner.size(), ErrorCode::kUnknownMap,
          "malformed map parameter in '" + std::string(spec) + "'");
  return value;
}

}  // namespace

std::shared_ptr<const MapModel> make_map(std::string_view spec) {
  if (spec == "circle-intermittent") return std::make_shared<CircleIntermittentMap>();
  if (spec == "doubling") return std::make_shared<DoublingMap>();
  if (spec.starts_with("quadratic(")) {
    return std::make_shared<QuadraticMap>(parse_parameter(spec, "quadratic("));
  }
  if (spec.starts_with("manneville(")) {
    return std::make_shared<MannevilleMap>(parse_parameter(spec, "manneville("));
  }
  fail(ErrorCode::kUnknownMap, "unknown map '" + std::string(spec) +
                                   "' (known: circle-intermittent, doubling, quadratic(a), "
                                   "manneville(s))");
}

std::vector<std::string> registered_maps() {
  return {"circle-intermittent", "doubling", "quadratic(a)", "manneville(s)"};
}

// ---------------------------------------------------------------------------

namespace {

void record(ConditionProbe& probe, double ratio, double x) {
  ++probe.evaluated;
  if (!(ratio <= 1.0)) ++probe.failed;
  if (ratio > probe.worst_ratio || std::isnan(probe.worst_x)) {
    probe.worst_ratio = ratio;
    probe.worst_x = x;
  }
}

}  // namespace

NonDegeneracyReport check_nondegeneracy(const MapModel& map,
                                        const NonDegeneracyParams& params,
                                        std::uint64_t sample_count,
                                        std::uint64_t rng_seed) {
  params.validate();
  require(sample_count >= 1, ErrorCode::kInvalidArgument, "sample_count must be >= 1");

  NonDegeneracyReport report;
  const auto s = map.exceptional_set();
  if (s.empty()) {
    report.vacuous = true;
    return report;
  }

  const Domain& dom = map.domain();
  const double log_b = std::log(params.B);
  CounterRng rng(rng_seed, 0);

  for (std::uint64_t i = 0; i < sample_count; ++i) {
    double x = 0.0;
    double d = 0.0;
    for (;;) {
      if (i % 2 == 0) {
        x = dom.from_unit(rng.uniform());
      } else {
        const double anchor = s[rng() % s.size()];
        const double offset = 0.5 * std::pow(10.0, -12.0 * rng.uniform());
        x = dom.canonical(anchor + ((rng() & 1U) ? offset : -offset));
        if (!dom.contains(x)) continue;
      }
      d = map.dist_to_s(x);
      if (d > 0.0 && !map.in_exceptional_set(x)) break;
    }

    const double log_deriv = -map.log_inv_deriv(x);  // log|f'(x)|
    const double log_d = std::log(d);
    // (s1): (1/B) d^beta <= |f'| <= B d^-beta.
    const double upper = std::exp(log_deriv - (log_b - params.beta * log_d));
    const double lower = std::exp((params.beta * log_d - log_b) - log_deriv);
    record(report.s1, std::max(upper, lower), x);

    // (s2), (s3) on a pair with dist(x, y) < dist(x, S)/2.
    const double t = 0.999 * std::pow(10.0, -6.0 * rng.uniform());
    const double dy = ((rng() & 1U) ? 0.5 : -0.5) * t * d;
    const double rhs = params.B * std::exp(-params.beta * log_d) * std::fabs(dy);
    const double dl = map.log_inv_deriv_delta(x, dy);
    record(report.s2, std::fabs(dl) / rhs, x);
    // In one dimension log|det Df| = -log||Df^{-1}||.
    record(report.s3, std::fabs(-dl) / rhs, x);
  }
  return report;
}

}  // namespace hypt
