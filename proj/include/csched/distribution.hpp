#pragma once

// Interruption-time distributions used as distributional advice.
//
// Every kind answers the same small set of exact queries: the probability of
// a half-open interval [a, b), the partial first moment over [a, b), the
// primitive of the CDF (for Earth Mover's Distance), a quantile function
// (for inverse-CDF sampling) and its breakpoints. Point masses sitting exactly
// on an interval's left end are counted, those on the right end are not.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "csched/numeric.hpp"

namespace csched {

inline constexpr double kMassTolerance = 1e-12;
/// Quantile window used to give unbounded supports an effective range.
inline constexpr double kTailQuantile = 1e-12;

enum class DistributionKind {
  PointSet,
  Uniform,
  TruncatedNormal,
  AdversarialDiscrete,
  AdversarialContinuous,
  Shifted,
  Mixture,
  Relocated,
};

inline const char* to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::PointSet: return "points";
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::TruncatedNormal: return "normal";
    case DistributionKind::AdversarialDiscrete: return "adversarial-discrete";
    case DistributionKind::AdversarialContinuous: return "adversarial";
    case DistributionKind::Shifted: return "shifted";
    case DistributionKind::Mixture: return "mixture";
    case DistributionKind::Relocated: return "relocated";
  }
  return "?";
}

struct Support {
  double lo;
  double hi;
  bool bounded;  // false: [lo, hi] is a quantile window, mass lies outside
};

class AdviceDistribution;
using DistributionPtr = std::shared_ptr<const AdviceDistribution>;

namespace dist {

inline double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

struct PointMass {
  double time;
  double mass;
};

class PointSet {
 public:
  explicit PointSet(std::vector<PointMass> points) {
    if (points.empty()) throw std::invalid_argument("point set needs at least one point");
    double total = 0.0;
    for (const auto& p : points) {
      if (!(p.time > 0.0) || !std::isfinite(p.time)) {
        throw std::invalid_argument("point times must be positive and finite");
      }
      if (!(p.mass > 0.0 && p.mass <= 1.0 + kMassTolerance)) {
        throw std::invalid_argument("point masses must lie in (0,1]");
      }
      total += p.mass;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
      throw std::invalid_argument("point masses must sum to 1");
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const PointMass& a, const PointMass& b) { return a.time < b.time; });
    for (const auto& p : points) {
      if (!points_.empty() && points_.back().time == p.time) {
        points_.back().mass += p.mass;
      } else {
        points_.push_back(p);
      }
    }
    cumulative_.reserve(points_.size());
    double acc = 0.0;
    for (const auto& p : points_) cumulative_.push_back(acc += p.mass);
  }

  const std::vector<PointMass>& points() const { return points_; }

  double prob_below(double x) const { return mass_before(index_at_or_after(x)); }

  double interval_mass(double a, double b) const {
    if (!(b > a)) return 0.0;
    const std::size_t i = index_at_or_after(a);
    const std::size_t j = index_at_or_after(b);
    double m = 0.0;
    for (std::size_t k = i; k < j; ++k) m += points_[k].mass;
    return m;
  }

  double partial_mean(double a, double b) const {
    double s = 0.0;
    for (std::size_t k = index_at_or_after(a); k < points_.size() && points_[k].time < b; ++k) {
      s += points_[k].time * points_[k].mass;
    }
    return s;
  }

  double mean() const {
    double s = 0.0;
    for (const auto& p : points_) s += p.time * p.mass;
    return s;
  }

  double primitive(double x) const {
    double s = 0.0;
    for (const auto& p : points_) {
      if (p.time >= x) break;
      s += p.mass * (x - p.time);
    }
    return s;
  }

  double quantile(double u) const {
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                              points_.size() - 1);
    return points_[k].time;
  }

  Support support() const { return {points_.front().time, points_.back().time, true}; }

  std::vector<double> breakpoints() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.time);
    return out;
  }

 private:
  std::size_t index_at_or_after(double x) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(), x,
                                     [](const PointMass& p, double v) { return p.time < v; });
    return static_cast<std::size_t>(it - points_.begin());
  }
  double mass_before(std::size_t k) const { return k == 0 ? 0.0 : cumulative_[k - 1]; }

  std::vector<PointMass> points_;
  std::vector<double> cumulative_;
};

struct Uniform {
  double lo;
  double hi;

  Uniform(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo > 0.0 && hi > lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("uniform advice needs 0 < lo < hi");
    }
  }

  double width() const { return hi - lo; }
  double prob_below(double x) const { return clamp01((x - lo) / width()); }
  double interval_mass(double a, double b) const {
    const double l = std::max(a, lo);
    const double r = std::min(b, hi);
    return r > l ? (r - l) / width() : 0.0;
  }
  double partial_mean(double a, double b) const {
    const double l = std::max(a, lo);
    const double r = std::min(b, hi);
    return r > l ? 0.5 * (r - l) * (r + l) / width() : 0.0;
  }
  double mean() const { return 0.5 * (lo + hi); }
  double primitive(double x) const {
    if (x <= lo) return 0.0;
    if (x <= hi) return 0.5 * (x - lo) * (x - lo) / width();
    return 0.5 * width() + (x - hi);
  }
  double quantile(double u) const { return lo + u * width(); }
  Support support() const { return {lo, hi, true}; }
  std::vector<double> breakpoints() const { return {lo, hi}; }
};

/// Normal(m, sigma^2) conditioned on (0, inf).
struct TruncatedNormal {
  double m;
  double sigma;

  TruncatedNormal(double m_, double sigma_) : m(m_), sigma(sigma_) {
    if (!(sigma > 0.0) || !std::isfinite(m) || !std::isfinite(sigma)) {
      throw std::invalid_argument("truncated normal needs finite m and sigma > 0");
    }
    if (!(normalizer() > 1e-300)) {
      throw std::invalid_argument("truncated normal has no mass on (0, inf)");
    }
  }

  double z(double x) const { return (x - m) / sigma; }
  double alpha() const { return -m / sigma; }
  double normalizer() const { return numeric::normal_sf(alpha()); }

  double prob_below(double x) const {
    if (x <= 0.0) return 0.0;
    return clamp01((numeric::normal_cdf(z(x)) - numeric::normal_cdf(alpha())) / normalizer());
  }
  double interval_mass(double a, double b) const {
    a = std::max(a, 0.0);
    if (!(b > a)) return 0.0;
    // Difference of survival functions stays accurate in the upper tail.
    const double d = a >= m ? numeric::normal_sf(z(a)) - numeric::normal_sf(z(b))
                            : numeric::normal_cdf(z(b)) - numeric::normal_cdf(z(a));
    return clamp01(d / normalizer());
  }
  double partial_mean(double a, double b) const {
    a = std::max(a, 0.0);
    if (!(b > a)) return 0.0;
    const double za = z(a);
    const double pdf_b = std::isfinite(b) ? numeric::normal_pdf(z(b)) : 0.0;
    return m * interval_mass(a, b) + sigma * (numeric::normal_pdf(za) - pdf_b) / normalizer();
  }
  double mean() const {
    return m + sigma * numeric::normal_pdf(alpha()) / normalizer();
  }
  double primitive(double x) const {
    if (x <= 0.0) return 0.0;
    // Integral of Phi: G(z) = z Phi(z) + phi(z).
    const auto g = [](double t) { return t * numeric::normal_cdf(t) + numeric::normal_pdf(t); };
    return (sigma * (g(z(x)) - g(alpha())) - x * numeric::normal_cdf(alpha())) / normalizer();
  }
  double quantile(double u) const {
    const double below = numeric::normal_cdf(alpha());
    const double p = below + u * normalizer();
    const double x = p < 0.5 ? m + sigma * numeric::normal_quantile(p)
                             : m + sigma * numeric::normal_isf((1.0 - u) * normalizer());
    return std::max(x, std::numeric_limits<double>::min());
  }
  Support support() const {
    return {quantile(kTailQuantile), quantile(1.0 - kTailQuantile), false};
  }
  std::vector<double> breakpoints() const { return {}; }
};

/// Density 2D/x^2 on [D, 2D].
struct AdversarialContinuous {
  double d;

  explicit AdversarialContinuous(double d_) : d(d_) {
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("D must be positive");
  }

  double prob_below(double x) const {
    if (x <= d) return 0.0;
    if (x >= 2.0 * d) return 1.0;
    return 2.0 - 2.0 * d / x;
  }
  double interval_mass(double a, double b) const {
    const double l = std::max(a, d);
    const double r = std::min(b, 2.0 * d);
    return r > l ? 2.0 * d * (r - l) / (l * r) : 0.0;
  }
  double partial_mean(double a, double b) const {
    const double l = std::max(a, d);
    const double r = std::min(b, 2.0 * d);
    return r > l ? 2.0 * d * std::log(r / l) : 0.0;
  }
  double mean() const { return 2.0 * d * numeric::kLn2; }
  double primitive(double x) const {
    if (x <= d) return 0.0;
    if (x <= 2.0 * d) return 2.0 * (x - d) - 2.0 * d * std::log(x / d);
    return 2.0 * d - 2.0 * d * numeric::kLn2 + (x - 2.0 * d);
  }
  double quantile(double u) const { return 2.0 * d / (2.0 - u); }
  Support support() const { return {d, 2.0 * d, true}; }
  std::vector<double> breakpoints() const { return {d, 2.0 * d}; }
};

/// The n-point construction that makes every member of a given portfolio
/// equally bad. Evaluates as its point set.
struct AdversarialDiscrete {
  PointSet points;
  std::vector<double> lambdas;
  double eps;
};

// The composite kinds below hold other distributions; their members are
// defined after AdviceDistribution is complete.

/// Base distribution translated by `offset`.
struct Shifted {
  DistributionPtr base;
  double offset;

  double prob_below(double x) const;
  double interval_mass(double a, double b) const;
  double partial_mean(double a, double b) const;
  double mean() const;
  double primitive(double x) const;
  double quantile(double u) const;
  Support support() const;
  std::vector<double> breakpoints() const;
};

struct Component {
  double weight;
  DistributionPtr dist;
};

struct Mixture {
  std::vector<Component> components;

  double prob_below(double x) const;
  double interval_mass(double a, double b) const;
  double partial_mean(double a, double b) const;
  double mean() const;
  double primitive(double x) const;
  double quantile(double u) const;
  Support support() const;
  std::vector<double> breakpoints() const;
};

/// Base distribution with its mass on [from_lo, from_hi) collapsed onto `to`.
struct Relocated {
  DistributionPtr base;
  double from_lo;
  double from_hi;
  double to;
  double moved;  // mass carried to `to`

  double prob_below(double x) const;
  double interval_mass(double a, double b) const;
  double partial_mean(double a, double b) const;
  double mean() const;
  double primitive(double x) const;
  double quantile(double u) const;
  Support support() const;
  std::vector<double> breakpoints() const;
};

}  // namespace dist

class AdviceDistribution {
 public:
  using Variant = std::variant<dist::PointSet, dist::Uniform, dist::TruncatedNormal,
                               dist::AdversarialDiscrete, dist::AdversarialContinuous,
                               dist::Shifted, dist::Mixture, dist::Relocated>;

  static AdviceDistribution point_set(std::vector<dist::PointMass> points) {
    return AdviceDistribution(dist::PointSet(std::move(points)));
  }
  static AdviceDistribution point(double time) { return point_set({{time, 1.0}}); }
  static AdviceDistribution uniform(double lo, double hi) {
    return AdviceDistribution(dist::Uniform(lo, hi));
  }
  static AdviceDistribution truncated_normal(double m, double sigma) {
    return AdviceDistribution(dist::TruncatedNormal(m, sigma));
  }
  static AdviceDistribution adversarial_continuous(double d) {
    return AdviceDistribution(dist::AdversarialContinuous(d));
  }
  static AdviceDistribution adversarial_discrete(dist::PointSet points,
                                                 std::vector<double> lambdas, double eps) {
    return AdviceDistribution(
        dist::AdversarialDiscrete{std::move(points), std::move(lambdas), eps});
  }
  static AdviceDistribution shifted(const AdviceDistribution& base, double offset);
  static AdviceDistribution mixture(std::vector<std::pair<double, AdviceDistribution>> parts);
  static AdviceDistribution relocated(const AdviceDistribution& base, double from_lo,
                                      double from_hi, double to);

  DistributionKind kind() const { return static_cast<DistributionKind>(impl_.index()); }
  const Variant& variant() const { return impl_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&impl_);
  }

  /// P(z < x).
  double prob_below(double x) const {
    return visit<double>([&](const auto& d) { return d.prob_below(x); });
  }
  /// P(a <= z < b).
  double interval_mass(double a, double b) const {
    if (!(b > a)) return 0.0;
    return visit<double>([&](const auto& d) { return d.interval_mass(a, b); });
  }
  /// E[z ; a <= z < b].
  double partial_mean(double a, double b) const {
    if (!(b > a)) return 0.0;
    return visit<double>([&](const auto& d) { return d.partial_mean(a, b); });
  }
  double mean() const {
    return visit<double>([](const auto& d) { return d.mean(); });
  }
  /// Integral of the CDF from 0 to x.
  double primitive(double x) const {
    return visit<double>([&](const auto& d) { return d.primitive(x); });
  }
  /// Smallest x with P(z <= x) >= u, for u in (0,1).
  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
    return visit<double>([&](const auto& d) { return d.quantile(u); });
  }
  Support support() const {
    return visit<Support>([](const auto& d) { return d.support(); });
  }
  /// Locations where the CDF jumps or changes analytic form.
  std::vector<double> breakpoints() const {
    return visit<std::vector<double>>([](const auto& d) { return d.breakpoints(); });
  }

  std::string describe() const;

 private:
  explicit AdviceDistribution(Variant v) : impl_(std::move(v)) {}

  // Explicit result type: wrapper kinds recurse into AdviceDistribution, so
  // the return type cannot be deduced.
  template <class R, class F>
  R visit(F&& f) const {
    return std::visit(
        [&](const auto& d) -> R {
          if constexpr (std::is_same_v<std::decay_t<decltype(d)>, dist::AdversarialDiscrete>) {
            return f(d.points);
          } else {
            return f(d);
          }
        },
        impl_);
  }

  Variant impl_;
};

namespace dist {

// Generic inverse CDF by bisection on prob_below. The bracket closes on
// adjacent doubles with P(z < lo) < u <= P(z < hi), so lo is the quantile and
// point masses map onto their exact location.
template <class Dist>
double bisect_quantile(const Dist& d, double u) {
  const Support s = d.support();
  double lo = s.lo;
  double hi = s.hi;
  if (d.prob_below(lo) >= u) return lo;
  if (d.prob_below(hi) < u) {
    hi = std::max(hi, 1.0);
    while (d.prob_below(hi) < u && std::isfinite(hi)) hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (d.prob_below(mid) < u ? lo : hi) = mid;
  }
  return lo;
}

inline double Shifted::prob_below(double x) const { return base->prob_below(x - offset); }
inline double Shifted::interval_mass(double a, double b) const {
  return base->interval_mass(a - offset, b - offset);
}
inline double Shifted::partial_mean(double a, double b) const {
  return base->partial_mean(a - offset, b - offset) +
         offset * base->interval_mass(a - offset, b - offset);
}
inline double Shifted::mean() const { return base->mean() + offset; }
inline double Shifted::primitive(double x) const {
  // Support stays inside (0, inf), so the base primitive vanishes at -offset.
  return x - offset > 0.0 ? base->primitive(x - offset) : 0.0;
}
inline double Shifted::quantile(double u) const { return base->quantile(u) + offset; }
inline Support Shifted::support() const {
  const Support s = base->support();
  return {s.lo + offset, s.hi + offset, s.bounded};
}
inline std::vector<double> Shifted::breakpoints() const {
  auto b = base->breakpoints();
  for (double& x : b) x += offset;
  return b;
}

inline double Mixture::prob_below(double x) const {
  double s = 0.0;
  for (const auto& c : components) s += c.weight * c.dist->prob_below(x);
  return clamp01(s);
}
inline double Mixture::interval_mass(double a, double b) const {
  double s = 0.0;
  for (const auto& c : components) s += c.weight * c.dist->interval_mass(a, b);
  return clamp01(s);
}
inline double Mixture::partial_mean(double a, double b) const {
  double s = 0.0;
  for (const auto& c : components) s += c.weight * c.dist->partial_mean(a, b);
  return s;
}
inline double Mixture::mean() const {
  double s = 0.0;
  for (const auto& c : components) s += c.weight * c.dist->mean();
  return s;
}
inline double Mixture::primitive(double x) const {
  double s = 0.0;
  for (const auto& c : components) s += c.weight * c.dist->primitive(x);
  return s;
}
inline double Mixture::quantile(double u) const { return bisect_quantile(*this, u); }
inline Support Mixture::support() const {
  Support out{std::numeric_limits<double>::infinity(), 0.0, true};
  for (const auto& c : components) {
    const Support s = c.dist->support();
    out.lo = std::min(out.lo, s.lo);
    out.hi = std::max(out.hi, s.hi);
    out.bounded = out.bounded && s.bounded;
  }
  return out;
}
inline std::vector<double> Mixture::breakpoints() const {
  std::vector<double> out;
  for (const auto& c : components) {
    auto b = c.dist->breakpoints();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

inline double Relocated::prob_below(double x) const {
  double p = base->prob_below(x);
  if (x > from_lo) p -= base->interval_mass(from_lo, std::min(x, from_hi));
  if (x > to) p += moved;
  return clamp01(p);
}
inline double Relocated::interval_mass(double a, double b) const {
  double m = base->interval_mass(a, b) -
             base->interval_mass(std::max(a, from_lo), std::min(b, from_hi));
  if (to >= a && to < b) m += moved;
  return clamp01(m);
}
inline double Relocated::partial_mean(double a, double b) const {
  double s = base->partial_mean(a, b) -
             base->partial_mean(std::max(a, from_lo), std::min(b, from_hi));
  if (to >= a && to < b) s += moved * to;
  return s;
}
inline double Relocated::mean() const {
  return base->mean() - base->partial_mean(from_lo, from_hi) + moved * to;
}
inline double Relocated::primitive(double x) const {
  double s = base->primitive(x);
  if (x > from_lo) {
    // Integral over [from_lo, x] of the removed mass base([from_lo, min(t, from_hi))).
    const double y = std::min(x, from_hi);
    s -= base->primitive(y) - base->primitive(from_lo) - base->prob_below(from_lo) * (y - from_lo);
    if (x > from_hi) s -= moved * (x - from_hi);
  }
  if (x > to) s += moved * (x - to);
  return s;
}
inline double Relocated::quantile(double u) const { return bisect_quantile(*this, u); }
inline Support Relocated::support() const {
  const Support s = base->support();
  return {std::min(s.lo, to), std::max(s.hi, to), s.bounded};
}
inline std::vector<double> Relocated::breakpoints() const {
  auto b = base->breakpoints();
  b.insert(b.end(), {from_lo, from_hi, to});
  return b;
}

}  // namespace dist

inline AdviceDistribution AdviceDistribution::shifted(const AdviceDistribution& base,
                                                      double offset) {
  const Support s = base.support();
  if (!std::isfinite(offset)) throw std::invalid_argument("shift must be finite");
  if (offset < 0.0 && (!s.bounded || s.lo + offset <= 0.0)) {
    throw std::invalid_argument("shift would move mass onto non-positive times");
  }
  return AdviceDistribution(
      dist::Shifted{std::make_shared<const AdviceDistribution>(base), offset});
}

inline AdviceDistribution AdviceDistribution::mixture(
    std::vector<std::pair<double, AdviceDistribution>> parts) {
  if (parts.empty()) throw std::invalid_argument("mixture needs at least one component");
  dist::Mixture mix;
  double total = 0.0;
  for (auto& [w, d] : parts) {
    if (!(w > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    total += w;
    mix.components.push_back({w, std::make_shared<const AdviceDistribution>(std::move(d))});
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
  return AdviceDistribution(std::move(mix));
}

inline AdviceDistribution AdviceDistribution::relocated(const AdviceDistribution& base,
                                                        double from_lo, double from_hi,
                                                        double to) {
  if (!(from_lo > 0.0 && from_hi > from_lo) || !(to > 0.0)) {
    throw std::invalid_argument("relocation needs 0 < from_lo < from_hi and to > 0");
  }
  return AdviceDistribution(dist::Relocated{std::make_shared<const AdviceDistribution>(base),
                                            from_lo, from_hi, to,
                                            base.interval_mass(from_lo, from_hi)});
}

inline std::string AdviceDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, dist::PointSet>) {
          os << "points:";
          const char* sep = "";
          for (const auto& p : d.points()) {
            os << sep << p.time << '@' << p.mass;
            sep = ",";
          }
        } else if constexpr (std::is_same_v<T, dist::Uniform>) {
          os << "uniform:" << d.lo << ',' << d.hi;
        } else if constexpr (std::is_same_v<T, dist::TruncatedNormal>) {
          os << "normal:" << d.m << ',' << d.sigma;
        } else if constexpr (std::is_same_v<T, dist::AdversarialContinuous>) {
          os << "adversarial:" << d.d;
        } else if constexpr (std::is_same_v<T, dist::AdversarialDiscrete>) {
          os << "adversarial-discrete:";
          const char* sep = "";
          for (double l : d.lambdas) {
            os << sep << l;
            sep = ",";
          }
          os << '@' << d.eps;
        } else if constexpr (std::is_same_v<T, dist::Shifted>) {
          os << "shifted(" << d.base->describe() << ',' << d.offset << ')';
        } else if constexpr (std::is_same_v<T, dist::Mixture>) {
          os << "mixture(";
          const char* sep = "";
          for (const auto& c : d.components) {
            os << sep << c.weight << '*' << c.dist->describe();
            sep = ";";
          }
          os << ')';
        } else {
          os << "relocated(" << d.base->describe() << ",[" << d.from_lo << ',' << d.from_hi
             << ")->" << d.to << ')';
        }
      },
      impl_);
  return os.str();
}

}  // namespace csched
