#pragma once

// Bidding strategies: monotone maps from values to bids, together with the
// induced virtual-value map h(x) = beta(x) - beta'(x)(1-F(x))/f(x).

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "auctionlab/distribution.hpp"
#include "auctionlab/quadrature.hpp"

namespace auctionlab {

enum class Side { left, right };

enum class StrategyKind { truthful, linear, affine, thresholded, from_target, custom };

struct ThresholdedParams;

class BidStrategy {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual double bid(double x) const = 0;
    virtual double derivative(double x, Side side) const = 0;
    virtual StrategyKind kind() const = 0;
    // Kink locations (value space), e.g. the threshold of a thresholded map.
    virtual std::vector<double> kinks() const { return {}; }
    // Analytic h when the construction pins it down exactly; avoids the
    // catastrophic cancellation of the generic formula near the support top.
    virtual std::optional<double> analytic_h(const ValueDistribution& d, double x,
                                             Side side) const {
      (void)d; (void)x; (void)side;
      return std::nullopt;
    }
  };

  double bid(double x) const { return impl_->bid(x); }
  double derivative(double x, Side side = Side::left) const { return impl_->derivative(x, side); }
  StrategyKind kind() const { return impl_->kind(); }
  std::vector<double> kinks() const { return impl_->kinks(); }
  const Impl& impl() const { return *impl_; }

  static BidStrategy truthful();
  static BidStrategy linear(double alpha);
  static BidStrategy affine(double alpha, double c);
  static BidStrategy custom(std::function<double(double)> bid,
                            std::function<double(double)> derivative,
                            std::vector<double> kinks = {});
  static BidStrategy wrap(std::shared_ptr<const Impl> impl) { return BidStrategy(std::move(impl)); }

 private:
  explicit BidStrategy(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Threshold r, overbid floor epsilon and the continuation strategy used at
// and beyond r.
struct ThresholdedParams {
  double r;
  double epsilon = 0.0;
  BidStrategy gamma = BidStrategy::truthful();
};

namespace detail {

struct TruthfulImpl final : BidStrategy::Impl {
  double bid(double x) const override { return x; }
  double derivative(double, Side) const override { return 1.0; }
  StrategyKind kind() const override { return StrategyKind::truthful; }
  std::optional<double> analytic_h(const ValueDistribution& d, double x, Side) const override {
    return virtual_value(d, x);
  }
};

struct AffineImpl final : BidStrategy::Impl {
  double alpha, c;
  StrategyKind k;
  AffineImpl(double a, double b, StrategyKind kk) : alpha(a), c(b), k(kk) {}
  double bid(double x) const override { return alpha * x + c; }
  double derivative(double, Side) const override { return alpha; }
  StrategyKind kind() const override { return k; }
  std::optional<double> analytic_h(const ValueDistribution& d, double x, Side) const override {
    return alpha * virtual_value(d, x) + c;
  }
};

struct CustomImpl final : BidStrategy::Impl {
  std::function<double(double)> b, db;
  std::vector<double> kink_list;
  CustomImpl(std::function<double(double)> bid, std::function<double(double)> deriv,
             std::vector<double> kinks)
      : b(std::move(bid)), db(std::move(deriv)), kink_list(std::move(kinks)) {}
  double bid(double x) const override { return b(x); }
  double derivative(double x, Side) const override { return db(x); }
  StrategyKind kind() const override { return StrategyKind::custom; }
  std::vector<double> kinks() const override { return kink_list; }
};

// beta(x) = (gamma(r) - eps)(1-F(r))/(1-F(x)) + eps below r, gamma beyond.
// Continuous at r, strictly increasing, and h == eps below the threshold.
struct ThresholdedImpl final : BidStrategy::Impl {
  ValueDistribution dist;
  double r, eps, scale;  // scale = (gamma(r) - eps)(1 - F(r))
  BidStrategy gamma;
  ThresholdedImpl(ValueDistribution d, double r_, double eps_, BidStrategy g)
      : dist(std::move(d)), r(r_), eps(eps_),
        scale((g.bid(r_) - eps_) * (1.0 - dist.cdf(r_))), gamma(std::move(g)) {}
  double bid(double x) const override {
    if (x >= r) return gamma.bid(x);
    return scale / (1.0 - dist.cdf(x)) + eps;
  }
  double derivative(double x, Side side) const override {
    if (x > r || (x == r && side == Side::right)) return gamma.derivative(x, side);
    const double tail = 1.0 - dist.cdf(x);
    return scale * dist.pdf(x) / (tail * tail);
  }
  StrategyKind kind() const override { return StrategyKind::thresholded; }
  std::vector<double> kinks() const override {
    auto ks = gamma.kinks();
    ks.push_back(r);
    return ks;
  }
  std::optional<double> analytic_h(const ValueDistribution& d, double x, Side side) const override {
    if (x < r || (x == r && side == Side::left)) return eps;
    return gamma.impl().analytic_h(d, x, side);
  }
};

// Strategy realizing a prescribed induced virtual value g:
//   beta(x) = [C(1-F(x0)) - int_{x0}^{x} g f du] / (1-F(x)).
// The cumulative integral is tabulated on a refined knot grid at
// construction (composite 64-node Gauss-Legendre panels, doubled until the
// knot values settle), then each evaluation integrates only the residual
// sub-interval.
struct FromTargetImpl final : BidStrategy::Impl {
  ValueDistribution dist;
  std::function<double(double)> target;
  double x0, C;
  std::vector<double> knots, cumulative;

  FromTargetImpl(ValueDistribution d, std::function<double(double)> g, double x0_, double C_)
      : dist(std::move(d)), target(std::move(g)), x0(x0_), C(C_) {
    build_table();
  }

  void build_table() {
    const double lo = dist.support_lo(), hi = dist.support_hi();
    const auto& rule = gauss_legendre_rule(64);
    auto integrand = [&](double u) { return target(u) * dist.pdf(u); };
    int n = 256;
    std::vector<double> prev;
    for (int pass = 0; pass < 6; ++pass) {
      knots.assign(static_cast<std::size_t>(n) + 1, 0.0);
      cumulative.assign(static_cast<std::size_t>(n) + 1, 0.0);
      for (int i = 0; i <= n; ++i) knots[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n;
      for (int i = 1; i <= n; ++i)
        cumulative[static_cast<std::size_t>(i)] =
            cumulative[static_cast<std::size_t>(i) - 1] +
            gl_panel(integrand, knots[static_cast<std::size_t>(i) - 1],
                     knots[static_cast<std::size_t>(i)], rule);
      if (!prev.empty()) {
        double change = 0.0, scale = 1e-300;
        for (std::size_t i = 0; i < prev.size(); ++i) {
          change = std::max(change, std::abs(prev[i] - cumulative[2 * i]));
          scale = std::max(scale, std::abs(cumulative[2 * i]));
        }
        if (change <= 1e-8 * std::max(1.0, scale)) break;
      }
      prev = cumulative;
      n *= 2;
    }
  }

  // int_{x0}^{x} g f du
  double cumulative_at(double x) const {
    const double lo = dist.support_lo(), hi = dist.support_hi();
    const double xc = std::clamp(x, lo, hi);
    const auto& rule = gauss_legendre_rule(64);
    auto integrand = [&](double u) { return target(u) * dist.pdf(u); };
    auto eval = [&](double v) {
      const double step = (hi - lo) / static_cast<double>(knots.size() - 1);
      std::size_t i = std::min(knots.size() - 2, static_cast<std::size_t>((v - lo) / step));
      return cumulative[i] + gl_panel(integrand, knots[i], v, rule);
    };
    return eval(xc) - eval(std::clamp(x0, lo, hi));
  }

  double bid(double x) const override {
    const double tail = 1.0 - dist.cdf(x);
    if (tail <= 0.0) throw std::domain_error("from_target strategy: evaluated at the support top");
    return (C * (1.0 - dist.cdf(x0)) - cumulative_at(x)) / tail;
  }
  double derivative(double x, Side side) const override {
    // From h = g: beta' = f (beta - g) / (1 - F).
    const double tail = 1.0 - dist.cdf(x);
    (void)side;
    return dist.pdf(x) * (bid(x) - target(x)) / tail;
  }
  StrategyKind kind() const override { return StrategyKind::from_target; }
  std::optional<double> analytic_h(const ValueDistribution&, double x, Side) const override {
    return target(x);
  }
};

}  // namespace detail

inline BidStrategy BidStrategy::truthful() {
  static const auto impl = std::make_shared<detail::TruthfulImpl>();
  return BidStrategy(impl);
}

inline BidStrategy BidStrategy::linear(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("linear strategy: alpha must be positive");
  return BidStrategy(std::make_shared<detail::AffineImpl>(alpha, 0.0, StrategyKind::linear));
}

inline BidStrategy BidStrategy::affine(double alpha, double c) {
  if (!(alpha > 0.0)) throw std::invalid_argument("affine strategy: alpha must be positive");
  return BidStrategy(std::make_shared<detail::AffineImpl>(alpha, c, StrategyKind::affine));
}

inline BidStrategy BidStrategy::custom(std::function<double(double)> bid,
                                       std::function<double(double)> derivative,
                                       std::vector<double> kinks) {
  return BidStrategy(
      std::make_shared<detail::CustomImpl>(std::move(bid), std::move(derivative), std::move(kinks)));
}

inline BidStrategy make_thresholded(const ValueDistribution& d, const ThresholdedParams& p) {
  if (!(p.r > d.support_lo() && p.r < d.support_hi()))
    throw std::invalid_argument("make_thresholded: threshold outside the support interior");
  if (p.epsilon < 0.0) throw std::invalid_argument("make_thresholded: epsilon must be >= 0");
  if (!(p.gamma.bid(p.r) > p.epsilon))
    throw std::invalid_argument("make_thresholded: infeasible epsilon (gamma(r) <= epsilon)");
  return BidStrategy::wrap(std::make_shared<detail::ThresholdedImpl>(d, p.r, p.epsilon, p.gamma));
}

// Strategy whose induced virtual value equals g, anchored at beta(x0) = C.
// Validates monotonicity on a grid; g must be nondecreasing with g < C on
// the region of use for the result to be increasing.
inline BidStrategy beta_from_target(const ValueDistribution& d, std::function<double(double)> g,
                                    double x0, double C) {
  auto strat =
      BidStrategy::wrap(std::make_shared<detail::FromTargetImpl>(d, std::move(g), x0, C));
  const double lo = d.support_lo();
  const double hi = d.quantile(0.999999);
  double prev = strat.bid(lo);
  for (int i = 1; i <= 256; ++i) {
    const double x = lo + (hi - lo) * i / 256;
    const double b = strat.bid(x);
    if (!(b > prev))
      throw std::domain_error("beta_from_target: resulting strategy is not increasing");
    prev = b;
  }
  return strat;
}

// h(x) = beta(x) - beta'(x)(1-F(x))/f(x), the virtual value of the induced
// bid distribution evaluated at beta(x). Uses the strategy's analytic form
// when available; `side` selects the one-sided branch at kinks.
inline double h_beta(const ValueDistribution& d, const BidStrategy& s, double x,
                     Side side = Side::left) {
  if (auto h = s.impl().analytic_h(d, x, side)) return *h;
  const double f = d.pdf(x);
  if (f <= 0.0) throw std::domain_error("h_beta: density vanishes at x");
  return s.bid(x) - s.derivative(x, side) * (1.0 - d.cdf(x)) / f;
}

// Inverse of the (strictly increasing) bid map by bisection, clamped to
// the support. Runs to the limit of double resolution, capped at 200 steps.
inline double invert_bid(const BidStrategy& s, double lo, double hi, double b) {
  if (b <= s.bid(lo)) return lo;
  if (b >= s.bid(hi)) return hi;
  double a = lo, c = hi;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + c);
    if (m <= a || m >= c) break;
    (s.bid(m) < b ? a : c) = m;
  }
  return 0.5 * (a + c);
}

}  // namespace auctionlab
