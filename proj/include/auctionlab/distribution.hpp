#pragma once

// Value distributions, their virtual values, hazard rates and monopoly
// prices. Distributions are immutable after construction; every operation
// here is pure and safe to call concurrently.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "auctionlab/quadrature.hpp"
#include "auctionlab/roots.hpp"

namespace auctionlab {

inline constexpr double kDefaultTruncationQuantile = 1.0 - 1e-9;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_pdf(double z) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

// Rational initial guess (Abramowitz-Stegun 26.2.23) polished by Newton
// steps on erfc; accurate to ~1e-15 over (0, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -HUGE_VAL;
    if (p == 1.0) return HUGE_VAL;
    throw std::domain_error("normal_quantile: p outside [0, 1]");
  }
  const double q = std::min(p, 1.0 - p);
  const double t = std::sqrt(-2.0 * std::log(q));
  double x = t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                     (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));
  if (p < 0.5) x = -x;
  for (int i = 0; i < 3; ++i) {
    const double d = normal_pdf(x);
    if (d <= 0.0) break;
    x -= (normal_cdf(x) - p) / d;
  }
  return x;
}

enum class DistKind { uniform, lognormal, exponential, empirical, tabulated };

class ValueDistribution {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual double cdf(double x) const = 0;
    virtual double pdf(double x) const = 0;
    virtual double quantile(double u) const = 0;
    virtual double lo() const = 0;
    virtual double hi() const = 0;
    virtual DistKind kind() const = 0;
  };

  double cdf(double x) const { return impl_->cdf(x); }
  double pdf(double x) const { return impl_->pdf(x); }
  double quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile: u outside [0, 1]");
    return impl_->quantile(u);
  }
  double support_lo() const { return impl_->lo(); }
  double support_hi() const { return impl_->hi(); }
  double span() const { return impl_->hi() - impl_->lo(); }
  DistKind kind() const { return impl_->kind(); }
  bool contains(double x) const { return x >= support_lo() && x <= support_hi(); }

  static ValueDistribution uniform(double lo, double hi);
  static ValueDistribution lognormal(double mu, double sigma,
                                     double truncation_quantile = kDefaultTruncationQuantile);
  static ValueDistribution exponential(double rate,
                                       double truncation_quantile = kDefaultTruncationQuantile);
  static ValueDistribution empirical(std::vector<double> sorted_samples);
  static ValueDistribution tabulated(std::vector<double> xs, std::vector<double> cdf_values);

 private:
  explicit ValueDistribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

namespace detail {

struct UniformImpl final : ValueDistribution::Impl {
  double a, b;
  UniformImpl(double lo, double hi) : a(lo), b(hi) {}
  double cdf(double x) const override {
    return std::clamp((x - a) / (b - a), 0.0, 1.0);
  }
  double pdf(double x) const override { return (x >= a && x <= b) ? 1.0 / (b - a) : 0.0; }
  double quantile(double u) const override { return a + u * (b - a); }
  double lo() const override { return a; }
  double hi() const override { return b; }
  DistKind kind() const override { return DistKind::uniform; }
};

// Unbounded laws are truncated at a high quantile and renormalized, so that
// 1/(1-F) stays finite on the working support.
struct LognormalImpl final : ValueDistribution::Impl {
  double mu, sigma, trunc, x_max;
  LognormalImpl(double m, double s, double q)
      : mu(m), sigma(s), trunc(q), x_max(std::exp(m + s * normal_quantile(q))) {}
  double raw_cdf(double x) const {
    return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - mu) / sigma);
  }
  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= x_max) return 1.0;
    return raw_cdf(x) / trunc;
  }
  double pdf(double x) const override {
    if (x <= 0.0 || x > x_max) return 0.0;
    return normal_pdf((std::log(x) - mu) / sigma) / (x * sigma * trunc);
  }
  double quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return x_max;
    return std::exp(mu + sigma * normal_quantile(u * trunc));
  }
  double lo() const override { return 0.0; }
  double hi() const override { return x_max; }
  DistKind kind() const override { return DistKind::lognormal; }
};

struct ExponentialImpl final : ValueDistribution::Impl {
  double rate, trunc, x_max;
  ExponentialImpl(double r, double q) : rate(r), trunc(q), x_max(-std::log1p(-q) / r) {}
  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= x_max) return 1.0;
    return -std::expm1(-rate * x) / trunc;
  }
  double pdf(double x) const override {
    if (x < 0.0 || x > x_max) return 0.0;
    return rate * std::exp(-rate * x) / trunc;
  }
  double quantile(double u) const override {
    if (u >= 1.0) return x_max;
    return -std::log1p(-u * trunc) / rate;
  }
  double lo() const override { return 0.0; }
  double hi() const override { return x_max; }
  DistKind kind() const override { return DistKind::exponential; }
};

// Piecewise-linear CDF through strictly increasing knots; density is the
// piecewise-constant slope. Shared by the empirical (ECDF interpolation)
// and tabulated kinds.
struct PiecewiseCdfImpl final : ValueDistribution::Impl {
  std::vector<double> x, F;
  DistKind tag;
  PiecewiseCdfImpl(std::vector<double> xs, std::vector<double> Fs, DistKind k)
      : x(std::move(xs)), F(std::move(Fs)), tag(k) {}
  double cdf(double v) const override {
    if (v <= x.front()) return 0.0;
    if (v >= x.back()) return 1.0;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double w = (v - x[i]) / (x[i + 1] - x[i]);
    return F[i] + w * (F[i + 1] - F[i]);
  }
  double pdf(double v) const override {
    if (v < x.front() || v > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), v);
    std::size_t i = (it == x.end()) ? x.size() - 1 : static_cast<std::size_t>(it - x.begin());
    if (i == 0) i = 1;
    return (F[i] - F[i - 1]) / (x[i] - x[i - 1]);
  }
  double quantile(double u) const override {
    if (u <= 0.0) return x.front();
    if (u >= 1.0) return x.back();
    const auto it = std::upper_bound(F.begin(), F.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - F.begin()) - 1;
    const double w = (u - F[i]) / (F[i + 1] - F[i]);
    return x[i] + w * (x[i + 1] - x[i]);
  }
  double lo() const override { return x.front(); }
  double hi() const override { return x.back(); }
  DistKind kind() const override { return tag; }
};

}  // namespace detail

inline ValueDistribution ValueDistribution::uniform(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("uniform: requires lo < hi");
  return ValueDistribution(std::make_shared<detail::UniformImpl>(lo, hi));
}

inline ValueDistribution ValueDistribution::lognormal(double mu, double sigma,
                                                      double truncation_quantile) {
  if (!(sigma > 0.0)) throw std::invalid_argument("lognormal: requires sigma > 0");
  if (!(truncation_quantile > 0.0 && truncation_quantile < 1.0))
    throw std::invalid_argument("lognormal: truncation quantile must be in (0, 1)");
  return ValueDistribution(std::make_shared<detail::LognormalImpl>(mu, sigma, truncation_quantile));
}

inline ValueDistribution ValueDistribution::exponential(double rate, double truncation_quantile) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: requires rate > 0");
  if (!(truncation_quantile > 0.0 && truncation_quantile < 1.0))
    throw std::invalid_argument("exponential: truncation quantile must be in (0, 1)");
  return ValueDistribution(std::make_shared<detail::ExponentialImpl>(rate, truncation_quantile));
}

inline ValueDistribution ValueDistribution::empirical(std::vector<double> sorted_samples) {
  const std::size_t n = sorted_samples.size();
  if (n < 2) throw std::invalid_argument("empirical: need at least two samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (sorted_samples[i] < sorted_samples[i - 1])
      throw std::invalid_argument("empirical: samples must be sorted");
    if (sorted_samples[i] == sorted_samples[i - 1])
      throw std::invalid_argument("empirical: tied samples form an atom, not supported");
  }
  std::vector<double> F(n);
  for (std::size_t i = 0; i < n; ++i) F[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return ValueDistribution(std::make_shared<detail::PiecewiseCdfImpl>(
      std::move(sorted_samples), std::move(F), DistKind::empirical));
}

inline ValueDistribution ValueDistribution::tabulated(std::vector<double> xs,
                                                      std::vector<double> cdf_values) {
  if (xs.size() != cdf_values.size() || xs.size() < 2)
    throw std::invalid_argument("tabulated: need matching grids with >= 2 points");
  if (std::abs(cdf_values.front()) > 1e-12 || std::abs(cdf_values.back() - 1.0) > 1e-12)
    throw std::invalid_argument("tabulated: cdf must run from 0 to 1");
  cdf_values.front() = 0.0;
  cdf_values.back() = 1.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("tabulated: x grid must be increasing");
    if (!(cdf_values[i] > cdf_values[i - 1]))
      throw std::invalid_argument("tabulated: cdf must be strictly increasing (no atoms or gaps)");
  }
  return ValueDistribution(std::make_shared<detail::PiecewiseCdfImpl>(
      std::move(xs), std::move(cdf_values), DistKind::tabulated));
}

// psi(x) = x - (1 - F(x)) / f(x), the seller's marginal-revenue transform.
inline double virtual_value(const ValueDistribution& d, double x) {
  if (!d.contains(x)) throw std::domain_error("virtual_value: x outside support");
  const double f = d.pdf(x);
  if (f <= 0.0) throw std::domain_error("virtual_value: density vanishes at x");
  return x - (1.0 - d.cdf(x)) / f;
}

// lambda(x) = f(x) / (1 - F(x)).
inline double hazard_rate(const ValueDistribution& d, double x) {
  if (!d.contains(x)) throw std::domain_error("hazard_rate: x outside support");
  const double tail = 1.0 - d.cdf(x);
  if (tail < 1e-12) throw std::domain_error("hazard_rate: cdf too close to 1 (tail singularity)");
  return d.pdf(x) / tail;
}

// Global maximizer of r(1 - F(r)); ties break toward the smallest r.
// Grid scan plus refinement, so non-regular distributions are handled too.
inline double monopoly_price(const ValueDistribution& d) {
  return grid_argmax_smallest([&](double r) { return r * (1.0 - d.cdf(r)); }, d.support_lo(),
                              d.support_hi());
}

}  // namespace auctionlab
