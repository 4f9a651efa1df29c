#pragma once

// Competition distributions: the law of the maximum bid a bidder faces.

#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "auctionlab/bid_distribution.hpp"
#include "auctionlab/distribution.hpp"
#include "auctionlab/strategy.hpp"

namespace auctionlab {

enum class CompetitionProvenance { max_of_k_truthful, max_of_strategies, explicit_fn, degenerate };

class CompetitionDistribution {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual double cdf(double b) const = 0;
    virtual double pdf(double b) const = 0;
    virtual double lo() const = 0;
    virtual double hi() const = 0;
    virtual std::vector<double> breakpoints() const { return {}; }
  };

  double cdf(double b) const { return impl_->cdf(b); }
  double pdf(double b) const { return impl_->pdf(b); }
  double support_lo() const { return impl_->lo(); }
  double support_hi() const { return impl_->hi(); }
  // Bid-space kink locations (support edges of the underlying bid laws).
  std::vector<double> breakpoints() const { return impl_->breakpoints(); }
  CompetitionProvenance provenance() const { return prov_; }
  bool degenerate() const { return prov_ == CompetitionProvenance::degenerate; }

  static CompetitionDistribution from_impl(std::shared_ptr<const Impl> impl,
                                           CompetitionProvenance prov) {
    return CompetitionDistribution(std::move(impl), prov);
  }

 private:
  CompetitionDistribution(std::shared_ptr<const Impl> impl, CompetitionProvenance prov)
      : impl_(std::move(impl)), prov_(prov) {}
  std::shared_ptr<const Impl> impl_;
  CompetitionProvenance prov_;
};

namespace detail {

struct MaxTruthfulImpl final : CompetitionDistribution::Impl {
  ValueDistribution d;
  int m;
  MaxTruthfulImpl(ValueDistribution dd, int mm) : d(std::move(dd)), m(mm) {}
  double cdf(double b) const override {
    if (m == 0) return 1.0;
    const double F = b <= d.support_lo() ? (b < d.support_lo() ? 0.0 : d.cdf(b))
                                         : (b >= d.support_hi() ? 1.0 : d.cdf(b));
    return m == 1 ? F : std::pow(F, m);
  }
  double pdf(double b) const override {
    if (m == 0) return 0.0;
    if (b < d.support_lo() || b > d.support_hi()) return 0.0;
    const double F = d.cdf(b);
    return m == 1 ? d.pdf(b) : m * std::pow(F, m - 1) * d.pdf(b);
  }
  double lo() const override { return d.support_lo(); }
  double hi() const override { return d.support_hi(); }
};

struct MaxStrategiesImpl final : CompetitionDistribution::Impl {
  std::vector<BidDistribution> bids;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<double> breaks;
  explicit MaxStrategiesImpl(std::vector<BidDistribution> bs) : bids(std::move(bs)) {
    lo_ = -HUGE_VAL;
    hi_ = -HUGE_VAL;
    for (const auto& b : bids) {
      lo_ = std::max(lo_, b.min_bid());  // G positive only once every factor is
      hi_ = std::max(hi_, b.max_bid());
      breaks.push_back(b.min_bid());
      breaks.push_back(b.max_bid());
      for (double k : b.strategy().kinks()) breaks.push_back(b.strategy().bid(k));
    }
  }
  double cdf(double b) const override {
    double g = 1.0;
    for (const auto& bd : bids) g *= bd.cdf(b);
    return g;
  }
  double pdf(double b) const override {
    // d/db of the product: sum of one density times the other cdfs.
    double total = 0.0;
    for (std::size_t j = 0; j < bids.size(); ++j) {
      if (b < bids[j].min_bid() || b > bids[j].max_bid()) continue;
      double term = bids[j].pdf(b);
      for (std::size_t k = 0; k < bids.size(); ++k)
        if (k != j) term *= bids[k].cdf(b);
      total += term;
    }
    return total;
  }
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  std::vector<double> breakpoints() const override { return breaks; }
};

struct ExplicitCompetitionImpl final : CompetitionDistribution::Impl {
  std::function<double(double)> G, g;
  double a, b;
  ExplicitCompetitionImpl(std::function<double(double)> cdf, std::function<double(double)> pdf,
                          double lo, double hi)
      : G(std::move(cdf)), g(std::move(pdf)), a(lo), b(hi) {}
  double cdf(double x) const override {
    if (x < a) return 0.0;
    if (x >= b) return 1.0;
    return G(x);
  }
  double pdf(double x) const override { return (x < a || x > b) ? 0.0 : g(x); }
  double lo() const override { return a; }
  double hi() const override { return b; }
};

}  // namespace detail

// Law of the maximum of m truthful draws: G = F^m, g = m F^{m-1} f.
// m = 0 yields the degenerate "no competition" law G == 1.
inline CompetitionDistribution max_of_truthful(const ValueDistribution& d, int m) {
  if (m < 0) throw std::invalid_argument("max_of_truthful: negative count");
  return CompetitionDistribution::from_impl(
      std::make_shared<detail::MaxTruthfulImpl>(d, m),
      m == 0 ? CompetitionProvenance::degenerate : CompetitionProvenance::max_of_k_truthful);
}

// Law of the maximum bid over heterogeneous (distribution, strategy) pairs.
inline CompetitionDistribution max_of_strategies(
    const std::vector<std::pair<ValueDistribution, BidStrategy>>& bidders) {
  if (bidders.empty())
    return CompetitionDistribution::from_impl(
        std::make_shared<detail::MaxTruthfulImpl>(ValueDistribution::uniform(0.0, 1.0), 0),
        CompetitionProvenance::degenerate);
  std::vector<BidDistribution> bds;
  bds.reserve(bidders.size());
  for (const auto& [d, s] : bidders) bds.emplace_back(d, s);
  return CompetitionDistribution::from_impl(
      std::make_shared<detail::MaxStrategiesImpl>(std::move(bds)),
      CompetitionProvenance::max_of_strategies);
}

inline CompetitionDistribution explicit_competition(std::function<double(double)> cdf,
                                                    std::function<double(double)> pdf, double lo,
                                                    double hi) {
  return CompetitionDistribution::from_impl(
      std::make_shared<detail::ExplicitCompetitionImpl>(std::move(cdf), std::move(pdf), lo, hi),
      CompetitionProvenance::explicit_fn);
}

}  // namespace auctionlab
