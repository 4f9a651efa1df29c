#pragma once

// The push-forward of a value distribution through a bidding strategy:
// F_B(b) = F(beta^{-1}(b)), f_B(b) = f(beta^{-1}(b)) / beta'(beta^{-1}(b)).

#include <stdexcept>
#include <utility>

#include "auctionlab/distribution.hpp"
#include "auctionlab/strategy.hpp"

namespace auctionlab {

class BidDistribution {
 public:
  BidDistribution(ValueDistribution d, BidStrategy s)
      : dist_(std::move(d)),
        strat_(std::move(s)),
        min_bid_(strat_.bid(dist_.support_lo())),
        max_bid_(strat_.bid(dist_.support_hi())) {}

  // beta^{-1}(b), clamped to the support outside the bid range.
  double inverse_bid(double b) const {
    return invert_bid(strat_, dist_.support_lo(), dist_.support_hi(), b);
  }

  double cdf(double b) const {
    if (b <= min_bid_) return b < min_bid_ ? 0.0 : dist_.cdf(inverse_bid(b));
    if (b >= max_bid_) return 1.0;
    return dist_.cdf(inverse_bid(b));
  }

  double pdf(double b) const {
    if (b < min_bid_ || b > max_bid_) return 0.0;
    const double x = inverse_bid(b);
    const double slope = strat_.derivative(x);
    if (slope <= 0.0) throw std::domain_error("BidDistribution: non-increasing strategy");
    return dist_.pdf(x) / slope;
  }

  // psi_B(b) = b - (1 - F_B(b)) / f_B(b).
  double virtual_value(double b) const {
    const double f = pdf(b);
    if (f <= 0.0) throw std::domain_error("BidDistribution: density vanishes at b");
    return b - (1.0 - cdf(b)) / f;
  }

  double min_bid() const { return min_bid_; }
  double max_bid() const { return max_bid_; }
  const ValueDistribution& distribution() const { return dist_; }
  const BidStrategy& strategy() const { return strat_; }

 private:
  ValueDistribution dist_;
  BidStrategy strat_;
  double min_bid_, max_bid_;
};

inline BidDistribution bid_distribution(const ValueDistribution& d, const BidStrategy& s) {
  return BidDistribution(d, s);
}

}  // namespace auctionlab
