#pragma once

// The seller's side: reserve prices from exact bid distributions and from
// finite samples (ERM), plus the revenue and payment curves they optimize.

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "auctionlab/bid_distribution.hpp"
#include "auctionlab/competition.hpp"
#include "auctionlab/quadrature.hpp"
#include "auctionlab/roots.hpp"

namespace auctionlab {

struct ReserveResult {
  double reserve_price = 0.0;
  double reserve_value = 0.0;      // beta^{-1}(reserve_price)
  double objective_at_reserve = 0.0;  // r (1 - F_B(r))
};

// Monopoly price of the bid distribution: argmax of r(1 - F_B(r)) over the
// bid range, ties toward the smallest r (the welfare-benevolent choice).
// Thresholded strategies produce a flat maximal plateau starting at the
// minimum bid; the tie-break lands exactly there.
inline ReserveResult exact_reserve(const BidDistribution& bd) {
  auto objective = [&](double r) { return r * (1.0 - bd.cdf(r)); };
  const double r = grid_argmax_smallest(objective, bd.min_bid(), bd.max_bid());
  return {r, bd.inverse_bid(r), objective(r)};
}

// Sample monopoly price: the bid b maximizing b * #{bids >= b} / n over the
// sample points, ties toward the smallest b. Input must be sorted ascending.
inline double erm_reserve(std::span<const double> sorted_bids) {
  const std::size_t n = sorted_bids.size();
  if (n == 0) throw std::invalid_argument("erm_reserve: empty sample");
  double best = sorted_bids[0];
  double best_value = -HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && sorted_bids[i] < sorted_bids[i - 1])
      throw std::invalid_argument("erm_reserve: bids must be sorted ascending");
    const double value = sorted_bids[i] * static_cast<double>(n - i) / static_cast<double>(n);
    if (value > best_value) {
      best_value = value;
      best = sorted_bids[i];
    }
  }
  return best;
}

// b(1 - F_B(b)) per grid point.
inline std::vector<std::pair<double, double>> revenue_objective_curve(
    const BidDistribution& bd, std::span<const double> grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (double b : grid) out.emplace_back(b, b * (1.0 - bd.cdf(b)));
  return out;
}

// Expected payment of one bidder as a function of the reserve price r:
//   M(r) = E[ h(X) G(beta(X)) 1(beta(X) >= r) ],
// integrated in u = F(x) space where the integrand is bounded.
inline double expected_payment_at_reserve(const ValueDistribution& d, const BidStrategy& s,
                                          const CompetitionDistribution& G, double r,
                                          const QuadratureOptions& opt = {}) {
  const double lo = d.support_lo(), hi = d.support_hi();
  const double x_r = invert_bid(s, lo, hi, r);
  if (r > s.bid(hi)) return 0.0;
  std::vector<double> cuts;
  for (double k : s.kinks()) cuts.push_back(d.cdf(k));
  for (double b : G.breakpoints()) cuts.push_back(d.cdf(invert_bid(s, lo, hi, b)));
  auto integrand = [&](double u) {
    const double x = d.quantile(u);
    return h_beta(d, s, x) * G.cdf(s.bid(x));
  };
  return integrate_adaptive(integrand, d.cdf(x_r), 1.0, opt, cuts);
}

inline std::vector<std::pair<double, double>> payment_curve(const ValueDistribution& d,
                                                            const BidStrategy& s,
                                                            const CompetitionDistribution& G,
                                                            std::span<const double> reserve_grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(reserve_grid.size());
  for (double r : reserve_grid) out.emplace_back(r, expected_payment_at_reserve(d, s, G, r));
  return out;
}

}  // namespace auctionlab
