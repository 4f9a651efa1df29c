#pragma once

// Finite-sample robustness of thresholding: the seller sets reserves by
// ERM on n observed bids; the realized reserve value is compared against
// the DKW-based bound 2 r C_n(delta) / (eps gamma_F).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "auctionlab/rng.hpp"
#include "auctionlab/seller.hpp"
#include "auctionlab/strategy.hpp"

namespace auctionlab {

// Uniform ECDF deviation C_n(delta) = n^{-1/2} sqrt(log(2/delta)/2) from
// the Dvoretzky-Kiefer-Wolfowitz inequality.
inline double dkw_bound(std::int64_t n, double delta) {
  if (n < 1) throw std::invalid_argument("dkw_bound: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("dkw_bound: delta in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / 2.0) / std::sqrt(static_cast<double>(n));
}

struct ErmExperimentConfig {
  ValueDistribution d;
  double r = 0.0;  // threshold of the overbidding strategy
  std::function<double(std::int64_t)> epsilon_schedule;
  std::int64_t n = 0;
  double delta = 0.05;
  int replications = 1;
  std::uint64_t seed = 0;
};

struct ErmResult {
  double x_hat = 0.0;     // reserve value recovered by inverting the strategy
  double bound = 0.0;     // 2 r C_n(delta) / (eps gamma_F)
  double c_n = 0.0;       // C_n(delta)
  double x_max = 0.0;     // largest sampled value
  double epsilon = 0.0;
  bool epsilon_feasible = false;  // eps > x_max C_n(delta) / F(r)
  bool violated = false;          // x_hat >= bound
};

// Minimum density on [support_lo, r]; the Lipschitz floor gamma_F of the
// cdf below the threshold.
inline double density_floor(const ValueDistribution& d, double r, int grid = 1024) {
  const double lo = d.support_lo();
  double g = HUGE_VAL;
  for (int i = 0; i <= grid; ++i) g = std::min(g, d.pdf(lo + (r - lo) * i / grid));
  return g;
}

// One replication: draw n values, bid through the overbidding strategy,
// let the seller run ERM on the observed bids, and invert the strategy to
// read off the reserve value the seller would impose.
inline std::vector<ErmResult> erm_experiment(const ErmExperimentConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("erm_experiment: n must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("erm_experiment: delta in (0,1)");
  if (cfg.replications < 1) throw std::invalid_argument("erm_experiment: replications >= 1");
  const double eps = cfg.epsilon_schedule(cfg.n);
  if (!(eps > 0.0)) throw std::invalid_argument("erm_experiment: epsilon schedule must be > 0");

  const BidStrategy strat = make_thresholded(cfg.d, {cfg.r, eps, BidStrategy::truthful()});
  const double gamma_f = density_floor(cfg.d, cfg.r);
  if (!(gamma_f > 0.0))
    throw std::domain_error("erm_experiment: density vanishes below r (gamma_F = 0)");
  const double c_n = dkw_bound(cfg.n, cfg.delta);
  const double bound = 2.0 * cfg.r * c_n / (eps * gamma_f);
  const double F_r = cfg.d.cdf(cfg.r);
  const double lo = cfg.d.support_lo(), hi = cfg.d.support_hi();

  std::vector<ErmResult> results;
  results.reserve(static_cast<std::size_t>(cfg.replications));
  for (int rep = 0; rep < cfg.replications; ++rep) {
    const std::uint64_t key = derive_key(derive_key(cfg.seed, 0x45524d32u), static_cast<std::uint64_t>(rep));
    std::vector<double> bids(static_cast<std::size_t>(cfg.n));
    double x_max = -HUGE_VAL;
    for (std::int64_t j = 0; j < cfg.n; ++j) {
      const double v = cfg.d.quantile(uniform01(key, static_cast<std::uint64_t>(j)));
      x_max = std::max(x_max, v);
      bids[static_cast<std::size_t>(j)] = strat.bid(v);
    }
    std::sort(bids.begin(), bids.end());
    const double reserve_bid = erm_reserve(bids);
    ErmResult res;
    res.x_hat = invert_bid(strat, lo, hi, reserve_bid);
    res.bound = bound;
    res.c_n = c_n;
    res.x_max = x_max;
    res.epsilon = eps;
    res.epsilon_feasible = eps > x_max * c_n / F_r;
    res.violated = res.x_hat >= bound;
    results.push_back(res);
  }
  return results;
}

// How far off the seller's perceived virtual value is when she prices the
// bidder under distribution dG while values truly follow dF:
//   psi_{B,G}(beta(x)) = psi_{B,F}(beta(x)) - beta'(x) (1/lambda_G - 1/lambda_F).
// Returns the correction term beta'(x) (1/lambda_G(x) - 1/lambda_F(x)).
inline double perceived_virtual_value_gap(const ValueDistribution& dF, const ValueDistribution& dG,
                                          const BidStrategy& s, double x) {
  const double inv_lambda_f = 1.0 / hazard_rate(dF, x);
  const double inv_lambda_g = 1.0 / hazard_rate(dG, x);
  return s.derivative(x) * (inv_lambda_g - inv_lambda_f);
}

}  // namespace auctionlab
