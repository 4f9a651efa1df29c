#pragma once

// Variational machinery: directional derivatives of bidder utility,
// the optimal linear strategy, the optimal one-strategic threshold, and the
// symmetric Nash threshold with its revenue-equivalence check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "auctionlab/auction.hpp"
#include "auctionlab/competition.hpp"
#include "auctionlab/roots.hpp"
#include "auctionlab/strategy.hpp"

namespace auctionlab {

struct SolverConfig {
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;  // <= bracket_lo means "use the support"
  double abs_tol = 1e-10;
  int max_iter = 200;
  int scan_points = 4096;
};

struct SolverResult {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// A perturbation direction rho with its derivative.
struct Direction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

// Legendre polynomial P_k rescaled to [lo, hi]; a convenient spanning
// family of perturbation directions for stationarity checks.
inline Direction legendre_direction(int k, double lo, double hi) {
  auto p = [k](double t) {
    double p0 = 1.0, p1 = t;
    if (k == 0) return p0;
    for (int i = 2; i <= k; ++i) {
      const double p2 = ((2 * i - 1) * t * p1 - (i - 1) * p0) / i;
      p0 = p1;
      p1 = p2;
    }
    return p1;
  };
  auto dp = [k, p](double t) {
    if (k == 0) return 0.0;
    const double h = 1e-6;
    return (p(t + h) - p(t - h)) / (2 * h);
  };
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  return {[p, mid, half](double x) { return p((x - mid) / half); },
          [dp, mid, half](double x) { return dp((x - mid) / half) / half; }};
}

namespace detail {

// Reserve value of a strategy: the crossing point of h from negative to
// nonnegative. Strategies whose h is nonnegative everywhere have reserve
// value at the support bottom.
inline double reserve_value_of(const ValueDistribution& d, const BidStrategy& s, int scan_points) {
  const double lo = d.support_lo(), hi = d.support_hi();
  const double eps = 1e-9 * (hi - lo);
  auto h = [&](double x) { return h_beta(d, s, x, Side::right); };
  if (h(lo + eps) >= 0.0) return lo;
  auto bracket = scan_for_sign_change(h, lo + eps, hi - eps, scan_points);
  if (!bracket) throw std::domain_error("reserve_value_of: h never becomes nonnegative");
  return find_root_bracketed(h, bracket->first, bracket->second, 1e-12 * (hi - lo)).x;
}

}  // namespace detail

// Gateaux derivative of the utility at beta in direction rho for a lazy
// second price auction with competition law G:
//   dU = E[g(beta(X)) (X - beta(X)) rho(X) 1(X >= x_b)]
//      + G(beta(x_b)) [x_b f(x_b)/h'(x_b) - (1 - F(x_b))] rho(x_b)
//      - rho'(x_b) x_b (1 - F(x_b)) G(beta(x_b)) / h'(x_b),
// where x_b is the reserve value with h(x_b) = 0 and h'(x_b) != 0.
inline double directional_derivative(const ValueDistribution& d, const BidStrategy& s,
                                     const Direction& rho, const CompetitionDistribution& G,
                                     const QuadratureOptions& opt = {}) {
  const double lo = d.support_lo(), hi = d.support_hi();
  const double x_b = detail::reserve_value_of(d, s, 4096);
  if (x_b <= lo)
    throw std::domain_error("directional_derivative: reserve value at the support bottom");

  const double step = 1e-6 * (hi - lo);
  const double dh =
      (h_beta(d, s, x_b + step) - h_beta(d, s, x_b - step)) / (2 * step);
  if (std::abs(dh) < 1e-8)
    throw std::domain_error("directional_derivative: degenerate crossing, h'(x_b) ~ 0");

  std::vector<double> cuts;
  for (double k : s.kinks()) cuts.push_back(d.cdf(k));
  for (double b : G.breakpoints()) cuts.push_back(d.cdf(invert_bid(s, lo, hi, b)));
  auto interior = [&](double u) {
    const double x = d.quantile(u);
    const double bx = s.bid(x);
    return G.pdf(bx) * (x - bx) * rho.value(x);
  };
  const double integral = integrate_adaptive(interior, d.cdf(x_b), 1.0, opt, cuts);

  const double tail = 1.0 - d.cdf(x_b);
  const double Gb = G.cdf(s.bid(x_b));
  const double boundary =
      Gb * (x_b * d.pdf(x_b) / dh - tail) * rho.value(x_b) -
      rho.derivative(x_b) * x_b * tail * Gb / dh;
  return integral + boundary;
}

// Directional derivative inside the thresholded class: gamma is perturbed
// by rho beyond the threshold r while the overbid completion below r moves
// with it. At the optimal (r*, truthful) pair this vanishes for every rho.
inline double thresholded_direction_derivative(const ValueDistribution& d,
                                               const CompetitionDistribution& G, double r,
                                               const Direction& rho,
                                               const BidStrategy& gamma = BidStrategy::truthful(),
                                               const QuadratureOptions& opt = {}) {
  const double lo = d.support_lo(), hi = d.support_hi();
  const double tail_r = 1.0 - d.cdf(r);
  const double gr = gamma.bid(r);

  auto above = [&](double u) {
    const double x = d.quantile(u);
    const double gx = gamma.bid(x);
    return (x - gx) * G.pdf(gx) * rho.value(x);
  };
  std::vector<double> cuts;
  for (double b : G.breakpoints()) cuts.push_back(d.cdf(invert_bid(gamma, lo, hi, b)));
  const double first = integrate_adaptive(above, d.cdf(r), 1.0, opt, cuts);

  auto below = [&](double u) {
    const double x = d.quantile(u);
    return x / (1.0 - d.cdf(x)) * G.pdf(gr * tail_r / (1.0 - d.cdf(x)));
  };
  const double inner = integrate_adaptive(below, 0.0, d.cdf(r), opt);
  return first + rho.value(r) * tail_r * (inner - G.cdf(gr));
}

// First-order condition for the best linear strategy alpha x:
//   (1-a) E[g(aX) X^2 1(X >= m)] = m (1-F(m)) G(a m),  m = psi^{-1}(0).
inline SolverResult optimal_linear_alpha(const ValueDistribution& d,
                                         const CompetitionDistribution& G,
                                         const SolverConfig& cfg = {}) {
  const double m = monopoly_price(d);
  const double tail_m = 1.0 - d.cdf(m);
  auto residual = [&](double a) {
    auto integrand = [&](double u) {
      const double x = d.quantile(u);
      return G.pdf(a * x) * x * x;
    };
    std::vector<double> cuts;
    for (double b : G.breakpoints()) {
      const double x = b / a;
      if (x > m && x < d.support_hi()) cuts.push_back(d.cdf(x));
    }
    const double lhs = (1.0 - a) * integrate_adaptive(integrand, d.cdf(m), 1.0, {}, cuts);
    return lhs - m * tail_m * G.cdf(a * m);
  };
  const double lo = cfg.bracket_lo > 0.0 ? cfg.bracket_lo : 1e-3;
  const double hi = cfg.bracket_hi > lo ? cfg.bracket_hi : 1.0;
  auto bracket = scan_for_sign_change(residual, lo, hi, std::max(cfg.scan_points / 16, 64));
  if (!bracket) throw std::domain_error("optimal_linear_alpha: no sign change in bracket");
  auto root = find_root_bracketed(residual, bracket->first, bracket->second, cfg.abs_tol,
                                  cfg.max_iter);
  return {root.x, root.residual, root.iterations, bracket->first, bracket->second};
}

namespace detail {

// I(r) = E[ psi(X) G(r(1-F(r))/(1-F(X))) 1(X <= r) ]; the optimal
// one-strategic threshold is its unique nonzero root.
inline double one_strategic_residual(const ValueDistribution& d, const CompetitionDistribution& G,
                                     double r) {
  const double tail_r = 1.0 - d.cdf(r);
  const double c = r * tail_r;
  auto integrand = [&](double u) {
    const double x = d.quantile(u);
    return virtual_value(d, x) * G.cdf(c / (1.0 - u));
  };
  // The G argument sweeps [c, r]; cut where it crosses a breakpoint of G.
  std::vector<double> cuts;
  for (double b : G.breakpoints())
    if (b > c && c / b < 1.0) cuts.push_back(1.0 - c / b);
  return integrate_adaptive(integrand, 0.0, d.cdf(r), {}, cuts);
}

}  // namespace detail

// Optimal threshold r* for one strategic bidder with known competition:
// thresholding below r* and truthful beyond. Root located by sign-change
// scan on (psi^{-1}(0), hi), then bisection.
inline SolverResult one_strategic_threshold(const ValueDistribution& d,
                                            const CompetitionDistribution& G,
                                            const SolverConfig& cfg = {}) {
  const double m = monopoly_price(d);
  const double hi_support = d.support_hi();
  const double lo = cfg.bracket_lo > 0.0 ? cfg.bracket_lo : m + 1e-6 * d.span();
  const double hi = cfg.bracket_hi > lo ? cfg.bracket_hi : hi_support - 1e-9 * d.span();
  auto residual = [&](double r) { return detail::one_strategic_residual(d, G, r); };
  auto bracket = scan_neg_to_pos(residual, lo, hi, std::max(cfg.scan_points / 16, 128));
  if (!bracket)
    throw std::domain_error("one_strategic_threshold: no interior solution (residual keeps sign)");
  auto root =
      find_root_bracketed(residual, bracket->first, bracket->second, cfg.abs_tol, cfg.max_iter);
  return {root.x, root.residual, root.iterations, bracket->first, bracket->second};
}

namespace detail {

// R(r) = E[ psi(X) F^{K-1}(X) 1(X <= r) ].
inline double nash_residual(const ValueDistribution& d, int K, double r) {
  auto integrand = [&](double u) {
    const double x = d.quantile(u);
    return virtual_value(d, x) * std::pow(d.cdf(x), K - 1);
  };
  return integrate_adaptive(integrand, 0.0, d.cdf(r), {});
}

}  // namespace detail

// Symmetric Nash threshold: all K bidders threshold at r* and bid
// truthfully beyond; r* is the unique nonzero root of R(r).
inline SolverResult nash_threshold(const ValueDistribution& d, int K,
                                   const SolverConfig& cfg = {}) {
  if (K < 2) throw std::invalid_argument("nash_threshold: need K >= 2 bidders");
  const double m = monopoly_price(d);
  const double lo = cfg.bracket_lo > 0.0 ? cfg.bracket_lo : m + 1e-6 * d.span();
  const double hi = cfg.bracket_hi > lo ? cfg.bracket_hi : d.support_hi() - 1e-9 * d.span();
  auto residual = [&](double r) { return detail::nash_residual(d, K, r); };
  if (!(residual(hi) > 0.0))
    throw std::domain_error("nash_threshold: residual never becomes positive on the scan range");
  auto bracket = scan_neg_to_pos(residual, lo, hi, std::max(cfg.scan_points / 16, 128));
  if (!bracket) throw std::domain_error("nash_threshold: no negative-to-positive bracket located");
  auto root =
      find_root_bracketed(residual, bracket->first, bracket->second, cfg.abs_tol, cfg.max_iter);
  return {root.x, root.residual, root.iterations, bracket->first, bracket->second};
}

struct NashRevenueEquivalence {
  double seller_revenue_nash = 0.0;
  double seller_revenue_no_reserve = 0.0;
  double buyer_utility_nash = 0.0;
  double buyer_utility_no_reserve = 0.0;
};

// At the symmetric Nash threshold the seller earns exactly the no-reserve
// second-price revenue and each buyer recovers the no-reserve utility.
// Both sides of each pair are evaluated independently by quadrature.
inline NashRevenueEquivalence nash_revenue_equivalence_check(const ValueDistribution& d, int K) {
  const double r_star = nash_threshold(d, K).value;
  NashRevenueEquivalence out;

  auto psiF = [&](double u) {
    const double x = d.quantile(u);
    return virtual_value(d, x) * std::pow(d.cdf(x), K - 1);
  };
  // Per-buyer revenue, summed over the K symmetric bidders.
  out.seller_revenue_nash = K * integrate_adaptive(psiF, d.cdf(r_star), 1.0, {});
  // No-reserve second price: E[second highest of K] by order statistics.
  auto second_stat = [&](double u) {
    const double x = d.quantile(u);
    const double F = d.cdf(x);
    return x * std::pow(F, K - 2) * (1.0 - F);
  };
  out.seller_revenue_no_reserve =
      K * (K - 1) * integrate_adaptive(second_stat, 0.0, 1.0, {});

  auto nash_utility = [&](double u) {
    const double x = d.quantile(u);
    const double F = d.cdf(x);
    const double h = x <= r_star ? 0.0 : virtual_value(d, x);
    return (x - h) * std::pow(F, K - 1);
  };
  out.buyer_utility_nash =
      integrate_adaptive(nash_utility, 0.0, 1.0, {}, std::vector<double>{d.cdf(r_star)});
  auto free_utility = [&](double u) {
    const double x = d.quantile(u);
    return (x - virtual_value(d, x)) * std::pow(d.cdf(x), K - 1);
  };
  out.buyer_utility_no_reserve = integrate_adaptive(free_utility, 0.0, 1.0, {});
  return out;
}

// Monte Carlo grid searches over restricted strategy families. Coarse by
// construction; used as independent cross-checks of the analytic solvers.
inline double mc_best_linear_alpha(const ValueDistribution& d, const std::vector<Bidder>& opponents,
                                   double alpha_lo, double alpha_hi, double step,
                                   std::int64_t rounds, std::uint64_t seed) {
  double best_alpha = alpha_lo, best_util = -HUGE_VAL;
  for (double a = alpha_lo; a <= alpha_hi + 1e-12; a += step) {
    AuctionConfig cfg;
    cfg.bidders.push_back({d, BidStrategy::linear(a)});
    for (const auto& o : opponents) cfg.bidders.push_back(o);
    const OutcomeStats stats = mc_simulate(cfg, rounds, seed);
    if (stats.utility[0] > best_util) {
      best_util = stats.utility[0];
      best_alpha = a;
    }
  }
  return best_alpha;
}

inline std::pair<double, double> mc_best_affine(const ValueDistribution& d,
                                                const std::vector<Bidder>& opponents,
                                                double alpha_lo, double alpha_hi, double alpha_step,
                                                double c_lo, double c_hi, double c_step,
                                                std::int64_t rounds, std::uint64_t seed) {
  std::pair<double, double> best{alpha_lo, c_lo};
  double best_util = -HUGE_VAL;
  for (double a = alpha_lo; a <= alpha_hi + 1e-12; a += alpha_step) {
    for (double c = c_lo; c <= c_hi + 1e-12; c += c_step) {
      AuctionConfig cfg;
      cfg.bidders.push_back({d, c == 0.0 ? BidStrategy::linear(a) : BidStrategy::affine(a, c)});
      for (const auto& o : opponents) cfg.bidders.push_back(o);
      const OutcomeStats stats = mc_simulate(cfg, rounds, seed);
      if (stats.utility[0] > best_util) {
        best_util = stats.utility[0];
        best = {a, c};
      }
    }
  }
  return best;
}

}  // namespace auctionlab
