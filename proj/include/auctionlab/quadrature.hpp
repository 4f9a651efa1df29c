#pragma once

// Gauss-Legendre quadrature with adaptive panel bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace auctionlab {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Nodes and weights via Newton iteration on the Legendre polynomial.
// Accurate to ~1e-15; cached per order.
inline const GaussLegendreRule& gauss_legendre_rule(int n) {
  if (n < 2) throw std::invalid_argument("gauss_legendre_rule: order must be >= 2");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess for the i-th root.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Recurrence for P_n(x) and P'_n(x).
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

template <class F>
double gl_panel(F&& f, double a, double b, const GaussLegendreRule& rule) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(c + h * rule.nodes[i]);
  return s * h;
}

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  int panel_order = 32;
  int max_depth = 30;
};

namespace detail {

template <class F>
double refine_panel(F& f, double a, double b, double whole, double tol, int depth,
                    const GaussLegendreRule& rule) {
  const double m = 0.5 * (a + b);
  const double left = gl_panel(f, a, m, rule);
  const double right = gl_panel(f, m, b, rule);
  const double sum = left + right;
  if (depth <= 0 || std::abs(sum - whole) <= tol) return sum;
  return refine_panel(f, a, m, left, 0.5 * tol, depth - 1, rule) +
         refine_panel(f, m, b, right, 0.5 * tol, depth - 1, rule);
}

}  // namespace detail

// Integrates f over [a, b]. Known kinks can be passed as breakpoints; each
// smooth piece is then refined independently.
template <class F>
double integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opt = {},
                          std::span<const double> breakpoints = {}) {
  if (!(b > a)) return 0.0;
  const GaussLegendreRule& rule = gauss_legendre_rule(opt.panel_order);

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // First pass sets the error budget from a magnitude estimate of |f|.
  std::vector<double> est(cuts.size() - 1);
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    est[i] = gl_panel(f, cuts[i], cuts[i + 1], rule);
    scale += gl_panel([&](double x) { return std::abs(f(x)); }, cuts[i], cuts[i + 1], rule);
  }
  const double tol_total = std::max(opt.abs_tol, opt.rel_tol * std::max(scale, 1e-300));

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double tol_i = tol_total * std::max(cuts[i + 1] - cuts[i], 1e-300) / (b - a);
    total += detail::refine_panel(f, cuts[i], cuts[i + 1], est[i], tol_i, opt.max_depth, rule);
  }
  return total;
}

}  // namespace auctionlab
