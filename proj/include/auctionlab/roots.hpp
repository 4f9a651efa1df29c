#pragma once

// Bracketing root finders and 1-d maximizers used across the solvers.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace auctionlab {

struct RootResult {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// Safeguarded secant: the secant step is taken while it stays inside the
// current bracket, otherwise the step falls back to bisection. Requires a
// sign change on [lo, hi].
template <class F>
RootResult find_root_bracketed(F&& f, double lo, double hi, double abs_tol = 1e-10,
                               int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, lo, hi};
  if (fhi == 0.0) return {hi, 0.0, 0, lo, hi};
  if ((flo > 0) == (fhi > 0))
    throw std::domain_error("find_root_bracketed: no sign change on bracket");

  const double lo0 = lo, hi0 = hi;
  double x = lo, fx = flo;
  int it = 0;
  while (it < max_iter && (hi - lo) > abs_tol) {
    ++it;
    double cand = lo - flo * (hi - lo) / (fhi - flo);  // secant through bracket ends
    const double margin = 0.01 * (hi - lo);
    if (!(cand > lo + margin) || !(cand < hi - margin)) cand = 0.5 * (lo + hi);
    const double fc = f(cand);
    x = cand;
    fx = fc;
    if (fc == 0.0) break;
    if ((fc > 0) == (flo > 0)) {
      lo = cand;
      flo = fc;
    } else {
      hi = cand;
      fhi = fc;
    }
  }
  if (std::abs(flo) < std::abs(fx)) { x = lo; fx = flo; }
  if (std::abs(fhi) < std::abs(fx)) { x = hi; fx = fhi; }
  return {x, fx, it, lo0, hi0};
}

// First strictly-negative-to-positive transition of f on a uniform scan
// grid; nullopt if f never dips below zero or never recovers. Used for
// residuals with a trivial root at the bracket start.
template <class F>
std::optional<std::pair<double, double>> scan_neg_to_pos(F&& f, double lo, double hi, int points) {
  if (points < 2) throw std::invalid_argument("scan_neg_to_pos: need >= 2 points");
  bool seen_negative = false;
  double xa = lo, fa = f(lo);
  if (fa < 0.0) seen_negative = true;
  for (int i = 1; i < points; ++i) {
    const double xb = lo + (hi - lo) * i / (points - 1);
    const double fb = f(xb);
    if (seen_negative && fb > 0.0) return std::make_pair(xa, xb);
    if (fb < 0.0) seen_negative = true;
    xa = xb;
    fa = fb;
  }
  return std::nullopt;
}

// First sign change of f on a uniform scan grid; nullopt if none.
template <class F>
std::optional<std::pair<double, double>> scan_for_sign_change(F&& f, double lo, double hi,
                                                              int points) {
  if (points < 2) throw std::invalid_argument("scan_for_sign_change: need >= 2 points");
  double xa = lo, fa = f(lo);
  for (int i = 1; i < points; ++i) {
    const double xb = lo + (hi - lo) * i / (points - 1);
    const double fb = f(xb);
    if (fa == 0.0) return std::make_pair(xa, xa);
    if ((fa > 0) != (fb > 0)) return std::make_pair(xa, xb);
    xa = xb;
    fa = fb;
  }
  return std::nullopt;
}

// Golden-section search for the maximum of a unimodal f on [a, b].
template <class F>
std::pair<double, double> golden_section_max(F&& f, double a, double b, double x_tol = 1e-10,
                                             int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// Global maximizer on [lo, hi]: grid scan brackets the maximum, golden
// section refines it. Exact ties break toward the smallest argument, and a
// flat plateau of maximal objective resolves to its left edge. Used for
// monopoly prices, where the tie-break encodes the seller picking the
// lowest revenue-equivalent reserve.
template <class F>
double grid_argmax_smallest(F&& f, double lo, double hi, int n_grid = 4096,
                            double x_tol = 1e-10) {
  if (!(hi > lo)) return lo;
  if (n_grid < 8) n_grid = 8;
  const double h = (hi - lo) / (n_grid - 1);
  std::vector<double> xs(static_cast<std::size_t>(n_grid)), vs(static_cast<std::size_t>(n_grid));
  double vmax = -HUGE_VAL;
  for (int i = 0; i < n_grid; ++i) {
    xs[static_cast<std::size_t>(i)] = (i == n_grid - 1) ? hi : lo + h * i;
    vs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
    vmax = std::max(vmax, vs[static_cast<std::size_t>(i)]);
  }
  const double tie_tol = 1e-12 * std::max(1.0, std::abs(vmax));
  int i0 = 0;
  while (vs[static_cast<std::size_t>(i0)] < vmax - tie_tol) ++i0;

  const double a = xs[static_cast<std::size_t>(std::max(0, i0 - 1))];
  const double b = xs[static_cast<std::size_t>(std::min(n_grid - 1, i0 + 1))];
  auto [x1, v1] = golden_section_max(f, a, b, x_tol);
  if (vs[static_cast<std::size_t>(i0)] > v1) {
    x1 = xs[static_cast<std::size_t>(i0)];
    v1 = vs[static_cast<std::size_t>(i0)];
  }

  // Plateau detection: if the objective is still maximal one grid step to
  // the left, walk to the left edge of the plateau.
  const double eps_flat = 1e-11 * std::max(1.0, std::abs(v1));
  if (x1 - h <= lo) return f(lo) >= v1 - eps_flat ? lo : x1;
  if (f(x1 - h) >= v1 - eps_flat) {
    int j = std::min(i0, n_grid - 1);
    while (j > 0 && vs[static_cast<std::size_t>(j - 1)] >= v1 - eps_flat) --j;
    if (j == 0) return xs[0];
    // Leftmost point of {f >= v1 - eps_flat} within (xs[j-1], xs[j]].
    double bad = xs[static_cast<std::size_t>(j - 1)], good = xs[static_cast<std::size_t>(j)];
    for (int it = 0; it < 100 && (good - bad) > x_tol; ++it) {
      const double m = 0.5 * (bad + good);
      (f(m) >= v1 - eps_flat ? good : bad) = m;
    }
    return good;
  }

  if (x1 - lo < 10.0 * x_tol) return lo;
  if (hi - x1 < 10.0 * x_tol) return hi;
  return x1;
}

}  // namespace auctionlab
