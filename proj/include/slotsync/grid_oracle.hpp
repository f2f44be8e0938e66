#pragma once

// Brute-force reference values for the exponents on two-input, two-output
// problems. Nothing here shares code with the engine's coupling solver: every
// inner problem is a scan along the one-dimensional set of couplings with a
// fixed output distribution, every outer problem a simplex grid that is
// re-gridded (zoomed) around its best cells. Constraint boundaries inside a
// scan are located by bisection so that feasible-set edges are not lost to
// grid spacing.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "slotsync/channel.hpp"
#include "slotsync/exponents.hpp"
#include "slotsync/probability.hpp"

namespace slotsync {

struct GridOracleOptions {
  int outer_resolution = 200;  // first-level grid spacing 1/outer_resolution
  int inner_resolution = 200;  // samples per coupling segment
  int zoom_levels = 3;         // refinement passes, each 10x finer
  int zoom_keep = 4;           // cells refined per pass
};

class GridOracle {
 public:
  explicit GridOracle(const ExponentProblem& prob, GridOracleOptions opt = {}) : prob_(prob), opt_(opt) {
    if (prob.nx() != 2 || prob.ny() != 2) throw std::invalid_argument("GridOracle: only 2x2 problems are supported");
    p1_ = prob.p()[0];
    p2_ = prob.p()[1];
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) {
        const Symbol xs = prob.dmc().input_letters()[x];
        w_[x][y] = prob.dmc().row(xs)[y];
      }
    q0_ = {prob.dmc().q0()[0], prob.dmc().q0()[1]};
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) d_[x][y] = std::log(q0_[y] / w_[x][y]);
  }

  // Couplings with output distribution (1-s, s), parameterized by
  // a = Q(Y=1 | X=x1).
  struct Segment {
    double s, lo, hi;
  };

  Segment segment(double s) const {
    return {s, std::max(0.0, (s - p2_) / p1_), std::min(1.0, s / p1_)};
  }

  std::array<std::array<double, 2>, 2> joint(double s, double a) const {
    const double q11 = p1_ * a;
    const double q21 = std::clamp(s - q11, 0.0, p2_);
    return {{{p1_ - q11, q11}, {p2_ - q21, q21}}};
  }

  double info(double s, double a) const {
    const auto q = joint(s, a);
    const double qy[2] = {1.0 - s, s};
    const double px[2] = {p1_, p2_};
    double v = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        if (q[x][y] > 0.0) v += q[x][y] * std::log(q[x][y] / (px[x] * qy[y]));
    return std::max(v, 0.0);
  }

  double dist(double s, double a) const {
    const auto q = joint(s, a);
    double v = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) v += q[x][y] * d_[x][y];
    return v;
  }

  /// D(Q_{Y|X} || W | P) for conditional rows (1-a, a), (1-b, b).
  double cond_divergence(double a, double b) const {
    auto row = [&](int x, double c) {
      return xlogx_over(1.0 - c, w_[x][0]) + xlogx_over(c, w_[x][1]);
    };
    return p1_ * row(0, a) + p2_ * row(1, b);
  }

  double noise_divergence(double s) const { return xlogx_over(1.0 - s, q0_[0]) + xlogx_over(s, q0_[1]); }

  // min f over the segment restricted to {g <= c}; the boundary of the
  // constraint set is added to the samples.
  double scan(const Segment& seg, const std::function<double(double)>& f, const std::function<double(double)>& g,
              double c) const {
    const int k = opt_.inner_resolution;
    double best = kInf;
    double prev_a = seg.lo;
    bool prev_ok = g(seg.lo) <= c;
    if (prev_ok) best = f(seg.lo);
    for (int j = 1; j <= k; ++j) {
      const double a = j == k ? seg.hi : seg.lo + (seg.hi - seg.lo) * j / k;
      const bool ok = g(a) <= c;
      if (ok) best = std::min(best, f(a));
      if (ok != prev_ok) {
        double in = ok ? a : prev_a, out = ok ? prev_a : a;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (in + out);
          (g(mid) <= c ? in : out) = mid;
        }
        best = std::min(best, f(in));
      }
      prev_a = a;
      prev_ok = ok;
    }
    return best;
  }

  double rate_at(double delta, double s) const {
    const Segment seg = segment(s);
    return scan(seg, [&](double a) { return info(s, a); }, [&](double a) { return dist(s, a); }, delta);
  }

  double mu(double r, double s) const {
    const Segment seg = segment(s);
    return scan(seg, [&](double a) { return info(s, a) + dist(s, a); }, [&](double a) { return info(s, a); }, r);
  }

  /// (I, D) at the sampled minimizer of I + D.
  std::pair<double, double> r1_d1(double s) const {
    const Segment seg = segment(s);
    const int k = opt_.inner_resolution * 4;
    double best = kInf, bi = 0.0, bd = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double a = seg.lo + (seg.hi - seg.lo) * j / k;
      const double i = info(s, a), d = dist(s, a);
      if (i + d < best) {
        best = i + d;
        bi = i;
        bd = d;
      }
    }
    return {bi, bd};
  }

  /// min over couplings of max{I, I + v} with v = u when u + alpha > 0, else -inf.
  double md_threshold_rate(double s) const {
    const Segment seg = segment(s);
    const double alpha = prob_.alpha(), beta = prob_.beta();
    auto u = [&](double a) { return dist(s, a) + beta - alpha; };
    auto h = [&](double a) {
      const double uu = u(a);
      const double i = info(s, a);
      return uu + alpha > 0.0 ? std::max(i, i + uu) : i;
    };
    // u + alpha <= 0 side, including its boundary ...
    const double low = scan(seg, h, [&](double a) { return u(a) + alpha; }, 0.0);
    // ... and the other side, whose infimum may sit on that boundary.
    const double high = scan(seg, [&](double a) { return std::max(info(s, a), info(s, a) + u(a)); },
                             [&](double a) { return -(u(a) + alpha); }, 0.0);
    return std::min(low, high);
  }

  double r_tilde(double delta, double r, double s) const {
    if (delta > mu(r, s) - r) return 0.0;
    return positive_part(rate_at(delta, s) - r);
  }

  // -------------------------------------------------------------------------

  double e_a() const {
    const double delta = prob_.alpha() - prob_.beta();
    return minimize_1d([&](double s) { return noise_divergence(s) + r_tilde(delta, prob_.rate(), s); });
  }

  double e_b() const {
    return minimize_1d(
        [&](double s) { return noise_divergence(s) + positive_part(rate_at(-prob_.beta(), s) - prob_.rate()); });
  }

  double e_md() const {
    const double t = prob_.threshold();
    return minimize_2d([&](double a, double b) {
      const double s = p1_ * a + p2_ * b;
      if (dist(s, a) < t) return kInf;
      if (md_threshold_rate(s) < prob_.rate()) return kInf;
      return cond_divergence(a, b);
    });
  }

  double e_1() const {
    const double t = prob_.threshold();
    return minimize_2d([&](double a, double b) {
      const double s = p1_ * a + p2_ * b;
      const double dq = dist(s, a);
      if (dq > t) return kInf;
      return cond_divergence(a, b) + positive_part(rate_at(dq, s) - prob_.rate());
    });
  }

  double e_2() const {
    const double delta = prob_.alpha() - prob_.beta();
    return minimize_2d([&](double a, double b) {
      const double s = p1_ * a + p2_ * b;
      return cond_divergence(a, b) + positive_part(rate_at(delta, s) - prob_.rate());
    });
  }

 private:
  double minimize_1d(const std::function<double(double)>& f) const {
    struct Cell {
      double x, v;
    };
    std::vector<Cell> cells;
    double h = 1.0 / opt_.outer_resolution;
    for (int i = 0; i <= opt_.outer_resolution; ++i) {
      const double x = std::min(1.0, i * h);
      cells.push_back({x, f(x)});
    }
    double best = kInf;
    for (int level = 0;; ++level) {
      std::stable_sort(cells.begin(), cells.end(), [](const Cell& l, const Cell& r) { return l.v < r.v; });
      for (const auto& c : cells) best = std::min(best, std::max(c.v, 0.0));
      if (level == opt_.zoom_levels) break;
      std::vector<Cell> next;
      const double fine = h / 10.0;
      for (int k = 0; k < std::min<int>(opt_.zoom_keep, static_cast<int>(cells.size())); ++k) {
        for (int j = -10; j <= 10; ++j) {
          const double x = cells[k].x + j * fine;
          if (x < 0.0 || x > 1.0) continue;
          next.push_back({x, f(x)});
        }
      }
      cells = std::move(next);
      h = fine;
    }
    return best;
  }

  double minimize_2d(const std::function<double(double, double)>& f) const {
    struct Cell {
      double a, b, v;
    };
    std::vector<Cell> cells;
    double h = 1.0 / opt_.outer_resolution;
    for (int i = 0; i <= opt_.outer_resolution; ++i)
      for (int j = 0; j <= opt_.outer_resolution; ++j) {
        const double a = std::min(1.0, i * h), b = std::min(1.0, j * h);
        cells.push_back({a, b, f(a, b)});
      }
    double best = kInf;
    for (int level = 0;; ++level) {
      std::stable_sort(cells.begin(), cells.end(), [](const Cell& l, const Cell& r) { return l.v < r.v; });
      for (const auto& c : cells) best = std::min(best, std::max(c.v, 0.0));
      if (level == opt_.zoom_levels || !std::isfinite(best)) break;
      std::vector<Cell> next;
      const double fine = h / 10.0;
      for (int k = 0; k < std::min<int>(opt_.zoom_keep, static_cast<int>(cells.size())); ++k) {
        if (!std::isfinite(cells[k].v)) break;
        for (int i = -10; i <= 10; ++i)
          for (int j = -10; j <= 10; ++j) {
            const double a = cells[k].a + i * fine, b = cells[k].b + j * fine;
            if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) continue;
            next.push_back({a, b, f(a, b)});
          }
      }
      cells = std::move(next);
      h = fine;
    }
    return best;
  }

  ExponentProblem prob_;
  GridOracleOptions opt_;
  double p1_, p2_;
  double w_[2][2], d_[2][2];
  std::array<double, 2> q0_;
};

}  // namespace slotsync
