#pragma once

// Global minimization over a probability simplex of small dimension: a
// regular grid followed by pattern-search refinement from the best cells.
// Objectives may return +inf to mark infeasible points (extreme barrier).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "slotsync/probability.hpp"

namespace slotsync {

struct SearchOptions {
  std::int64_t grid_resolution = 64;  // grid spacing 1/resolution
  int restarts = 3;                   // refinements started from the best grid points
  double step_tolerance = 1e-10;      // refinement stops below this step
};

struct SearchResult {
  std::vector<double> point;
  double value = kInf;
  std::size_t evaluations = 0;
  bool feasible() const { return std::isfinite(value); }
};

namespace detail {

// Moves `h` of mass from coordinate j to i, limited by what j holds.
inline bool transfer(std::vector<double>& p, std::size_t i, std::size_t j, double h) {
  const double amount = std::min(h, p[j]);
  if (amount <= 0.0) return false;
  p[i] += amount;
  p[j] -= amount;
  if (p[j] < 1e-300) p[j] = 0.0;
  return true;
}

}  // namespace detail

inline SearchResult minimize_on_simplex(std::size_t dim, const std::function<double(const std::vector<double>&)>& objective,
                                        const SearchOptions& opt = {}) {
  SearchResult best;
  if (dim == 0) return best;
  if (dim == 1) {
    best.point = {1.0};
    best.value = objective(best.point);
    best.evaluations = 1;
    return best;
  }

  struct Cand {
    std::vector<double> p;
    double v;
  };
  std::vector<Cand> grid;
  for_each_composition(dim, opt.grid_resolution, [&](const std::vector<std::int64_t>& c) {
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i) p[i] = static_cast<double>(c[i]) / static_cast<double>(opt.grid_resolution);
    const double v = objective(p);
    ++best.evaluations;
    grid.push_back({std::move(p), v});
  });
  // Stable order keeps ties on the lowest grid index.
  std::stable_sort(grid.begin(), grid.end(), [](const Cand& a, const Cand& b) { return a.v < b.v; });
  if (grid.empty() || !std::isfinite(grid.front().v)) {
    best.point = grid.empty() ? std::vector<double>(dim, 1.0 / static_cast<double>(dim)) : grid.front().p;
    return best;
  }

  best.point = grid.front().p;
  best.value = grid.front().v;
  const int starts = std::min<int>(opt.restarts, static_cast<int>(grid.size()));
  for (int s = 0; s < starts; ++s) {
    if (!std::isfinite(grid[static_cast<std::size_t>(s)].v)) break;
    std::vector<double> x = grid[static_cast<std::size_t>(s)].p;
    double fx = grid[static_cast<std::size_t>(s)].v;
    double h = 1.0 / static_cast<double>(opt.grid_resolution);
    while (h > opt.step_tolerance) {
      std::vector<double> bx;
      double bf = fx;
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
          if (i == j) continue;
          std::vector<double> y = x;
          if (!detail::transfer(y, i, j, h)) continue;
          const double fy = objective(y);
          ++best.evaluations;
          if (fy < bf) {
            bf = fy;
            bx = std::move(y);
          }
        }
      if (!bx.empty()) {
        x = std::move(bx);
        fx = bf;
      } else {
        h *= 0.5;
      }
    }
    if (fx < best.value) {
      best.value = fx;
      best.point = x;
    }
  }
  return best;
}

}  // namespace slotsync
