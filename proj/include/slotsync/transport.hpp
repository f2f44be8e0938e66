#pragma once

// Couplings of a fixed pair of marginals (P on X, Q_Y on Y).
//
// Every single-letter optimization in the exponent engine runs over
// Pi(P, Q_Y), the joints with both marginals fixed. On that polytope
//
//   I(Q)            = -H(Q) + const
//   D(Q || P x W)   = I(Q) + D(Q) + D(Q_Y || Q0)
//
// so minimizing I (or the divergence) under a constraint on the linear
// functional D(Q) = E_Q d traces one exponential family
//
//   Q_theta(x,y) = a(x) b(y) exp(-theta d(x,y)),
//
// with theta = 0 the independent coupling and theta = 1 the I-projection of
// P x W onto Pi(P, Q_Y). theta -> +inf (-inf) converges to the
// maximum-entropy coupling on the face of transport plans minimizing
// (maximizing) D, which is found exactly with a small min-cost-flow solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "slotsync/logsum.hpp"
#include "slotsync/probability.hpp"

namespace slotsync {

// ---------------------------------------------------------------------------
// Min-cost transport by successive shortest paths.

struct TransportPlan {
  double cost = 0.0;
  std::vector<double> plan;         // nx*ny row-major
  std::vector<char> optimal_face;   // cells any optimal plan may use
};

namespace detail {

struct FlowEdge {
  std::size_t to;
  double cap;
  double cost;
  std::size_t rev;
};

class FlowGraph {
 public:
  explicit FlowGraph(std::size_t n) : adj_(n) {}
  std::size_t add(std::size_t u, std::size_t v, double cap, double cost) {
    adj_[u].push_back({v, cap, cost, adj_[v].size()});
    adj_[v].push_back({u, 0.0, -cost, adj_[u].size() - 1});
    return adj_[u].size() - 1;
  }
  std::vector<std::vector<FlowEdge>>& adj() { return adj_; }
  std::size_t size() const { return adj_.size(); }

 private:
  std::vector<std::vector<FlowEdge>> adj_;
};

inline constexpr double kFlowEps = 1e-15;

}  // namespace detail

/// min sum cost(x,y) Q(x,y) over couplings of (supply, demand).
inline TransportPlan min_cost_transport(std::span<const double> supply, std::span<const double> demand,
                                        std::span<const double> cost) {
  const std::size_t nx = supply.size(), ny = demand.size();
  if (cost.size() != nx * ny) throw std::invalid_argument("min_cost_transport: shape mismatch");
  const std::size_t s = 0, t = nx + ny + 1, nodes = nx + ny + 2;
  detail::FlowGraph g(nodes);
  std::vector<std::size_t> cell_edge(nx * ny);
  for (std::size_t x = 0; x < nx; ++x) g.add(s, 1 + x, supply[x], 0.0);
  for (std::size_t y = 0; y < ny; ++y) g.add(1 + nx + y, t, demand[y], 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) cell_edge[x * ny + y] = g.add(1 + x, 1 + nx + y, 2.0, cost[x * ny + y]);

  auto& adj = g.adj();
  double shipped = 0.0;
  const std::size_t max_rounds = 4 * (nx * ny + nx + ny) + 16;
  for (std::size_t round = 0; round < max_rounds && shipped < 1.0 - 1e-14; ++round) {
    std::vector<double> dist(nodes, kInf);
    std::vector<std::pair<std::size_t, std::size_t>> parent(nodes, {SIZE_MAX, SIZE_MAX});
    dist[s] = 0.0;
    for (std::size_t it = 0; it < nodes; ++it) {
      bool changed = false;
      for (std::size_t u = 0; u < nodes; ++u) {
        if (!std::isfinite(dist[u])) continue;
        for (std::size_t k = 0; k < adj[u].size(); ++k) {
          const auto& e = adj[u][k];
          if (e.cap <= detail::kFlowEps) continue;
          if (dist[u] + e.cost < dist[e.to] - 1e-15) {
            dist[e.to] = dist[u] + e.cost;
            parent[e.to] = {u, k};
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (!std::isfinite(dist[t])) break;
    double push = kInf;
    for (std::size_t v = t; v != s; v = parent[v].first) push = std::min(push, adj[parent[v].first][parent[v].second].cap);
    for (std::size_t v = t; v != s; v = parent[v].first) {
      auto& e = adj[parent[v].first][parent[v].second];
      e.cap -= push;
      adj[e.to][e.rev].cap += push;
    }
    shipped += push;
  }

  TransportPlan out;
  out.plan.resize(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      const double f = std::max(0.0, 2.0 - adj[1 + x][cell_edge[x * ny + y]].cap);
      out.plan[x * ny + y] = f;
      out.cost += f * cost[x * ny + y];
    }

  // Feasible potentials on the final residual graph certify optimality; the
  // cells with zero reduced cost span the whole optimal face.
  std::vector<double> pot(nodes, 0.0);
  for (std::size_t it = 0; it < nodes; ++it) {
    bool changed = false;
    for (std::size_t u = 0; u < nodes; ++u)
      for (const auto& e : adj[u])
        if (e.cap > detail::kFlowEps && pot[u] + e.cost < pot[e.to] - 1e-15) {
          pot[e.to] = pot[u] + e.cost;
          changed = true;
        }
    if (!changed) break;
  }
  double scale = 1.0;
  for (double c : cost) scale = std::max(scale, std::abs(c));
  out.optimal_face.assign(nx * ny, 0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      if (supply[x] <= 0.0 || demand[y] <= 0.0) continue;
      const double reduced = cost[x * ny + y] + pot[1 + x] - pot[1 + nx + y];
      out.optimal_face[x * ny + y] = reduced <= 1e-11 * scale ? 1 : 0;
    }
  return out;
}

// ---------------------------------------------------------------------------
// The exponential family of couplings.

struct Coupling {
  double theta = 0.0;        // +-inf for the face limits
  std::vector<double> q;     // nx*ny joint, row-major over X x Y
  double information = 0.0;  // I(Q)
  double distortion = 0.0;   // E_Q d
  double divergence = 0.0;   // D(Q || P x W) = D(Q_{Y|X} || W | P)
};

class CouplingFamily {
 public:
  /// `dist` and `log_w` are nx*ny row-major; `log_w` may hold -inf.
  CouplingFamily(const Distribution& p, const Distribution& qy, std::span<const double> dist,
                 std::span<const double> log_w)
      : nx_(p.size()), ny_(qy.size()), p_(p), qy_(qy), d_(dist.begin(), dist.end()), log_w_(log_w.begin(), log_w.end()) {
    if (d_.size() != nx_ * ny_ || log_w_.size() != nx_ * ny_)
      throw std::invalid_argument("CouplingFamily: shape mismatch");
    for (std::size_t x = 0; x < nx_; ++x)
      if (p_[x] > 0.0) rows_.push_back(x);
    for (std::size_t y = 0; y < ny_; ++y)
      if (qy_[y] > 0.0) cols_.push_back(y);
    min_plan_ = min_cost_transport(p_.probs(), qy_.probs(), d_);
    std::vector<double> neg(d_.size());
    for (std::size_t i = 0; i < d_.size(); ++i) neg[i] = -d_[i];
    max_plan_ = min_cost_transport(p_.probs(), qy_.probs(), neg);
    max_plan_.cost = -max_plan_.cost;
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  const Distribution& p() const { return p_; }
  const Distribution& qy() const { return qy_; }

  /// Smallest and largest E_Q d over Pi(P, Q_Y).
  double d_min() const { return min_plan_.cost; }
  double d_max() const { return max_plan_.cost; }

  Coupling at(double theta) const {
    if (theta == kInf) return lower_limit();
    if (theta == -kInf) return upper_limit();
    std::vector<double> lk(d_.size());
    for (std::size_t i = 0; i < d_.size(); ++i) lk[i] = -theta * d_[i];
    return solve(lk, theta);
  }

  /// theta -> +inf: maximum-entropy coupling among those with E d = d_min.
  Coupling lower_limit() const { return face_coupling(min_plan_.optimal_face, kInf); }
  /// theta -> -inf: maximum-entropy coupling among those with E d = d_max.
  Coupling upper_limit() const { return face_coupling(max_plan_.optimal_face, -kInf); }

  /// Member of the family with E d = target, or nullopt when target is
  /// outside [d_min, d_max] (beyond a 1e-12 slack).
  std::optional<Coupling> with_distortion(double target) const {
    const double lo = d_min(), hi = d_max();
    if (target < lo - kSlack || target > hi + kSlack) return std::nullopt;
    if (hi - lo <= kSlack) return at(0.0);
    const Coupling c0 = at(0.0);
    if (std::abs(c0.distortion - target) <= 1e-15) return c0;
    const bool positive = target < c0.distortion;
    const double sign = positive ? 1.0 : -1.0;
    // D(theta) is nonincreasing; bracket on the side of zero that holds the target.
    double a = 0.0, b = 1.0;
    Coupling cb = at(sign * b);
    while ((positive ? cb.distortion > target : cb.distortion < target)) {
      a = b;
      b *= 2.0;
      if (b > kThetaCap) return positive ? lower_limit() : upper_limit();
      cb = at(sign * b);
    }
    auto f = [&](double s) { return at(sign * s).distortion - target; };
    const double theta = sign * root(f, a, b);
    return at(theta);
  }

  /// Member with theta >= 0 and I(Q) = r; the lower limit when r exceeds its
  /// information.
  Coupling with_information(double r) const {
    if (r <= 0.0) return at(0.0);
    const Coupling lim = lower_limit();
    if (r >= lim.information) return lim;
    double a = 0.0, b = 1.0;
    Coupling cb = at(b);
    while (cb.information < r) {
      a = b;
      b *= 2.0;
      if (b > kThetaCap) return lim;
      cb = at(b);
    }
    auto f = [&](double s) { return at(s).information - r; };
    return at(root(f, a, b));
  }

 private:
  static constexpr double kSlack = 1e-12;
  static constexpr double kThetaCap = 1 << 14;

  template <class F>
  static double root(F f, double a, double b) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) return std::abs(fa) < std::abs(fb) ? a : b;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
  }

  Coupling face_coupling(const std::vector<char>& face, double theta) const {
    std::vector<double> lk(d_.size(), -kInf);
    for (std::size_t i = 0; i < face.size(); ++i)
      if (face[i]) lk[i] = 0.0;
    return solve(lk, theta);
  }

  // Solves for a(x), b(y) with Q = a b exp(lk) in Pi(P, Q_Y): Sinkhorn
  // warm-up, then damped Newton on the dual potentials.
  Coupling solve(const std::vector<double>& lk, double theta) const {
    const std::size_t R = rows_.size(), C = cols_.size();
    auto L = [&](std::size_t i, std::size_t j) { return lk[rows_[i] * ny_ + cols_[j]]; };
    std::vector<double> lp(R), lq(C);
    for (std::size_t i = 0; i < R; ++i) lp[i] = std::log(p_[rows_[i]]);
    for (std::size_t j = 0; j < C; ++j) lq[j] = std::log(qy_[cols_[j]]);

    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(R));
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(C));
    std::vector<double> buf(std::max(R, C));
    auto update_f = [&] {
      for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) buf[j] = g[j] + L(i, j);
        f[i] = lp[i] - log_sum_exp(std::span<const double>(buf.data(), C));
      }
    };
    auto update_g = [&] {
      for (std::size_t j = 0; j < C; ++j) {
        for (std::size_t i = 0; i < R; ++i) buf[i] = f[i] + L(i, j);
        g[j] = lq[j] - log_sum_exp(std::span<const double>(buf.data(), R));
      }
    };
    for (int it = 0; it < 30; ++it) {
      update_f();
      update_g();
    }

    Eigen::MatrixXd Q(R, C);
    Eigen::VectorXd rs(R), cs(C);
    auto residual = [&](const Eigen::VectorXd& ff, const Eigen::VectorXd& gg) {
      for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) {
          const double l = L(i, j);
          Q(i, j) = l == -kInf ? 0.0 : std::exp(ff[i] + gg[j] + l);
        }
      rs = Q.rowwise().sum();
      cs = Q.colwise().sum().transpose();
      double err = 0.0;
      for (std::size_t i = 0; i < R; ++i) err += std::abs(rs[i] - p_[rows_[i]]);
      for (std::size_t j = 0; j < C; ++j) err += std::abs(cs[j] - qy_[cols_[j]]);
      return std::isfinite(err) ? err : kInf;
    };

    if (C > 1) {
      const auto K = static_cast<Eigen::Index>(R + C - 1);  // last column potential held fixed
      double err = residual(f, g);
      for (int it = 0; it < 100 && err > 1e-15; ++it) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(K, K);
        Eigen::VectorXd grad(K);
        for (std::size_t i = 0; i < R; ++i) {
          H(i, i) = rs[i];
          grad[i] = rs[i] - p_[rows_[i]];
        }
        for (std::size_t j = 0; j + 1 < C; ++j) {
          const auto k = static_cast<Eigen::Index>(R + j);
          H(k, k) = cs[j];
          grad[k] = cs[j] - qy_[cols_[j]];
          for (std::size_t i = 0; i < R; ++i) H(i, k) = H(k, i) = Q(i, j);
        }
        Eigen::VectorXd step = H.ldlt().solve(-grad);
        if (!step.allFinite()) step = H.completeOrthogonalDecomposition().solve(-grad);
        if (!step.allFinite()) break;
        double t = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
          Eigen::VectorXd f2 = f + t * step.head(R);
          Eigen::VectorXd g2 = g;
          g2.head(C - 1) += t * step.tail(C - 1);
          const double e2 = residual(f2, g2);
          if (e2 < err) {
            f = f2;
            g = g2;
            err = e2;
            improved = true;
            break;
          }
        }
        if (!improved) {
          residual(f, g);
          break;
        }
      }
    }
    update_f();  // X-marginal exact

    Coupling c;
    c.theta = theta;
    c.q.assign(nx_ * ny_, 0.0);
    double info = 0.0, dist = 0.0, div = 0.0;
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t j = 0; j < C; ++j) {
        const double l = L(i, j);
        if (l == -kInf) continue;
        const double lq_ij = f[i] + g[j] + l;
        const double v = std::exp(lq_ij);
        if (v <= 0.0) continue;
        const std::size_t cell = rows_[i] * ny_ + cols_[j];
        c.q[cell] = v;
        info += v * (lq_ij - lp[i] - lq[j]);
        dist += v * d_[cell];
        div += v * (lq_ij - lp[i] - log_w_[cell]);
      }
    c.information = std::max(info, 0.0);
    c.distortion = dist;
    c.divergence = std::max(div, 0.0);
    return c;
  }

  std::size_t nx_, ny_;
  Distribution p_, qy_;
  std::vector<double> d_, log_w_;
  std::vector<std::size_t> rows_, cols_;
  TransportPlan min_plan_, max_plan_;
};

}  // namespace slotsync
