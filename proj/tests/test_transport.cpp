#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "slotsync/exponents.hpp"
#include "slotsync/search.hpp"
#include "slotsync/transport.hpp"

using namespace slotsync;

namespace {

const ExponentProblem kProb(reference_channel_ch1(), Distribution({0.5, 0.5}), 0.1, 0.0, 0.0);

CouplingFamily family(const Distribution& qy) {
  return CouplingFamily(kProb.p(), qy, kProb.distortion_matrix(), kProb.log_w_matrix());
}

// Uniform marginals on 2x2: Q = [[a, .5-a], [.5-a, a]].
double scan_min_distortion() {
  const auto d = kProb.distortion_matrix();
  double best = kInf;
  for (int k = 0; k <= 100000; ++k) {
    const double a = 0.5 * k / 100000.0;
    best = std::min(best, a * (d[0] + d[3]) + (0.5 - a) * (d[1] + d[2]));
  }
  return best;
}

void expect_marginals(const Coupling& c, const Distribution& p, const Distribution& qy, double tol) {
  const std::size_t ny = qy.size();
  for (std::size_t x = 0; x < p.size(); ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < ny; ++y) s += c.q[x * ny + y];
    EXPECT_NEAR(s, p[x], tol);
  }
  for (std::size_t y = 0; y < ny; ++y) {
    double s = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) s += c.q[x * ny + y];
    EXPECT_NEAR(s, qy[y], tol);
  }
}

}  // namespace

TEST(Transport, ReferenceMinimum) {
  const auto f = family(Distribution::uniform(2));
  EXPECT_NEAR(f.d_min(), scan_min_distortion(), 1e-9);
  EXPECT_NEAR(f.d_min(), -1.3004, 1e-4);
  const auto lim = f.lower_limit();
  EXPECT_NEAR(lim.information, std::log(2.0), 1e-9);
  EXPECT_NEAR(lim.q[0], 0.5, 1e-9);  // (x=1, y=0)
  EXPECT_NEAR(lim.q[3], 0.5, 1e-9);  // (x=2, y=1)
}

TEST(Transport, LinearProgramBeatsRandomCouplings) {
  Rng rng(17);
  const std::vector<double> supply{0.2, 0.3, 0.5}, demand{0.1, 0.6, 0.3};
  std::vector<double> cost(9);
  for (auto& c : cost) c = rng.uniform01() * 4 - 2;
  const auto plan = min_cost_transport(supply, demand, cost);
  double check = 0.0;
  for (std::size_t i = 0; i < 9; ++i) check += plan.plan[i] * cost[i];
  EXPECT_NEAR(check, plan.cost, 1e-12);
  for (int t = 0; t < 2000; ++t) {
    // Random coupling by iterative proportional fitting.
    std::vector<double> q(9);
    for (auto& v : q) v = rng.uniform01() + 1e-3;
    for (int it = 0; it < 300; ++it) {
      for (int x = 0; x < 3; ++x) {
        const double s = q[3 * x] + q[3 * x + 1] + q[3 * x + 2];
        for (int y = 0; y < 3; ++y) q[3 * x + y] *= supply[x] / s;
      }
      for (int y = 0; y < 3; ++y) {
        const double s = q[y] + q[3 + y] + q[6 + y];
        for (int x = 0; x < 3; ++x) q[3 * x + y] *= demand[y] / s;
      }
    }
    double c = 0.0;
    for (std::size_t i = 0; i < 9; ++i) c += q[i] * cost[i];
    EXPECT_GE(c, plan.cost - 1e-9);
  }
}

TEST(CouplingFamily, ZeroIsIndependence) {
  const Distribution qy({0.3, 0.7});
  const auto c = family(qy).at(0.0);
  EXPECT_NEAR(c.information, 0.0, 1e-12);
  EXPECT_NEAR(c.q[0], 0.15, 1e-12);
  EXPECT_NEAR(c.distortion, distortion_of(JointDistribution::product(kProb.p(), qy), kProb.dmc()), 1e-12);
  EXPECT_NEAR(family(Distribution::uniform(2)).at(0.0).distortion, -0.6072, 1e-4);
}

TEST(CouplingFamily, MarginalsAndDivergence) {
  const Distribution qy({0.62, 0.38});
  const auto f = family(qy);
  for (double th : {-3.0, -0.5, 0.0, 0.4, 1.0, 2.5, 8.0}) {
    const auto c = f.at(th);
    expect_marginals(c, kProb.p(), qy, 1e-12);
    const JointDistribution j(2, 2, c.q);
    EXPECT_NEAR(c.information, mutual_information(j), 1e-10);
    EXPECT_NEAR(c.distortion, distortion_of(j, kProb.dmc()), 1e-10);
    const auto w = kProb.dmc().codeword_rows();
    EXPECT_NEAR(c.divergence, conditional_kl(j.y_given_x(), w, kProb.p()), 1e-10);
  }
}

TEST(CouplingFamily, InverseRoundTrips) {
  const Distribution qy({0.45, 0.55});
  const auto f = family(qy);
  const double top = f.lower_limit().information;
  EXPECT_LT(top, std::log(2.0));  // unequal marginals: no deterministic coupling
  for (double r : {0.01, 0.1, 0.3, 0.5}) {
    ASSERT_LT(r, top);
    const auto c = f.with_information(r);
    EXPECT_NEAR(c.information, r, 1e-9);
    const auto back = f.with_distortion(c.distortion);
    ASSERT_TRUE(back);
    EXPECT_NEAR(back->information, r, 1e-8);
  }
  EXPECT_FALSE(f.with_distortion(f.d_min() - 1e-3));
  EXPECT_FALSE(f.with_distortion(f.d_max() + 1e-3));
  EXPECT_NEAR(f.with_information(top + 0.1).distortion, f.d_min(), 1e-12);
}

TEST(CouplingFamily, TiltedMinimizesInformationPlusDistortion) {
  const Distribution qy({0.4, 0.6});
  const auto f = family(qy);
  const auto tilted = f.at(1.0);
  // Scan the one-parameter coupling set with these marginals.
  const double p1 = 0.5, q0 = 0.4;
  double best = kInf;
  for (int k = 0; k <= 200000; ++k) {
    const double a = q0 * k / 200000.0;  // Q(x1, y0)
    const JointDistribution j(2, 2, {a, p1 - a, q0 - a, 1 - p1 - q0 + a});
    if (p1 - a < 0 || 1 - p1 - q0 + a < 0) continue;
    best = std::min(best, mutual_information(j) + distortion_of(j, kProb.dmc()));
  }
  EXPECT_NEAR(tilted.information + tilted.distortion, best, 1e-8);
}

TEST(Search, QuadraticOnSimplex) {
  const std::vector<double> target{0.137, 0.5, 0.363};
  const auto r = minimize_on_simplex(3, [&](const std::vector<double>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += (p[i] - target[i]) * (p[i] - target[i]);
    return s;
  });
  ASSERT_TRUE(r.feasible());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.point[i], target[i], 1e-6);
}

TEST(Search, InfeasibleEverywhere) {
  const auto r = minimize_on_simplex(2, [](const std::vector<double>&) { return kInf; });
  EXPECT_FALSE(r.feasible());
}
