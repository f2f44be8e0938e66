#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "slotsync/validation.hpp"

using namespace slotsync;

namespace {

const Dmc kCh1 = reference_channel_ch1();

}  // namespace

TEST(CountJointType, IdenticalCodewords) {
  Codebook cb{{{1, 2, 2}, {1, 2, 2}, {1, 2, 2}}, TypeDescriptor({1, 2})};
  const std::vector<Symbol> y{0, 1, 0};
  // Joint type over X = {1,2} (indices 0,1) x Y.
  const auto hit = JointDistribution::from_counts(2, 2, {1, 0, 1, 1});
  EXPECT_EQ(count_joint_type(cb, kCh1, y, hit), 3u);
  const auto miss = JointDistribution::from_counts(2, 2, {0, 1, 2, 0});
  EXPECT_EQ(count_joint_type(cb, kCh1, y, miss), 0u);
  EXPECT_THROW(count_joint_type(cb, kCh1, y, JointDistribution::from_counts(2, 2, {1, 0, 0, 1})), std::invalid_argument);
}

TEST(CountJointType, PartitionIdentityAndRecount) {
  Rng rng(4);
  const auto cb = sample_codebook(kCh1, TypeDescriptor({3, 2}), 7, rng);
  const std::vector<Symbol> y{1, 0, 0, 1, 1};
  std::size_t total = 0;
  for (const auto& q : enumerate_joint_types(2, 2, 5)) {
    const std::size_t n = count_joint_type(cb, kCh1, y, q);
    total += n;
    std::size_t direct = 0;  // recount via empirical_joint on shifted letters
    for (const auto& x : cb.codewords) {
      std::vector<Symbol> xs(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) xs[i] = x[i] - 1;
      if (empirical_joint(xs, y, 2, 2).counts() == q.counts()) ++direct;
    }
    EXPECT_EQ(n, direct);
  }
  EXPECT_EQ(total, cb.size());
}

TEST(MonteCarlo, ReproducibleAndFullRejection) {
  const EnsembleConfig cfg{kCh1, TypeDescriptor({2, 2}), 4, 2, 0};
  const Rng rng(77);
  const auto a = estimate_probabilities(cfg, {0, 0}, 2000, rng);
  const auto b = estimate_probabilities(cfg, {0, 0}, 2000, rng);
  EXPECT_EQ(a.p_fa, b.p_fa);
  EXPECT_EQ(a.p_md, b.p_md);
  EXPECT_EQ(a.p_de, b.p_de);
  EXPECT_EQ(a.method, "monte-carlo");
  const auto r = estimate_probabilities(cfg, {0, 40.0}, 2000, rng);
  EXPECT_EQ(r.p_fa, 0.0);
  EXPECT_EQ(r.p_md, 1.0);
}

TEST(MonteCarlo, StderrScaling) {
  const EnsembleConfig cfg{kCh1, TypeDescriptor({2, 2}), 4, 2, 0};
  const auto a = estimate_probabilities(cfg, {0, 0}, 20000, Rng(1));
  const auto b = estimate_probabilities(cfg, {0, 0}, 40000, Rng(2));
  EXPECT_NEAR(a.se_md / b.se_md, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(ExactY, DegenerateEnsembleHasNoVariance) {
  const EnsembleConfig cfg{kCh1, TypeDescriptor({0, 5}), 5, 1, 0};
  const auto e = exact_y_average(cfg, {0, 0.2}, 10, Rng(3));
  EXPECT_NEAR(e.se_fa, 0.0, 1e-15);
  EXPECT_NEAR(e.se_de, 0.0, 1e-15);
  EXPECT_EQ(e.method, "exact-y");
}

TEST(ExactY, AgreesWithMonteCarlo) {
  const EnsembleConfig cfg{kCh1, TypeDescriptor({3, 3}), 6, 3, 0};
  const DetectorParams p{0.0, 0.3};
  const auto ex = exact_y_average(cfg, p, 2000, Rng(5));
  const auto mc = estimate_probabilities(cfg, p, 40000, Rng(6));
  EXPECT_NEAR(ex.p_fa, mc.p_fa, 3 * std::hypot(ex.se_fa, mc.se_fa));
  EXPECT_NEAR(ex.p_md, mc.p_md, 3 * std::hypot(ex.se_md, mc.se_md));
  EXPECT_NEAR(ex.p_de, mc.p_de, 3 * std::hypot(ex.se_de, mc.se_de));
}

TEST(ExactY, ResolvesTinyFalseAlarm) {
  const EnsembleConfig cfg{kCh1, TypeDescriptor({9, 9}), 18, 2, 0};
  const auto e = exact_y_average(cfg, {0.0, 1.0}, 3, Rng(9));
  EXPECT_GT(e.p_fa, 0.0);
  EXPECT_LT(e.p_fa, 1e-5);  // Monte Carlo with 1e5 trials would see no events
  EXPECT_THROW(exact_y_average(cfg, {0, 0}, 1, Rng(9), 1e3), BudgetExceeded);
}

TEST(FullOracle, HandEnumeration) {
  // n=2, P=(1,1): type class {(1,2), (2,1)}; four codebooks of two words.
  const EnsembleConfig cfg{kCh1, TypeDescriptor({1, 1}), 2, 2, 0};
  const DetectorParams p{0.0, 0.1};
  const std::vector<std::vector<Symbol>> words{{1, 2}, {2, 1}};
  double fa = 0, md = 0, de = 0;
  for (const auto& a : words)
    for (const auto& b : words) {
      for (Symbol y1 = 0; y1 < 2; ++y1)
        for (Symbol y2 = 0; y2 < 2; ++y2) {
          const double q0 = kCh1.w(0, y1) * kCh1.w(0, y2);
          const double wa = kCh1.w(a[0], y1) * kCh1.w(a[1], y2);
          const double wb = kCh1.w(b[0], y1) * kCh1.w(b[1], y2);
          const bool detect = std::exp(2 * p.alpha) * (wa + wb) + std::max(wa, wb) > std::exp(2 * p.beta) * q0;
          const int msg = wb > wa ? 2 : 1;
          if (detect) fa += q0 / 4;
          if (!detect) md += (wa + wb) / 8;
          if (!detect || msg != 1) de += wa / 8;
          if (!detect || msg != 2) de += wb / 8;
        }
    }
  const auto e = exact_full_oracle(cfg, p);
  EXPECT_EQ(e.trials, 4u);
  EXPECT_NEAR(e.p_fa, fa, 1e-14);
  EXPECT_NEAR(e.p_md, md, 1e-14);
  EXPECT_NEAR(e.p_de, de, 1e-14);
  EXPECT_LE(e.p_md, e.p_de);
}

TEST(FullOracle, MissedDetectionBelowDecodingError) {
  for (double b : {-0.5, 0.0, 0.4}) {
    const EnsembleConfig cfg{kCh1, TypeDescriptor({2, 1}), 3, 2, 0};
    const auto e = exact_full_oracle(cfg, {0.1, b});
    EXPECT_LE(e.p_md, e.p_de + 1e-15);
  }
  const EnsembleConfig big{kCh1, TypeDescriptor({5, 5}), 10, 3, 0};
  EXPECT_THROW(exact_full_oracle(big, {0, 0}), BudgetExceeded);
}

TEST(Fit, SyntheticSeries) {
  std::vector<std::pair<double, double>> exact, poly, flat;
  for (int n = 10; n <= 40; ++n) {
    exact.emplace_back(n, std::exp(-0.5 * n));
    poly.emplace_back(n, n * std::exp(-0.5 * n));
    flat.emplace_back(n, 0.3);
  }
  EXPECT_NEAR(fit_exponent(exact).slope, 0.5, 1e-12);
  // -ln p = 0.5 n - ln n, so the fitted slope is 0.5 minus the OLS slope of
  // ln n over the window (about 0.044 for n = 10..40).
  const auto f = fit_exponent(poly);
  double mn = 0, ml = 0, sxx = 0, sxy = 0;
  for (int n = 10; n <= 40; ++n) mn += n / 31.0, ml += std::log(n) / 31.0;
  for (int n = 10; n <= 40; ++n) sxx += (n - mn) * (n - mn), sxy += (n - mn) * (std::log(n) - ml);
  EXPECT_NEAR(f.slope, 0.5 - sxy / sxx, 1e-12);
  EXPECT_NEAR(f.slope, 0.5, 0.05);
  EXPECT_NEAR(fit_exponent(flat).slope, 0.0, 1e-12);
  EXPECT_EQ(f.points.size(), poly.size());
  const std::vector<std::pair<double, double>> two{{1, 0.5}, {2, 0.25}};
  EXPECT_THROW(fit_exponent(two), std::invalid_argument);
  const std::vector<std::pair<double, double>> zero{{1, 0.5}, {2, 0.25}, {3, 0.0}};
  EXPECT_THROW(fit_exponent(zero), std::invalid_argument);
}
