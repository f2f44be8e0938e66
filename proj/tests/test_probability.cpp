#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "slotsync/logsum.hpp"
#include "slotsync/probability.hpp"
#include "slotsync/rng.hpp"

using namespace slotsync;

TEST(Distribution, RejectsBadInput) {
  EXPECT_THROW(Distribution(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(Distribution({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(Distribution({-0.1, 1.1}), std::invalid_argument);
  EXPECT_THROW(Distribution({NAN, 1.0}), std::invalid_argument);
}

TEST(Distribution, RenormalizesTinyDrift) {
  const Distribution d({0.5 + 1e-10, 0.5});
  EXPECT_NEAR(d[0] + d[1], 1.0, 1e-15);
}

TEST(KlDivergence, Examples) {
  EXPECT_EQ(kl_divergence(Distribution({0.5, 0.5}), Distribution({0.5, 0.5})), 0.0);
  const double direct = 0.5 * std::log(0.5 / 0.95) + 0.5 * std::log(0.5 / 0.05);
  EXPECT_NEAR(kl_divergence(Distribution({0.5, 0.5}), Distribution({0.95, 0.05})), direct, 1e-14);
  EXPECT_NEAR(direct, 0.8304, 1e-4);
  EXPECT_EQ(kl_divergence(Distribution({1.0, 0.0}), Distribution({0.0, 1.0})), kInf);
  EXPECT_THROW(kl_divergence(Distribution({1.0}), Distribution({0.5, 0.5})), std::invalid_argument);
}

TEST(ConditionalKl, Examples) {
  const std::vector<double> w{0.8, 0.2, 0.2, 0.8};
  const Distribution p({0.5, 0.5});
  EXPECT_EQ(conditional_kl(w, w, p), 0.0);
  const std::vector<double> swapped{0.2, 0.8, 0.8, 0.2};
  const double direct = 0.2 * std::log(0.2 / 0.8) + 0.8 * std::log(0.8 / 0.2);
  EXPECT_NEAR(conditional_kl(swapped, w, p), direct, 1e-14);
  EXPECT_NEAR(direct, 0.8318, 1e-4);
  const std::vector<double> q{1.0, 0.0, 0.0, 1.0};
  EXPECT_TRUE(std::isfinite(conditional_kl(q, w, p)));
  EXPECT_NEAR(conditional_kl(q, w, p), 0.5 * std::log(1 / 0.8) * 2, 1e-14);
}

TEST(MutualInformation, Examples) {
  const auto prod = JointDistribution::product(Distribution({0.3, 0.7}), Distribution({0.6, 0.4}));
  EXPECT_NEAR(mutual_information(prod), 0.0, 1e-15);
  EXPECT_NEAR(mutual_information(JointDistribution(2, 2, {0.5, 0, 0, 0.5})), std::log(2.0), 1e-15);
  const JointDistribution pw(2, 2, {0.4, 0.1, 0.1, 0.4});
  const double hb = -(0.2 * std::log(0.2) + 0.8 * std::log(0.8));
  EXPECT_NEAR(mutual_information(pw), std::log(2.0) - hb, 1e-14);
  EXPECT_NEAR(mutual_information(pw), 0.1927, 1e-4);
}

TEST(EmpiricalJoint, Examples) {
  const std::vector<Symbol> x{1, 2, 1, 2}, y{0, 0, 1, 1};
  const auto q = empirical_joint(x, y);
  ASSERT_EQ(q.nx(), 3u);
  for (int a = 1; a <= 2; ++a)
    for (int b = 0; b <= 1; ++b) EXPECT_DOUBLE_EQ(q(a, b), 0.25);
  ASSERT_TRUE(q.counts());
  EXPECT_EQ(q.counts()->n(), 4);

  const std::vector<Symbol> x2{1, 1}, y2{0, 0};
  EXPECT_DOUBLE_EQ(empirical_joint(x2, y2, 3, 2)(1, 0), 1.0);

  const std::vector<Symbol> x3{1, 2, 2}, y3{1, 1, 0};
  const auto q3 = empirical_joint(x3, y3);
  EXPECT_DOUBLE_EQ(q3(1, 1), 1.0 / 3);
  EXPECT_DOUBLE_EQ(q3(2, 1), 1.0 / 3);
  EXPECT_DOUBLE_EQ(q3(2, 0), 1.0 / 3);
  EXPECT_THROW(empirical_joint(x3, y2), std::invalid_argument);
}

TEST(TypeClass, Sizes) {
  EXPECT_NEAR(log_type_class_size(TypeDescriptor({2, 2})), std::log(6.0), 1e-12);
  EXPECT_EQ(log_type_class_size(TypeDescriptor({5, 0})), 0.0);
  // 9! / (3!)^3 = 362880 / 216
  EXPECT_NEAR(log_type_class_size(TypeDescriptor({3, 3, 3})), std::log(1680.0), 1e-10);
  EXPECT_NEAR(log_type_class_size(TypeDescriptor({3, 7})), std::log(120.0), 1e-10);
}

TEST(JointTypes, Enumeration) {
  const auto one = enumerate_joint_types(1, 1, 5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0](0, 0), 1.0);

  const auto t = enumerate_joint_types(2, 1, 2);
  ASSERT_EQ(t.size(), 3u);
  std::set<std::pair<double, double>> seen;
  for (const auto& q : t) seen.insert({q(0, 0), q(1, 0)});
  EXPECT_EQ(seen, (std::set<std::pair<double, double>>{{0, 1}, {0.5, 0.5}, {1, 0}}));

  EXPECT_EQ(enumerate_joint_types(2, 2, 2).size(), 10u);
  for (int n = 1; n <= 5; ++n)
    EXPECT_EQ(static_cast<double>(enumerate_joint_types(2, 3, n).size()), multiset_coefficient(n, 6));
}

TEST(SimplexGrid, Points) {
  const auto g1 = simplex_grid(1, 7);
  ASSERT_EQ(g1.size(), 1u);
  EXPECT_EQ(g1[0][0], 1.0);
  const auto g2 = simplex_grid(2, 2);
  ASSERT_EQ(g2.size(), 3u);
  EXPECT_EQ(simplex_grid(3, 2).size(), 6u);
  for (const auto& d : simplex_grid(4, 5)) {
    double s = 0.0;
    for (double v : d.probs()) s += v;
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
}

TEST(LogSum, SmallValuesSurvive) {
  LogSumAccumulator acc;
  for (int i = 0; i < 10; ++i) acc.add_log(-800.0);
  EXPECT_NEAR(acc.log_value(), -800.0 + std::log(10.0), 1e-12);
  EXPECT_EQ(acc.value(), 0.0);  // underflows only on exponentiation
  const std::vector<double> v{-kInf, std::log(0.25), std::log(0.75)};
  EXPECT_NEAR(log_sum_exp(v), 0.0, 1e-15);
}

TEST(Rng, DeterministicAndSplit) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng s1 = Rng(42).split(1), s2 = Rng(42).split(2);
  EXPECT_NE(s1.next(), s2.next());
  Rng c(7);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(c.uniform_index(3), 3u);
    const double u = c.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}
