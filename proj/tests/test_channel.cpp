#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "slotsync/channel.hpp"

using namespace slotsync;

TEST(Dmc, ReferenceChannel) {
  const Dmc ch1 = reference_channel_ch1();
  EXPECT_EQ(ch1.num_inputs_with_silent(), 3u);
  EXPECT_EQ(ch1.num_inputs(), 2u);
  EXPECT_EQ(ch1.num_outputs(), 2u);
  EXPECT_EQ(ch1.silent(), 0);
  EXPECT_TRUE(ch1.full_support());
  EXPECT_DOUBLE_EQ(ch1.q0()[0], 0.95);
  EXPECT_EQ(ch1.input_letters()[0], 1);
  EXPECT_EQ(ch1.input_letters()[1], 2);
}

TEST(Dmc, Validation) {
  EXPECT_THROW(validate_dmc({{0.5, 0.6}, {0.5, 0.5}}, 0), std::invalid_argument);
  EXPECT_THROW(validate_dmc({{0.5, 0.5}}, 0), std::invalid_argument);
  EXPECT_THROW(validate_dmc({{0.5, 0.5}, {1.0}}, 0), std::invalid_argument);
  EXPECT_THROW(validate_dmc({{0.5, 0.5}, {0.5, 0.5}}, 2), std::invalid_argument);
  EXPECT_THROW(validate_dmc({}, 0), std::invalid_argument);
}

TEST(Dmc, ZeroEntryIsReported) {
  const Dmc d({{0.9, 0.1}, {1.0, 0.0}, {0.3, 0.7}}, 0);
  EXPECT_FALSE(d.full_support());
  ASSERT_TRUE(d.first_zero_entry());
  EXPECT_EQ(d.first_zero_entry()->first, 1u);
  EXPECT_EQ(d.first_zero_entry()->second, 1u);
  EXPECT_EQ(d.log_w(1, 1), -kInf);
}

TEST(Codebook, DegenerateCompositionGivesConstantWords) {
  const Dmc ch1 = reference_channel_ch1();
  Rng rng(3);
  const auto cb = sample_codebook(ch1, TypeDescriptor({0, 5}), 4, rng);
  ASSERT_EQ(cb.size(), 4u);
  for (const auto& w : cb.codewords) EXPECT_EQ(w, std::vector<Symbol>(5, 2));
}

TEST(Codebook, UniformOverTypeClass) {
  const Dmc ch1 = reference_channel_ch1();
  Rng rng(11);
  const int draws = 100000;
  std::map<std::vector<Symbol>, int> freq;
  const auto cb = sample_codebook(ch1, TypeDescriptor({2, 2}), draws, rng);
  for (const auto& w : cb.codewords) {
    EXPECT_EQ(type_of(w, 3), TypeDescriptor({0, 2, 2}));
    ++freq[w];
  }
  ASSERT_EQ(freq.size(), 6u);
  const double p = 1.0 / 6.0, sd = std::sqrt(draws * p * (1 - p));
  double chi2 = 0.0;
  for (const auto& [w, c] : freq) {
    EXPECT_NEAR(c, draws * p, 3 * sd + 1) << "arrangement frequency";
    chi2 += (c - draws * p) * (c - draws * p) / (draws * p);
  }
  EXPECT_LT(chi2, 20.5);  // chi-square, 5 dof, p ~ 0.001
}

TEST(Codebook, SameSeedSameCodebook) {
  const EnsembleConfig cfg{reference_channel_ch1(), TypeDescriptor({3, 5}), 8, 5, 99};
  const auto a = sample_codebook(cfg), b = sample_codebook(cfg);
  EXPECT_EQ(a.codewords, b.codewords);
  EXPECT_NEAR(a.rate(), std::log(5.0) / 8, 1e-15);
  const EnsembleConfig other{reference_channel_ch1(), TypeDescriptor({3, 5}), 8, 5, 100};
  EXPECT_NE(sample_codebook(other).codewords, a.codewords);
}

TEST(Codebook, ConfigValidation) {
  EXPECT_THROW((EnsembleConfig{reference_channel_ch1(), TypeDescriptor({3, 4}), 8, 1, 0}.validate()),
               std::invalid_argument);
  EXPECT_THROW((EnsembleConfig{reference_channel_ch1(), TypeDescriptor({8}), 8, 1, 0}.validate()),
               std::invalid_argument);
  EXPECT_THROW((EnsembleConfig{reference_channel_ch1(), TypeDescriptor({4, 4}), 8, 0, 0}.validate()),
               std::invalid_argument);
}

TEST(Transmit, DeterministicRow) {
  const Dmc d({{0.5, 0.5}, {1.0, 0.0}}, 0);
  Rng rng(1);
  const std::vector<Symbol> x(20, 1);
  EXPECT_EQ(transmit(d, x, rng), std::vector<Symbol>(20, 0));
  EXPECT_TRUE(transmit(d, std::vector<Symbol>{}, rng).empty());
}

TEST(Transmit, SilentInputFollowsNoise) {
  const Dmc ch1 = reference_channel_ch1();
  Rng rng(5);
  const int n = 100000;
  const auto y = transmit(ch1, std::vector<Symbol>(n, 0), rng);
  int ones = 0;
  for (Symbol v : y) ones += v;
  const double sd = std::sqrt(n * 0.05 * 0.95);
  EXPECT_NEAR(ones, n * 0.05, 3 * sd);
}

TEST(Likelihood, Examples) {
  const Dmc ch1 = reference_channel_ch1();
  EXPECT_NEAR(log_likelihood(ch1, std::vector<Symbol>{1}, std::vector<Symbol>{0}), std::log(0.8), 1e-15);
  EXPECT_NEAR(log_likelihood(ch1, std::vector<Symbol>{1, 2}, std::vector<Symbol>{0, 1}), 2 * std::log(0.8), 1e-15);
  const Dmc z({{0.9, 0.1}, {1.0, 0.0}}, 0);
  EXPECT_EQ(log_likelihood(z, std::vector<Symbol>{1, 1}, std::vector<Symbol>{0, 1}), -kInf);
  EXPECT_NEAR(log_noise_likelihood(ch1, std::vector<Symbol>{0}), std::log(0.95), 1e-15);
  EXPECT_NEAR(log_noise_likelihood(ch1, std::vector<Symbol>{1, 1}), 2 * std::log(0.05), 1e-15);
  EXPECT_EQ(log_noise_likelihood(ch1, std::vector<Symbol>{}), 0.0);
  EXPECT_THROW(log_likelihood(ch1, std::vector<Symbol>{1}, std::vector<Symbol>{0, 1}), std::invalid_argument);
}
