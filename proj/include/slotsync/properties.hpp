#pragma once

// Exhaustive small-instance property checks on the detector: dominance of
// the optimal partition over competitors, and inclusion of its rejection
// region in those of the sum-only and max-only rules.

#include <cstdint>
#include <span>
#include <vector>

#include "slotsync/channel.hpp"
#include "slotsync/detector.hpp"
#include "slotsync/rng.hpp"

namespace slotsync {

/// Labels of the optimal partition, indexed by lexicographic output index.
inline std::vector<std::size_t> optimal_labels(const Codebook& cb, const Dmc& dmc, const DetectorParams& p,
                                               double budget = kDefaultEnumerationBudget) {
  std::vector<std::size_t> labels;
  const std::size_t n = cb.block_length();
  for_each_output(cb, dmc, budget, [&](std::span<const Symbol>, std::uint64_t, double lq0, std::span<const double> lw) {
    labels.push_back(decide_from_logs(lw, lq0, p, n).label);
  });
  return labels;
}

/// A random competing partition. Kinds cycle through: uniform random labels;
/// the optimal partition with a random fraction relabeled; and a threshold
/// rule with random (alpha, beta) and detector kind, decoded by ML or at
/// random. The last two often meet the dominance premise, the first rarely.
inline std::vector<std::size_t> random_partition(const Codebook& cb, const Dmc& dmc, const DetectorParams& p,
                                                 std::uint64_t kind, Rng& rng,
                                                 double budget = kDefaultEnumerationBudget) {
  const std::size_t m = cb.size();
  const std::size_t n = cb.block_length();
  std::vector<std::size_t> labels;
  switch (kind % 3) {
    case 0: {
      for_each_output(cb, dmc, budget, [&](std::span<const Symbol>, std::uint64_t, double, std::span<const double>) {
        labels.push_back(rng.uniform_index(m + 1));
      });
      break;
    }
    case 1: {
      labels = optimal_labels(cb, dmc, p, budget);
      const double frac = 0.3 * rng.uniform01();
      for (auto& l : labels)
        if (rng.uniform01() < frac) l = rng.uniform_index(m + 1);
      break;
    }
    default: {
      const DetectorParams q{p.alpha + 3.0 * rng.uniform01() - 1.5, p.beta + 3.0 * rng.uniform01() - 1.5};
      const auto dk = static_cast<DetectorKind>(rng.uniform_index(3));
      const bool ml = rng.uniform01() < 0.5;
      for_each_output(cb, dmc, budget, [&](std::span<const Symbol>, std::uint64_t, double lq0,
                                           std::span<const double> lw) {
        if (rejection_margin_from_logs(lw, lq0, q, n, dk) <= 0.0)
          labels.push_back(0);
        else
          labels.push_back(ml ? ml_index(lw) : 1 + rng.uniform_index(m));
      });
      break;
    }
  }
  return labels;
}

struct InclusionTally {
  std::uint64_t outputs = 0;     // outputs examined
  std::uint64_t rejected = 0;    // outputs in the optimal rejection region
  std::uint64_t violations = 0;  // rejected by the optimal rule but not by the variant
};

/// Checks R0* within the rejection region of `variant`, over all of Y^n.
inline InclusionTally check_inclusion(const Codebook& cb, const Dmc& dmc, const DetectorParams& p, DetectorKind variant,
                                      double budget = kDefaultEnumerationBudget) {
  InclusionTally t;
  const std::size_t n = cb.block_length();
  for_each_output(cb, dmc, budget, [&](std::span<const Symbol>, std::uint64_t, double lq0, std::span<const double> lw) {
    ++t.outputs;
    if (rejection_margin_from_logs(lw, lq0, p, n, DetectorKind::Optimal) > 0.0) return;
    ++t.rejected;
    if (rejection_margin_from_logs(lw, lq0, p, n, variant) > 0.0) ++t.violations;
  });
  return t;
}

}  // namespace slotsync
