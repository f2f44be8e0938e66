#pragma once

// Optimal detection/decoding for slotted asynchronous transmission.
//
// Rejection region (y is declared pure noise):
//
//   e^{n alpha} sum_m W(y|x_m) + max_m W(y|x_m)  <=  e^{n beta} Q0(y)
//
// Otherwise y is ML-decoded. Ties on the boundary go to Reject; ML ties go
// to the lowest message index. All arithmetic is in the log domain.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "slotsync/channel.hpp"
#include "slotsync/logsum.hpp"

namespace slotsync {

struct DetectorParams {
  double alpha = 0.0;  // nats/symbol
  double beta = 0.0;   // nats/symbol
};

enum class DetectorKind {
  Optimal,         // sum and max terms
  NeymanPearson,   // sum term only
  MaxOnly,         // max term only, silence as an extra codeword
};

inline const char* to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::Optimal: return "optimal";
    case DetectorKind::NeymanPearson: return "neyman-pearson";
    case DetectorKind::MaxOnly: return "max";
  }
  return "?";
}

/// Reject, or a 1-based message index. The label matches a partition
/// R_0, R_1, ..., R_M of the output space.
struct Decision {
  std::size_t label = 0;

  static Decision reject() { return {0}; }
  static Decision message(std::size_t m) { return {m}; }
  bool rejected() const { return label == 0; }
  std::size_t index() const { return label; }

  friend bool operator==(const Decision&, const Decision&) = default;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultEnumerationBudget = 2e7;

/// Margin from per-codeword log-likelihoods; <= 0 means reject.
inline double rejection_margin_from_logs(std::span<const double> log_w, double log_q0, const DetectorParams& p,
                                         std::size_t n, DetectorKind kind = DetectorKind::Optimal) {
  const double nn = static_cast<double>(n);
  double mx = -kInf;
  for (double l : log_w) mx = std::max(mx, l);
  double lhs = 0.0;
  switch (kind) {
    case DetectorKind::Optimal: lhs = log_add(nn * p.alpha + log_sum_exp(log_w), mx); break;
    case DetectorKind::NeymanPearson: lhs = nn * p.alpha + log_sum_exp(log_w); break;
    case DetectorKind::MaxOnly: lhs = mx; break;
  }
  const double rhs = nn * p.beta + log_q0;
  if (lhs == -kInf && rhs == -kInf) return 0.0;
  if (rhs == -kInf) return kInf;
  return lhs - rhs;
}

/// Lowest-index argmax of the log-likelihoods, 1-based.
inline std::size_t ml_index(std::span<const double> log_w) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < log_w.size(); ++m)
    if (log_w[m] > log_w[best]) best = m;
  return best + 1;
}

inline Decision decide_from_logs(std::span<const double> log_w, double log_q0, const DetectorParams& p, std::size_t n,
                                 DetectorKind kind = DetectorKind::Optimal) {
  if (rejection_margin_from_logs(log_w, log_q0, p, n, kind) <= 0.0) return Decision::reject();
  return Decision::message(ml_index(log_w));
}

namespace detail {

inline void check_lengths(const Codebook& cb, std::span<const Symbol> y) {
  if (cb.size() == 0) throw std::invalid_argument("detector: empty codebook");
  if (cb.block_length() != y.size()) throw std::invalid_argument("detector: output length differs from block length");
}

inline std::vector<double> codeword_log_likelihoods(const Codebook& cb, const Dmc& dmc, std::span<const Symbol> y) {
  check_lengths(cb, y);
  std::vector<double> lw(cb.size());
  for (std::size_t m = 0; m < cb.size(); ++m) lw[m] = log_likelihood(dmc, cb.codewords[m], y);
  return lw;
}

inline void check_params(const DetectorParams& p) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta))
    throw std::invalid_argument("DetectorParams: alpha and beta must be finite");
}

}  // namespace detail

inline double rejection_margin(const Codebook& cb, const Dmc& dmc, std::span<const Symbol> y, const DetectorParams& p) {
  detail::check_params(p);
  const auto lw = detail::codeword_log_likelihoods(cb, dmc, y);
  return rejection_margin_from_logs(lw, log_noise_likelihood(dmc, y), p, y.size());
}

inline Decision detect_and_decode(const Codebook& cb, const Dmc& dmc, std::span<const Symbol> y,
                                  const DetectorParams& p) {
  detail::check_params(p);
  const auto lw = detail::codeword_log_likelihoods(cb, dmc, y);
  return decide_from_logs(lw, log_noise_likelihood(dmc, y), p, y.size(), DetectorKind::Optimal);
}

inline Decision detect_np_variant(const Codebook& cb, const Dmc& dmc, std::span<const Symbol> y,
                                  const DetectorParams& p) {
  detail::check_params(p);
  const auto lw = detail::codeword_log_likelihoods(cb, dmc, y);
  return decide_from_logs(lw, log_noise_likelihood(dmc, y), p, y.size(), DetectorKind::NeymanPearson);
}

inline Decision detect_max_variant(const Codebook& cb, const Dmc& dmc, std::span<const Symbol> y,
                                   const DetectorParams& p) {
  detail::check_params(p);
  const auto lw = detail::codeword_log_likelihoods(cb, dmc, y);
  return decide_from_logs(lw, log_noise_likelihood(dmc, y), p, y.size(), DetectorKind::MaxOnly);
}

/// Number of output sequences |Y|^n as a double (no overflow).
inline double output_space_size(const Dmc& dmc, std::size_t n) {
  return std::pow(static_cast<double>(dmc.num_outputs()), static_cast<double>(n));
}

/// Visits every y in Y^n in lexicographic order. The visitor receives
/// (y, lexicographic index, ln Q0(y), ln W(y|x_m) for m = 1..M). Prefix
/// log-likelihoods are accumulated incrementally.
template <class Visitor>
void for_each_output(const Codebook& cb, const Dmc& dmc, double budget, Visitor&& visit) {
  const std::size_t n = cb.block_length();
  const std::size_t m = cb.size();
  if (m == 0 || n == 0) throw std::invalid_argument("for_each_output: empty codebook");
  if (output_space_size(dmc, n) > budget)
    throw BudgetExceeded("output space |Y|^n = " + std::to_string(output_space_size(dmc, n)) +
                         " exceeds enumeration budget " + std::to_string(budget));
  const std::size_t ny = dmc.num_outputs();
  // acc[k] holds prefix sums after k symbols: slot 0 is noise, 1..M codewords.
  std::vector<std::vector<double>> acc(n + 1, std::vector<double>(m + 1, 0.0));
  std::vector<Symbol> y(n, 0);
  std::vector<std::size_t> digit(n + 1, 0);
  std::uint64_t index = 0;
  std::size_t depth = 0;
  while (true) {
    if (depth == n) {
      const std::span<const double> row(acc[n]);
      visit(std::span<const Symbol>(y), index, row[0], row.subspan(1));
      ++index;
      --depth;
      ++digit[depth];
      continue;
    }
    if (digit[depth] == ny) {
      if (depth == 0) break;
      digit[depth] = 0;
      --depth;
      ++digit[depth];
      continue;
    }
    const auto sym = static_cast<Symbol>(digit[depth]);
    y[depth] = sym;
    acc[depth + 1][0] = acc[depth][0] + dmc.log_q0(sym);
    for (std::size_t k = 0; k < m; ++k)
      acc[depth + 1][k + 1] = acc[depth][k + 1] + dmc.log_w(cb.codewords[k][depth], sym);
    ++depth;
  }
}

struct ErrorProbabilities {
  double fa = 0.0;
  double md = 0.0;
  double de = 0.0;
};

/// Accumulates FA/MD/DE of a labeled partition of Y^n.
class PartitionTally {
 public:
  explicit PartitionTally(std::size_t m) : m_(m) {}

  void add(std::size_t label, double log_q0, std::span<const double> log_w) {
    if (label != 0) fa_.add_log(log_q0);
    for (std::size_t k = 0; k < log_w.size(); ++k) {
      if (label == 0) md_.add_log(log_w[k]);
      if (label != k + 1) de_.add_log(log_w[k]);
    }
  }

  ErrorProbabilities result() const {
    const double inv_m = 1.0 / static_cast<double>(m_);
    return {std::min(fa_.value(), 1.0), std::min(md_.value() * inv_m, 1.0), std::min(de_.value() * inv_m, 1.0)};
  }

 private:
  std::size_t m_;
  LogSumAccumulator fa_, md_, de_;
};

/// Exact P_FA, P_MD, P_DE of a codebook by enumerating Y^n.
inline ErrorProbabilities exact_error_probabilities(const Codebook& cb, const Dmc& dmc, const DetectorParams& p,
                                                    DetectorKind kind = DetectorKind::Optimal,
                                                    double budget = kDefaultEnumerationBudget) {
  detail::check_params(p);
  const std::size_t n = cb.block_length();
  PartitionTally tally(cb.size());
  for_each_output(cb, dmc, budget, [&](std::span<const Symbol>, std::uint64_t, double lq0, std::span<const double> lw) {
    tally.add(decide_from_logs(lw, lq0, p, n, kind).label, lq0, lw);
  });
  return tally.result();
}

/// Maps an output sequence to a label in {0 (reject), 1..M}.
using PartitionLabeler = std::function<std::size_t(std::span<const Symbol> y, std::uint64_t index)>;

struct DominanceReport {
  ErrorProbabilities optimal;
  ErrorProbabilities competitor;
  bool premise = false;  // competitor FA and MD both no larger than the optimal rule's
  bool lemma_holds = true;
};

/// Compares the optimal rule with an arbitrary competing partition.
inline DominanceReport dominance_check(const Codebook& cb, const Dmc& dmc, const DetectorParams& p,
                                       const PartitionLabeler& competitor, double budget = kDefaultEnumerationBudget) {
  detail::check_params(p);
  const std::size_t n = cb.block_length();
  PartitionTally star(cb.size()), other(cb.size());
  for_each_output(cb, dmc, budget, [&](std::span<const Symbol> y, std::uint64_t idx, double lq0,
                                       std::span<const double> lw) {
    star.add(decide_from_logs(lw, lq0, p, n).label, lq0, lw);
    const std::size_t label = competitor(y, idx);
    if (label > cb.size()) throw std::out_of_range("dominance_check: competitor label out of range");
    other.add(label, lq0, lw);
  });
  DominanceReport r{star.result(), other.result()};
  r.premise = r.competitor.fa <= r.optimal.fa && r.competitor.md <= r.optimal.md;
  r.lemma_holds = !r.premise || r.optimal.de <= r.competitor.de + 1e-12;
  return r;
}

}  // namespace slotsync
