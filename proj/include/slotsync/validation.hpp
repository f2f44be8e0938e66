#pragma once

// Ensemble-averaged error probabilities: plain Monte Carlo, exact-over-y
// averages over sampled codebooks, and full enumeration of tiny ensembles.
// Plus the joint-type enumerator and a least-squares exponent fit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "slotsync/channel.hpp"
#include "slotsync/detector.hpp"
#include "slotsync/logsum.hpp"
#include "slotsync/probability.hpp"
#include "slotsync/rng.hpp"

namespace slotsync {

/// N(Q|y): codewords whose joint type with y is q. `q` must carry counts
/// with total n.
inline std::size_t count_joint_type(const Codebook& cb, const Dmc& dmc, std::span<const Symbol> y,
                                    const JointDistribution& q) {
  if (!q.counts() || static_cast<std::size_t>(q.counts()->n()) != y.size())
    throw std::invalid_argument("count_joint_type: joint type denominator differs from n");
  if (q.nx() != dmc.num_inputs() || q.ny() != dmc.num_outputs())
    throw std::invalid_argument("count_joint_type: joint type shape does not match the channel");
  const auto& letters = dmc.input_letters();
  std::vector<std::int64_t> cell(q.nx() * q.ny());
  std::size_t hits = 0;
  for (const auto& x : cb.codewords) {
    if (x.size() != y.size()) throw std::invalid_argument("count_joint_type: length mismatch");
    std::fill(cell.begin(), cell.end(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto it = std::find(letters.begin(), letters.end(), x[i]);
      if (it == letters.end()) throw std::invalid_argument("count_joint_type: silent or unknown letter in codeword");
      ++cell[static_cast<std::size_t>(it - letters.begin()) * q.ny() + static_cast<std::size_t>(y[i])];
    }
    if (cell == q.counts()->counts) ++hits;
  }
  return hits;
}

struct ErrorEstimates {
  double p_fa = 0.0, p_md = 0.0, p_de = 0.0;
  double se_fa = 0.0, se_md = 0.0, se_de = 0.0;
  std::uint64_t trials = 0;  // trials, codebooks, or enumerated codebooks
  std::string method;        // "monte-carlo" | "exact-y" | "exact-full"
};

namespace detail {

inline double binomial_stderr(double p, std::uint64_t n) {
  return n > 0 ? std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n)) : 0.0;
}

}  // namespace detail

/// Each trial draws a fresh codebook, one pure-noise output and one output
/// for a uniformly drawn message. Trial t uses stream t of `rng`.
inline ErrorEstimates estimate_probabilities(const EnsembleConfig& cfg, const DetectorParams& p, std::uint64_t trials,
                                             const Rng& rng) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("estimate_probabilities: trials must be >= 1");
  std::uint64_t fa = 0, md = 0, de = 0;
  const std::vector<Symbol> silence(cfg.n, cfg.dmc.silent());
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng r = rng.split(t);
    const Codebook cb = sample_codebook(cfg.dmc, cfg.p, cfg.m, r);
    const auto y0 = transmit(cfg.dmc, silence, r);
    if (!detect_and_decode(cb, cfg.dmc, y0, p).rejected()) ++fa;
    const std::size_t msg = r.uniform_index(cfg.m);
    const auto y1 = transmit(cfg.dmc, cb.codewords[msg], r);
    const Decision d = detect_and_decode(cb, cfg.dmc, y1, p);
    if (d.rejected()) ++md;
    if (d.index() != msg + 1) ++de;
  }
  ErrorEstimates e;
  const double n = static_cast<double>(trials);
  e.p_fa = fa / n;
  e.p_md = md / n;
  e.p_de = de / n;
  e.se_fa = detail::binomial_stderr(e.p_fa, trials);
  e.se_md = detail::binomial_stderr(e.p_md, trials);
  e.se_de = detail::binomial_stderr(e.p_de, trials);
  e.trials = trials;
  e.method = "monte-carlo";
  return e;
}

/// Exact over y for each sampled codebook; codebook i uses stream i of `rng`.
/// Standard errors are across codebooks.
inline ErrorEstimates exact_y_average(const EnsembleConfig& cfg, const DetectorParams& p, std::uint64_t codebooks,
                                      const Rng& rng, double budget = kDefaultEnumerationBudget) {
  cfg.validate();
  if (codebooks < 1) throw std::invalid_argument("exact_y_average: need at least one codebook");
  if (output_space_size(cfg.dmc, cfg.n) > budget)
    throw BudgetExceeded("exact_y_average: |Y|^n exceeds the enumeration budget");
  std::vector<ErrorProbabilities> per(codebooks);
  for (std::uint64_t i = 0; i < codebooks; ++i) {
    Rng r = rng.split(i);
    const Codebook cb = sample_codebook(cfg.dmc, cfg.p, cfg.m, r);
    per[i] = exact_error_probabilities(cb, cfg.dmc, p, DetectorKind::Optimal, budget);
  }
  // Means in the log domain so values far below 1e-300 survive.
  auto mean_se = [&](auto field) {
    LogSumAccumulator acc;
    for (const auto& e : per) acc.add(field(e));
    const double k = static_cast<double>(codebooks);
    const double mean = acc.value() / k;
    double ss = 0.0;
    for (const auto& e : per) ss += (field(e) - mean) * (field(e) - mean);
    const double se = codebooks > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
    return std::pair{mean, se};
  };
  ErrorEstimates out;
  std::tie(out.p_fa, out.se_fa) = mean_se([](const ErrorProbabilities& e) { return e.fa; });
  std::tie(out.p_md, out.se_md) = mean_se([](const ErrorProbabilities& e) { return e.md; });
  std::tie(out.p_de, out.se_de) = mean_se([](const ErrorProbabilities& e) { return e.de; });
  out.trials = codebooks;
  out.method = "exact-y";
  return out;
}

inline constexpr double kFullOracleBudget = 1e7;

/// All |T_P|^M codebooks with uniform weight, each evaluated exactly over y.
inline ErrorEstimates exact_full_oracle(const EnsembleConfig& cfg, const DetectorParams& p,
                                        double budget = kFullOracleBudget) {
  cfg.validate();
  std::vector<std::vector<Symbol>> type_class;
  auto seq = composition_sequence(cfg.dmc, cfg.p);
  std::sort(seq.begin(), seq.end());
  do type_class.push_back(seq);
  while (std::next_permutation(seq.begin(), seq.end()));

  const double books = std::pow(static_cast<double>(type_class.size()), static_cast<double>(cfg.m));
  if (books * output_space_size(cfg.dmc, cfg.n) > budget)
    throw BudgetExceeded("exact_full_oracle: |T_P|^M |Y|^n = " + std::to_string(books * output_space_size(cfg.dmc, cfg.n)) +
                         " exceeds budget " + std::to_string(budget));

  LogSumAccumulator fa, md, de;
  std::vector<std::size_t> pick(cfg.m, 0);
  Codebook cb{std::vector<std::vector<Symbol>>(cfg.m), cfg.p};
  std::uint64_t count = 0;
  while (true) {
    for (std::size_t k = 0; k < cfg.m; ++k) cb.codewords[k] = type_class[pick[k]];
    const auto e = exact_error_probabilities(cb, cfg.dmc, p, DetectorKind::Optimal, budget);
    fa.add(e.fa);
    md.add(e.md);
    de.add(e.de);
    ++count;
    std::size_t k = 0;
    while (k < cfg.m && ++pick[k] == type_class.size()) pick[k++] = 0;
    if (k == cfg.m) break;
  }
  ErrorEstimates out;
  const double c = static_cast<double>(count);
  out.p_fa = fa.value() / c;
  out.p_md = md.value() / c;
  out.p_de = de.value() / c;
  out.trials = count;
  out.method = "exact-full";
  return out;
}

struct ExponentFit {
  std::vector<std::pair<double, double>> points;  // (n, -ln p / n)
  double slope = 0.0;                             // nats/symbol
  double intercept = 0.0;
  double residual = 0.0;                          // RMS of the -ln p fit
};

struct LineFit {
  double slope = 0.0, intercept = 0.0, residual = 0.0;
};

/// Ordinary least squares y = intercept + slope x; residual is the RMS error.
inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need matching series of >= 2 points");
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / k;
    my += y[i] / k;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("least_squares: abscissae must differ");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / k);
  return f;
}

/// Least squares of -ln p against n; the slope estimates the exponent.
inline ExponentFit fit_exponent(std::span<const std::pair<double, double>> series) {
  if (series.size() < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");
  ExponentFit f;
  std::vector<double> xs, ys;
  for (const auto& [n, p] : series) {
    if (!(p > 0.0)) throw std::invalid_argument("fit_exponent: probability must be positive at n = " + std::to_string(n));
    f.points.emplace_back(n, -std::log(p) / n);
    xs.push_back(n);
    ys.push_back(-std::log(p));
  }
  const LineFit l = least_squares(xs, ys);
  f.slope = l.slope;
  f.intercept = l.intercept;
  f.residual = l.residual;
  return f;
}

}  // namespace slotsync
