#pragma once

// Discrete memoryless channel with a silent input symbol, constant-composition
// random codebooks, and forward simulation.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slotsync/probability.hpp"
#include "slotsync/rng.hpp"

namespace slotsync {

/// W(y|x) for x in X0 (row index), with one row designated silent.
/// Codewords are written with row indices of the non-silent letters.
class Dmc {
 public:
  Dmc(std::vector<std::vector<double>> rows, std::size_t silent_index) : silent_(silent_index) {
    if (rows.empty() || rows.front().empty()) throw std::invalid_argument("Dmc: empty channel matrix");
    if (silent_index >= rows.size()) throw std::invalid_argument("Dmc: silent index out of range");
    if (rows.size() < 2) throw std::invalid_argument("Dmc: input alphabet without the silent symbol is empty");
    ny_ = rows.front().size();
    for (std::size_t x = 0; x < rows.size(); ++x) {
      if (rows[x].size() != ny_) throw std::invalid_argument("Dmc: ragged channel matrix");
      try {
        rows_.emplace_back(rows[x]);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("Dmc: row " + std::to_string(x) + " is not a distribution (" + e.what() + ")");
      }
    }
    for (std::size_t x = 0; x < rows_.size(); ++x)
      if (x != silent_) inputs_.push_back(static_cast<Symbol>(x));
    log_w_.resize(rows_.size() * ny_);
    for (std::size_t x = 0; x < rows_.size(); ++x)
      for (std::size_t y = 0; y < ny_; ++y)
        log_w_[x * ny_ + y] = rows_[x][y] > 0.0 ? std::log(rows_[x][y]) : -kInf;
  }

  std::size_t num_inputs_with_silent() const { return rows_.size(); }
  std::size_t num_outputs() const { return ny_; }
  Symbol silent() const { return static_cast<Symbol>(silent_); }

  /// Non-silent letters X = X0 \ {0}, in row order. Compositions index this list.
  std::span<const Symbol> input_letters() const { return inputs_; }
  std::size_t num_inputs() const { return inputs_.size(); }

  const Distribution& row(Symbol x) const { return rows_.at(static_cast<std::size_t>(x)); }
  const Distribution& q0() const { return rows_[silent_]; }
  double w(Symbol x, Symbol y) const { return rows_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]; }
  double log_w(Symbol x, Symbol y) const {
    return log_w_[static_cast<std::size_t>(x) * ny_ + static_cast<std::size_t>(y)];
  }
  double log_q0(Symbol y) const { return log_w(silent(), y); }

  /// W restricted to X (non-silent rows), row-major |X|-by-|Y|.
  std::vector<double> codeword_rows() const {
    std::vector<double> out;
    for (Symbol x : inputs_)
      for (std::size_t y = 0; y < ny_; ++y) out.push_back(w(x, static_cast<Symbol>(y)));
    return out;
  }

  bool full_support() const { return !first_zero_entry().has_value(); }

  /// (row, column) of the first zero transition probability, if any.
  std::optional<std::pair<std::size_t, std::size_t>> first_zero_entry() const {
    for (std::size_t x = 0; x < rows_.size(); ++x)
      for (std::size_t y = 0; y < ny_; ++y)
        if (rows_[x][y] <= 0.0) return std::pair{x, y};
    return std::nullopt;
  }

  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> m;
    for (const auto& r : rows_) m.emplace_back(r.probs().begin(), r.probs().end());
    return m;
  }

 private:
  std::vector<Distribution> rows_;
  std::size_t silent_;
  std::size_t ny_ = 0;
  std::vector<Symbol> inputs_;
  std::vector<double> log_w_;
};

inline Dmc validate_dmc(std::vector<std::vector<double>> rows, std::size_t silent_index) {
  return Dmc(std::move(rows), silent_index);
}

/// The repository's reference channel: X0 = {0,1,2}, Y = {0,1}.
inline Dmc reference_channel_ch1() { return Dmc({{0.95, 0.05}, {0.8, 0.2}, {0.2, 0.8}}, 0); }

struct Codebook {
  std::vector<std::vector<Symbol>> codewords;
  TypeDescriptor composition;  // over Dmc::input_letters()

  std::size_t size() const { return codewords.size(); }
  std::size_t block_length() const { return codewords.empty() ? 0 : codewords.front().size(); }
  double rate() const { return std::log(static_cast<double>(size())) / static_cast<double>(block_length()); }
};

struct EnsembleConfig {
  Dmc dmc;
  TypeDescriptor p;  // composition over Dmc::input_letters(), sums to n
  std::size_t n = 0;
  std::size_t m = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (p.size() != dmc.num_inputs()) throw std::invalid_argument("EnsembleConfig: composition size mismatch");
    if (static_cast<std::size_t>(p.n()) != n) throw std::invalid_argument("EnsembleConfig: composition must sum to n");
    if (n == 0) throw std::invalid_argument("EnsembleConfig: n must be positive");
    if (m < 1) throw std::invalid_argument("EnsembleConfig: M must be at least 1");
  }
};

/// The fixed-composition multiset in sorted order; shuffling it gives a uniform draw from T_P.
inline std::vector<Symbol> composition_sequence(const Dmc& dmc, const TypeDescriptor& p) {
  if (p.size() != dmc.num_inputs()) throw std::invalid_argument("composition size mismatch");
  std::vector<Symbol> seq;
  for (std::size_t i = 0; i < p.size(); ++i) seq.insert(seq.end(), static_cast<std::size_t>(p.counts[i]), dmc.input_letters()[i]);
  return seq;
}

inline void shuffle(std::vector<Symbol>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.uniform_index(i)]);
}

inline Codebook sample_codebook(const Dmc& dmc, const TypeDescriptor& p, std::size_t m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_codebook: M must be at least 1");
  Codebook cb{{}, p};
  const auto base = composition_sequence(dmc, p);
  cb.codewords.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto cw = base;
    shuffle(cw, rng);
    cb.codewords.push_back(std::move(cw));
  }
  return cb;
}

inline Codebook sample_codebook(const EnsembleConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  return sample_codebook(cfg.dmc, cfg.p, cfg.m, rng);
}

inline std::vector<Symbol> transmit(const Dmc& dmc, std::span<const Symbol> x, Rng& rng) {
  std::vector<Symbol> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || static_cast<std::size_t>(x[i]) >= dmc.num_inputs_with_silent())
      throw std::out_of_range("transmit: unknown input letter");
    y[i] = static_cast<Symbol>(rng.categorical(dmc.row(x[i]).probs()));
  }
  return y;
}

/// sum_i ln W(y_i | x_i); -inf when some factor vanishes.
inline double log_likelihood(const Dmc& dmc, std::span<const Symbol> x, std::span<const Symbol> y) {
  if (x.size() != y.size()) throw std::invalid_argument("log_likelihood: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += dmc.log_w(x[i], y[i]);
  return s;
}

/// sum_i ln Q0(y_i).
inline double log_noise_likelihood(const Dmc& dmc, std::span<const Symbol> y) {
  double s = 0.0;
  for (Symbol v : y) s += dmc.log_q0(v);
  return s;
}

}  // namespace slotsync
