#pragma once

// Finite-alphabet probability primitives: simplex vectors, joint
// distributions, divergences, mutual information and type-class counting.
//
// Conventions used everywhere in the library:
//   0 * ln 0 = 0,  0 * ln(0/0) = 0,  p * ln(p/0) = +inf for p > 0.
// Infinite values are ordinary IEEE infinities; they are results, not errors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slotsync {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance within which a probability vector is accepted as-is.
inline constexpr double kSimplexTol = 1e-12;
/// Vectors off by more than kSimplexTol but within this are renormalized.
inline constexpr double kRenormalizeTol = 1e-9;

using Symbol = int;

/// [t]_+ with [+inf]_+ = +inf.
inline double positive_part(double t) { return t > 0.0 ? t : 0.0; }

/// p * ln(p / q) under the information-theoretic conventions.
inline double xlogx_over(double p, double q) {
  if (p <= 0.0) return 0.0;
  if (q <= 0.0) return kInf;
  return p * std::log(p / q);
}

namespace detail {

inline std::vector<double> checked_simplex(std::vector<double> probs, const char* what) {
  if (probs.empty()) throw std::invalid_argument(std::string(what) + ": empty alphabet");
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0)
      throw std::invalid_argument(std::string(what) + ": entries must be finite and nonnegative");
    total += p;
  }
  const double err = std::abs(total - 1.0);
  if (err > kRenormalizeTol)
    throw std::invalid_argument(std::string(what) + ": entries sum to " + std::to_string(total));
  if (err > kSimplexTol)
    for (double& p : probs) p /= total;
  return probs;
}

}  // namespace detail

/// A probability vector over {0, ..., size()-1}.
class Distribution {
 public:
  Distribution() : probs_{1.0} {}
  explicit Distribution(std::vector<double> probs)
      : probs_(detail::checked_simplex(std::move(probs), "Distribution")) {}

  static Distribution point_mass(std::size_t size, std::size_t at) {
    std::vector<double> p(size, 0.0);
    p.at(at) = 1.0;
    return Distribution(std::move(p));
  }
  static Distribution uniform(std::size_t size) {
    return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

/// Occurrence counts of a sequence type (composition) or a joint type.
struct TypeDescriptor {
  std::vector<std::int64_t> counts;

  TypeDescriptor() = default;
  explicit TypeDescriptor(std::vector<std::int64_t> c) : counts(std::move(c)) {
    if (counts.empty()) throw std::invalid_argument("TypeDescriptor: empty alphabet");
    for (auto v : counts)
      if (v < 0) throw std::invalid_argument("TypeDescriptor: negative count");
  }

  std::int64_t n() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }
  std::size_t size() const { return counts.size(); }

  Distribution distribution() const {
    const double total = static_cast<double>(n());
    if (total <= 0.0) throw std::invalid_argument("TypeDescriptor: block length is zero");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / total;
    return Distribution(std::move(p));
  }

  friend bool operator==(const TypeDescriptor&, const TypeDescriptor&) = default;
};

/// Type of a sequence over {0, ..., alphabet-1}.
inline TypeDescriptor type_of(std::span<const Symbol> seq, std::size_t alphabet) {
  std::vector<std::int64_t> c(alphabet, 0);
  for (Symbol s : seq) {
    if (s < 0 || static_cast<std::size_t>(s) >= alphabet)
      throw std::out_of_range("type_of: symbol outside alphabet");
    ++c[static_cast<std::size_t>(s)];
  }
  return TypeDescriptor(std::move(c));
}

/// Row-major joint distribution over X x Y. Joint types built from
/// sequences also keep their integer cell counts.
class JointDistribution {
 public:
  JointDistribution(std::size_t nx, std::size_t ny, std::vector<double> probs) : nx_(nx), ny_(ny) {
    if (nx == 0 || ny == 0) throw std::invalid_argument("JointDistribution: empty alphabet");
    if (probs.size() != nx * ny) throw std::invalid_argument("JointDistribution: shape mismatch");
    probs_ = detail::checked_simplex(std::move(probs), "JointDistribution");
  }

  static JointDistribution from_counts(std::size_t nx, std::size_t ny, std::vector<std::int64_t> counts) {
    if (counts.size() != nx * ny) throw std::invalid_argument("JointDistribution: shape mismatch");
    TypeDescriptor t(counts);
    const double n = static_cast<double>(t.n());
    if (n <= 0.0) throw std::invalid_argument("JointDistribution: zero total count");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / n;
    JointDistribution q(nx, ny, std::move(p));
    q.counts_ = std::move(t);
    return q;
  }

  /// Product distribution px (x) qy.
  static JointDistribution product(const Distribution& px, const Distribution& qy) {
    std::vector<double> p(px.size() * qy.size());
    for (std::size_t x = 0; x < px.size(); ++x)
      for (std::size_t y = 0; y < qy.size(); ++y) p[x * qy.size() + y] = px[x] * qy[y];
    return JointDistribution(px.size(), qy.size(), std::move(p));
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double operator()(std::size_t x, std::size_t y) const { return probs_[x * ny_ + y]; }
  std::span<const double> probs() const { return probs_; }
  const std::optional<TypeDescriptor>& counts() const { return counts_; }

  Distribution x_marginal() const {
    std::vector<double> m(nx_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y) m[x] += (*this)(x, y);
    return Distribution(std::move(m));
  }
  Distribution y_marginal() const {
    std::vector<double> m(ny_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
      for (std::size_t y = 0; y < ny_; ++y) m[y] += (*this)(x, y);
    return Distribution(std::move(m));
  }

  /// Q(y|x) as an nx-by-ny row-major matrix; rows with zero X-mass are uniform.
  std::vector<double> y_given_x() const {
    std::vector<double> c(probs_.size());
    for (std::size_t x = 0; x < nx_; ++x) {
      double row = 0.0;
      for (std::size_t y = 0; y < ny_; ++y) row += (*this)(x, y);
      for (std::size_t y = 0; y < ny_; ++y)
        c[x * ny_ + y] = row > 0.0 ? (*this)(x, y) / row : 1.0 / static_cast<double>(ny_);
    }
    return c;
  }
  /// Q(x|y) as an nx-by-ny row-major matrix (column y holds the conditional).
  std::vector<double> x_given_y() const {
    std::vector<double> c(probs_.size());
    for (std::size_t y = 0; y < ny_; ++y) {
      double col = 0.0;
      for (std::size_t x = 0; x < nx_; ++x) col += (*this)(x, y);
      for (std::size_t x = 0; x < nx_; ++x)
        c[x * ny_ + y] = col > 0.0 ? (*this)(x, y) / col : 1.0 / static_cast<double>(nx_);
    }
    return c;
  }

 private:
  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> probs_;
  std::optional<TypeDescriptor> counts_;
};

/// D(p || q) in nats.
inline double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: alphabet mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += xlogx_over(p[i], q[i]);
  return std::max(d, 0.0);
}

/// Conditional divergence D(q_yx || w | p) = sum_x p(x) D(q(.|x) || w(.|x)).
/// Conditionals are row-major nx-by-ny stochastic matrices.
inline double conditional_kl(std::span<const double> q_yx, std::span<const double> w,
                             const Distribution& p) {
  const std::size_t nx = p.size();
  if (nx == 0 || q_yx.size() != w.size() || q_yx.size() % nx != 0)
    throw std::invalid_argument("conditional_kl: shape mismatch");
  const std::size_t ny = q_yx.size() / nx;
  double d = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (p[x] <= 0.0) continue;
    double row = 0.0;
    for (std::size_t y = 0; y < ny; ++y) row += xlogx_over(q_yx[x * ny + y], w[x * ny + y]);
    d += p[x] * row;
  }
  return std::max(d, 0.0);
}

/// I(X;Y) under q, in nats.
inline double mutual_information(const JointDistribution& q) {
  const auto px = q.x_marginal();
  const auto qy = q.y_marginal();
  double i = 0.0;
  for (std::size_t x = 0; x < q.nx(); ++x)
    for (std::size_t y = 0; y < q.ny(); ++y) i += xlogx_over(q(x, y), px[x] * qy[y]);
  return std::max(i, 0.0);
}

/// Joint type of (x, y) over alphabets of the given sizes.
inline JointDistribution empirical_joint(std::span<const Symbol> x, std::span<const Symbol> y,
                                         std::size_t nx, std::size_t ny) {
  if (x.size() != y.size()) throw std::invalid_argument("empirical_joint: length mismatch");
  if (x.empty()) throw std::invalid_argument("empirical_joint: empty input");
  std::vector<std::int64_t> c(nx * ny, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || static_cast<std::size_t>(x[i]) >= nx || y[i] < 0 || static_cast<std::size_t>(y[i]) >= ny)
      throw std::out_of_range("empirical_joint: symbol outside alphabet");
    ++c[static_cast<std::size_t>(x[i]) * ny + static_cast<std::size_t>(y[i])];
  }
  return JointDistribution::from_counts(nx, ny, std::move(c));
}

/// Alphabet sizes inferred as (max symbol + 1).
inline JointDistribution empirical_joint(std::span<const Symbol> x, std::span<const Symbol> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("empirical_joint: empty input");
  const auto nx = static_cast<std::size_t>(*std::max_element(x.begin(), x.end())) + 1;
  const auto ny = static_cast<std::size_t>(*std::max_element(y.begin(), y.end())) + 1;
  return empirical_joint(x, y, nx, ny);
}

/// ln( n! / prod_a counts(a)! ), exact up to lgamma rounding.
inline double log_type_class_size(const TypeDescriptor& t) {
  double r = std::lgamma(static_cast<double>(t.n()) + 1.0);
  for (auto c : t.counts) r -= std::lgamma(static_cast<double>(c) + 1.0);
  return std::max(r, 0.0);
}

/// Number of ways to place n indistinguishable items in k cells, C(n+k-1, k-1).
inline double multiset_coefficient(std::int64_t n, std::int64_t k) {
  return std::round(std::exp(std::lgamma(static_cast<double>(n + k)) - std::lgamma(static_cast<double>(n + 1)) -
                             std::lgamma(static_cast<double>(k))));
}

namespace detail {

// Calls fn(counts) for every composition of n into counts.size() parts, in
// reverse-lexicographic order of the leading coordinates.
template <class Fn>
void for_each_composition(std::vector<std::int64_t>& counts, std::size_t pos, std::int64_t remaining, Fn& fn) {
  if (pos + 1 == counts.size()) {
    counts[pos] = remaining;
    fn(static_cast<const std::vector<std::int64_t>&>(counts));
    return;
  }
  for (std::int64_t c = remaining; c >= 0; --c) {
    counts[pos] = c;
    for_each_composition(counts, pos + 1, remaining - c, fn);
  }
}

}  // namespace detail

/// Visits every vector of `parts` nonnegative integers summing to `total`.
template <class Fn>
void for_each_composition(std::size_t parts, std::int64_t total, Fn&& fn) {
  if (parts == 0) return;
  std::vector<std::int64_t> counts(parts, 0);
  detail::for_each_composition(counts, 0, total, fn);
}

/// All joint types of block length n on an nx-by-ny alphabet.
inline std::vector<JointDistribution> enumerate_joint_types(std::size_t nx, std::size_t ny, std::int64_t n) {
  if (nx == 0 || ny == 0 || n < 1) throw std::invalid_argument("enumerate_joint_types: bad sizes");
  std::vector<JointDistribution> out;
  for_each_composition(nx * ny, n, [&](const std::vector<std::int64_t>& c) {
    out.push_back(JointDistribution::from_counts(nx, ny, c));
  });
  return out;
}

/// All distributions on `dim` letters whose entries are multiples of 1/k.
inline std::vector<Distribution> simplex_grid(std::size_t dim, std::int64_t k) {
  if (dim == 0 || k < 1) throw std::invalid_argument("simplex_grid: bad sizes");
  std::vector<Distribution> out;
  for_each_composition(dim, k, [&](const std::vector<std::int64_t>& c) {
    std::vector<double> p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p[i] = static_cast<double>(c[i]) / static_cast<double>(k);
    out.emplace_back(std::move(p));
  });
  return out;
}

}  // namespace slotsync
