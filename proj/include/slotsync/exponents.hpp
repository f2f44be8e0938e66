#pragma once

// Single-letter random-coding exponents of the optimal detector/decoder for
// constant-composition codes of composition P and rate R:
//
//   E_FA = min{E_A, E_B},   E_MD,   E_DE = min{E_1, E_2, E_MD}.
//
// Everything reduces to functions of an output distribution Q_Y evaluated on
// the coupling family of transport.hpp, followed by a search over the
// |Y|-simplex.
//
// Notation in comments: t = [alpha]_+ - beta, Delta = alpha - beta,
// RD(Delta;Q_Y) the distortion-constrained minimum mutual information and
// DR(R;Q_Y) its inverse.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slotsync/channel.hpp"
#include "slotsync/probability.hpp"
#include "slotsync/search.hpp"
#include "slotsync/transport.hpp"

namespace slotsync {

class ExponentProblem {
 public:
  ExponentProblem(Dmc dmc, Distribution p, double rate, double alpha, double beta, SearchOptions search = {})
      : dmc_(std::move(dmc)), p_(std::move(p)), rate_(rate), alpha_(alpha), beta_(beta), search_(search) {
    if (const auto z = dmc_.first_zero_entry()) {
      std::ostringstream os;
      os << "exponent engine requires a full-support channel: W(y=" << z->second << "|x=" << z->first << ") = 0";
      throw std::invalid_argument(os.str());
    }
    if (p_.size() != dmc_.num_inputs()) throw std::invalid_argument("ExponentProblem: composition size mismatch");
    if (!std::isfinite(rate_) || rate_ < 0.0) throw std::invalid_argument("ExponentProblem: rate must be finite and >= 0");
    if (!std::isfinite(alpha_) || !std::isfinite(beta_))
      throw std::invalid_argument("ExponentProblem: alpha and beta must be finite");
    const std::size_t ny = dmc_.num_outputs();
    for (Symbol x : dmc_.input_letters())
      for (std::size_t y = 0; y < ny; ++y) {
        const auto yy = static_cast<Symbol>(y);
        log_w_.push_back(dmc_.log_w(x, yy));
        d_.push_back(dmc_.log_q0(yy) - dmc_.log_w(x, yy));
      }
  }

  const Dmc& dmc() const { return dmc_; }
  const Distribution& p() const { return p_; }
  double rate() const { return rate_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const SearchOptions& search() const { return search_; }
  std::size_t nx() const { return p_.size(); }
  std::size_t ny() const { return dmc_.num_outputs(); }

  /// [alpha]_+ - beta.
  double threshold() const { return positive_part(alpha_) - beta_; }

  /// d(x,y) = ln Q0(y)/W(y|x) over X x Y, row-major.
  std::span<const double> distortion_matrix() const { return d_; }
  std::span<const double> log_w_matrix() const { return log_w_; }

  ExponentProblem with(double rate, double alpha, double beta) const {
    return ExponentProblem(dmc_, p_, rate, alpha, beta, search_);
  }

 private:
  Dmc dmc_;
  Distribution p_;
  double rate_, alpha_, beta_;
  SearchOptions search_;
  std::vector<double> d_, log_w_;
};

/// D(Q) = E_Q ln[Q0(Y)/W(Y|X)] for a joint over X x Y.
inline double distortion_of(const JointDistribution& q, const Dmc& dmc) {
  if (q.nx() != dmc.num_inputs() || q.ny() != dmc.num_outputs())
    throw std::invalid_argument("distortion_of: joint shape does not match the channel");
  double s = 0.0;
  for (std::size_t x = 0; x < q.nx(); ++x)
    for (std::size_t y = 0; y < q.ny(); ++y) {
      if (q(x, y) <= 0.0) continue;
      const Symbol xs = dmc.input_letters()[x];
      const auto ys = static_cast<Symbol>(y);
      s += q(x, y) * (dmc.log_q0(ys) - dmc.log_w(xs, ys));
    }
  return s;
}

/// Quantities that depend on the problem and one output distribution Q_Y.
class OutputAnalysis {
 public:
  OutputAnalysis(const ExponentProblem& prob, const Distribution& qy)
      : family_(prob.p(), qy, prob.distortion_matrix(), prob.log_w_matrix()),
        independent_(family_.at(0.0)),
        tilted_(family_.at(1.0)),
        noise_divergence_(kl_divergence(qy, prob.dmc().q0())) {}

  const CouplingFamily& family() const { return family_; }
  /// P x Q_Y.
  const Coupling& independent() const { return independent_; }
  /// Minimizer of I + D over Pi(P, Q_Y); also the minimizer of D(Q || P x W).
  const Coupling& tilted() const { return tilted_; }
  double r1() const { return tilted_.information; }
  double d1() const { return tilted_.distortion; }
  /// D(Q_Y || Q0).
  double noise_divergence() const { return noise_divergence_; }

  /// RD(delta; Q_Y); +inf when no coupling has E d <= delta.
  double rate_at(double delta) const {
    if (delta >= independent_.distortion) return 0.0;
    const auto c = family_.with_distortion(delta);
    return c ? c->information : kInf;
  }

  /// DR(r; Q_Y) = min E d subject to I <= r.
  double distortion_at_rate(double r) const { return family_.with_information(r).distortion; }

  /// min of I + D subject to I <= r.
  double mu(double r) const {
    if (tilted_.information <= r) return tilted_.information + tilted_.distortion;
    return r + distortion_at_rate(r);
  }

 private:
  CouplingFamily family_;
  Coupling independent_;
  Coupling tilted_;
  double noise_divergence_;
};

inline double rate_vs_distortion(double delta, const Distribution& qy, const ExponentProblem& prob) {
  return OutputAnalysis(prob, qy).rate_at(delta);
}

inline double distortion_vs_rate(double r, const Distribution& qy, const ExponentProblem& prob) {
  if (r < 0.0) throw std::invalid_argument("distortion_vs_rate: negative rate");
  return OutputAnalysis(prob, qy).distortion_at_rate(r);
}

inline double mu_of(const Distribution& qy, double r, const ExponentProblem& prob) {
  if (r < 0.0) throw std::invalid_argument("mu_of: negative rate");
  return OutputAnalysis(prob, qy).mu(r);
}

struct RateDistortionPoint {
  double r1 = 0.0;
  double d1 = 0.0;
};

/// (I, D) at the minimizer of I + D with Y-marginal Q_Y. The minimizer is
/// unique (strict convexity on the coupling polytope).
inline RateDistortionPoint r1_d1(const Distribution& qy, const ExponentProblem& prob) {
  const OutputAnalysis a(prob, qy);
  return {a.r1(), a.d1()};
}

inline double r_tilde(const OutputAnalysis& a, double delta, double r) {
  if (delta > a.mu(r) - r) return 0.0;
  return positive_part(a.rate_at(delta) - r);
}

/// RD(delta;Q_Y) - r when delta <= mu(Q_Y,r) - r, else 0.
inline double r_tilde(double delta, double r, const Distribution& qy, const ExponentProblem& prob) {
  return r_tilde(OutputAnalysis(prob, qy), delta, r);
}

/// R_0(Q_Y): min over couplings of max{I, I + v}, in closed form.
inline double md_threshold_rate(const OutputAnalysis& a, const ExponentProblem& prob) {
  const double t = prob.threshold();
  const double rt = a.rate_at(t);
  const double branch = t < a.d1() ? a.r1() + a.d1() + prob.beta() - prob.alpha() : rt + positive_part(-prob.alpha());
  return std::min(rt, branch);
}

inline double md_threshold_rate(const Distribution& qy, const ExponentProblem& prob) {
  return md_threshold_rate(OutputAnalysis(prob, qy), prob);
}

// ---------------------------------------------------------------------------
// Exponents

struct ExponentValue {
  double value = kInf;
  bool feasible = false;
  std::vector<double> output_distribution;  // minimizing Q_Y
  std::vector<double> conditional;          // minimizing Q_{Y|X} (row-major |X| x |Y|), when applicable
};

namespace detail {

inline std::vector<double> conditional_of(const Coupling& c, const Distribution& p, std::size_t ny) {
  std::vector<double> out(c.q.size());
  for (std::size_t x = 0; x < p.size(); ++x)
    for (std::size_t y = 0; y < ny; ++y)
      out[x * ny + y] = p[x] > 0.0 ? c.q[x * ny + y] / p[x] : 1.0 / static_cast<double>(ny);
  return out;
}

inline Distribution as_distribution(const std::vector<double>& v) {
  std::vector<double> w(v);
  double s = 0.0;
  for (double& x : w) {
    x = std::max(x, 0.0);
    s += x;
  }
  for (double& x : w) x /= s;
  return Distribution(std::move(w));
}

// Outer search over Q_Y for objectives that decompose as (value, coupling).
template <class Inner>
ExponentValue search_output(const ExponentProblem& prob, Inner inner) {
  auto objective = [&](const std::vector<double>& q) {
    const OutputAnalysis a(prob, as_distribution(q));
    return inner(a).first;
  };
  const SearchResult r = minimize_on_simplex(prob.ny(), objective, prob.search());
  ExponentValue out;
  out.value = r.value;
  out.feasible = r.feasible();
  out.output_distribution = r.point;
  if (out.feasible) {
    const OutputAnalysis a(prob, as_distribution(r.point));
    if (auto c = inner(a).second) out.conditional = conditional_of(*c, prob.p(), prob.ny());
  }
  return out;
}

using InnerResult = std::pair<double, std::optional<Coupling>>;

}  // namespace detail

/// E_A = inf_{Q_Y} D(Q_Y||Q0) + RD~(alpha - beta, R; Q_Y).
inline ExponentValue exponent_EA(const ExponentProblem& prob) {
  const double delta = prob.alpha() - prob.beta();
  return detail::search_output(prob, [&](const OutputAnalysis& a) -> detail::InnerResult {
    return {a.noise_divergence() + r_tilde(a, delta, prob.rate()), std::nullopt};
  });
}

/// E_B = inf_{Q_Y} D(Q_Y||Q0) + [RD(-beta; Q_Y) - R]_+.
inline ExponentValue exponent_EB(const ExponentProblem& prob) {
  return detail::search_output(prob, [&](const OutputAnalysis& a) -> detail::InnerResult {
    return {a.noise_divergence() + positive_part(a.rate_at(-prob.beta()) - prob.rate()), std::nullopt};
  });
}

inline double exponent_EFA(const ExponentProblem& prob) {
  return std::min(exponent_EA(prob).value, exponent_EB(prob).value);
}

/// Feasibility of one output distribution under the misdetection constraints.
struct MdConstraintCheck {
  bool rate_condition = false;        // RD(t; Q_Y) >= R, i.e. DR(R; Q_Y) >= t
  bool distortion_condition = false;  // some coupling with E d >= t exists
  bool low_d1_condition = false;      // D1 <= t  =>  RD(t; Q_Y) >= R - [-alpha]_+
  bool high_d1_condition = false;     // D1 >  t  =>  R1 + D1 >= R + alpha - beta
  bool all() const { return rate_condition && distortion_condition && low_d1_condition && high_d1_condition; }
};

inline MdConstraintCheck check_md_constraints(const OutputAnalysis& a, const ExponentProblem& prob) {
  const double t = prob.threshold();
  const double rt = a.rate_at(t);
  MdConstraintCheck c;
  c.rate_condition = rt >= prob.rate();
  c.distortion_condition = a.family().d_max() >= t - 1e-12;
  c.low_d1_condition = a.d1() > t || rt >= prob.rate() - positive_part(-prob.alpha());
  c.high_d1_condition = a.d1() <= t || a.r1() + a.d1() >= prob.rate() + prob.alpha() - prob.beta();
  return c;
}

/// min D(Q || P x W) over Pi(P, Q_Y) subject to E d >= t.
inline std::optional<Coupling> md_inner_coupling(const OutputAnalysis& a, double t) {
  if (a.d1() >= t) return a.tilted();
  return a.family().with_distortion(t);
}

struct MdExponent : ExponentValue {
  // Whether each constraint is met at some point of the search grid, and
  // whether all of them are met jointly somewhere.
  bool rate_condition_satisfiable = false;
  bool distortion_condition_satisfiable = false;
  bool low_d1_condition_satisfiable = false;
  bool high_d1_condition_satisfiable = false;
};

/// E_MD = inf D(Q_{Y|X} || W | P) over conditionals with D(P x Q_{Y|X}) >= t
/// whose output distribution has R_0(Q_Y) >= R.
inline MdExponent exponent_EMD(const ExponentProblem& prob) {
  const double t = prob.threshold();
  MdExponent out;
  auto inner = [&](const OutputAnalysis& a) -> detail::InnerResult {
    const MdConstraintCheck chk = check_md_constraints(a, prob);
    out.rate_condition_satisfiable |= chk.rate_condition;
    out.distortion_condition_satisfiable |= chk.distortion_condition;
    out.low_d1_condition_satisfiable |= chk.low_d1_condition;
    out.high_d1_condition_satisfiable |= chk.high_d1_condition;
    if (!chk.all()) return {kInf, std::nullopt};
    auto c = md_inner_coupling(a, t);
    if (!c) return {kInf, std::nullopt};
    return {c->divergence, c};
  };
  static_cast<ExponentValue&>(out) = detail::search_output(prob, inner);
  return out;
}

/// Inner minimizer of the E_1 objective at fixed Q_Y: over couplings with
/// E d <= t, D(Q||P x W) + [RD(E d; Q_Y) - R]_+ is convex in the distortion
/// level and its stationary point lies on the family at theta in [1/2, 1].
inline std::optional<Coupling> e1_inner_coupling(const OutputAnalysis& a, double t, double rate) {
  const auto& fam = a.family();
  if (t < fam.d_min() - 1e-12) return std::nullopt;
  double theta_cap = 0.0;  // smallest theta with D(Q_theta) <= t
  if (t < a.independent().distortion) {
    const auto ct = fam.with_distortion(t);
    if (!ct) return std::nullopt;
    theta_cap = ct->theta;
  }
  const double theta_rate = fam.with_information(rate).theta;
  const double theta = std::max(std::clamp(theta_rate, 0.5, 1.0), theta_cap);
  return fam.at(theta);
}

inline ExponentValue exponent_E1(const ExponentProblem& prob) {
  const double t = prob.threshold();
  return detail::search_output(prob, [&](const OutputAnalysis& a) -> detail::InnerResult {
    auto c = e1_inner_coupling(a, t, prob.rate());
    if (!c) return {kInf, std::nullopt};
    return {c->divergence + positive_part(c->information - prob.rate()), c};
  });
}

inline ExponentValue exponent_E2(const ExponentProblem& prob) {
  const double delta = prob.alpha() - prob.beta();
  return detail::search_output(prob, [&](const OutputAnalysis& a) -> detail::InnerResult {
    return {a.tilted().divergence + positive_part(a.rate_at(delta) - prob.rate()), a.tilted()};
  });
}

inline double exponent_EDE(const ExponentProblem& prob) {
  return std::min({exponent_E1(prob).value, exponent_E2(prob).value, exponent_EMD(prob).value});
}

struct NoRateLossBound {
  double d_pw = 0.0;  // D(P x W)
  double i_pw = 0.0;  // I(P x W)
  bool holds = false; // alpha - beta <= D(P x W)
};

inline JointDistribution input_output_joint(const ExponentProblem& prob) {
  const auto w = prob.dmc().codeword_rows();
  std::vector<double> q(w.size());
  for (std::size_t x = 0; x < prob.nx(); ++x)
    for (std::size_t y = 0; y < prob.ny(); ++y) q[x * prob.ny() + y] = prob.p()[x] * w[x * prob.ny() + y];
  return JointDistribution(prob.nx(), prob.ny(), std::move(q));
}

inline NoRateLossBound no_rate_loss_bound(const ExponentProblem& prob) {
  const JointDistribution pw = input_output_joint(prob);
  NoRateLossBound b;
  b.d_pw = distortion_of(pw, prob.dmc());
  b.i_pw = mutual_information(pw);
  b.holds = prob.alpha() - prob.beta() <= b.d_pw;
  return b;
}

/// Exponent of Pr{N >= e^{nu}} when e^{nr} codewords each land in a joint
/// type of information i.
inline double enumerator_exponent(double i, double r, double u) {
  if (u <= 0.0) return positive_part(i - r);
  if (u > r - i) return kInf;
  return 0.0;
}

/// The same for a joint type Q, with u(Q) = D(Q) + beta - alpha.
inline double enumerator_exponent(const JointDistribution& q, double r, const ExponentProblem& prob) {
  return enumerator_exponent(mutual_information(q), r, distortion_of(q, prob.dmc()) + prob.beta() - prob.alpha());
}

struct ExponentReport {
  ExponentValue e_a, e_b, e_1, e_2;
  MdExponent e_md;
  double e_fa = kInf;
  double e_de = kInf;
  NoRateLossBound no_rate_loss;
};

inline ExponentReport compute_exponents(const ExponentProblem& prob) {
  ExponentReport r;
  r.e_a = exponent_EA(prob);
  r.e_b = exponent_EB(prob);
  r.e_md = exponent_EMD(prob);
  r.e_1 = exponent_E1(prob);
  r.e_2 = exponent_E2(prob);
  r.e_fa = std::min(r.e_a.value, r.e_b.value);
  r.e_de = std::min({r.e_1.value, r.e_2.value, r.e_md.value});
  r.no_rate_loss = no_rate_loss_bound(prob);
  return r;
}

}  // namespace slotsync
