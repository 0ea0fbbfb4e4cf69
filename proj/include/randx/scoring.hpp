#pragma once

// Game operators, (1+eps)-scores and (1+eps)-randomness, rate curves and the
// device-independent bound calculators built from them. Logarithms are base 2.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "randx/gamedefs.hpp"

namespace randx {

struct GameOperator {
  ComplexMatrix K;      // sum_{a,x} p(a) H(a,x) P_a^x
  ComplexMatrix phi_G;  // sqrt(K) phi sqrt(K)
  ComplexMatrix rho_G;  // (sqrt(phi) K sqrt(phi))^T
};

namespace detail {

inline void require_eps(double eps, bool allow_zero) {
  const bool ok = allow_zero ? (eps >= 0.0 && eps <= 1.0) : (eps > 0.0 && eps <= 1.0);
  if (!ok) throw Error(ErrorCode::DomainError, allow_zero ? "eps must lie in [0,1]" : "eps must lie in (0,1]");
}

// Bracket of a PSD operator; at eps = 0 this is its trace.
inline double psd_bracket(const ComplexMatrix& m, double eps) {
  if (eps == 0.0) return std::max(0.0, m.trace().real());
  return bracket(m, eps);
}

// -(1/eps) log2 r, with r in (1, 1 + 1e-9] treated as rounding noise.
inline double neg_log_ratio(double ratio, double eps) {
  if (ratio > 1.0 && ratio <= 1.0 + 1e-9) ratio = 1.0;
  return -std::log2(ratio) / eps;
}

}  // namespace detail

template <GameLike G>
ComplexMatrix game_operator_matrix(const G& g, const Device& d) {
  require_compatible(g.base(), d);
  ComplexMatrix k = zeros(d.dim());
  for (std::size_t i = 0; i < g.num_inputs(); ++i) {
    const double p = g.probability(i);
    if (p == 0.0) continue;
    for (const auto& b : d.measurements[g.device_input(i)].branches) {
      const double w = p * g.score(i, b.output);
      if (w != 0.0) k += w * b.projector;
    }
  }
  return hermitian_part(k);
}

template <GameLike G>
GameOperator game_operator(const G& g, const Device& d) {
  GameOperator op;
  op.K = game_operator_matrix(g, d);
  const ComplexMatrix sk = psd_sqrt(op.K);
  const ComplexMatrix sphi = psd_sqrt(d.phi);
  op.phi_G = sk * d.phi * sk;
  op.rho_G = (sphi * op.K * sphi).transpose();
  return op;
}

/// W_G^eps(D) = <phi_G>_{1+eps} / <phi>_{1+eps}. At eps = 0 the expected score.
template <GameLike G>
double eps_score(const G& g, const Device& d, double eps) {
  detail::require_eps(eps, true);
  const ComplexMatrix k = game_operator_matrix(g, d);
  const ComplexMatrix sk = psd_sqrt(k);
  return detail::psd_bracket(sk * d.phi * sk, eps) / detail::psd_bracket(d.phi, eps);
}

/// Expected score by the Born rule, sum p(a) H(a,x) Tr(P_a^x phi).
template <GameLike G>
double expected_score(const G& g, const Device& d) {
  require_compatible(g.base(), d);
  double total = 0.0;
  for (std::size_t i = 0; i < g.num_inputs(); ++i)
    for (const auto& b : d.measurements[g.device_input(i)].branches)
      total += g.probability(i) * g.score(i, b.output) * (b.projector * d.phi).trace().real();
  return total;
}

/// Expected score conditioned on input a: sum_x H(a,x) Tr(P_a^x phi) / Tr(phi).
inline double conditional_score(const Game& g, const Device& d, std::size_t a) {
  require_compatible(g, d);
  double total = 0.0;
  for (const auto& b : d.measurements.at(a).branches) total += g.score(a, b.output) * (b.projector * d.phi).trace().real();
  return total / d.phi.trace().real();
}

/// Sum over x of <P_a^x phi P_a^x>_{1+eps}.
inline double pinched_bracket(const Device& d, std::size_t a, double eps) {
  double total = 0.0;
  for (const auto& b : d.measurements.at(a).branches) total += detail::psd_bracket(b.projector * d.phi * b.projector, eps);
  return total;
}

/// (1+eps)-randomness of D on the fixed input a.
inline double eps_randomness_input(const Device& d, std::size_t a, double eps) {
  detail::require_eps(eps, false);
  if (a >= d.num_inputs()) throw Error(ErrorCode::UnknownLetter, "input letter " + std::to_string(a));
  return detail::neg_log_ratio(pinched_bracket(d, a, eps) / bracket(d.phi, eps), eps);
}

/// (1+eps)-randomness of D for the game (inputs averaged by p).
template <GameLike G>
double eps_randomness_game(const G& g, const Device& d, double eps) {
  detail::require_eps(eps, false);
  require_compatible(g.base(), d);
  double total = 0.0;
  for (std::size_t i = 0; i < g.num_inputs(); ++i)
    if (g.probability(i) > 0.0) total += g.probability(i) * pinched_bracket(d, g.device_input(i), eps);
  return detail::neg_log_ratio(total / bracket(d.phi, eps), eps);
}

/// R_G^{eps,s}: -(1/eps) log2 sum p(a) 2^{eps s H(a,x)} <rho_a^x> / <rho>.
template <GameLike G>
double weighted_randomness(const G& g, const Device& d, double eps, double s) {
  detail::require_eps(eps, false);
  require_compatible(g.base(), d);
  const ComplexMatrix sphi = psd_sqrt(d.phi);
  double total = 0.0;
  for (std::size_t i = 0; i < g.num_inputs(); ++i) {
    const double p = g.probability(i);
    if (p == 0.0) continue;
    for (const auto& b : d.measurements[g.device_input(i)].branches) {
      const ComplexMatrix rho = (sphi * b.projector * sphi).transpose();
      total += p * std::exp2(eps * s * g.score(i, b.output)) * bracket(rho, eps);
    }
  }
  const double ratio = total / bracket(d.phi.transpose(), eps);
  return s == 0.0 ? detail::neg_log_ratio(ratio, eps) : -std::log2(ratio) / eps;
}

struct RandomnessReport {
  double eps = 0.0;
  double W_eps = 0.0;
  double R_a = 0.0;
  double R_G = 0.0;
};

template <GameLike G>
RandomnessReport randomness_report(const G& g, const Device& d, double eps) {
  return {eps, eps_score(g, d, eps), eps_randomness_input(d, g.device_input(g.base().distinguished), eps),
          eps_randomness_game(g, d, eps)};
}

enum class CurveLabel { quadratic, ghz_comparison, custom };

inline std::string_view to_string(CurveLabel l) {
  switch (l) {
    case CurveLabel::quadratic: return "quadratic";
    case CurveLabel::ghz_comparison: return "ghz_comparison";
    case CurveLabel::custom: return "custom";
  }
  return "custom";
}

struct RateCurve {
  CurveLabel label = CurveLabel::custom;
  double w = 0.0;       // threshold below which the curve vanishes
  std::size_t r = 2;    // output alphabet size
  std::function<double(double)> eval;
  std::function<double(double)> deriv;

  double operator()(double x) const { return eval(x); }
};

/// pi(x) = 2 log2(e) (x - w)^2 / (r - 1) for x > w, and 0 otherwise.
inline RateCurve quadratic_rate_curve(double w, std::size_t r) {
  if (!(w >= 0.0 && w < 1.0)) throw Error(ErrorCode::BadParams, "threshold w must lie in [0,1)");
  if (r < 2) throw Error(ErrorCode::BadParams, "output alphabet size must be at least 2");
  const double c = 2.0 * std::numbers::log2e / static_cast<double>(r - 1);
  RateCurve curve;
  curve.label = CurveLabel::quadratic;
  curve.w = w;
  curve.r = r;
  curve.eval = [w, c](double x) { return x <= w ? 0.0 : c * (x - w) * (x - w); };
  curve.deriv = [w, c](double x) { return x <= w ? 0.0 : 2.0 * c * (x - w); };
  return curve;
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// x -> 1 - 2 h((1 - x) / 0.11), the GHZ curve used for comparison plots.
/// Raw values are returned; they go negative for x below about 0.988.
inline RateCurve ghz_comparison_curve() {
  RateCurve curve;
  curve.label = CurveLabel::ghz_comparison;
  curve.w = 0.89;
  curve.r = 8;
  auto check = [](double x) {
    if (!(x > 0.89 && x <= 1.0)) throw Error(ErrorCode::DomainError, "GHZ curve is defined on (0.89, 1]");
  };
  curve.eval = [check](double x) {
    check(x);
    return 1.0 - 2.0 * binary_entropy((1.0 - x) / 0.11);
  };
  curve.deriv = [check](double x) {
    check(x);
    const double u = (1.0 - x) / 0.11;
    if (u <= 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::log2((1.0 - u) / u) / 0.11;
  };
  return curve;
}

/// Value clamped at zero, for plotting.
inline double plot_value(const RateCurve& pi, double x) { return std::max(0.0, pi(x)); }

/// pi(r) - pi'(r) r: the vertical-axis intercept of the tangent at r.
inline double devind_bound(const RateCurve& pi, double r_point, double upper = 1.0) {
  if (!(r_point > 0.0 && r_point < upper)) throw Error(ErrorCode::DomainError, "r must lie in (0, W_G)");
  return pi.eval(r_point) - pi.deriv(r_point) * r_point;
}

struct CapCheck {
  double W_eps = 0.0;
  double cap = 0.0;
  double slack = 0.0;  // cap - W_eps
};

/// For a device classically predictable on a-bar, compares W^eps with the cap W_{G,a-bar}.
template <GameLike G>
CapCheck predictable_cap_check(const G& g, const Device& d, double eps, double cap) {
  const std::size_t abar = g.device_input(g.base().distinguished);
  require_compatible(g.base(), d);
  const double dev = predictability_deviation(d, abar);
  if (dev > tol::kStructural)
    throw Error(ErrorCode::NotPredictable, "phi differs from its a-bar pinching by " + std::to_string(dev));
  const double w = eps_score(g, d, eps);
  return {w, cap, cap - w};
}

}  // namespace randx
