#pragma once

// The spot-checking expansion protocol: in each of N rounds a biased coin t
// decides between a game round (input drawn from p, score added to c) and a
// generation round (input a-bar). The protocol aborts iff c < chi q N.
//
// Two state models are supported. `sequential` feeds every round to the same
// device state, exactly as a single device with memory would evolve.
// `independent_copies` gives round j its own fresh copy of phi; this is the
// device on Q^{(x)N} whose measurements act on the first factor and whose
// unitaries cyclically shift the factors, and it is what an i.i.d. source of
// entangled pairs implements. All quantities factor over rounds there.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "randx/parallel.hpp"
#include "randx/random.hpp"
#include "randx/scoring.hpp"

namespace randx {

enum class StateModel { independent_copies, sequential };

inline std::string_view to_string(StateModel m) {
  return m == StateModel::sequential ? "sequential" : "independent_copies";
}

struct ProtocolParams {
  std::size_t N = 1;
  double q = 0.5;
  double chi = 0.5;
  std::uint64_t seed = 0;
  StateModel model = StateModel::independent_copies;
};

struct Round {
  int t = 0;
  std::size_t a = 0;
  std::size_t x = 0;
  double score = 0.0;

  bool operator==(const Round&) const = default;
};

struct Transcript {
  std::vector<Round> rounds;
  double c = 0.0;
  bool success = false;
};

/// c >= chi q N, with a 1e-12 relative allowance for accumulated rounding.
inline bool passes_threshold(double c, double chi, double q, std::size_t n) {
  const double bar = chi * q * static_cast<double>(n);
  return c >= bar - 1e-12 * std::abs(bar);
}

namespace detail {

inline void require_params(const ProtocolParams& p) {
  if (p.N == 0) throw Error(ErrorCode::BadParams, "N must be positive");
  if (!(p.q > 0.0 && p.q < 1.0)) throw Error(ErrorCode::BadQ, "q must lie in (0,1)");
  if (!(p.chi >= 0.0 && p.chi <= 1.0)) throw Error(ErrorCode::BadParams, "chi must lie in [0,1]");
}

inline std::size_t sample(CounterRng& rng, const std::vector<double>& weights) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last = k;
    if (u < acc) return k;
  }
  return last;
}

}  // namespace detail

/// One run of the protocol. Per round the generator is drawn for t, then
/// (on game rounds only) for a, then for x.
inline Transcript simulate(const Game& g, const Device& d, const ProtocolParams& params, bool record = true,
                           std::uint64_t stream = 0) {
  detail::require_params(params);
  require_compatible(g, d);
  CounterRng rng(params.seed, stream);
  const std::size_t abar = g.distinguished;

  std::vector<std::vector<double>> fresh(g.num_inputs());
  if (params.model == StateModel::independent_copies) {
    const double tr = d.phi.trace().real();
    for (std::size_t a = 0; a < g.num_inputs(); ++a) {
      fresh[a] = outcome_distribution(d, d.phi, a);
      for (auto& p : fresh[a]) p /= tr;
    }
  }
  ComplexMatrix state = d.phi / d.phi.trace().real();

  Transcript tr;
  if (record) tr.rounds.reserve(params.N);
  for (std::size_t j = 0; j < params.N; ++j) {
    Round r;
    r.t = rng.uniform() < params.q ? 1 : 0;
    r.a = r.t == 1 ? detail::sample(rng, g.distribution) : abar;
    if (params.model == StateModel::independent_copies) {
      r.x = detail::sample(rng, fresh[r.a]);
    } else {
      r.x = detail::sample(rng, outcome_distribution(d, state, r.a));
      const ComplexMatrix& p = *d.projector(r.a, r.x);
      const ComplexMatrix& u = d.unitary(r.a);
      state = u * p * state * p * u.adjoint();
      state = hermitian_part(state / state.trace().real());
    }
    r.score = r.t == 1 ? g.score(r.a, r.x) : 0.0;
    tr.c += r.score;
    if (record) tr.rounds.push_back(r);
  }
  tr.success = passes_threshold(tr.c, params.chi, params.q, params.N);
  return tr;
}

struct TrialSummary {
  double c = 0.0;
  bool success = false;
};

/// Independent trials; trial k uses generator stream k under the common seed.
inline std::vector<TrialSummary> simulate_trials(const Game& g, const Device& d, const ProtocolParams& params,
                                                 std::size_t trials, std::size_t threads = 1) {
  std::vector<TrialSummary> out(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    const Transcript t = simulate(g, d, params, false, k);
    out[k] = {t.c, t.success};
  });
  return out;
}

struct SuccessStateSummary {
  double eps = 0.0;
  double mass = 0.0;     // success probability
  double sum = 0.0;      // sum over the success set of p_q <rho^{-e'} rho_i^x rho^{-e'}>_{1+eps}
  double K_value = 0.0;  // -(1/eps) log2 sum
  std::uint64_t branches = 0;
  std::size_t N = 0;
  double q = 0.0;
  double chi = 0.0;
};

inline constexpr std::uint64_t kMaxBranches = 10'000'000;

namespace detail {

struct RoundChoice {
  std::size_t a;      // device input
  int t;
  double p;           // p_q(i)
  double score;       // raw H(a,x) on game rounds, 0 otherwise
  std::size_t x;
};

inline std::vector<RoundChoice> round_choices(const Game& g, double q) {
  const SpotCheckGame gq = spot_check(g, q);
  std::vector<RoundChoice> out;
  for (std::size_t i = 0; i < gq.num_inputs(); ++i) {
    const double p = gq.probability(i);
    if (p <= 0.0) continue;
    const std::size_t a = gq.device_input(i);
    const int t = static_cast<int>(gq.round_type(i));
    for (std::size_t x = 0; x < g.num_outputs(); ++x) out.push_back({a, t, p, t == 1 ? g.score(a, x) : 0.0, x});
  }
  return out;
}

}  // namespace detail

/// Exact sum over all (i, x) sequences in the success set, computed through
/// the abstract device with initial operator phi^{1/(1+eps)}:
/// <rho^{-e'} rho_i^x rho^{-e'}>_{1+eps} = <M phi^{1/(1+eps)} M*>_{1+eps}, e' = eps/(2+2eps).
/// Branches whose probability falls below 1e-15 are pruned.
inline SuccessStateSummary enumerate_success_state(const Game& g, const Device& d, std::size_t n, double q, double chi,
                                                   double eps, StateModel model = StateModel::independent_copies,
                                                   std::size_t threads = 1) {
  detail::require_params({n, q, chi, 0, model});
  detail::require_eps(eps, false);
  require_compatible(g, d);
  const auto choices = detail::round_choices(g, q);
  const std::size_t width = choices.size();
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < n; ++j) {
    total *= width;
    if (total > kMaxBranches) throw Error(ErrorCode::TooLarge, "more than 1e7 branches");
  }

  const double trace = d.phi.trace().real();
  const ComplexMatrix phi_abs = psd_power(d.phi / trace, 1.0 / (1.0 + eps));
  const ComplexMatrix phi_norm = d.phi / trace;
  const double prune = 1e-15;

  struct Acc {
    double sum = 0.0, mass = 0.0;
    std::uint64_t leaves = 0;
  };
  std::vector<Acc> acc(width);
  auto leaf = [&](Acc& a, double w, double c, auto&& bracket_value, double mass) {
    ++a.leaves;
    if (passes_threshold(c, chi, q, n)) {
      a.sum += w * bracket_value();
      a.mass += w * mass;
    }
  };

  if (model == StateModel::independent_copies) {
    // Brackets and traces are multiplicative over the tensor factors.
    std::vector<double> fb(width, 0.0), ft(width, 0.0);
    for (std::size_t k = 0; k < width; ++k)
      if (const ComplexMatrix* p = d.projector(choices[k].a, choices[k].x)) {
        ft[k] = std::max(0.0, ((*p) * phi_norm).trace().real());
        if (ft[k] > prune) fb[k] = bracket((*p) * phi_abs * (*p), eps);
      }
    parallel_for(width, threads, [&](std::size_t first) {
      auto dfs = [&](auto&& self, std::size_t depth, double w, double b, double t, double c) -> void {
        if (depth == n) return leaf(acc[first], w, c, [b] { return b; }, t);
        for (std::size_t k = 0; k < width; ++k) {
          if (ft[k] * t <= prune) continue;
          self(self, depth + 1, w * choices[k].p, b * fb[k], t * ft[k], c + choices[k].score);
        }
      };
      if (ft[first] > prune) dfs(dfs, 1, choices[first].p, fb[first], ft[first], choices[first].score);
    });
  } else {
    std::vector<ComplexMatrix> steps(width);
    for (std::size_t k = 0; k < width; ++k)
      if (const ComplexMatrix* p = d.projector(choices[k].a, choices[k].x)) steps[k] = d.unitary(choices[k].a) * (*p);
    auto advance = [&](std::size_t k, const ComplexMatrix& sa, const ComplexMatrix& sm,
                       ComplexMatrix& na, ComplexMatrix& nm) {
      if (steps[k].size() == 0) return false;
      nm = hermitian_part(steps[k] * sm * steps[k].adjoint());
      if (nm.trace().real() <= prune) return false;
      na = hermitian_part(steps[k] * sa * steps[k].adjoint());
      return true;
    };
    parallel_for(width, threads, [&](std::size_t first) {
      auto dfs = [&](auto&& self, std::size_t depth, double w, const ComplexMatrix& sa, const ComplexMatrix& sm,
                     double c) -> void {
        if (depth == n)
          return leaf(acc[first], w, c, [&] { return bracket(sa, eps); }, std::max(0.0, sm.trace().real()));
        ComplexMatrix na, nm;
        for (std::size_t k = 0; k < width; ++k)
          if (advance(k, sa, sm, na, nm)) self(self, depth + 1, w * choices[k].p, na, nm, c + choices[k].score);
      };
      ComplexMatrix na, nm;
      if (advance(first, phi_abs, phi_norm, na, nm)) dfs(dfs, 1, choices[first].p, na, nm, choices[first].score);
    });
  }

  SuccessStateSummary s;
  s.eps = eps;
  s.N = n;
  s.q = q;
  s.chi = chi;
  for (const auto& a : acc) {
    s.sum += a.sum;
    s.mass += a.mass;
    s.branches += a.leaves;
  }
  s.K_value = s.sum > 0.0 ? -std::log2(s.sum) / eps : INFINITY;
  return s;
}

struct ExpansionBound {
  std::optional<double> pi_chi;
  double delta = 1.0;
  double log2_delta = 0.0;
  std::optional<double> b;
  double eps = 0.0;
  std::optional<double> hmin_lower;
  std::optional<double> bits_per_round;
  double delta_term = 0.0;  // the error terms actually subtracted
  std::optional<double> idealized_bits;
  std::optional<double> soundness;
  std::size_t N = 0;
};

/// H_min^delta >= K - (1 + 2 log2(1/delta)) / eps.
inline ExpansionBound entropy_lower_bound(const SuccessStateSummary& summary, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorCode::BadDelta, "delta must lie in (0,1]");
  ExpansionBound out;
  out.delta = delta;
  out.log2_delta = std::log2(delta);
  out.eps = summary.eps;
  out.N = summary.N;
  out.delta_term = (1.0 - 2.0 * out.log2_delta) / summary.eps;
  out.hmin_lower = summary.K_value - out.delta_term;
  out.bits_per_round = *out.hmin_lower / static_cast<double>(std::max<std::size_t>(summary.N, 1));
  return out;
}

/// Extractable-bit accounting with delta = sqrt(2) 2^{-bqN} and
/// eps* = min{1, sqrt(q log2(2/delta^2) / N)}. The concrete lower bound
/// N [pi(chi) - c (q + sqrt(log2(2/delta^2) / (qN)))] needs the constant c.
inline ExpansionBound extractable_bits(const RateCurve& pi, double chi, double q, double b, std::size_t n,
                                       std::optional<double> slack_constant = std::nullopt) {
  if (!(chi > 0.0 && chi < 1.0)) throw Error(ErrorCode::BadParams, "chi must lie in (0,1)");
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::BadParams, "q must lie in (0,1)");
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::BadParams, "b must be positive");
  if (n == 0) throw Error(ErrorCode::BadParams, "N must be positive");
  if (slack_constant && !(*slack_constant >= 0.0)) throw Error(ErrorCode::BadParams, "slack constant must be >= 0");
  const double nn = static_cast<double>(n);
  const double bqn = b * q * nn;
  ExpansionBound out;
  out.N = n;
  out.b = b;
  out.pi_chi = pi(chi);
  out.idealized_bits = nn * *out.pi_chi;
  out.log2_delta = 0.5 - bqn;
  out.delta = std::exp2(out.log2_delta);
  const double log_term = 2.0 * bqn;  // log2(2 / delta^2)
  out.eps = std::min(1.0, std::sqrt(q * log_term / nn));
  out.soundness = 3.0 * std::exp2(-bqn);
  if (slack_constant) {
    out.delta_term = nn * *slack_constant * (q + std::sqrt(log_term / (q * nn)));
    out.hmin_lower = *out.idealized_bits - out.delta_term;
    out.bits_per_round = *out.hmin_lower / nn;
  }
  return out;
}

/// -log2 sum_e max_x Pr(x, e) for a joint table indexed [x][e].
inline double hmin_classical_adversary(const std::vector<std::vector<double>>& joint) {
  if (joint.empty() || joint.front().empty()) throw Error(ErrorCode::BadTable, "empty table");
  const std::size_t ne = joint.front().size();
  double total = 0.0;
  for (const auto& row : joint) {
    if (row.size() != ne) throw Error(ErrorCode::BadTable, "ragged table");
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::BadTable, "entries must be finite and nonnegative");
      total += v;
    }
  }
  if (total > 1.0 + 1e-12) throw Error(ErrorCode::BadTable, "table sums to more than 1");
  double guess = 0.0;
  for (std::size_t e = 0; e < ne; ++e) {
    double best = 0.0;
    for (const auto& row : joint) best = std::max(best, row[e]);
    guess += best;
  }
  if (guess <= 0.0) throw Error(ErrorCode::BadTable, "table has no mass");
  return -std::log2(guess);
}

/// Explicit device for the independent-copies model with N copies:
/// measurements act on the first factor, every unitary shifts the factors by one.
inline Device copies_device(const Device& d, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadParams, "need at least one copy");
  const std::size_t d0 = d.dim();
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) {
    total *= d0;
    if (total > 256) throw Error(ErrorCode::TooLarge, "copies device exceeds dimension 256");
  }
  Device out;
  out.kind = DeviceKind::general;
  out.dims = {total};
  out.inputs = d.inputs;
  out.outputs = d.outputs;
  std::vector<ComplexMatrix> phis(n, d.phi);
  out.phi = tensor(std::span<const ComplexMatrix>(phis));
  const std::size_t rest = total / d0;
  // shift: |i_1 i_2 ... i_n> -> |i_2 ... i_n i_1>
  ComplexMatrix shift = zeros(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::size_t head = idx / rest, tail = idx % rest;
    shift(static_cast<Eigen::Index>(tail * d0 + head), static_cast<Eigen::Index>(idx)) = 1.0;
  }
  const ComplexMatrix id_rest = identity(rest);
  out.measurements.resize(d.num_inputs());
  out.unitaries.resize(d.num_inputs());
  for (std::size_t a = 0; a < d.num_inputs(); ++a) {
    for (const auto& br : d.measurements[a].branches)
      out.measurements[a].branches.push_back({br.output, tensor(br.projector, id_rest)});
    out.unitaries[a] = shift * tensor(d.unitary(a), id_rest);
  }
  return out;
}

}  // namespace randx
