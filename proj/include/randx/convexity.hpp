#pragma once

// Checkable Schatten-norm inequalities: uniform convexity, the disturbance
// bound for a binary projective measurement, and the inductive chain that
// extends it to measurements with more outcomes. Only exact inequalities are
// asserted; forms carrying an unspecified O(eps^2) term are reported.

#include <string>
#include <vector>

#include "randx/parallel.hpp"
#include "randx/random.hpp"

namespace randx {

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  double margin = 0.0;  // rhs - lhs

  static InequalityCheck make(double lhs, double rhs) {
    const double margin = rhs - lhs;
    return {lhs, rhs, margin >= -1e-10, margin};
  }
};

namespace detail {

inline ComplexMatrix normalized_input(const ComplexMatrix& m, double eps, bool auto_normalize, const char* what) {
  const double n = schatten_norm(m, eps);
  if (std::abs(n - 1.0) <= tol::kStructural) return m;
  if (!auto_normalize || n == 0.0)
    throw Error(ErrorCode::NotNormalized, std::string(what) + " has (1+eps)-norm " + std::to_string(n));
  return m / n;
}

inline void require_psd(const ComplexMatrix& m) {
  const RealVector ev = eigenvalues(m);
  if (hermitian_deviation(m) > tol::kStructural * std::max(1.0, max_abs(m)))
    throw Error(ErrorCode::NonHermitian, "tau must be Hermitian");
  if (ev(0) < -tol::kNegative * std::max(1.0, ev(ev.size() - 1)))
    throw Error(ErrorCode::NegativeEigenvalue, "tau must be positive semidefinite");
}

}  // namespace detail

/// ||(W+Z)/2|| <= 1 - (eps/8) ||W - Z||^2 for ||W|| = ||Z|| = 1.
inline InequalityCheck check_uniform_convexity(const ComplexMatrix& w, const ComplexMatrix& z, double eps,
                                               bool auto_normalize = false) {
  if (w.rows() != z.rows() || w.cols() != z.cols()) throw Error(ErrorCode::DimMismatch, "W and Z differ in shape");
  const ComplexMatrix wn = detail::normalized_input(w, eps, auto_normalize, "W");
  const ComplexMatrix zn = detail::normalized_input(z, eps, auto_normalize, "Z");
  const double d = schatten_norm(wn - zn, eps);
  return InequalityCheck::make(schatten_norm((wn + zn) * 0.5, eps), 1.0 - eps / 8.0 * d * d);
}

/// ||tau'|| <= 1 - (eps/2) ||tau - tau'||^2 with tau' = R0 tau R0 + R1 tau R1.
inline InequalityCheck check_binary_disturbance(const ComplexMatrix& tau, const Projector& r0, double eps,
                                                bool auto_normalize = false) {
  require_square(tau, "tau");
  if (r0.dim() != static_cast<std::size_t>(tau.rows())) throw Error(ErrorCode::DimMismatch, "R0 and tau differ");
  detail::require_psd(tau);
  const ComplexMatrix t = detail::normalized_input(tau, eps, auto_normalize, "tau");
  const ComplexMatrix r1 = r0.complement();
  const ComplexMatrix tp = r0.matrix() * t * r0.matrix() + r1 * t * r1;
  const double d = schatten_norm(t - tp, eps);
  return InequalityCheck::make(schatten_norm(tp, eps), 1.0 - eps / 2.0 * d * d);
}

struct ChainResult {
  InequalityCheck final;               // ||tau_n|| <= prod (1 - (eps/2) ||tau_i - tau_{i-1}||^2)
  std::vector<InequalityCheck> chain;  // per-step binary bound relative to ||tau_{i-1}||
  double reported_rhs = 0.0;           // 1 - (eps/2n) ||tau - tau'||^2, leading term only
  double reported_bracket_lhs = 0.0;   // <tau'>_{1+eps}
  double reported_bracket_rhs = 0.0;   // 1 - (eps/2n) <tau - tau'>^2, leading term only
};

/// Interpolating states tau_i = sum_{j<i} P_j tau P_j + Q_i tau Q_i with
/// Q_i = P_i + ... + P_n; tau_0 = tau and tau_n = tau'.
inline ChainResult check_chain_disturbance(const ComplexMatrix& tau, std::span<const Projector> blocks, double eps,
                                           bool auto_normalize = false) {
  require_square(tau, "tau");
  if (blocks.size() < 2) throw Error(ErrorCode::NotAResolution, "need at least two blocks");
  for (const auto& p : blocks)
    if (p.dim() != static_cast<std::size_t>(tau.rows())) throw Error(ErrorCode::DimMismatch, "block and tau differ");
  const double rdev = resolution_deviation(blocks);
  if (rdev > tol::kStructural) throw Error(ErrorCode::NotAResolution, "resolution deviation " + std::to_string(rdev));
  detail::require_psd(tau);
  const ComplexMatrix t = detail::normalized_input(tau, eps, auto_normalize, "tau");
  const std::size_t n = blocks.size() - 1;
  const auto dim = static_cast<std::size_t>(t.rows());

  ChainResult result;
  ComplexMatrix pinched_head = zeros(dim);  // sum_{j<i} P_j tau P_j
  ComplexMatrix prev = t;
  double prev_norm = schatten_norm(t, eps);
  double product = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const ComplexMatrix& pj = blocks[i - 1].matrix();
    pinched_head += pj * t * pj;
    ComplexMatrix qi = zeros(dim);
    for (std::size_t j = i; j <= n; ++j) qi += blocks[j].matrix();
    const ComplexMatrix cur = pinched_head + qi * t * qi;
    const double cur_norm = schatten_norm(cur, eps);
    const double d = schatten_norm(cur - prev, eps);
    const double rel = prev_norm > 0.0 ? d / prev_norm : 0.0;
    result.chain.push_back(InequalityCheck::make(cur_norm, (1.0 - eps / 2.0 * rel * rel) * prev_norm));
    product *= 1.0 - eps / 2.0 * d * d;
    prev = cur;
    prev_norm = cur_norm;
  }
  result.final = InequalityCheck::make(prev_norm, product);
  const double total = schatten_norm(t - prev, eps);
  result.reported_rhs = 1.0 - eps / (2.0 * static_cast<double>(n)) * total * total;
  const double bt = bracket(t - prev, eps);
  result.reported_bracket_lhs = bracket(prev, eps);
  result.reported_bracket_rhs = 1.0 - eps / (2.0 * static_cast<double>(n)) * bt * bt;
  return result;
}

enum class ConvexitySuite { uniform_convexity, binary_disturbance, chain };

inline std::string_view to_string(ConvexitySuite s) {
  switch (s) {
    case ConvexitySuite::uniform_convexity: return "uniform-convexity";
    case ConvexitySuite::binary_disturbance: return "binary-disturbance";
    case ConvexitySuite::chain: return "chain";
  }
  return "chain";
}

struct SuiteTrial {
  std::size_t trial = 0;
  std::size_t dim = 0;
  double eps = 0.0;
  InequalityCheck check;
  bool steps_hold = true;  // chain suite: every per-step bound held as well
};

/// Randomized instances: trial k draws from stream k of `seed`, so results
/// do not depend on the thread count. Dimensions are uniform in
/// [min_dim, max_dim] and eps cycles through `eps_grid`.
inline std::vector<SuiteTrial> run_convexity_suite(ConvexitySuite suite, std::size_t trials, std::uint64_t seed,
                                                   std::span<const double> eps_grid, std::size_t min_dim = 2,
                                                   std::size_t max_dim = 8, std::size_t threads = 1) {
  if (eps_grid.empty()) throw Error(ErrorCode::BadParams, "empty eps grid");
  if (min_dim < 2 || max_dim < min_dim) throw Error(ErrorCode::BadDims, "need 2 <= min_dim <= max_dim");
  std::vector<SuiteTrial> out(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    CounterRng rng(seed, k);
    SuiteTrial t;
    t.trial = k;
    t.dim = min_dim + rng.below(max_dim - min_dim + 1);
    t.eps = eps_grid[k % eps_grid.size()];
    switch (suite) {
      case ConvexitySuite::uniform_convexity: {
        // Alternate general matrices, PSD matrices, and nearby pairs.
        ComplexMatrix w, z;
        if (k % 3 == 0) {
          w = gaussian_matrix(rng, t.dim);
          z = gaussian_matrix(rng, t.dim);
        } else if (k % 3 == 1) {
          w = random_psd(rng, t.dim, 1 + rng.below(t.dim));
          z = random_psd(rng, t.dim, 1 + rng.below(t.dim));
        } else {
          w = gaussian_matrix(rng, t.dim);
          z = w + std::exp(-6.0 * rng.uniform()) * gaussian_matrix(rng, t.dim);
        }
        t.check = check_uniform_convexity(w, z, t.eps, true);
        break;
      }
      case ConvexitySuite::binary_disturbance: {
        const ComplexMatrix tau = random_psd(rng, t.dim, 1 + rng.below(t.dim));
        const auto blocks = random_resolution(rng, t.dim, 2);
        t.check = check_binary_disturbance(tau, blocks[0], t.eps, true);
        break;
      }
      case ConvexitySuite::chain: {
        const ComplexMatrix tau = random_psd(rng, t.dim, 1 + rng.below(t.dim));
        const std::size_t nblocks = 2 + rng.below(std::min<std::size_t>(t.dim, 5) - 1);
        const auto blocks = random_resolution(rng, t.dim, nblocks);
        const ChainResult r = check_chain_disturbance(tau, blocks, t.eps, true);
        t.check = r.final;
        for (const auto& step : r.chain) t.steps_hold = t.steps_hold && step.holds;
        break;
      }
    }
    out[k] = t;
  });
  return out;
}

}  // namespace randx
