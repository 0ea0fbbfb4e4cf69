#pragma once

// Reference values for games: exhaustive classical enumeration, a see-saw
// search for quantum strategies (optionally deterministic on a-bar), and a
// table of values known in closed form.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randx/parallel.hpp"
#include "randx/random.hpp"
#include "randx/scoring.hpp"

namespace randx {

struct StrategyEnumeration {
  double best_value = 0.0;
  std::vector<std::vector<std::size_t>> best_strategy;  // [player][input] -> output
  std::uint64_t count = 0;
};

inline constexpr std::uint64_t kMaxStrategies = 10'000'000;

namespace detail {

inline void require_player_structure(const Game& g) {
  if (g.kind == GameKind::contextual) throw Error(ErrorCode::Unsupported, "contextual games have no player structure");
  if (g.inputs.factors() != g.outputs.factors())
    throw Error(ErrorCode::BadParams, "input and output alphabets must have one factor per player");
}

// Number of deterministic strategies, or nullopt past the cap.
inline std::optional<std::uint64_t> strategy_count(const Game& g) {
  std::uint64_t count = 1;
  for (std::size_t k = 0; k < g.inputs.factors(); ++k)
    for (std::size_t a = 0; a < g.inputs.radices[k]; ++a) {
      count *= g.outputs.radices[k];
      if (count > kMaxStrategies) return std::nullopt;
    }
  return count;
}

}  // namespace detail

/// Expected score of the deterministic strategy x_k = strategy[k][a_k].
inline double strategy_value(const Game& g, const std::vector<std::vector<std::size_t>>& strategy) {
  const std::size_t s = g.inputs.factors();
  std::vector<std::size_t> xs(s);
  long double total = 0.0L;
  for (std::size_t a = 0; a < g.num_inputs(); ++a) {
    const auto ad = g.inputs.decode(a);
    for (std::size_t k = 0; k < s; ++k) xs[k] = strategy[k][ad[k]];
    total += static_cast<long double>(g.probability(a)) * g.score(a, g.outputs.encode(xs));
  }
  return static_cast<double>(total);
}

/// Maximum expected score over deterministic strategies. Shared randomness
/// cannot do better: the score is linear in the mixture weights.
inline StrategyEnumeration classical_value(const Game& g, std::size_t threads = 1) {
  detail::require_player_structure(g);
  const auto count = detail::strategy_count(g);
  if (!count) throw Error(ErrorCode::TooLarge, "more than 1e7 deterministic strategies");
  const std::size_t s = g.inputs.factors();

  // Strategy index in mixed radix: player 0's table most significant, and
  // within a table input 0 most significant, so index order is lexicographic.
  std::vector<std::size_t> radix;
  for (std::size_t k = 0; k < s; ++k)
    for (std::size_t a = 0; a < g.inputs.radices[k]; ++a) radix.push_back(g.outputs.radices[k]);
  auto decode = [&](std::uint64_t idx) {
    std::vector<std::vector<std::size_t>> st(s);
    for (std::size_t k = 0; k < s; ++k) st[k].resize(g.inputs.radices[k]);
    for (std::size_t pos = radix.size(), k = s; k-- > 0;)
      for (std::size_t a = g.inputs.radices[k]; a-- > 0;) {
        --pos;
        st[k][a] = static_cast<std::size_t>(idx % radix[pos]);
        idx /= radix[pos];
      }
    return st;
  };

  const std::uint64_t chunks = std::min<std::uint64_t>(*count, 256);
  std::vector<double> best(chunks, -INFINITY);
  std::vector<std::uint64_t> arg(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t lo = *count * c / chunks, hi = *count * (c + 1) / chunks;
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      const double v = strategy_value(g, decode(idx));
      if (v > best[c]) {
        best[c] = v;
        arg[c] = idx;
      }
    }
  });
  std::size_t winner = 0;
  for (std::size_t c = 1; c < chunks; ++c)
    if (best[c] > best[winner]) winner = c;
  return {best[winner], decode(arg[winner]), *count};
}

/// The strategy as a device with one-dimensional components.
inline Device strategy_device(const Game& g, const std::vector<std::vector<std::size_t>>& strategy) {
  detail::require_player_structure(g);
  return deterministic_device(g.inputs, g.outputs, strategy);
}

struct SeesawOptions {
  std::size_t dim1 = 2;
  std::size_t dim2 = 2;
  bool constrain_abar = false;
  std::size_t restarts = 20;
  std::size_t iters = 500;
  double tolerance = 1e-12;  // stop when the relative improvement falls below this
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool classical_start = true;  // seed restart 0 with the best deterministic strategy when enumerable
};

/// A lower bound on the quantum value (or on the a-bar-predictable value
/// when constrained), witnessed by `device`. Never a proof of optimality.
struct SeesawResult {
  double value = 0.0;
  Device device;
  std::size_t iterations = 0;
  bool constrained = false;
  std::size_t best_restart = 0;
  std::string label = "lower bound, best found";
};

namespace detail {

using Povm = std::vector<std::vector<ComplexMatrix>>;  // [input][output] projectors

// Orthonormal basis of the range of a projector.
inline ComplexMatrix range_basis(const ComplexMatrix& p) {
  const HermEig eig = herm_eig(p);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > 0.5) cols.push_back(i);
  ComplexMatrix v(p.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors.col(cols[j]);
  return v;
}

// Raises sum_x Tr(P^x F^x) by re-splitting every pair of outcome subspaces
// along the positive part of F^x - F^y. Exact for two outcomes.
inline void improve_measurement(std::vector<ComplexMatrix>& proj, const std::vector<ComplexMatrix>& f) {
  const std::size_t m = proj.size();
  for (int sweep = 0; sweep < 3; ++sweep)
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = x + 1; y < m; ++y) {
        const ComplexMatrix s = proj[x] + proj[y];
        const ComplexMatrix v = range_basis(s);
        if (v.cols() == 0) continue;
        const ComplexMatrix diff = v.adjoint() * (f[x] - f[y]) * v;
        const HermEig eig = herm_eig(hermitian_part(diff));
        ComplexMatrix px = zeros(static_cast<std::size_t>(proj[x].rows()));
        for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
          if (eig.eigenvalues(i) > 0.0) px += outer(v * eig.eigenvectors.col(i));
        proj[x] = hermitian_part(px);
        proj[y] = hermitian_part(s - px);
      }
}

inline Povm random_measurements(CounterRng& rng, std::size_t inputs, std::size_t outputs, std::size_t dim) {
  Povm povm(inputs, std::vector<ComplexMatrix>(outputs, zeros(dim)));
  for (std::size_t a = 0; a < inputs; ++a) {
    const ComplexMatrix u = haar_unitary(rng, dim);
    for (std::size_t k = 0; k < dim; ++k) povm[a][rng.below(outputs)] += outer(u.col(static_cast<Eigen::Index>(k)));
  }
  return povm;
}

struct SeesawRun {
  double value = -INFINITY;
  Povm first, second;
  ComplexVector psi;
  std::size_t iterations = 0;
};

inline SeesawRun seesaw_run(const Game& g, const SeesawOptions& opt, Povm first, Povm second,
                            const std::vector<std::vector<bool>>& frozen) {
  const std::size_t n1 = g.inputs.radices[0], n2 = g.inputs.radices[1];
  const std::size_t m1 = g.outputs.radices[0], m2 = g.outputs.radices[1];
  const std::size_t d1 = opt.dim1, d2 = opt.dim2;
  auto weight = [&](std::size_t a1, std::size_t a2, std::size_t x1, std::size_t x2) {
    const std::size_t a = a1 * n2 + a2, x = x1 * m2 + x2;
    return g.probability(a) * g.score(a, x);
  };
  SeesawRun run;
  for (std::size_t it = 0; it < opt.iters; ++it) {
    ComplexMatrix k = zeros(d1 * d2);
    for (std::size_t a1 = 0; a1 < n1; ++a1)
      for (std::size_t a2 = 0; a2 < n2; ++a2)
        for (std::size_t x1 = 0; x1 < m1; ++x1)
          for (std::size_t x2 = 0; x2 < m2; ++x2) {
            const double w = weight(a1, a2, x1, x2);
            if (w != 0.0) k += w * tensor(first[a1][x1], second[a2][x2]);
          }
    const HermEig eig = herm_eig(hermitian_part(k));
    const double value = eig.eigenvalues(eig.eigenvalues.size() - 1);
    run.psi = eig.eigenvectors.col(eig.eigenvalues.size() - 1);
    run.iterations = it + 1;
    const double previous = run.value;
    run.value = value;
    if (it > 0 && value - previous <= opt.tolerance * std::max(1e-300, std::abs(previous))) break;

    ComplexMatrix psi_mat(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(d2));
    for (std::size_t i = 0; i < d1; ++i)
      for (std::size_t j = 0; j < d2; ++j)
        psi_mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = run.psi(static_cast<Eigen::Index>(i * d2 + j));

    // <psi| A (x) B |psi> = Tr(A F) with F = Psi B^T Psi*, and = Tr(B F') with F' = Psi^T A^T conj(Psi).
    for (std::size_t a1 = 0; a1 < n1; ++a1) {
      if (frozen[0][a1]) continue;
      std::vector<ComplexMatrix> f(m1, zeros(d1));
      for (std::size_t a2 = 0; a2 < n2; ++a2)
        for (std::size_t x2 = 0; x2 < m2; ++x2) {
          const ComplexMatrix eff = psi_mat * second[a2][x2].transpose() * psi_mat.adjoint();
          for (std::size_t x1 = 0; x1 < m1; ++x1) {
            const double w = weight(a1, a2, x1, x2);
            if (w != 0.0) f[x1] += w * eff;
          }
        }
      improve_measurement(first[a1], f);
    }
    for (std::size_t a2 = 0; a2 < n2; ++a2) {
      if (frozen[1][a2]) continue;
      std::vector<ComplexMatrix> f(m2, zeros(d2));
      for (std::size_t a1 = 0; a1 < n1; ++a1)
        for (std::size_t x1 = 0; x1 < m1; ++x1) {
          const ComplexMatrix eff = psi_mat.transpose() * first[a1][x1].transpose() * psi_mat.conjugate();
          for (std::size_t x2 = 0; x2 < m2; ++x2) {
            const double w = weight(a1, a2, x1, x2);
            if (w != 0.0) f[x2] += w * eff;
          }
        }
      improve_measurement(second[a2], f);
    }
  }
  run.first = std::move(first);
  run.second = std::move(second);
  return run;
}

}  // namespace detail

inline SeesawResult seesaw(const Game& g, const SeesawOptions& opt) {
  detail::require_player_structure(g);
  if (g.inputs.factors() != 2) throw Error(ErrorCode::Unsupported, "see-saw handles two-player games only");
  if (opt.dim1 == 0 || opt.dim2 == 0 || opt.dim1 > 8 || opt.dim2 > 8)
    throw Error(ErrorCode::BadDims, "per-player dimensions must lie in [1, 8]");
  if (opt.restarts == 0) throw Error(ErrorCode::BadParams, "need at least one restart");
  const std::size_t n1 = g.inputs.radices[0], n2 = g.inputs.radices[1];
  const std::size_t m1 = g.outputs.radices[0], m2 = g.outputs.radices[1];
  const auto abar = g.inputs.decode(g.distinguished);

  std::optional<StrategyEnumeration> classical;
  if (opt.classical_start && !opt.constrain_abar && detail::strategy_count(g)) classical = classical_value(g);

  std::vector<detail::SeesawRun> runs(opt.restarts);
  parallel_for(opt.restarts, opt.threads, [&](std::size_t r) {
    CounterRng rng(opt.seed, r);
    auto first = detail::random_measurements(rng, n1, m1, opt.dim1);
    auto second = detail::random_measurements(rng, n2, m2, opt.dim2);
    std::vector<std::vector<bool>> frozen{std::vector<bool>(n1, false), std::vector<bool>(n2, false)};
    if (r == 0 && classical) {
      for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t x = 0; x < m1; ++x)
          first[a][x] = x == classical->best_strategy[0][a] ? identity(opt.dim1) : zeros(opt.dim1);
      for (std::size_t a = 0; a < n2; ++a)
        for (std::size_t x = 0; x < m2; ++x)
          second[a][x] = x == classical->best_strategy[1][a] ? identity(opt.dim2) : zeros(opt.dim2);
    }
    if (opt.constrain_abar) {
      // Restart r fixes the a-bar outputs to the r-th pair, cycling through all pairs.
      const std::size_t xbar1 = r % m1, xbar2 = (r / m1) % m2;
      for (std::size_t x = 0; x < m1; ++x) first[abar[0]][x] = x == xbar1 ? identity(opt.dim1) : zeros(opt.dim1);
      for (std::size_t x = 0; x < m2; ++x) second[abar[1]][x] = x == xbar2 ? identity(opt.dim2) : zeros(opt.dim2);
      frozen[0][abar[0]] = true;
      frozen[1][abar[1]] = true;
    }
    runs[r] = detail::seesaw_run(g, opt, std::move(first), std::move(second), frozen);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].value > runs[best].value) best = r;
  const auto& run = runs[best];

  std::vector<std::vector<std::vector<ComplexMatrix>>> factors{run.first, run.second};
  SeesawResult result;
  result.device = make_component_device({opt.dim1, opt.dim2}, outer(run.psi), factors);
  result.value = expected_score(g, result.device);
  result.iterations = run.iterations;
  result.constrained = opt.constrain_abar;
  result.best_restart = best;
  return result;
}

struct KnownValue {
  std::optional<double> value;
  std::string status;  // "exact", "lower bound (witnessed)", "not stated"
};

struct KnownValues {
  std::string game;
  KnownValue W_classical;
  KnownValue W_G;
  KnownValue W_G_abar;
  KnownValue noise_tolerance;
};

inline KnownValues known_values(const std::string& name) {
  if (name == "chsh") {
    const double wg = 0.5 + std::sqrt(2.0) / 4.0;
    return {"chsh", {0.75, "exact"}, {wg, "exact"}, {0.75, "exact"}, {wg - 0.75, "exact"}};
  }
  if (name == "magic-square") {
    const double witnessed = 5.0 / 9.0 + 4.0 / 9.0 * (0.5 + std::sqrt(2.0) / 4.0);
    return {"magic-square",
            {8.0 / 9.0, "exact"},
            {witnessed, "lower bound (witnessed)"},
            {witnessed, "lower bound (witnessed), unproven"},
            {std::nullopt, "not available"}};
  }
  throw Error(ErrorCode::Unknown, "no known values for game '" + name + "'");
}

}  // namespace randx
