#pragma once

// Games: an input distribution p on A, a scoring table H on A x X, and a
// distinguished input a-bar. Nonlocal games carry per-player product
// alphabets; contextual games carry the list of contexts over an observable
// set B with outputs in Y^m.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "randx/devicemodel.hpp"

namespace randx {

enum class GameKind { general, nonlocal, contextual };

inline std::string_view to_string(GameKind k) {
  switch (k) {
    case GameKind::general: return "general";
    case GameKind::nonlocal: return "nonlocal";
    case GameKind::contextual: return "contextual";
  }
  return "general";
}

struct Game {
  std::string name;
  GameKind kind = GameKind::general;
  Alphabet inputs;
  Alphabet outputs;
  std::vector<double> distribution;  // p(a), indexed by input letter
  std::vector<double> scores;        // H(a,x) at a * |X| + x
  std::size_t distinguished = 0;     // a-bar
  bool unbounded = false;            // H maps to [0, inf) instead of [0, 1]
  std::vector<std::vector<std::size_t>> contexts;  // contextual games only
  std::size_t observables = 0;                     // |B| for contextual games

  std::size_t num_inputs() const { return inputs.size(); }
  std::size_t num_outputs() const { return outputs.size(); }
  double probability(std::size_t a) const { return distribution.at(a); }
  double score(std::size_t a, std::size_t x) const { return scores.at(a * num_outputs() + x); }
  std::size_t device_input(std::size_t a) const { return a; }
  const Game& base() const { return *this; }

  void set_score(std::size_t a, std::size_t x, double h) { scores.at(a * num_outputs() + x) = h; }
};

/// G_q: inputs i = (t, a) with t in {0,1}, flattened as i = t * |A| + a.
struct SpotCheckGame {
  Game game;
  double q = 0.5;

  std::size_t num_inputs() const { return 2 * game.num_inputs(); }
  std::size_t num_outputs() const { return game.num_outputs(); }
  static std::size_t letter(std::size_t t, std::size_t a, std::size_t base_inputs) { return t * base_inputs + a; }
  std::size_t round_type(std::size_t i) const { return i / game.num_inputs(); }
  std::size_t device_input(std::size_t i) const { return i % game.num_inputs(); }

  double probability(std::size_t i) const {
    const std::size_t a = device_input(i);
    if (round_type(i) == 1) return q * game.probability(a);
    return a == game.distinguished ? 1.0 - q : 0.0;
  }
  double score(std::size_t i, std::size_t x) const {
    return round_type(i) == 1 ? game.score(device_input(i), x) / q : 0.0;
  }
  const Game& base() const { return game; }
};

template <typename G>
concept GameLike = requires(const G& g, std::size_t i) {
  { g.num_inputs() } -> std::convertible_to<std::size_t>;
  { g.num_outputs() } -> std::convertible_to<std::size_t>;
  { g.probability(i) } -> std::convertible_to<double>;
  { g.score(i, i) } -> std::convertible_to<double>;
  { g.device_input(i) } -> std::convertible_to<std::size_t>;
  { g.base() } -> std::convertible_to<const Game&>;
};

/// Game with dense tables of zeros and a uniform distribution.
inline Game make_game(std::string name, GameKind kind, Alphabet inputs, Alphabet outputs) {
  Game g;
  g.name = std::move(name);
  g.kind = kind;
  g.inputs = std::move(inputs);
  g.outputs = std::move(outputs);
  g.distribution.assign(g.num_inputs(), 1.0 / static_cast<double>(g.num_inputs()));
  g.scores.assign(g.num_inputs() * g.num_outputs(), 0.0);
  return g;
}

inline ValidationReport validate_game(const Game& g) {
  ValidationReport report;
  const std::size_t na = g.num_inputs(), nx = g.num_outputs();
  if (na == 0 || nx == 0) {
    report.add("alphabets", 0.0, "empty alphabet");
    return report;
  }
  if (g.distribution.size() != na) {
    report.add("distribution size", static_cast<double>(g.distribution.size()));
  } else {
    double total = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      const double p = g.distribution[a];
      if (!std::isfinite(p) || p < 0.0) report.add("distribution range", p, "input " + std::to_string(a));
      total += p;
    }
    if (!(std::abs(total - 1.0) <= 1e-12)) report.add("normalization", std::abs(total - 1.0));
  }
  if (g.scores.size() != na * nx) {
    report.add("scoring table size", static_cast<double>(g.scores.size()));
  } else {
    for (std::size_t k = 0; k < g.scores.size(); ++k) {
      const double h = g.scores[k];
      const bool bad = !std::isfinite(h) || h < 0.0 || (!g.unbounded && h > 1.0);
      if (bad)
        report.add("score range", h,
                   "input " + std::to_string(k / nx) + ", output " + std::to_string(k % nx));
    }
  }
  if (g.distinguished >= na) report.add("distinguished input", static_cast<double>(g.distinguished));
  if (g.kind == GameKind::nonlocal && g.inputs.factors() != g.outputs.factors())
    report.add("player structure", 0.0, "input and output alphabets must have one factor per player");
  if (g.kind == GameKind::contextual) {
    if (g.contexts.size() != na) {
      report.add("contexts", 0.0, "one context per input letter required");
    } else {
      const std::size_t m = g.contexts.empty() ? 0 : g.contexts.front().size();
      for (const auto& c : g.contexts) {
        if (c.size() != m) report.add("contexts", 0.0, "contexts of unequal length");
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (c[i] >= g.observables) report.add("contexts", 0.0, "context references unknown observable");
          for (std::size_t j = i + 1; j < c.size(); ++j)
            if (c[i] == c[j]) report.add("contexts", 0.0, "context repeats an observable");
        }
      }
      if (g.outputs.factors() != m) report.add("contextual alphabets", 0.0, "outputs must be Y^m");
    }
  }
  return report;
}

/// Empty report iff device d can be played in game g.
inline ValidationReport compatibility(const Game& g, const Device& d) {
  ValidationReport report;
  if (g.num_inputs() != d.num_inputs() || g.num_outputs() != d.num_outputs()) {
    report.add("alphabet sizes", 0.0,
               "game " + std::to_string(g.num_inputs()) + "x" + std::to_string(g.num_outputs()) + ", device " +
                   std::to_string(d.num_inputs()) + "x" + std::to_string(d.num_outputs()));
    return report;
  }
  const bool device_contextual = d.kind == DeviceKind::contextual;
  switch (g.kind) {
    case GameKind::nonlocal:
      if (device_contextual) report.add("structure", 0.0, "contextual device cannot play a nonlocal game");
      if (d.kind == DeviceKind::components && (!(d.inputs == g.inputs) || !(d.outputs == g.outputs)))
        report.add("structure", 0.0, "component alphabets differ from the players' alphabets");
      break;
    case GameKind::contextual:
      if (!d.contextual) {
        report.add("structure", 0.0, "contextual game needs a contextual device");
      } else if (d.contextual->contexts != g.contexts) {
        report.add("structure", 0.0, "device contexts differ from game contexts");
      }
      break;
    case GameKind::general:
      break;
  }
  return report;
}

inline void require_compatible(const Game& g, const Device& d) {
  const auto report = compatibility(g, d);
  if (!report.ok())
    throw Error(ErrorCode::Incompatible, report.violations.front().check + ": " + report.violations.front().detail);
}

inline SpotCheckGame spot_check(const Game& g, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::BadQ, "q must lie in (0,1)");
  return SpotCheckGame{g, q};
}

/// (p(a_1)...p(a_n), H(a_1,x_1) + ... + H(a_n,x_n)).
template <GameLike G>
std::pair<double, double> extend_sequences(const G& g, std::span<const std::size_t> a_seq,
                                           std::span<const std::size_t> x_seq) {
  if (a_seq.size() != x_seq.size()) throw Error(ErrorCode::LengthMismatch, "input and output sequences differ");
  double p = 1.0, h = 0.0;
  for (std::size_t j = 0; j < a_seq.size(); ++j) {
    if (a_seq[j] >= g.num_inputs()) throw Error(ErrorCode::UnknownLetter, "input letter " + std::to_string(a_seq[j]));
    if (x_seq[j] >= g.num_outputs())
      throw Error(ErrorCode::UnknownLetter, "output letter " + std::to_string(x_seq[j]));
    p *= g.probability(a_seq[j]);
    h += g.score(a_seq[j], x_seq[j]);
  }
  return {p, h};
}

}  // namespace randx
