#pragma once

// Built-in games and devices: CHSH with its optimal and best classical
// devices, and the Magic Square constructions showing that a superclassical
// score alone does not certify randomness.

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "randx/classicaloracle.hpp"
#include "randx/protocol.hpp"

namespace randx {

struct ExpectedValue {
  double value;
  std::string source;  // how the reference value was obtained
};

struct CatalogEntry {
  std::string name;
  std::optional<Game> game;
  std::optional<Device> device;
  std::map<std::string, ExpectedValue> expected_values;
};

namespace detail {

inline ComplexMatrix bell_state() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return outer(v);
}

inline ComplexMatrix ray(double theta) { return outer(real_qubit(theta)); }

inline int parity3(std::size_t bits) { return static_cast<int>(((bits >> 2) ^ (bits >> 1) ^ bits) & 1U); }

// Bit k (k = 0, 1, 2) of a three-bit output letter 4 x^(0) + 2 x^(1) + x^(2).
inline std::size_t bit(std::size_t letter, std::size_t k) { return (letter >> (2 - k)) & 1U; }

inline std::size_t letter3(std::size_t b0, std::size_t b1, std::size_t b2) { return 4 * b0 + 2 * b1 + b2; }

}  // namespace detail

// ---------------------------------------------------------------- CHSH

/// Inputs and outputs are bit pairs (letters 2 v_1 + v_2); the players win iff
/// x1 xor x2 = a1 and a2.
inline Game chsh_game() {
  Game g = make_game("chsh", GameKind::nonlocal, Alphabet::product({2, 2}), Alphabet::product({2, 2}));
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t x = 0; x < 4; ++x) {
      const std::size_t a1 = a >> 1, a2 = a & 1, x1 = x >> 1, x2 = x & 1;
      g.set_score(a, x, ((x1 ^ x2) == (a1 & a2)) ? 1.0 : 0.0);
    }
  g.distinguished = 0;
  return g;
}

/// Maximally entangled pair measured in real bases at angles 0, pi/4 (first
/// player) and pi/8, -pi/8 (second player).
inline Device chsh_optimal_device() {
  const std::array<double, 2> first{0.0, std::numbers::pi / 4.0};
  const std::array<double, 2> second{std::numbers::pi / 8.0, -std::numbers::pi / 8.0};
  std::vector<std::vector<std::vector<ComplexMatrix>>> factors(2);
  for (std::size_t a = 0; a < 2; ++a) {
    factors[0].push_back({detail::ray(first[a]), detail::ray(first[a] + std::numbers::pi / 2.0)});
    factors[1].push_back({detail::ray(second[a]), detail::ray(second[a] + std::numbers::pi / 2.0)});
  }
  return make_component_device({2, 2}, detail::bell_state(), factors);
}

/// Both players always answer 0.
inline Device chsh_classical_device() {
  return deterministic_device(Alphabet::product({2, 2}), Alphabet::product({2, 2}), {{0, 0}, {0, 0}});
}

inline CatalogEntry chsh() {
  CatalogEntry e;
  e.name = "chsh";
  e.game = chsh_game();
  e.device = chsh_optimal_device();
  const double wg = 0.5 + std::sqrt(2.0) / 4.0;
  e.expected_values = {{"W_G", {wg, "closed form 1/2 + sqrt(2)/4"}},
                       {"W_classical", {0.75, "exhaustive enumeration"}},
                       {"W_G_abar", {0.75, "closed form"}},
                       {"noise_tolerance", {wg - 0.75, "W_G - W_G_abar"}}};
  return e;
}

// ---------------------------------------------------------- Magic Square

/// Player 1 fills row a1 of a 3x3 bit grid with even parity, player 2 fills
/// column a2 with odd parity, and the shared cell must agree:
/// x1^(a2) = x2^(a1). Output letters are 4 x^(0) + 2 x^(1) + x^(2).
inline Game magic_square_game() {
  Game g = make_game("magic-square", GameKind::nonlocal, Alphabet::product({3, 3}), Alphabet::product({8, 8}));
  for (std::size_t a = 0; a < 9; ++a)
    for (std::size_t x = 0; x < 64; ++x) {
      const std::size_t a1 = a / 3, a2 = a % 3, x1 = x / 8, x2 = x % 8;
      const bool win = detail::parity3(x1) == 0 && detail::parity3(x2) == 1 && detail::bit(x1, a2) == detail::bit(x2, a1);
      g.set_score(a, x, win ? 1.0 : 0.0);
    }
  g.distinguished = 0;
  return g;
}

/// Output pairs (x1, x2) allowed as the deterministic answer on input (0,0):
/// x1 even, x2 odd, and x1^(0) = x2^(0).
inline std::vector<std::pair<std::size_t, std::size_t>> magic_square_anchor_pairs() {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t x1 = 0; x1 < 8; ++x1)
    for (std::size_t x2 = 0; x2 < 8; ++x2)
      if (detail::parity3(x1) == 0 && detail::parity3(x2) == 1 && detail::bit(x1, 0) == detail::bit(x2, 0))
        out.emplace_back(x1, x2);
  return out;
}

/// E^{x1bar,x2bar}: answers (x1bar, x2bar) on input (0,0), wins with
/// certainty whenever an input is 0 and plays CHSH on inputs {1,2}^2.
/// Built from E^{000,001} by XOR-ing a grid mask M with even row and column
/// parities into the answers (row a1 of M for player 1, column a2 for player 2).
inline Device magic_square_e_device(std::size_t x1bar, std::size_t x2bar) {
  if (x1bar >= 8 || x2bar >= 8 || detail::parity3(x1bar) != 0 || detail::parity3(x2bar) != 1 ||
      detail::bit(x1bar, 0) != detail::bit(x2bar, 0))
    throw Error(ErrorCode::BadParams, "anchor outputs must be even/odd with matching first bits");
  const double pi = std::numbers::pi;
  const ComplexMatrix id = identity(2);
  const ComplexMatrix none;
  // E^{000,001}; unlisted outputs have zero projectors.
  std::vector<std::vector<ComplexMatrix>> first(3, std::vector<ComplexMatrix>(8, none));
  std::vector<std::vector<ComplexMatrix>> second(3, std::vector<ComplexMatrix>(8, none));
  first[0][0b000] = id;
  first[1][0b000] = detail::ray(0.0);
  first[1][0b011] = detail::ray(pi / 2.0);
  first[2][0b101] = detail::ray(-pi / 4.0);
  first[2][0b110] = detail::ray(pi / 4.0);
  second[0][0b001] = id;
  second[1][0b001] = detail::ray(pi / 8.0);
  second[1][0b010] = detail::ray(5.0 * pi / 8.0);
  second[2][0b001] = detail::ray(-pi / 8.0);
  second[2][0b010] = detail::ray(3.0 * pi / 8.0);

  std::array<std::array<std::size_t, 3>, 3> m{};
  for (std::size_t k = 0; k < 3; ++k) {
    m[0][k] = detail::bit(x1bar, k);
    m[k][0] = detail::bit(x2bar ^ 0b001, k);
  }
  m[1][1] = 0;
  m[1][2] = m[1][0];
  m[2][1] = m[0][1];
  m[2][2] = m[2][0] ^ m[0][1];

  std::vector<std::vector<std::vector<ComplexMatrix>>> factors(2);
  factors[0].assign(3, std::vector<ComplexMatrix>(8, none));
  factors[1].assign(3, std::vector<ComplexMatrix>(8, none));
  for (std::size_t a = 0; a < 3; ++a) {
    const std::size_t row = detail::letter3(m[a][0], m[a][1], m[a][2]);
    const std::size_t col = detail::letter3(m[0][a], m[1][a], m[2][a]);
    for (std::size_t x = 0; x < 8; ++x) {
      factors[0][a][x ^ row] = first[a][x];
      factors[1][a][x ^ col] = second[a][x];
    }
  }
  return make_component_device({2, 2}, detail::bell_state(), factors);
}

/// E: a uniformly random anchor pair, then E^{x1bar,x2bar}. Block k of the
/// state is the k-th anchor pair in magic_square_anchor_pairs() order.
inline Device magic_square_e_mixture() {
  std::vector<Device> parts;
  for (const auto& [x1, x2] : magic_square_anchor_pairs()) parts.push_back(magic_square_e_device(x1, x2));
  const std::vector<double> w(parts.size(), 1.0 / static_cast<double>(parts.size()));
  return direct_sum(w, parts);
}

/// The 16 grids with even rows whose columns are odd except column a2bar,
/// which is even. Grid bits are g[row][col].
inline std::vector<std::array<std::array<std::size_t, 3>, 3>> magic_square_grids(std::size_t a2bar) {
  std::vector<std::array<std::array<std::size_t, 3>, 3>> out;
  for (std::size_t free = 0; free < 16; ++free) {
    std::array<std::array<std::size_t, 3>, 3> g{};
    g[0][0] = (free >> 3) & 1U;
    g[0][1] = (free >> 2) & 1U;
    g[1][0] = (free >> 1) & 1U;
    g[1][1] = free & 1U;
    for (std::size_t r = 0; r < 2; ++r) g[r][2] = g[r][0] ^ g[r][1];
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t target = c == a2bar ? 0 : 1;
      g[2][c] = g[0][c] ^ g[1][c] ^ target;
    }
    out.push_back(g);
  }
  return out;
}

/// D^{a1bar,a2bar}: classical device that wins with certainty off
/// (a1bar, a2bar) and loses with certainty on it, with uniformly distributed
/// answers in both cases. Player 1 reads a grid G, player 2 reads G with the
/// cell (a1bar, a2bar) flipped; the grid index is the label register.
inline Device magic_square_classical_device(std::size_t a1bar, std::size_t a2bar) {
  if (a1bar >= 3 || a2bar >= 3) throw Error(ErrorCode::BadParams, "input out of range");
  std::vector<Device> parts;
  for (auto g : magic_square_grids(a2bar)) {
    std::vector<std::vector<std::size_t>> strategy(2, std::vector<std::size_t>(3));
    for (std::size_t a = 0; a < 3; ++a) strategy[0][a] = detail::letter3(g[a][0], g[a][1], g[a][2]);
    g[a1bar][a2bar] ^= 1U;
    for (std::size_t a = 0; a < 3; ++a) strategy[1][a] = detail::letter3(g[0][a], g[1][a], g[2][a]);
    parts.push_back(deterministic_device(Alphabet::product({3, 3}), Alphabet::product({8, 8}), strategy));
  }
  const std::vector<double> w(parts.size(), 1.0 / static_cast<double>(parts.size()));
  return direct_sum(w, parts);
}

/// Inputs with a1 = 0 or a2 = 0, as flat letters 3 a1 + a2.
inline std::vector<std::size_t> magic_square_s_inputs() { return {0, 1, 2, 3, 6}; }

/// D^S: a uniformly random (a1bar, a2bar) in S, then D^{a1bar,a2bar}.
inline Device magic_square_ds() {
  std::vector<Device> parts;
  for (std::size_t a : magic_square_s_inputs()) parts.push_back(magic_square_classical_device(a / 3, a % 3));
  const std::vector<double> w(parts.size(), 1.0 / static_cast<double>(parts.size()));
  return direct_sum(w, parts);
}

/// beta = 1/2 - sqrt(2)/4, E's losing probability on inputs outside S.
inline double magic_square_beta() { return 0.5 - std::sqrt(2.0) / 4.0; }

/// D: D^S with probability beta/(0.2 + beta), E with probability 0.2/(0.2 + beta).
inline Device magic_square_mixed() {
  const double beta = magic_square_beta();
  const std::vector<double> w{beta / (0.2 + beta), 0.2 / (0.2 + beta)};
  const std::vector<Device> parts{magic_square_ds(), magic_square_e_mixture()};
  return direct_sum(w, parts);
}

inline CatalogEntry magic_square() {
  CatalogEntry e;
  e.name = "magic-square";
  e.game = magic_square_game();
  e.device = magic_square_e_mixture();
  const double beta = magic_square_beta();
  e.expected_values = {
      {"W_classical", {8.0 / 9.0, "exhaustive enumeration"}},
      {"E_average", {5.0 / 9.0 + 4.0 / 9.0 * (0.5 + std::sqrt(2.0) / 4.0), "closed form 5/9 + (4/9)(1/2 + sqrt(2)/4)"}},
      {"mixed_loss", {0.2 * beta / (0.2 + beta), "closed form 0.2 beta / (0.2 + beta)"}},
      {"DS_loss_on_S", {0.2, "closed form"}},
      {"DS_loss_off_S", {0.0, "closed form"}}};
  return e;
}

struct DemoCheck {
  std::string name;
  double computed;
  double expected;
  double tolerance;
  bool pass;
};

struct DemoReport {
  std::vector<DemoCheck> checks;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const DemoCheck& c) { return c.pass; });
  }
};

/// Verifies that E behaves as claimed: (i) each E^{x1bar,x2bar} answers its
/// anchor pair on input (0,0); (ii) given the mixture label, E's (0,0) output
/// has zero min-entropy; (iii) E wins with certainty on S and with
/// probability 1/2 + sqrt(2)/4 elsewhere. Also reports the D^S and D losses.
inline DemoReport demo_not_randomness_generating() {
  DemoReport report;
  auto add = [&](std::string name, double computed, double expected, double tol) {
    report.checks.push_back({std::move(name), computed, expected, tol, std::abs(computed - expected) <= tol});
  };
  const Game g = magic_square_game();
  const double chsh_value = 0.5 + std::sqrt(2.0) / 4.0;

  // (i)
  double worst = 1.0;
  for (const auto& [x1, x2] : magic_square_anchor_pairs()) {
    const Device e = magic_square_e_device(x1, x2);
    const ComplexMatrix* p = e.projector(0, x1 * 8 + x2);
    worst = std::min(worst, p ? (*p * e.phi).trace().real() : 0.0);
  }
  add("(i) min over anchor pairs of Pr[answer = anchor | input (0,0)]", worst, 1.0, 1e-12);

  // (ii) joint distribution of (output on (0,0), label)
  const Device e = magic_square_e_mixture();
  const std::size_t labels = magic_square_anchor_pairs().size();
  std::vector<std::vector<double>> joint(g.num_outputs(), std::vector<double>(labels, 0.0));
  for (const auto& b : e.measurements[0].branches)
    for (std::size_t k = 0; k < labels; ++k) {
      const auto o = static_cast<Eigen::Index>(4 * k);
      joint[b.output][k] = (b.projector.block(o, o, 4, 4) * e.phi.block(o, o, 4, 4)).trace().real();
    }
  add("(ii) H_min(output on (0,0) | label)", hmin_classical_adversary(joint), 0.0, 1e-12);

  // (iii)
  double on_s = 1.0, off_s = 0.0;
  for (std::size_t a = 0; a < 9; ++a) {
    const double w = conditional_score(g, e, a);
    if (a / 3 == 0 || a % 3 == 0) on_s = std::min(on_s, w);
    else off_s = std::max(off_s, std::abs(w - chsh_value));
  }
  add("(iii) min win probability of E on S", on_s, 1.0, 1e-12);
  add("(iii) max |win probability of E off S - (1/2 + sqrt(2)/4)|", off_s, 0.0, 1e-12);
  add("E average win probability", expected_score(g, e), 5.0 / 9.0 + 4.0 / 9.0 * chsh_value, 1e-9);

  const Device ds = magic_square_ds();
  double ds_on = 0.0, ds_off = 0.0;
  for (std::size_t a = 0; a < 9; ++a) {
    const double loss = 1.0 - conditional_score(g, ds, a);
    if (a / 3 == 0 || a % 3 == 0) ds_on = std::max(ds_on, std::abs(loss - 0.2));
    else ds_off = std::max(ds_off, loss);
  }
  add("max |D^S loss on S - 0.2|", ds_on, 0.0, 1e-12);
  add("max D^S loss off S", ds_off, 0.0, 1e-12);

  const Device mixed = magic_square_mixed();
  const double beta = magic_square_beta();
  double lo = 1.0, hi = 0.0;
  for (std::size_t a = 0; a < 9; ++a) {
    const double loss = 1.0 - conditional_score(g, mixed, a);
    lo = std::min(lo, loss);
    hi = std::max(hi, loss);
  }
  add("mixed device loss (max over inputs)", hi, 0.2 * beta / (0.2 + beta), 1e-9);
  add("mixed device loss spread over inputs", hi - lo, 0.0, 1e-12);
  return report;
}

// ------------------------------------------------------------- lookup

inline std::vector<std::string> catalog_game_names() { return {"chsh", "magic-square"}; }

inline std::vector<std::string> catalog_device_names() {
  return {"chsh-optimal", "chsh-classical", "magic-square-e", "magic-square-e0", "magic-square-ds",
          "magic-square-mixed"};
}

inline std::optional<Game> catalog_game(const std::string& name) {
  if (name == "chsh") return chsh_game();
  if (name == "magic-square") return magic_square_game();
  return std::nullopt;
}

inline std::optional<Device> catalog_device(const std::string& name) {
  if (name == "chsh-optimal") return chsh_optimal_device();
  if (name == "chsh-classical") return chsh_classical_device();
  if (name == "magic-square-e") return magic_square_e_mixture();
  if (name == "magic-square-e0") return magic_square_e_device(0b000, 0b001);
  if (name == "magic-square-ds") return magic_square_ds();
  if (name == "magic-square-mixed") return magic_square_mixed();
  return std::nullopt;
}

}  // namespace randx
