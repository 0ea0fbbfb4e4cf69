#include "test_support.hpp"

using namespace randx;
using namespace randx::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kWchsh = 0.5 + std::sqrt(2.0) / 4.0;
const std::vector<double> kSweep{0.1, 0.05, 0.02, 0.01};

Game constant_score_game(double h) {
  Game g = chsh_game();
  for (auto& s : g.scores) s = h;
  return g;
}

Device qubit_device(const ComplexMatrix& phi) {
  Device d;
  d.dims = {2};
  d.phi = phi;
  d.inputs = Alphabet::plain(1);
  d.outputs = Alphabet::plain(2);
  d.measurements = {Measurement{{{0, diag({1, 0})}, {1, diag({0, 1})}}}};
  d.unitaries = identity_unitaries(1, 2);
  return d;
}

// Born-rule expected score evaluated entry by entry from the game table.
double born_score(const Game& g, const Device& d) {
  double total = 0.0;
  for (std::size_t a = 0; a < g.num_inputs(); ++a)
    for (std::size_t x = 0; x < g.num_outputs(); ++x)
      if (const ComplexMatrix* p = d.projector(a, x)) total += g.probability(a) * g.score(a, x) * (*p * d.phi).trace().real();
  return total;
}

}  // namespace

TEST_CASE("game_operator", "[scoring]") {
  const Device d = chsh_optimal_device();
  CHECK(max_abs(game_operator(constant_score_game(0.0), d).K) == 0.0);
  CHECK(max_diff(game_operator(constant_score_game(1.0), d).K, identity(4)) < 1e-12);

  const GameOperator op = game_operator(chsh_game(), d);
  const RealVector ev = eigenvalues(op.K);
  CHECK_THAT(ev(3), WithinAbs(kWchsh, 1e-12));
  CHECK(ev(3) <= 1.0 + 1e-9);
  CHECK(ev(0) >= -1e-12);
  // phi is the top eigenvector, so phi_G = W phi.
  CHECK(max_diff(op.phi_G, kWchsh * d.phi) < 1e-12);
  CHECK_THAT(op.rho_G.trace().real(), WithinAbs(kWchsh, 1e-12));

  // K reproduced from the definition.
  const Game g = chsh_game();
  ComplexMatrix k = zeros(4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t x = 0; x < 4; ++x) k += g.probability(a) * g.score(a, x) * *d.projector(a, x);
  CHECK(max_diff(op.K, k) < 1e-12);

  CHECK_THROWS_AS(game_operator(magic_square_game(), d), Error);
}

TEST_CASE("eps_score", "[scoring]") {
  const Game g = chsh_game();
  CHECK_THAT(eps_score(g, chsh_optimal_device(), 0.0), WithinAbs(kWchsh, 1e-12));
  CHECK_THAT(eps_score(g, chsh_classical_device(), 0.0), WithinAbs(0.75, 1e-15));
  for (double eps : {0.0, 0.1, 0.5, 1.0})
    CHECK_THAT(eps_score(constant_score_game(1.0), chsh_optimal_device(), eps), WithinAbs(1.0, 1e-12));

  SECTION("eps = 0 is the Born-rule score on random devices") {
    CounterRng rng(12);
    for (int trial = 0; trial < 40; ++trial) {
      const Device d = random_two_player_device(rng, 2, 2 + rng.below(2), 1 + rng.below(4));
      CHECK_THAT(eps_score(g, d, 0.0), WithinAbs(born_score(g, d), 1e-9));
      CHECK_THAT(expected_score(g, d), WithinAbs(born_score(g, d), 1e-12));
    }
  }
  SECTION("continuity in eps") {
    CounterRng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
      const Device d = random_two_player_device(rng, 2, 2, 1 + rng.below(4));
      const double w0 = eps_score(g, d, 0.0);
      double previous = INFINITY;
      for (double eps : {0.2, 0.1, 0.05, 0.01, 0.001}) {
        const double gap = std::abs(eps_score(g, d, eps) - w0);
        CHECK(gap <= previous + 1e-12);
        previous = gap;
      }
      CHECK(previous < 1e-2);
    }
  }
}

TEST_CASE("eps_randomness", "[scoring]") {
  SECTION("device deterministic on the input") {
    for (double eps : {0.1, 1.0}) CHECK(eps_randomness_input(chsh_classical_device(), 0, eps) == 0.0);
  }
  SECTION("maximally mixed qubit measured in its eigenbasis") {
    CHECK_THAT(eps_randomness_input(qubit_device(identity(2) / 2.0), 0, 1.0), WithinAbs(0.0, 1e-12));
  }
  SECTION("|+> measured in the computational basis") {
    CHECK_THAT(eps_randomness_input(qubit_device(mat2(0.5, 0.5, 0.5, 0.5)), 0, 1.0), WithinAbs(1.0, 1e-12));
  }
  SECTION("game variant averages over inputs") {
    const Device d = chsh_optimal_device();
    // every CHSH input pair sees outcome probabilities (c^2/2, s^2/2, s^2/2, c^2/2), c = cos(pi/8)
    for (double eps : {0.1, 0.5}) {
      const double c2 = std::pow(std::cos(std::numbers::pi / 8), 2), s2 = 1.0 - c2;
      const double sum = 2.0 * std::pow(c2 / 2.0, 1.0 + eps) + 2.0 * std::pow(s2 / 2.0, 1.0 + eps);
      CHECK_THAT(eps_randomness_game(chsh_game(), d, eps), WithinAbs(-std::log2(sum) / eps, 1e-9));
      CHECK_THAT(eps_randomness_input(d, 0, eps), WithinAbs(-std::log2(sum) / eps, 1e-9));
    }
  }
  SECTION("eps must be positive") {
    CHECK_THROWS_AS(eps_randomness_input(chsh_optimal_device(), 0, 0.0), Error);
  }
}

TEST_CASE("weighted_randomness", "[scoring]") {
  const Game g = chsh_game();
  CounterRng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Device d = random_two_player_device(rng, 2, 2, 1 + rng.below(4));
    for (double eps : {0.1, 0.7}) {
      CHECK_THAT(weighted_randomness(g, d, eps, 0.0), WithinAbs(eps_randomness_game(g, d, eps), 1e-9));
      CHECK_THAT(weighted_randomness(constant_score_game(0.0), d, eps, 2.5),
                 WithinAbs(eps_randomness_game(g, d, eps), 1e-12));
    }
  }

  SECTION("relation to R_G - s W_G with O(eps) slack") {
    const Device d = chsh_optimal_device();
    std::vector<double> ratios;
    for (double eps : kSweep) {
      const double slack = eps_randomness_game(g, d, eps) - eps_score(g, d, eps) - weighted_randomness(g, d, eps, 1.0);
      ratios.push_back(slack / eps);
    }
    for (double r : ratios) {
      CHECK(std::isfinite(r));
      CHECK(std::abs(r) < 1.0);
    }
    CHECK(*std::max_element(ratios.begin(), ratios.end()) - *std::min_element(ratios.begin(), ratios.end()) < 0.05);
  }

  SECTION("spot-check game uses the base device inputs") {
    const SpotCheckGame gq = spot_check(g, 0.3);
    const Device d = chsh_optimal_device();
    CHECK(std::isfinite(weighted_randomness(gq, d, 0.1, 0.5)));
    CHECK_THAT(weighted_randomness(gq, d, 0.1, 0.0), WithinAbs(eps_randomness_game(gq, d, 0.1), 1e-12));
  }
}

TEST_CASE("quadratic_rate_curve", "[scoring]") {
  const RateCurve pi = quadratic_rate_curve(0.75, 4);
  CHECK(pi(0.75) == 0.0);
  CHECK(pi(0.3) == 0.0);
  CHECK_THAT(pi(kWchsh), WithinRel(2.0 * std::numbers::log2e * std::pow(kWchsh - 0.75, 2) / 3.0, 1e-14));
  CHECK_THAT(pi(kWchsh), WithinAbs(0.010313639011655506, 1e-15));
  CHECK(pi(0.85) < pi(0.853));

  // nondecreasing, convex, derivative matches finite differences
  const double h = 1e-3;
  for (double x = 0.0; x <= 1.0 - 2 * h; x += 0.01) {
    CHECK(pi(x + h) >= pi(x));
    CHECK(pi(x) - 2 * pi(x + h) + pi(x + 2 * h) >= -1e-15);
    if (std::abs(x - 0.75) > 2e-3) CHECK_THAT(pi.deriv(x), WithinAbs((pi(x + 1e-6) - pi(x - 1e-6)) / 2e-6, 1e-7));
  }

  CHECK_THROWS_AS(quadratic_rate_curve(1.0, 4), Error);
  CHECK_THROWS_AS(quadratic_rate_curve(0.5, 1), Error);
}

TEST_CASE("ghz_comparison_curve", "[scoring]") {
  const RateCurve ghz = ghz_comparison_curve();
  auto h = [](double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); };
  CHECK(ghz(1.0) == 1.0);
  CHECK_THAT(ghz(0.945), WithinAbs(-1.0, 1e-12));
  CHECK(plot_value(ghz, 0.945) == 0.0);
  CHECK_THAT(ghz(0.9999), WithinAbs(1.0 - 2.0 * h(0.0001 / 0.11), 1e-14));
  CHECK_THAT(ghz.deriv(0.99), WithinAbs((ghz(0.99 + 1e-7) - ghz(0.99 - 1e-7)) / 2e-7, 1e-5));
  try {
    ghz(0.89);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainError);
  }
}

TEST_CASE("devind_bound", "[scoring]") {
  const RateCurve pi = quadratic_rate_curve(0.75, 4);
  CHECK(devind_bound(pi, 0.7) == 0.0);
  CHECK(devind_bound(pi, 0.75) == 0.0);

  // pi(r) - pi'(r) r with pi'(r) = 4 log2(e) (r - w) / 3
  const double r = 0.8;
  const double expect = 2.0 * std::numbers::log2e * 0.0025 / 3.0 - 4.0 * std::numbers::log2e * 0.05 / 3.0 * r;
  CHECK_THAT(devind_bound(pi, r), WithinAbs(expect, 1e-15));
  CHECK_THAT(devind_bound(pi, r), WithinAbs(-0.07453924377926313, 1e-15));

  // intercept of the tangent line through (r, pi(r)) with slope from finite differences
  const double slope = (pi(r + 1e-6) - pi(r - 1e-6)) / 2e-6;
  CHECK_THAT(devind_bound(pi, r), WithinAbs(pi(r) - slope * r, 1e-8));

  CHECK_THROWS_AS(devind_bound(pi, 0.0), Error);
  CHECK_THROWS_AS(devind_bound(pi, 0.9, kWchsh), Error);
}

TEST_CASE("predictable_cap_check", "[scoring]") {
  const Game g = chsh_game();
  SECTION("deterministic device") {
    const CapCheck c = predictable_cap_check(g, chsh_classical_device(), 0.3, 0.75);
    CHECK(c.slack >= -1e-9);
    CHECK(predictable_cap_check(constant_score_game(0.0), chsh_classical_device(), 0.3, 0.1).W_eps == 0.0);
  }
  SECTION("every deterministic strategy respects the cap exactly") {
    for (std::size_t s = 0; s < 16; ++s) {
      const std::vector<std::vector<std::size_t>> st{{s & 1, (s >> 1) & 1}, {(s >> 2) & 1, (s >> 3) & 1}};
      const Device d = deterministic_device(g.inputs, g.outputs, st);
      for (double eps : {0.05, 0.3, 1.0}) CHECK(predictable_cap_check(g, d, eps, 0.75).slack >= -1e-9);
    }
  }
  SECTION("mixture of two a-bar deterministic devices") {
    const Device c1 = deterministic_device(g.inputs, g.outputs, {{0, 0}, {0, 0}});
    const Device c2 = deterministic_device(g.inputs, g.outputs, {{1, 0}, {1, 1}});
    const std::vector<double> w{0.5, 0.5};
    const std::vector<Device> parts{c1, c2};
    const Device mix = direct_sum(w, parts);
    for (double eps : kSweep) {
      const CapCheck c = predictable_cap_check(g, mix, eps, 0.75);
      CHECK(std::isfinite(c.slack / eps));
      CHECK(c.slack / eps > -1.0);
    }
  }
  SECTION("unpredictable device") {
    try {
      predictable_cap_check(g, chsh_optimal_device(), 0.1, 0.75);
      FAIL("expected NotPredictable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPredictable);
    }
  }
}

TEST_CASE("randomness_report", "[scoring]") {
  const auto r = randomness_report(chsh_game(), chsh_optimal_device(), 0.1);
  CHECK(r.eps == 0.1);
  CHECK(std::isfinite(r.W_eps));
  CHECK(r.R_a > 0.0);
  CHECK(r.R_G > 0.0);
}
