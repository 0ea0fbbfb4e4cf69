#include "test_support.hpp"

using namespace randx;
using namespace randx::testing;
using Catch::Matchers::WithinAbs;

namespace {

const double kWchsh = 0.5 + std::sqrt(2.0) / 4.0;
const double kBeta = 0.5 - std::sqrt(2.0) / 4.0;

bool in_s(std::size_t a) { return a / 3 == 0 || a % 3 == 0; }

// Win probability on input a straight from the projectors and the score table.
double win_probability(const Game& g, const Device& d, std::size_t a) {
  double total = 0.0;
  for (std::size_t x = 0; x < g.num_outputs(); ++x)
    if (const ComplexMatrix* p = d.projector(a, x)) total += g.score(a, x) * (*p * d.phi).trace().real();
  return total / d.phi.trace().real();
}

}  // namespace

TEST_CASE("catalog entries are valid", "[catalog]") {
  for (const auto& name : catalog_game_names()) {
    const auto g = catalog_game(name);
    REQUIRE(g);
    CHECK(validate_game(*g).ok());
  }
  for (const auto& name : catalog_device_names()) {
    const auto d = catalog_device(name);
    REQUIRE(d);
    CHECK(validate_device(*d).ok());
    const Game g = name.starts_with("chsh") ? chsh_game() : magic_square_game();
    CHECK(compatibility(g, *d).ok());
  }
  CHECK_FALSE(catalog_game("nope"));
  CHECK_FALSE(catalog_device("nope"));
}

TEST_CASE("CHSH entry", "[catalog]") {
  const CatalogEntry e = chsh();
  // Correlation of real-basis measurements on the Bell state is cos(2(alpha - beta)).
  const double angles1[2] = {0.0, std::numbers::pi / 4}, angles2[2] = {std::numbers::pi / 8, -std::numbers::pi / 8};
  double w = 0.0;
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2) {
      const double corr = std::cos(2.0 * (angles1[a1] - angles2[a2]));
      w += 0.25 * (a1 & a2 ? (1.0 - corr) / 2.0 : (1.0 + corr) / 2.0);
    }
  CHECK_THAT(w, WithinAbs(kWchsh, 1e-15));
  CHECK_THAT(expected_score(*e.game, *e.device), WithinAbs(w, 1e-12));
  CHECK_THAT(e.expected_values.at("W_G").value, WithinAbs(w, 1e-15));
  CHECK(classical_value(*e.game).best_value == e.expected_values.at("W_classical").value);
  CHECK(expected_score(*e.game, chsh_classical_device()) == 0.75);
  CHECK(predictability_deviation(chsh_classical_device(), 0) == 0.0);
}

TEST_CASE("Magic Square anchors and E devices", "[catalog]") {
  const Game g = magic_square_game();
  const auto anchors = magic_square_anchor_pairs();
  CHECK(anchors.size() == 8);
  for (const auto& [x1, x2] : anchors) {
    CHECK(g.score(0, x1 * 8 + x2) == 1.0);
    const Device e = magic_square_e_device(x1, x2);
    CHECK(validate_device(e).ok());
    const ComplexMatrix* p = e.projector(0, x1 * 8 + x2);
    REQUIRE(p);
    CHECK_THAT((*p * e.phi).trace().real(), WithinAbs(1.0, 1e-12));
    for (std::size_t a = 0; a < 9; ++a)
      CHECK_THAT(win_probability(g, e, a), WithinAbs(in_s(a) ? 1.0 : kWchsh, 1e-12));
  }
  CHECK_THROWS_AS(magic_square_e_device(1, 1), Error);

  const Device mix = magic_square_e_mixture();
  double avg = 0.0;
  for (std::size_t a = 0; a < 9; ++a) avg += win_probability(g, mix, a) / 9.0;
  CHECK_THAT(avg, WithinAbs(0.934912618041455, 1e-9));
  CHECK_THAT(expected_score(g, mix), WithinAbs(5.0 / 9.0 + 4.0 / 9.0 * kWchsh, 1e-12));
  // The (0,0) output is spread over all eight anchors.
  for (const auto& [x1, x2] : anchors)
    CHECK_THAT((*mix.projector(0, x1 * 8 + x2) * mix.phi).trace().real(), WithinAbs(0.125, 1e-12));
}

TEST_CASE("Magic Square classical devices", "[catalog]") {
  const Game g = magic_square_game();
  for (std::size_t a1 = 0; a1 < 3; ++a1)
    for (std::size_t a2 = 0; a2 < 3; ++a2) {
      const Device d = magic_square_classical_device(a1, a2);
      for (std::size_t a = 0; a < 9; ++a)
        CHECK_THAT(win_probability(g, d, a), WithinAbs(a == 3 * a1 + a2 ? 0.0 : 1.0, 1e-12));
      CHECK_THAT(expected_score(g, d), WithinAbs(8.0 / 9.0, 1e-12));
      // Classical: phi is diagonal, hence commutes with every projector.
      CHECK(predictability_deviation(d, g.distinguished) < 1e-12);
    }
  for (const auto& grid : magic_square_grids(1)) {
    for (std::size_t r = 0; r < 3; ++r) CHECK((grid[r][0] ^ grid[r][1] ^ grid[r][2]) == 0);
    for (std::size_t c = 0; c < 3; ++c) CHECK((grid[0][c] ^ grid[1][c] ^ grid[2][c]) == (c == 1 ? 0u : 1u));
  }
  CHECK_THROWS_AS(magic_square_classical_device(3, 0), Error);

  const Device ds = magic_square_ds();
  for (std::size_t a = 0; a < 9; ++a) CHECK_THAT(1.0 - win_probability(g, ds, a), WithinAbs(in_s(a) ? 0.2 : 0.0, 1e-12));
}

TEST_CASE("Magic Square mixed device", "[catalog]") {
  const Game g = magic_square_game();
  const Device d = magic_square_mixed();
  const double expected = 0.2 * kBeta / (0.2 + kBeta);
  CHECK_THAT(expected, WithinAbs(0.0845420941815590, 1e-15));
  double lo = 1.0, hi = 0.0;
  for (std::size_t a = 0; a < 9; ++a) {
    const double loss = 1.0 - win_probability(g, d, a);
    CHECK_THAT(loss, WithinAbs(expected, 1e-9));
    lo = std::min(lo, loss);
    hi = std::max(hi, loss);
  }
  CHECK(hi - lo <= 1e-12);
  CHECK_THAT(magic_square().expected_values.at("mixed_loss").value, WithinAbs(expected, 1e-15));
}

TEST_CASE("demo_not_randomness_generating", "[catalog]") {
  const DemoReport r = demo_not_randomness_generating();
  CHECK(r.pass());
  CHECK(r.checks.size() >= 3);
  for (const auto& c : r.checks) {
    INFO(c.name);
    CHECK(c.pass);
    CHECK(std::abs(c.computed - c.expected) <= c.tolerance);
  }
}
