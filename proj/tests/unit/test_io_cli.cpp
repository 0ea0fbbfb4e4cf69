#include "test_support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "randx/cli.hpp"

using namespace randx;
using namespace randx::testing;
using Catch::Matchers::WithinAbs;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "randx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("randx_test_" + name);
  std::ofstream(path) << contents;
  return path;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("device JSON round trip", "[io][property]") {
  CounterRng rng(61);
  std::vector<Device> devices{chsh_optimal_device(), chsh_classical_device(), magic_square_e_device(0, 1)};
  for (int k = 0; k < 10; ++k) devices.push_back(random_general_device(rng, 2 + rng.below(3), 3, 2));
  for (int k = 0; k < 5; ++k) devices.push_back(random_two_player_device(rng, 2, 2, 2));
  for (const auto& d : devices) {
    const Device back = device_from_json(Json::parse(device_to_json(d).dump()));
    CHECK(back.kind == d.kind);
    CHECK(back.dims == d.dims);
    CHECK(back.inputs.radices == d.inputs.radices);
    CHECK(back.outputs.radices == d.outputs.radices);
    CHECK(max_diff(back.phi, d.phi) == 0.0);
    for (std::size_t a = 0; a < d.num_inputs(); ++a) {
      CHECK(max_diff(back.unitary(a), d.unitary(a)) == 0.0);
      for (std::size_t x = 0; x < d.num_outputs(); ++x) {
        const ComplexMatrix* p = d.projector(a, x);
        const ComplexMatrix* q = back.projector(a, x);
        REQUIRE((p == nullptr) == (q == nullptr));
        if (p) CHECK(max_diff(*p, *q) == 0.0);
      }
    }
  }
}

TEST_CASE("game JSON round trip", "[io][property]") {
  CounterRng rng(62);
  std::vector<Game> games{chsh_game(), magic_square_game()};
  for (int k = 0; k < 10; ++k) games.push_back(random_general_game(rng, 1 + rng.below(5), 2 + rng.below(3)));
  for (const auto& g : games) {
    const Game back = game_from_json(Json::parse(game_to_json(g).dump()));
    CHECK(back.name == g.name);
    CHECK(back.kind == g.kind);
    CHECK(back.inputs.radices == g.inputs.radices);
    CHECK(back.outputs.radices == g.outputs.radices);
    CHECK(back.distribution == g.distribution);
    CHECK(back.scores == g.scores);
    CHECK(back.distinguished == g.distinguished);
  }
}

TEST_CASE("matrix parsing", "[io]") {
  const ComplexMatrix m = matrix_from_json(Json::parse("[[1, [0, -1]], [[0, 1], 2.5]]"));
  CHECK(m(0, 0) == Complex(1, 0));
  CHECK(m(0, 1) == Complex(0, -1));
  CHECK(m(1, 0) == Complex(0, 1));
  CHECK(m(1, 1) == Complex(2.5, 0));
  for (const char* bad : {"[]", "[[]]", "[[1, 2], [3]]", "[[\"a\"]]", "[[[1, 2, 3]]]", "5"}) {
    INFO(bad);
    try {
      matrix_from_json(Json::parse(bad));
      FAIL("expected Parse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
    }
  }
  CHECK_THROWS_AS(device_from_json(Json::parse(R"({"phi": [[1]]})")), Error);
  CHECK_THROWS_AS(device_from_json(Json::parse(R"({"kind": "weird", "phi": [[1]]})")), Error);
  CHECK_THROWS_AS(load_game("/nonexistent/game.json"), Error);
  const auto broken = temp_file("broken.json", "{ not json");
  CHECK_THROWS_AS(load_device(broken.string()), Error);
}

TEST_CASE("cli exit codes", "[cli]") {
  CHECK(run({"classical-value", "--game", "chsh"}).code == 0);
  CHECK(run({}).code == 1);
  CHECK(run({"no-such-command"}).code == 1);
  CHECK(run({"classical-value", "--game", "nope"}).code == 1);
  CHECK(run({"simulate", "--n", "10", "--q", "2", "--chi", "0.5"}).code == 1);
  const Run guard = run({"enumerate", "--n", "20", "--q", "0.3", "--chi", "0.8"});
  CHECK(guard.code == 2);
  CHECK(guard.err.find("error:") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli subcommands", "[cli]") {
  SECTION("classical-value") {
    const Json j = Json::parse(run({"classical-value", "--game", "magic-square"}).out);
    CHECK_THAT(j["value"].get<double>(), WithinAbs(8.0 / 9.0, 1e-12));
    CHECK(j["count"] == 262144);
  }
  SECTION("rate-curve") {
    const auto rows = lines(run({"rate-curve", "--out", "csv", "--w", "0.75", "--r", "4"}).out);
    REQUIRE(rows.size() == 51);
    CHECK(rows[0] == "x,pi,pi_prime");
    const Json j = Json::parse(run({"rate-curve", "--w", "0.75", "--r", "4", "--grid", "0.8:0.8:1"}).out);
    CHECK_THAT(j["points"][0]["pi"].get<double>(), WithinAbs(quadratic_rate_curve(0.75, 4)(0.8), 1e-15));
  }
  SECTION("simulate") {
    const Json j = Json::parse(run({"simulate", "--n", "500", "--q", "0.2", "--chi", "0.8", "--trials", "4"}).out);
    CHECK(j["runs"].size() == 4);
    CHECK(j["threshold"].get<double>() == 0.8 * 0.2 * 500);
    const auto rows = lines(run({"simulate", "--n", "30", "--q", "0.2", "--chi", "0.8", "--out", "csv"}).out);
    CHECK(rows.size() == 31);
    CHECK(rows[0] == "round,t,a,x,score");
  }
  SECTION("enumerate and entropy-bound agree") {
    const Json e = Json::parse(run({"enumerate", "--n", "2", "--q", "0.3", "--chi", "0.5", "--eps", "0.2"}).out);
    const Json b =
        Json::parse(run({"entropy-bound", "--n", "2", "--q", "0.3", "--chi", "0.5", "--eps", "0.2", "--delta", "0.25"}).out);
    const double k = e["K_value"].get<double>();
    CHECK(b["enumeration"]["K_value"].get<double>() == k);
    CHECK_THAT(b["bound"]["hmin_lower"].get<double>(), WithinAbs(k - 5.0 / 0.2, 1e-12));
  }
  SECTION("verify") {
    const Run r = run({"verify", "--suite", "chain", "--trials", "50"});
    CHECK(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["violations"] == 0);
    CHECK(lines(run({"verify", "--trials", "7", "--out", "csv"}).out).size() == 8);
  }
  SECTION("magic-square-demo") {
    const Run r = run({"magic-square-demo"});
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out)["pass"] == true);
  }
  SECTION("export then validate") {
    const auto game = temp_file("game.json", run({"export", "--game", "chsh"}).out);
    const auto device = temp_file("device.json", run({"export", "--device", "chsh-optimal"}).out);
    const Run r = run({"validate", "--game", game.string(), "--device", device.string()});
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out)["valid"] == true);
    const Json score = Json::parse(run({"classical-value", "--game", game.string()}).out);
    CHECK(score["value"] == 0.75);
    CHECK(run({"validate", "--game", "magic-square", "--device", device.string()}).code == 1);
    CHECK(run({"export", "--game", "chsh", "--device", "chsh-optimal"}).code == 1);
  }
}

TEST_CASE("cli output is deterministic", "[cli]") {
  const std::vector<std::vector<std::string>> cases{
      {"simulate", "--n", "300", "--q", "0.3", "--chi", "0.8", "--trials", "3", "--seed", "5"},
      {"seesaw", "--game", "chsh", "--restarts", "2", "--iters", "50", "--seed", "9"},
      {"verify", "--trials", "20", "--seed", "4", "--out", "csv"}};
  for (auto args : cases) {
    const Run a = run(args);
    args.insert(args.end(), {"--threads", "3"});
    const Run b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}
