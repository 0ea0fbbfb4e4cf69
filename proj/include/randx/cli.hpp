#pragma once

// Command-line front end. dispatch() parses argv, runs one subcommand and
// writes its result to `out` (or --output). Exit codes: 0 success, 1 invalid
// input or usage, 2 computational guard (TooLarge, Unsupported).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "randx/convexity.hpp"
#include "randx/io.hpp"

namespace randx::cli {

enum class Format { json, csv };

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : columns_(header.size()) { line(header); }

  template <typename... T>
  void row(const T&... cells) {
    std::vector<std::string> v{cell(cells)...};
    line(v);
  }
  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double v) { return fmt17(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  static std::string cell(const char* s) { return cell(std::string(s)); }

  void line(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os_ << (k ? "," : "") << cells[k];
    os_ << '\n';
  }
  std::size_t columns_;
  std::ostringstream os_;
};

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json known_value_json(const KnownValue& v) { return Json{{"value", optional_json(v.value)}, {"status", v.status}}; }

inline Json report_json(const ValidationReport& r) {
  Json list = Json::array();
  for (const auto& v : r.violations)
    list.push_back(Json{{"check", v.check}, {"deviation", v.deviation}, {"detail", v.detail}});
  return list;
}

inline Json bound_json(const ExpansionBound& b) {
  return Json{{"N", b.N},
              {"pi_chi", optional_json(b.pi_chi)},
              {"b", optional_json(b.b)},
              {"delta", b.delta},
              {"log2_delta", b.log2_delta},
              {"eps", b.eps},
              {"delta_term", b.delta_term},
              {"hmin_lower", optional_json(b.hmin_lower)},
              {"bits_per_round", optional_json(b.bits_per_round)},
              {"idealized_bits", optional_json(b.idealized_bits)},
              {"soundness", optional_json(b.soundness)}};
}

inline Json summary_json(const SuccessStateSummary& s) {
  return Json{{"N", s.N},   {"q", s.q},         {"chi", s.chi},
              {"eps", s.eps}, {"mass", s.mass}, {"sum", s.sum},
              {"K_value", s.K_value}, {"K_per_round", s.K_value / static_cast<double>(s.N)},
              {"branches", s.branches}};
}

/// Threshold W_{G,a-bar} for rate curves: table value when known, otherwise a
/// constrained see-saw lower bound.
inline std::pair<double, std::string> rate_threshold(const Game& g, std::uint64_t seed, std::size_t threads) {
  try {
    const KnownValues kv = known_values(g.name);
    if (kv.W_G_abar.value) return {*kv.W_G_abar.value, kv.W_G_abar.status};
  } catch (const Error&) {
  }
  SeesawOptions opt;
  opt.constrain_abar = true;
  opt.seed = seed;
  opt.threads = threads;
  return {seesaw(g, opt).value, "see-saw lower bound, best found"};
}

struct Grid {
  double lo = 0.0, hi = 1.0;
  std::size_t n = 2;
};

inline Grid parse_grid(const std::string& s) {
  Grid g;
  double lo = 0.0, hi = 0.0;
  long long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !(is >> std::ws).eof())
    throw Error(ErrorCode::BadParams, "grid must look like lo:hi:count");
  g.lo = lo;
  g.hi = hi;
  g.n = static_cast<std::size_t>(n);
  return g;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadParams, "bad number '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::BadParams, "empty list");
  return out;
}

inline StateModel parse_model(const std::string& s) {
  if (s == "independent_copies" || s == "independent-copies") return StateModel::independent_copies;
  if (s == "sequential") return StateModel::sequential;
  throw Error(ErrorCode::BadParams, "unknown state model '" + s + "'");
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomness expansion toolkit: games, devices, rate curves and protocol analysis", "randx"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string format = "json";
  std::string output;
  std::size_t threads = default_threads();
  std::uint64_t seed = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("-o,--output", output, "Write the result to this file instead of stdout");
    sub->add_option("--threads", threads, "Worker threads")->envname("RANDX_THREADS")->check(CLI::PositiveNumber);
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "Random seed")->envname("RANDX_SEED"); };

  std::string game_src = "chsh", device_src = "chsh-optimal";
  std::size_t n = 10, trials = 1, restarts = 20, iters = 500;
  double q = 0.5, chi = 0.75, eps = 0.1, delta = 0.125;
  std::optional<double> b, slack, w_opt;
  std::optional<std::size_t> r_opt;
  std::string model = "independent_copies", dims = "2,2", grid = "0.75:0.8536:50", curve = "quadratic";
  std::string suite = "binary-disturbance", eps_list = "0.01,0.1,0.5,1", dim_range = "2:8", device_out;
  bool constrain = false;
  std::string export_game, export_device, validate_game_src, validate_device_src;

  auto* c_classical = app.add_subcommand("classical-value", "Exact classical value by strategy enumeration");
  c_classical->add_option("--game", game_src, "Catalog game name or game file")->required();

  auto* c_seesaw = app.add_subcommand("seesaw", "See-saw lower bound on the quantum value");
  c_seesaw->add_option("--game", game_src, "Catalog game name or game file")->required();
  c_seesaw->add_option("--dims", dims, "Per-player dimensions, e.g. 2,2");
  c_seesaw->add_flag("--constrain-abar", constrain, "Require deterministic outputs on the distinguished input");
  c_seesaw->add_option("--restarts", restarts, "Random restarts")->check(CLI::PositiveNumber);
  c_seesaw->add_option("--iters", iters, "Iteration cap per restart")->check(CLI::PositiveNumber);
  c_seesaw->add_option("--device-out", device_out, "Also write the witnessing device to this file");
  add_seed(c_seesaw);

  auto* c_rate = app.add_subcommand("rate-curve", "Tabulate a rate curve and its derivative");
  c_rate->add_option("--game", game_src, "Game supplying the threshold and output alphabet size");
  c_rate->add_option("--curve", curve, "Curve family")->check(CLI::IsMember({"quadratic", "ghz"}));
  c_rate->add_option("--w", w_opt, "Override the threshold W_{G,a-bar}");
  c_rate->add_option("--r", r_opt, "Override the output alphabet size");
  c_rate->add_option("--grid", grid, "lo:hi:count, endpoints included");
  add_seed(c_rate);

  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo runs of the spot-checking protocol");
  c_sim->add_option("--game", game_src, "Catalog game name or game file");
  c_sim->add_option("--device", device_src, "Catalog device name or device file");
  c_sim->add_option("--n", n, "Rounds per run")->required()->check(CLI::PositiveNumber);
  c_sim->add_option("--q", q, "Test-round probability")->required();
  c_sim->add_option("--chi", chi, "Score threshold")->required();
  c_sim->add_option("--trials", trials, "Independent runs")->check(CLI::PositiveNumber);
  c_sim->add_option("--model", model, "State model: independent_copies or sequential");
  add_seed(c_sim);

  auto* c_enum = app.add_subcommand("enumerate", "Exact success-state sum for small N");
  c_enum->add_option("--game", game_src, "Catalog game name or game file");
  c_enum->add_option("--device", device_src, "Catalog device name or device file");
  c_enum->add_option("--n", n, "Rounds")->required()->check(CLI::PositiveNumber);
  c_enum->add_option("--q", q, "Test-round probability")->required();
  c_enum->add_option("--chi", chi, "Score threshold")->required();
  c_enum->add_option("--eps", eps, "Renyi parameter eps in (0,1]");
  c_enum->add_option("--model", model, "State model: independent_copies or sequential");

  auto* c_bound = app.add_subcommand("entropy-bound", "Smooth min-entropy lower bound from an enumeration");
  c_bound->add_option("--game", game_src, "Catalog game name or game file");
  c_bound->add_option("--device", device_src, "Catalog device name or device file");
  c_bound->add_option("--n", n, "Rounds")->required()->check(CLI::PositiveNumber);
  c_bound->add_option("--q", q, "Test-round probability")->required();
  c_bound->add_option("--chi", chi, "Score threshold")->required();
  c_bound->add_option("--eps", eps, "Renyi parameter eps in (0,1]");
  c_bound->add_option("--delta", delta, "Smoothing parameter in (0,1]");
  c_bound->add_option("--b", b, "Also report extractable-bit accounting with soundness 3*2^{-bqN}");
  c_bound->add_option("--slack", slack, "Constant c for the concrete extractable-bit bound");
  c_bound->add_option("--model", model, "State model: independent_copies or sequential");
  add_seed(c_bound);

  auto* c_verify = app.add_subcommand("verify", "Randomized checks of the Schatten-norm inequalities");
  c_verify->add_option("--suite", suite, "Inequality to check")
      ->check(CLI::IsMember({"uniform-convexity", "binary-disturbance", "chain"}));
  c_verify->add_option("--trials", trials, "Random instances")->check(CLI::PositiveNumber);
  c_verify->add_option("--eps", eps_list, "Comma-separated eps values, cycled over trials");
  c_verify->add_option("--dims", dim_range, "Dimension range lo:hi");
  add_seed(c_verify);

  auto* c_demo = app.add_subcommand("magic-square-demo", "Check that the Magic Square device E is not randomness generating");

  auto* c_validate = app.add_subcommand("validate", "Validate game and/or device files");
  c_validate->add_option("--game", validate_game_src, "Catalog game name or game file");
  c_validate->add_option("--device", validate_device_src, "Catalog device name or device file");

  auto* c_export = app.add_subcommand("export", "Write a catalog game or device in the file format");
  c_export->add_option("--game", export_game, "Catalog game name");
  c_export->add_option("--device", export_device, "Catalog device name");

  for (auto* sub : {c_classical, c_seesaw, c_rate, c_sim, c_enum, c_bound, c_verify, c_demo, c_validate, c_export})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const Format fmt = format == "csv" ? Format::csv : Format::json;
  std::string result;
  int status = 0;
  auto emit_json = [&](const Json& j) { result = j.dump(2) + "\n"; };

  try {
    if (c_classical->parsed()) {
      const Game g = load_game(game_src);
      const auto e = classical_value(g, threads);
      if (fmt == Format::csv) {
        Csv csv({"game", "value", "count"});
        csv.row(g.name, e.best_value, static_cast<std::size_t>(e.count));
        result = csv.str();
      } else {
        emit_json(Json{{"game", g.name},
                       {"value", e.best_value},
                       {"strategy", e.best_strategy},
                       {"count", e.count},
                       {"label", "exact (exhaustive enumeration)"}});
      }
    } else if (c_seesaw->parsed()) {
      const Game g = load_game(game_src);
      const auto d = parse_list(dims);
      if (d.size() != 2) throw Error(ErrorCode::BadDims, "--dims needs two entries");
      SeesawOptions opt;
      opt.dim1 = static_cast<std::size_t>(d[0]);
      opt.dim2 = static_cast<std::size_t>(d[1]);
      opt.constrain_abar = constrain;
      opt.restarts = restarts;
      opt.iters = iters;
      opt.seed = seed;
      opt.threads = threads;
      const SeesawResult r = seesaw(g, opt);
      if (!device_out.empty()) {
        std::ofstream f(device_out);
        if (!f) throw Error(ErrorCode::Parse, "cannot write '" + device_out + "'");
        f << device_to_json(r.device).dump(2) << "\n";
      }
      if (fmt == Format::csv) {
        Csv csv({"game", "value", "constrained", "iterations", "best_restart", "label"});
        csv.row(g.name, r.value, r.constrained, r.iterations, r.best_restart, r.label);
        result = csv.str();
      } else {
        emit_json(Json{{"game", g.name},
                       {"value", r.value},
                       {"label", r.label},
                       {"constrained", r.constrained},
                       {"iterations", r.iterations},
                       {"best_restart", r.best_restart},
                       {"seed", seed},
                       {"device", device_to_json(r.device)}});
      }
    } else if (c_rate->parsed()) {
      const Grid gr = parse_grid(grid);
      RateCurve pi;
      std::string w_source;
      if (curve == "ghz") {
        pi = ghz_comparison_curve();
        w_source = "fixed";
      } else {
        double w = 0.0;
        std::size_t r = 0;
        if (w_opt) {
          w = *w_opt;
          w_source = "user";
        }
        if (r_opt) r = *r_opt;
        if (!w_opt || !r_opt) {
          const Game g = load_game(game_src);
          if (!w_opt) std::tie(w, w_source) = rate_threshold(g, seed, threads);
          if (!r_opt) r = g.num_outputs();
        }
        pi = quadratic_rate_curve(w, r);
      }
      std::vector<double> xs(gr.n);
      for (std::size_t k = 0; k < gr.n; ++k)
        xs[k] = gr.n == 1 ? gr.lo : gr.lo + (gr.hi - gr.lo) * static_cast<double>(k) / static_cast<double>(gr.n - 1);
      if (fmt == Format::csv) {
        Csv csv({"x", "pi", "pi_prime"});
        for (double x : xs) csv.row(x, pi(x), pi.deriv(x));
        result = csv.str();
      } else {
        Json pts = Json::array();
        for (double x : xs) pts.push_back(Json{{"x", x}, {"pi", pi(x)}, {"pi_prime", pi.deriv(x)}});
        emit_json(Json{{"curve", to_string(pi.label)}, {"w", pi.w}, {"w_source", w_source}, {"r", pi.r},
                       {"points", std::move(pts)}});
      }
    } else if (c_sim->parsed()) {
      const Game g = load_game(game_src);
      const Device d = load_device(device_src);
      ProtocolParams p{n, q, chi, seed, parse_model(model)};
      if (fmt == Format::csv) {
        const Transcript t = simulate(g, d, p, true, 0);
        Csv csv({"round", "t", "a", "x", "score"});
        for (std::size_t k = 0; k < t.rounds.size(); ++k)
          csv.row(k, t.rounds[k].t, t.rounds[k].a, t.rounds[k].x, t.rounds[k].score);
        result = csv.str();
      } else {
        const auto runs = simulate_trials(g, d, p, trials, threads);
        std::size_t ok = 0;
        double mean_c = 0.0;
        Json list = Json::array();
        for (std::size_t k = 0; k < runs.size(); ++k) {
          ok += runs[k].success ? 1 : 0;
          mean_c += runs[k].c / static_cast<double>(runs.size());
          list.push_back(Json{{"trial", k}, {"c", runs[k].c}, {"success", runs[k].success}});
        }
        emit_json(Json{{"game", g.name},
                       {"device", device_src},
                       {"N", n},
                       {"q", q},
                       {"chi", chi},
                       {"seed", seed},
                       {"model", to_string(p.model)},
                       {"threshold", chi * q * static_cast<double>(n)},
                       {"trials", trials},
                       {"successes", ok},
                       {"success_rate", static_cast<double>(ok) / static_cast<double>(trials)},
                       {"mean_c", mean_c},
                       {"runs", std::move(list)}});
      }
    } else if (c_enum->parsed() || c_bound->parsed()) {
      const Game g = load_game(game_src);
      const Device d = load_device(device_src);
      const auto s = enumerate_success_state(g, d, n, q, chi, eps, parse_model(model), threads);
      if (c_enum->parsed()) {
        if (fmt == Format::csv) {
          Csv csv({"N", "q", "chi", "eps", "mass", "sum", "K_value", "K_per_round", "branches"});
          csv.row(n, q, chi, eps, s.mass, s.sum, s.K_value, s.K_value / static_cast<double>(n),
                  static_cast<std::size_t>(s.branches));
          result = csv.str();
        } else {
          Json j = summary_json(s);
          j["model"] = model;
          emit_json(j);
        }
      } else {
        const ExpansionBound eb = entropy_lower_bound(s, delta);
        Json j{{"enumeration", summary_json(s)}, {"bound", bound_json(eb)}};
        std::optional<ExpansionBound> ext;
        if (b) {
          const auto [w, w_source] = rate_threshold(g, seed, threads);
          ext = extractable_bits(quadratic_rate_curve(w, g.num_outputs()), chi, q, *b, n, slack);
          j["extractable"] = bound_json(*ext);
          j["extractable"]["w"] = w;
          j["extractable"]["w_source"] = w_source;
        }
        if (fmt == Format::csv) {
          Csv csv({"N", "eps", "delta", "K_value", "delta_term", "hmin_lower", "bits_per_round"});
          csv.row(n, eps, delta, s.K_value, eb.delta_term, *eb.hmin_lower, *eb.bits_per_round);
          result = csv.str();
        } else {
          emit_json(j);
        }
      }
    } else if (c_verify->parsed()) {
      const auto eps_grid = parse_list(eps_list);
      const Grid dr = parse_grid(dim_range + ":1");
      ConvexitySuite which = ConvexitySuite::chain;
      if (suite == "uniform-convexity") which = ConvexitySuite::uniform_convexity;
      if (suite == "binary-disturbance") which = ConvexitySuite::binary_disturbance;
      const auto rows = run_convexity_suite(which, trials, seed, eps_grid, static_cast<std::size_t>(dr.lo),
                                            static_cast<std::size_t>(dr.hi), threads);
      std::size_t violations = 0;
      double min_margin = INFINITY;
      for (const auto& t : rows) {
        violations += (t.check.holds && t.steps_hold) ? 0 : 1;
        min_margin = std::min(min_margin, t.check.margin);
      }
      if (fmt == Format::csv) {
        Csv csv({"trial", "dim", "eps", "lhs", "rhs", "margin"});
        for (const auto& t : rows) csv.row(t.trial, t.dim, t.eps, t.check.lhs, t.check.rhs, t.check.margin);
        result = csv.str();
      } else {
        emit_json(Json{{"suite", suite}, {"trials", trials}, {"seed", seed}, {"violations", violations},
                       {"min_margin", min_margin}});
      }
      if (violations > 0) status = 1;
    } else if (c_demo->parsed()) {
      const DemoReport rep = demo_not_randomness_generating();
      if (fmt == Format::csv) {
        Csv csv({"check", "computed", "expected", "tolerance", "pass"});
        for (const auto& c : rep.checks) csv.row(c.name, c.computed, c.expected, c.tolerance, c.pass);
        result = csv.str();
      } else {
        Json list = Json::array();
        for (const auto& c : rep.checks)
          list.push_back(Json{{"check", c.name}, {"computed", c.computed}, {"expected", c.expected},
                              {"tolerance", c.tolerance}, {"pass", c.pass}});
        emit_json(Json{{"pass", rep.pass()}, {"checks", std::move(list)}});
      }
      if (!rep.pass()) status = 1;
    } else if (c_validate->parsed()) {
      if (validate_game_src.empty() && validate_device_src.empty())
        throw Error(ErrorCode::BadParams, "validate needs --game and/or --device");
      Json j;
      bool ok = true;
      std::optional<Game> g;
      std::optional<Device> d;
      Csv csv({"object", "check", "deviation", "detail"});
      auto record = [&](const char* what, const ValidationReport& r) {
        j[what] = report_json(r);
        ok = ok && r.ok();
        for (const auto& v : r.violations) csv.row(std::string(what), v.check, v.deviation, v.detail);
      };
      if (!validate_game_src.empty()) {
        g = load_game(validate_game_src);
        record("game", validate_game(*g));
      }
      if (!validate_device_src.empty()) {
        d = load_device(validate_device_src);
        record("device", validate_device(*d));
      }
      if (g && d) record("compatibility", compatibility(*g, *d));
      j["valid"] = ok;
      if (fmt == Format::csv) result = csv.str();
      else emit_json(j);
      if (!ok) status = 1;
    } else if (c_export->parsed()) {
      if (export_game.empty() == export_device.empty())
        throw Error(ErrorCode::BadParams, "export needs exactly one of --game, --device");
      if (fmt == Format::csv) throw Error(ErrorCode::BadParams, "export writes JSON only");
      if (!export_game.empty()) {
        const auto g = catalog_game(export_game);
        if (!g) throw Error(ErrorCode::Unknown, "no catalog game '" + export_game + "'");
        emit_json(game_to_json(*g));
      } else {
        const auto d = catalog_device(export_device);
        if (!d) throw Error(ErrorCode::Unknown, "no catalog device '" + export_device + "'");
        emit_json(device_to_json(*d));
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_guard(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (output.empty()) {
    out << result;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << output << "'\n";
      return 1;
    }
    f << result;
  }
  return status;
}

}  // namespace randx::cli
