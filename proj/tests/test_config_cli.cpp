#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ruinkit/commands.hpp"
#include "ruinkit/config.hpp"
#include "ruinkit/errors.hpp"
#include "ruinkit/mph.hpp"

using namespace ruinkit;

namespace {

const std::string kData = RUINKIT_TEST_DATA;

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string config_error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

const char* kTwoRegime = R"({
  "model": {"kind": "two-regime", "regular": {"kind": "exp", "rate": 1.0},
            "severe": {"kind": "erlang", "stages": 5, "rate": 1.0}, "r": 0.7,
            "r_k": {"base": 0.6, "slope": 0.4}, "p_k": 0.8},
  "process": {"lambda": 1.0, "c": 1.5, "u": 0.0}
})";

}  // namespace

TEST_CASE("round trip") {
  const std::vector<std::string> docs{
      kTwoRegime,
      R"({"model": {"kind": "stage-cascade", "m": 3, "mu_k": [1.5, 1.75, 2.1], "p_k": {"base": 0.9, "slope": 0.05},
                    "P": [[0.5, 0.5], [0, 1]], "beta": [1, 0], "alpha": [0.2, 0.3, 0.5]},
          "process": {"arrival": {"kind": "erlang", "stages": 2, "rate": 2.0},
                      "c": {"start": 1.1, "stop": 3.3, "count": 7}, "u": 0.1},
          "query": {"theta": 0.123456789012345, "s": {"start": 5, "stop": 25, "count": 3}, "y": 0.3,
                    "tol": 1e-9, "method": "truncated", "s_cap": 512},
          "command": {"out": "x.csv", "seed": 18446744073709551615, "n_paths": 10, "depth": 4,
                      "correlation_matrix": true, "k_max": 16}})",
      R"({"model": {"kind": "independent", "marginals_of": {"kind": "stationary", "alpha": [0.6, 0.4],
                    "A": [[-2, 0.5], [0, -1]], "D": [[1, 0.5], [0.3, 0.7]]}, "count": 5},
          "process": {"environment": {"generator": [[-0.5, 0.5], [1, -1]], "initial": [0.3, 0.7],
                      "lambda": [0.8, 2], "c": [1.5, 3]}}})",
      R"({"model": {"kind": "explicit", "alpha": [1],
                    "blocks": [{"A": [[-1]], "D": [[1]]}, {"A": [[-3]], "D": [[3]]}]},
          "process": {"lambda": 0.3333333333333333, "c": 0.7}})",
  };
  for (const std::string& d : docs) {
    const RunConfig a = parse_config(d);
    const std::string text = to_json(a);
    const RunConfig b = parse_config(text);
    CHECK(to_json(b) == text);
    CHECK(std::abs(a.query.theta - b.query.theta) <= 1e-15);
    CHECK(a.command.seed == b.command.seed);
    const MphModel ma = a.model.build(), mb = b.model.build();
    for (std::size_t k = 1; k <= 6; ++k) {
      CHECK(max_abs(ma.block(k).A - mb.block(k).A) <= 1e-15);
      CHECK(max_abs(ma.block(k).D - mb.block(k).D) <= 1e-15);
    }
  }
  const RunConfig c = parse_config(docs[1]);
  CHECK(c.command.seed == 18446744073709551615ull);
  CHECK(c.process.c.values().size() == 7);
  CHECK(c.process.c.values().back() == 3.3);
  CHECK(c.query.s.values() == std::vector<double>{5, 15, 25});
}

TEST_CASE("constant sequences give a stationary model") {
  std::string doc = kTwoRegime;
  doc.replace(doc.find(R"({"base": 0.6, "slope": 0.4})"), 27, "0.6");
  CHECK(parse_config(doc).model.build().kind() == FamilyKind::stationary);
  CHECK(parse_config(kTwoRegime).model.build().kind() != FamilyKind::stationary);
}

TEST_CASE("errors name the field path") {
  CHECK(config_error_path(R"({"model": {"kind": "independent", "claims": [{"kind": "exp", "rate": 1, "shape": 2}]},
                                "process": {"lambda": 1, "c": 1}})") == "model.claims[0].shape");
  CHECK(config_error_path(R"({"model": {"kind": "independent", "claims": [{"kind": "exp", "rate": -1}]},
                                "process": {"lambda": 1, "c": 1}})") == "model.claims[0].rate");
  CHECK(config_error_path(R"({"model": {"kind": "independent", "claims": [{"kind": "exp", "rate": 1}]},
                                "process": {"lambda": 1}})") == "process.c");
  CHECK(config_error_path(R"({"model": {"kind": "independent", "claims": [{"kind": "exp", "rate": 1}]},
                                "process": {"lambda": 1, "c": 1}, "extra": 1})") == "extra");
  CHECK(config_error_path(R"({"model": {"kind": "stationary", "alpha": [1], "A": [[-1]], "D": [[0.5]]},
                                "process": {"lambda": 1, "c": 1}})") == "model");
  CHECK(config_error_path(R"({"model": {"kind": "independent", "claims": [{"kind": "exp", "rate": 1}]},
                                "process": {"lambda": 1, "c": 1}, "query": {"s": 2.5}})") == "query.s");
  CHECK(config_error_path(R"({"model": {"kind": "independent", "claims": [{"kind": "matrix", "alpha": [0.5, 0.6],
                                "A": [[-1, 0], [0, -1]]}]}, "process": {"lambda": 1, "c": 1}})") == "model.claims[0]");
  CHECK(config_error_path("{not json") == "(document)");
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config(kData + "/missing.json"), ConfigError);

  std::ostringstream out, err;
  CHECK(execute("ruin", kData + "/unknown_field.json", std::nullopt, std::nullopt, out, err) == kExitConfig);
  CHECK(err.str().find("model.regular.shape") != std::string::npos);
}

TEST_CASE("describe") {
  RunConfig cfg = parse_config(kTwoRegime);
  cfg.command.depth = 8;
  std::ostringstream out, err;
  REQUIRE(run_command("describe", cfg, out, err) == kExitOk);
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == std::vector<std::string>{"k", "mean", "variance", "corr_next"});
  CHECK(std::abs(std::stod(rows[1][1]) - 2.20) <= 0.005);
  CHECK(std::abs(std::stod(rows[1][2]) - 5.56) <= 0.005);
  CHECK(std::abs(std::stod(rows[1][3]) - 0.34) <= 0.005);
  CHECK(std::abs(std::stod(rows[8][1]) - 2.09) <= 0.005);

  cfg.command.correlation_matrix = true;
  std::ostringstream full;
  REQUIRE(run_command("describe", cfg, full, err) == kExitOk);
  const auto m = parse_csv(full.str());
  REQUIRE(m[0].size() == 12);
  CHECK(std::stod(m[3][6]) == 1.0);
  CHECK(std::abs(std::stod(m[1][11]) - 0.05) <= 0.005);
}

TEST_CASE("ruin and transform") {
  std::ostringstream out, err;
  REQUIRE(execute("ruin", kData + "/exp_ultimate.json", std::nullopt, std::nullopt, out, err) == kExitOk);
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"u", "ruin_probability", "truncation"});
  CHECK(std::abs(std::stod(rows[1][1]) - 0.5) < 1e-6);
  CHECK(std::abs(std::stod(rows[2][1]) - 0.5 * std::exp(-0.5)) < 1e-6);
  CHECK(std::abs(std::stod(rows[3][1]) - 0.5 * std::exp(-1.0)) < 1e-6);

  RunConfig cfg = parse_config(kTwoRegime);
  cfg.query.theta = 0.1;
  std::ostringstream bad;
  CHECK(run_command("ruin", cfg, bad, err) == kExitConfig);

  cfg.query.y = 0.5;
  cfg.query.s = ScalarOrGrid{40.0, std::nullopt};
  std::ostringstream t;
  REQUIRE(run_command("transform", cfg, t, err) == kExitOk);
  const auto tr = parse_csv(t.str());
  CHECK(tr[0] == std::vector<std::string>{"value", "truncation", "elapsed_seconds"});
  CHECK(tr[1][1] == "40");
  const double v = std::stod(tr[1][0]);
  CHECK(v > 0.0);
  CHECK(v < 1.0);

  std::ostringstream stationary;
  RunConfig st = parse_config(R"({"model": {"kind": "independent", "claims": [{"kind": "exp", "rate": 1}]},
                                  "process": {"lambda": 1, "c": 2}, "query": {"method": "stationary"}})");
  CHECK(run_command("ruin", st, stationary, err) == kExitConfig);
  st.model = parse_config(R"({"model": {"kind": "stationary", "alpha": [1], "A": [[-1]], "D": [[1]]},
                              "process": {"lambda": 1, "c": 2}})").model;
  std::ostringstream st_out;
  REQUIRE(run_command("ruin", st, st_out, err) == kExitOk);
  const auto sr = parse_csv(st_out.str());
  CHECK(sr[0] == std::vector<std::string>{"u", "ruin_probability", "psi_stochastic"});
  CHECK(std::abs(std::stod(sr[1][1]) - 0.5) < 1e-9);
  CHECK(sr[1][2] == "false");

  std::ostringstream grid, e3;
  REQUIRE(execute("ruin", kData + "/two_regime.json", std::nullopt, std::nullopt, grid, e3) == kExitOk);
  const auto g = parse_csv(grid.str());
  REQUIRE(g.size() == 4);
  CHECK(std::stod(g[1][1]) > std::stod(g[2][1]));
  CHECK(std::stod(g[2][1]) > std::stod(g[3][1]));
}

TEST_CASE("bounds flags certain ruin") {
  std::ostringstream out, err;
  REQUIRE(execute("bounds", kData + "/bounds_grid.json", std::nullopt, std::nullopt, out, err) == kExitOk);
  const auto rows = parse_csv(out.str());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].back() == "ruin_certain");
  CHECK(rows[1][7] == "true");
  CHECK(rows[2][7] == "true");
  CHECK(rows[3][7] == "false");
  for (std::size_t i = 1; i <= 3; ++i) {
    CHECK(rows[i][2] == "6");
    CHECK(std::stod(rows[i][6]) == 1.0);
  }
}

TEST_CASE("simulate is reproducible") {
  std::ostringstream a, b, c, err;
  REQUIRE(execute("simulate", kData + "/simulate.json", std::nullopt, std::nullopt, a, err) == kExitOk);
  REQUIRE(execute("simulate", kData + "/simulate.json", std::nullopt, std::nullopt, b, err) == kExitOk);
  REQUIRE(execute("simulate", kData + "/simulate.json", std::nullopt, std::uint64_t{5}, c, err) == kExitOk);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
  const auto rows = parse_csv(a.str());
  CHECK(rows[0] == std::vector<std::string>{"value", "std_error", "n_paths", "seed"});
  CHECK(rows[1][2] == "20000");
  CHECK(rows[1][3] == "4");
}

TEST_CASE("exit codes") {
  std::ostringstream out, err;
  CHECK(execute("ruin", kData + "/truncation_cap.json", std::nullopt, std::nullopt, out, err) == kExitNumerical);
  CHECK(err.str().find("truncation limit") != std::string::npos);
  RunConfig cfg = parse_config(kTwoRegime);
  CHECK(run_command("nonsense", cfg, out, err) == kExitConfig);
}
