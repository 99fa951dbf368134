#include <doctest.h>

#include "cavbh/config.hpp"

using namespace cavbh;

TEST_CASE("a bare scenario line resolves the full preset") {
  const ScenarioConfig c = parse_config("scenario = fig3\n");
  CHECK(c.scenario == Scenario::Fig3);
  CHECK(c.params.u0 == doctest::Approx(-1.2));
  CHECK(c.u0_second == doctest::Approx(-0.4));
  CHECK(c.params.eta == doctest::Approx(2.0));
  CHECK(c.params.v_cl == doctest::Approx(-4.0));
  CHECK(c.params.n_atoms == 1);
  CHECK(c.params.n_sites == 2);
  REQUIRE(c.sweep);
  CHECK(c.sweep->parameter == "delta_c");
  CHECK_FALSE(c.eta_match_depth);

  const ScenarioConfig c4 = parse_config("scenario = fig4a\n");
  CHECK(c4.params.delta_c == doctest::Approx(-3.75));
  CHECK(c4.eta_match_depth);
  CHECK(c4.target_v_eff == doctest::Approx(-4.0));
  CHECK(c4.mode == HamiltonianMode::Effective);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_config("scenario = fig3\neta = abc\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("abc") != std::string::npos);
  }

  try {
    parse_config("scenario = fig3\nnot a key value line\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
  }

  try {
    parse_config("scenario = fig3\nbogus_key = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
}

TEST_CASE("custom scenarios demand their physics keys") {
  try {
    parse_config("scenario = custom\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* key : {"u0", "delta_c", "eta", "v_cl", "a_s", "n_atoms", "n_sites"})
      CHECK(msg.find(key) != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(""), ConfigError);  // no scenario at all

  const ScenarioConfig ok = parse_config(
      "scenario = custom\nu0 = -1\ndelta_c = -3\neta = 2\nv_cl = -4\n"
      "a_s = 0.5\nn_atoms = 2\nn_sites = 2\n");
  CHECK(ok.params.a_s == doctest::Approx(0.5));
}

TEST_CASE("comments, blank lines, duplicates, and overrides") {
  const ScenarioConfig c = parse_config(
      "# full-line comment\n"
      "scenario = fig3\n"
      "\n"
      "eta = 1.0   # trailing comment\n"
      "eta = 1.5\n",
      {{"eta", "2.5"}, {"n_q", "48"}});
  CHECK(c.params.eta == doctest::Approx(2.5));  // --set wins over file
  CHECK(c.numerics.n_q == 48);

  CHECK_THROWS_AS(parse_config("scenario = fig3\n", {{"nonsense", "1"}}), ConfigError);
}

TEST_CASE("sweep validation") {
  CHECK_THROWS_AS(parse_config("scenario = custom\nu0=-1\ndelta_c=-3\neta=2\n"
                               "v_cl=-4\na_s=0\nn_atoms=2\nn_sites=2\n"
                               "sweep = n_atoms\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = fig3\nsweep_points = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = custom\nu0=-1\ndelta_c=-3\neta=2\n"
                               "v_cl=-4\na_s=0\nn_atoms=2\nn_sites=2\n"
                               "sweep_start = 0\nsweep_stop = 1\nsweep_points = 4\n"),
                  ConfigError);  // bounds without a parameter
  const ScenarioConfig c = parse_config(
      "scenario = custom\nu0=-1\ndelta_c=-3\neta=2\nv_cl=-4\na_s=0\n"
      "n_atoms=2\nn_sites=2\nsweep = a_s\nsweep_start = 0\nsweep_stop = 3\n"
      "sweep_points = 4\n");
  REQUIRE(c.sweep);
  CHECK(c.sweep->value_at(0) == doctest::Approx(0.0));
  CHECK(c.sweep->value_at(3) == doctest::Approx(3.0));
}

TEST_CASE("model validation is enforced at parse time") {
  CHECK_THROWS(parse_config("scenario = fig3\nn_atoms = 0\n"));
  CHECK_THROWS(parse_config("scenario = fig3\nkappa_in_recoils = -1\n"));
  CHECK_THROWS(parse_config("scenario = fig3\nboundary = periodic\n"));  // M = 2
  CHECK_THROWS(parse_config("scenario = fig3\nsite = 5\n"));
}

TEST_CASE("serialize/parse round trip is the identity on resolved configs") {
  const ScenarioConfig a = parse_config(
      "scenario = fig4b\nsweep_points = 5\nmode = effective\nn_max = 17\n"
      "kappa_in_recoils = 1.25\n");
  std::string text;
  for (const auto& [k, v] : serialize_config(a)) text += k + " = " + v + "\n";
  const ScenarioConfig b = parse_config(text);
  CHECK(serialize_config(a) == serialize_config(b));

  const ScenarioConfig c = parse_config("scenario = fig5b\n");
  std::string text2;
  for (const auto& [k, v] : serialize_config(c)) text2 += k + " = " + v + "\n";
  CHECK(serialize_config(parse_config(text2)) == serialize_config(c));
}

TEST_CASE("preset audit: every figure preset carries its published parameters") {
  struct Expected {
    const char* scenario;
    double u0, delta_c, eta_or_target, v_cl, a_s;
    int n, m;
    bool match_depth;
  };
  // checked-in table of the caption values each preset must resolve to
  const Expected table[] = {
      {"fig2a", -1.0, -3.0, 2.0, -4.0, 0.1, 2, 2, false},
      {"fig2b", -1.0, -3.0, 2.0, -4.0, 0.1, 2, 2, false},
      {"fig3", -1.2, -2.0, 2.0, -4.0, 0.0, 1, 2, false},
      {"fig4a", -1.0, -3.75, -4.0, 0.0, 0.0, 4, 4, true},
      {"fig4b", -1.0, -5.0, -4.0, 0.0, 0.0, 4, 4, true},
      {"fig5a", -1.0, -5.0, -4.0, 0.0, 0.0, 4, 4, true},
      {"fig5b", -1.0, -4.2, -4.0, 0.0, 3.0, 4, 4, true},
  };
  for (const auto& e : table) {
    CAPTURE(e.scenario);
    const ScenarioConfig c = parse_config(std::string("scenario = ") + e.scenario + "\n");
    CHECK(c.params.u0 == doctest::Approx(e.u0));
    CHECK(c.params.delta_c == doctest::Approx(e.delta_c));
    CHECK(c.params.v_cl == doctest::Approx(e.v_cl));
    CHECK(c.params.a_s == doctest::Approx(e.a_s));
    CHECK(c.params.n_atoms == e.n);
    CHECK(c.params.n_sites == e.m);
    CHECK(c.eta_match_depth == e.match_depth);
    if (e.match_depth)
      CHECK(c.target_v_eff == doctest::Approx(e.eta_or_target));
    else
      CHECK(c.params.eta == doctest::Approx(e.eta_or_target));
    CHECK(c.params.eta_eff == 0.0);
  }
  // the figure-specific companions
  CHECK(parse_config("scenario = fig3\n").u0_second == doctest::Approx(-0.4));
  CHECK(parse_config("scenario = fig4b\n").delta_c_second == doctest::Approx(-3.0));
  CHECK(parse_config("scenario = fig5a\n").delta_c_second == doctest::Approx(-3.0));
  CHECK(parse_config("scenario = fig5b\n").a_s_initial == doctest::Approx(0.0));
}

TEST_CASE("mode and boundary enumerations parse and print") {
  const ScenarioConfig c = parse_config("scenario = fig3\nmode = coupled-nh\n");
  CHECK(c.mode == HamiltonianMode::CoupledNonHermitian);
  CHECK(to_string(c.mode) == "coupled-nh");
  CHECK_THROWS_AS(parse_config("scenario = fig3\nmode = weird\n"), ConfigError);
  CHECK(to_string(Boundary::Periodic) == "periodic");
  for (Scenario s : {Scenario::Fig2a, Scenario::Fig2b, Scenario::Fig3, Scenario::Fig4a,
                     Scenario::Fig4b, Scenario::Fig5a, Scenario::Fig5b, Scenario::Custom})
    CHECK(parse_config("scenario = " + to_string(s) +
                       (s == Scenario::Custom
                            ? "\nu0=-1\ndelta_c=-3\neta=2\nv_cl=-4\na_s=0\n"
                              "n_atoms=2\nn_sites=2\n"
                            : "\n"))
              .scenario == s);
}
