#include "cavbh/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cavbh/hamiltonian.hpp"

namespace cavbh {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Fig2a: return "fig2a";
    case Scenario::Fig2b: return "fig2b";
    case Scenario::Fig3: return "fig3";
    case Scenario::Fig4a: return "fig4a";
    case Scenario::Fig4b: return "fig4b";
    case Scenario::Fig5a: return "fig5a";
    case Scenario::Fig5b: return "fig5b";
    case Scenario::Custom: return "custom";
  }
  return "?";
}

std::string to_string(HamiltonianMode m) {
  switch (m) {
    case HamiltonianMode::ExactElimination: return "exact-elim";
    case HamiltonianMode::Effective: return "effective";
    case HamiltonianMode::Coupled: return "coupled";
    case HamiltonianMode::CoupledNonHermitian: return "coupled-nh";
  }
  return "?";
}

std::string to_string(Boundary b) {
  return b == Boundary::Open ? "open" : "periodic";
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(line, "cannot parse '" + v + "' as a number for key '" + key + "'");
  }
}

int parse_int(const std::string& key, const std::string& v, int line) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(line, "cannot parse '" + v + "' as an integer for key '" + key + "'");
  return out;
}

Scenario parse_scenario(const std::string& v, int line) {
  static const std::map<std::string, Scenario> names = {
      {"fig2a", Scenario::Fig2a}, {"fig2b", Scenario::Fig2b}, {"fig3", Scenario::Fig3},
      {"fig4a", Scenario::Fig4a}, {"fig4b", Scenario::Fig4b}, {"fig5a", Scenario::Fig5a},
      {"fig5b", Scenario::Fig5b}, {"custom", Scenario::Custom}};
  const auto it = names.find(v);
  if (it == names.end())
    throw ConfigError(line, "unknown scenario '" + v +
                                "' (expected fig2a|fig2b|fig3|fig4a|fig4b|fig5a|fig5b|custom)");
  return it->second;
}

HamiltonianMode parse_mode(const std::string& v, int line) {
  if (v == "exact-elim") return HamiltonianMode::ExactElimination;
  if (v == "effective") return HamiltonianMode::Effective;
  if (v == "coupled") return HamiltonianMode::Coupled;
  if (v == "coupled-nh") return HamiltonianMode::CoupledNonHermitian;
  throw ConfigError(line, "unknown mode '" + v +
                              "' (expected coupled|effective|exact-elim|coupled-nh)");
}

const std::set<std::string>& sweepable_fields() {
  static const std::set<std::string> f = {"u0",   "delta_c", "eta",
                                          "eta_eff", "v_cl",    "a_s",
                                          "kappa_in_recoils"};
  return f;
}

void apply_preset(ScenarioConfig& c) {
  ModelParams& p = c.params;
  switch (c.scenario) {
    case Scenario::Fig2a:
    case Scenario::Fig2b:
      p.u0 = -1.0;
      p.delta_c = -3.0;
      p.eta = 2.0;
      p.v_cl = -4.0;
      p.a_s = 0.1;
      p.n_atoms = 2;
      p.n_sites = 2;
      c.mode = HamiltonianMode::ExactElimination;
      c.sweep = SweepSpec{"delta_c", -8.0, 0.0, 33};
      c.sweep2 = SweepSpec{"u0", -2.0, -0.1, 11};
      break;
    case Scenario::Fig3:
      p.u0 = -1.2;
      c.u0_second = -0.4;
      p.delta_c = -2.0;
      p.eta = 2.0;
      p.v_cl = -4.0;
      p.a_s = 0.0;
      p.n_atoms = 1;
      p.n_sites = 2;
      c.mode = HamiltonianMode::ExactElimination;
      c.sweep = SweepSpec{"delta_c", -4.0, 1.0, 251};
      break;
    case Scenario::Fig4a:
      p.u0 = -1.0;
      p.delta_c = -3.75;
      p.v_cl = 0.0;
      p.a_s = 0.0;
      p.n_atoms = 4;
      p.n_sites = 4;
      c.mode = HamiltonianMode::Effective;
      c.eta_match_depth = true;
      c.target_v_eff = -4.0;
      c.sweep = SweepSpec{"a_s", 0.0, 20.0, 41};
      break;
    case Scenario::Fig4b:
    case Scenario::Fig5a:
      p.u0 = -1.0;
      p.delta_c = -5.0;
      c.delta_c_second = -3.0;
      p.v_cl = 0.0;
      p.a_s = 0.0;
      p.n_atoms = 4;
      p.n_sites = 4;
      c.mode = HamiltonianMode::Effective;
      c.eta_match_depth = true;
      c.target_v_eff = -4.0;
      c.sweep = SweepSpec{"a_s", 0.0, 20.0, 41};
      break;
    case Scenario::Fig5b:
      p.u0 = -1.0;
      p.delta_c = -4.2;
      p.v_cl = 0.0;
      p.a_s = 3.0;
      c.a_s_initial = 0.0;
      p.n_atoms = 4;
      p.n_sites = 4;
      c.mode = HamiltonianMode::ExactElimination;
      c.eta_match_depth = true;
      c.target_v_eff = -4.0;
      c.numerics.t_final = 100.0;
      c.numerics.dt = 1e-3;
      break;
    case Scenario::Custom:
      break;
  }
}

struct Setter {
  std::function<void(ScenarioConfig&, const std::string&, int)> apply;
};

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto dbl = [](double ModelParams::* field) {
      return Setter{[field](ScenarioConfig& c, const std::string& v, int line) {
        c.params.*field = parse_double("", v, line);
      }};
    };
    t["u0"] = dbl(&ModelParams::u0);
    t["delta_c"] = dbl(&ModelParams::delta_c);
    t["eta"] = dbl(&ModelParams::eta);
    t["eta_eff"] = dbl(&ModelParams::eta_eff);
    t["v_cl"] = dbl(&ModelParams::v_cl);
    t["a_s"] = dbl(&ModelParams::a_s);
    t["kappa_in_recoils"] = dbl(&ModelParams::kappa_in_recoils);
    t["n_atoms"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.params.n_atoms = parse_int("n_atoms", v, line);
    }};
    t["n_sites"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.params.n_sites = parse_int("n_sites", v, line);
    }};
    t["boundary"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      if (v == "open") c.params.boundary = Boundary::Open;
      else if (v == "periodic") c.params.boundary = Boundary::Periodic;
      else throw ConfigError(line, "boundary must be open or periodic, got '" + v + "'");
    }};
    t["n_max"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      if (v == "adaptive") c.params.n_max.reset();
      else c.params.n_max = parse_int("n_max", v, line);
    }};
    t["mode"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.mode = parse_mode(v, line);
    }};
    t["eta_policy"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      if (v == "fixed") c.eta_match_depth = false;
      else if (v == "match-depth") c.eta_match_depth = true;
      else throw ConfigError(line, "eta_policy must be fixed or match-depth, got '" + v + "'");
    }};
    t["target_v_eff"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.target_v_eff = parse_double("target_v_eff", v, line);
    }};
    t["anchor_delta_c"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      if (v == "auto") c.anchor_delta_c.reset();
      else c.anchor_delta_c = parse_double("anchor_delta_c", v, line);
    }};
    t["u0_second"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.u0_second = parse_double("u0_second", v, line);
    }};
    t["delta_c_second"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.delta_c_second = parse_double("delta_c_second", v, line);
    }};
    t["a_s_initial"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.a_s_initial = parse_double("a_s_initial", v, line);
    }};
    t["site"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.site = parse_int("site", v, line);
    }};
    t["output_path"] = {[](ScenarioConfig& c, const std::string& v, int) {
      c.output_path = v;
    }};
    t["jobs"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.jobs = parse_int("jobs", v, line);
    }};
    auto num_int = [](int NumericsConfig::* field) {
      return Setter{[field](ScenarioConfig& c, const std::string& v, int line) {
        c.numerics.*field = parse_int("", v, line);
      }};
    };
    t["n_planewaves"] = num_int(&NumericsConfig::n_planewaves);
    t["n_q"] = num_int(&NumericsConfig::n_q);
    t["n_grid"] = num_int(&NumericsConfig::n_grid);
    t["recompute_cadence"] = num_int(&NumericsConfig::recompute_cadence);
    t["record_stride"] = num_int(&NumericsConfig::record_stride);
    t["dt"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.numerics.dt = parse_double("dt", v, line);
    }};
    t["t_final"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.numerics.t_final = parse_double("t_final", v, line);
    }};
    t["self_consistent_tol"] = {[](ScenarioConfig& c, const std::string& v, int line) {
      c.numerics.self_consistent_tol = parse_double("self_consistent_tol", v, line);
    }};
    auto sweep_field = [](bool second, int member) {
      return Setter{[second, member](ScenarioConfig& c, const std::string& v, int line) {
        auto& slot = second ? c.sweep2 : c.sweep;
        if (!slot) slot = SweepSpec{};
        switch (member) {
          case 0:
            if (!sweepable_fields().count(v))
              throw ConfigError(line, "'" + v + "' is not a sweepable parameter");
            slot->parameter = v;
            break;
          case 1: slot->start = parse_double("sweep_start", v, line); break;
          case 2: slot->stop = parse_double("sweep_stop", v, line); break;
          case 3: slot->n_points = parse_int("sweep_points", v, line); break;
        }
      }};
    };
    t["sweep"] = sweep_field(false, 0);
    t["sweep_start"] = sweep_field(false, 1);
    t["sweep_stop"] = sweep_field(false, 2);
    t["sweep_points"] = sweep_field(false, 3);
    t["sweep2"] = sweep_field(true, 0);
    t["sweep2_start"] = sweep_field(true, 1);
    t["sweep2_stop"] = sweep_field(true, 2);
    t["sweep2_points"] = sweep_field(true, 3);
    return t;
  }();
  return table;
}

}  // namespace

double ScenarioConfig::resolved_eta(double curve_delta_c) const {
  if (!eta_match_depth) return params.eta;
  ModelParams p = params;
  p.delta_c = anchor_delta_c.value_or(curve_delta_c);
  p.eta = 1.0;  // placeholder; the back-solve only reads the other fields
  return eta_for_target_depth(p, target_v_eff, numerics.lattice());
}

ScenarioConfig parse_config(
    const std::string& text,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "expected 'key = value', got '" + stripped + "'");
    Entry e{trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)), line_no};
    if (e.key.empty()) throw ConfigError(line_no, "empty key");
    entries.push_back(std::move(e));
  }
  for (const auto& [k, v] : overrides) entries.push_back({k, v, 0});

  // Scenario first: presets resolve before any override lands.
  ScenarioConfig cfg;
  bool scenario_seen = false;
  for (const auto& e : entries) {
    if (e.key == "scenario") {
      cfg.scenario = parse_scenario(e.value, e.line);
      scenario_seen = true;
    }
  }
  if (!scenario_seen) throw ConfigError(0, "missing required key 'scenario'");
  apply_preset(cfg);

  std::set<std::string> provided;
  for (const auto& e : entries) {
    if (e.key == "scenario") continue;
    const auto it = setters().find(e.key);
    if (it == setters().end()) throw ConfigError(e.line, "unknown key '" + e.key + "'");
    it->second.apply(cfg, e.value, e.line);
    provided.insert(e.key);
  }

  if (cfg.scenario == Scenario::Custom) {
    static const std::vector<std::string> required = {
        "u0", "delta_c", "eta", "v_cl", "a_s", "n_atoms", "n_sites"};
    std::string missing;
    for (const auto& k : required)
      if (!provided.count(k)) missing += missing.empty() ? k : ", " + k;
    if (!missing.empty())
      throw ConfigError(0, "custom scenario is missing required keys: " + missing);
  }

  for (const auto* sw : {&cfg.sweep, &cfg.sweep2}) {
    if (*sw) {
      if ((*sw)->parameter.empty())
        throw ConfigError(0, "sweep bounds given without a sweep parameter");
      if ((*sw)->n_points < 2) throw ConfigError(0, "sweep_points must be >= 2");
    }
  }
  cfg.params.validate();
  if (cfg.site < 1 || cfg.site > cfg.params.n_sites)
    throw ConfigError(0, "site must lie between 1 and n_sites");
  return cfg;
}

std::vector<std::pair<std::string, std::string>> serialize_config(const ScenarioConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out.emplace_back("scenario", to_string(c.scenario));
  out.emplace_back("mode", to_string(c.mode));
  out.emplace_back("u0", num(c.params.u0));
  out.emplace_back("delta_c", num(c.params.delta_c));
  out.emplace_back("eta", num(c.params.eta));
  out.emplace_back("eta_eff", num(c.params.eta_eff));
  out.emplace_back("v_cl", num(c.params.v_cl));
  out.emplace_back("a_s", num(c.params.a_s));
  out.emplace_back("n_atoms", std::to_string(c.params.n_atoms));
  out.emplace_back("n_sites", std::to_string(c.params.n_sites));
  out.emplace_back("kappa_in_recoils", num(c.params.kappa_in_recoils));
  out.emplace_back("boundary", to_string(c.params.boundary));
  out.emplace_back("n_max", c.params.n_max ? std::to_string(*c.params.n_max) : "adaptive");
  out.emplace_back("eta_policy", c.eta_match_depth ? "match-depth" : "fixed");
  out.emplace_back("target_v_eff", num(c.target_v_eff));
  out.emplace_back("anchor_delta_c",
                   c.anchor_delta_c ? num(*c.anchor_delta_c) : "auto");
  out.emplace_back("u0_second", num(c.u0_second));
  out.emplace_back("delta_c_second", num(c.delta_c_second));
  out.emplace_back("a_s_initial", num(c.a_s_initial));
  out.emplace_back("site", std::to_string(c.site));
  if (c.sweep) {
    out.emplace_back("sweep", c.sweep->parameter);
    out.emplace_back("sweep_start", num(c.sweep->start));
    out.emplace_back("sweep_stop", num(c.sweep->stop));
    out.emplace_back("sweep_points", std::to_string(c.sweep->n_points));
  }
  if (c.sweep2) {
    out.emplace_back("sweep2", c.sweep2->parameter);
    out.emplace_back("sweep2_start", num(c.sweep2->start));
    out.emplace_back("sweep2_stop", num(c.sweep2->stop));
    out.emplace_back("sweep2_points", std::to_string(c.sweep2->n_points));
  }
  out.emplace_back("n_planewaves", std::to_string(c.numerics.n_planewaves));
  out.emplace_back("n_q", std::to_string(c.numerics.n_q));
  out.emplace_back("n_grid", std::to_string(c.numerics.n_grid));
  out.emplace_back("dt", num(c.numerics.dt));
  out.emplace_back("t_final", num(c.numerics.t_final));
  out.emplace_back("recompute_cadence", std::to_string(c.numerics.recompute_cadence));
  out.emplace_back("record_stride", std::to_string(c.numerics.record_stride));
  out.emplace_back("self_consistent_tol", num(c.numerics.self_consistent_tol));
  return out;
}

}  // namespace cavbh
