#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cavbh/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cavbh::ConfigError(0, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<std::string, std::string> split_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw cavbh::ConfigError(0, "--set expects key=value, got '" + kv + "'");
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  return {trim(kv.substr(0, eq)), trim(kv.substr(eq + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultracold bosons in a pumped-cavity optical lattice"};
  std::string config_path;
  std::string out_path;
  std::string mode;
  std::string wannier_path;
  std::vector<std::string> sets;
  int jobs = 0;

  app.add_option("config", config_path, "key = value configuration file")->required();
  app.add_option("--out", out_path, "output CSV path (overrides output_path)");
  app.add_option("--set", sets, "override a config key, key=value (repeatable)");
  app.add_option("--mode", mode,
                 "Hamiltonian mode: coupled|effective|exact-elim|coupled-nh");
  app.add_option("--jobs", jobs, "concurrent sweep points (default: SIM_JOBS or 1)");
  app.add_option("--dump-wannier", wannier_path,
                 "also write the Wannier function at the self-consistent depth");
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& kv : sets) overrides.push_back(split_override(kv));
    if (!mode.empty()) overrides.emplace_back("mode", mode);
    if (jobs > 0) overrides.emplace_back("jobs", std::to_string(jobs));

    const cavbh::ScenarioConfig cfg = cavbh::parse_config(read_file(config_path), overrides);
    const std::string target =
        !out_path.empty() ? out_path
                          : (!cfg.output_path.empty() ? cfg.output_path : std::string());

    if (!wannier_path.empty())
      cavbh::write_csv(cavbh::wannier_table(cfg), wannier_path);

    const cavbh::ResultTable table = cavbh::run_scenario(cfg);
    if (target.empty())
      cavbh::write_csv(table, std::cout);
    else
      cavbh::write_csv(table, target);

    std::size_t failed = 0;
    for (const auto& e : table.row_errors)
      if (!e.empty()) ++failed;
    if (failed > 0)
      std::cerr << "warning: " << failed << " of " << table.rows.size()
                << " sweep points failed (NaN rows kept)\n";
    return 0;
  } catch (const cavbh::ConfigError& e) {
    if (e.line > 0)
      std::cerr << "config error (line " << e.line << "): " << e.what() << "\n";
    else
      std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
