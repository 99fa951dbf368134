#pragma once

#include <iosfwd>

#include "cavbh/config.hpp"
#include "cavbh/dynamics.hpp"
#include "cavbh/observables.hpp"

namespace cavbh {

inline constexpr const char* kVersion = "0.1.0";

/// Numeric table plus the resolved configuration it came from. Failed sweep
/// points keep their row (NaN sentinels) with the error message alongside.
struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_errors;  // parallel to rows; empty when clean
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Dispatches the configured pipeline and collects the figure's columns.
ResultTable run_scenario(const ScenarioConfig& cfg);

/// '#'-prefixed metadata preamble, header line, then rows with 15 significant
/// digits. The metadata echoes the resolved config so the run can be repeated.
void write_csv(const ResultTable& table, std::ostream& out);
void write_csv(const ResultTable& table, const std::string& path);

/// Wannier function dump at the scalar self-consistent depth (columns x, w).
ResultTable wannier_table(const ScenarioConfig& cfg);

}  // namespace cavbh
