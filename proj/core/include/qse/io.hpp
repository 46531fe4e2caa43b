#pragma once

#include "qse/simulation.hpp"
#include "qse/tomography.hpp"

#include <iosfwd>
#include <string>

namespace qse {

/// Parses 16 whitespace-separated nonnegative integers. Lines whose first
/// non-blank character is '#' are ignored. Errors carry the 1-based line.
[[nodiscard]] CountVector parse_counts(std::istream& in);
[[nodiscard]] CountVector parse_counts_string(const std::string& text);
[[nodiscard]] CountVector read_counts(const std::string& path);

void write_counts(std::ostream& out, const CountVector& counts);
void write_counts(const std::string& path, const CountVector& counts);

enum class TableFormat { csv, tsv };

[[nodiscard]] TableFormat table_format_from_path(const std::string& path);

/// One row per lambda. The first six columns are lambda, mean_fidelity,
/// mean_bures_sq, std_bures_sq, cov_trace and bound (2C/lambda); the extra
/// columns give the halved Bures quantities and per-point trial accounting.
void write_sweep(std::ostream& out, const SweepResult& result, TableFormat format = TableFormat::csv);
void write_sweep(const std::string& path, const SweepResult& result);

/// Both sweeps of a comparison in one table with a leading basis column.
void write_comparison(std::ostream& out, const BasisComparison& cmp, TableFormat format = TableFormat::csv);
void write_comparison(const std::string& path, const BasisComparison& cmp);

void write_matrix(std::ostream& out, const MatrixXd& m, TableFormat format = TableFormat::csv);

/// Reads a JSON object whose keys mirror SimulationConfig: true_state, rate,
/// acquisition_times, trials, estimator, basis, seed, epsilon, bound_rank,
/// threads. Unknown keys are rejected.
[[nodiscard]] SimulationConfig parse_config_json(const std::string& text, SimulationConfig base = {});
[[nodiscard]] SimulationConfig read_config(const std::string& path, SimulationConfig base = {});

}  // namespace qse
