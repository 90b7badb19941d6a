#ifndef OSQ_CLI_HPP
#define OSQ_CLI_HPP

// Command implementations behind the `osq` binary, separated from argument
// parsing so tests can drive them with in-memory streams.
//
// Exit codes (shared by all commands):
//   0  success
//   1  diagnostics reported (parse/validation/config/IO errors)
//   2  register or operator exceeds the amplitude cap
//
// The amplitude cap resolves in priority order: explicit config value, the
// OSQ_AMP_CAP environment variable, then the built-in default (2^20).

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "osq/dsl.hpp"

namespace osq::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class OutputFormat { json, csv };

struct RunConfig {
  std::string circuit_path;
  std::uint64_t shots = 1024;
  std::uint64_t seed = 0;
  dsl::SumMode sum_mode = dsl::SumMode::kerr;
  OutputFormat format = OutputFormat::json;
  std::optional<std::size_t> amplitude_cap;
  std::optional<std::string> out_path;
};

// Parses, validates, lowers, and runs a circuit file, then writes the shot
// histogram as JSON or CSV.  Identical config + circuit ⇒ byte-identical
// output.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct ConvergeConfig {
  int d_min = 2;
  int d_max = 16;
  int step = 1;
  std::vector<std::string> metrics;  // empty = all, in canonical order
  std::optional<std::string> out_path;
};

struct ConvergenceRow {
  int dim = 0;
  std::string metric;
  double value = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // sorted by dim, then canonical metric order
};

// Truncation-convergence metrics, one value per (dim, metric):
//   sum_equivalence_residual  worst-case ‖(K − SUM)|s₁,φ_{s₂}⟩‖ over labels
//   displacement_fidelity     |⟨coherent(1)|D(1)|0⟩|² against the truncated,
//                             renormalized analytic coherent state
//   phase_resolution          2π/d lattice spacing
ConvergenceReport compute_convergence(const ConvergeConfig& config);

// Writes compute_convergence as `d,metric,value` CSV.
int cmd_converge(const ConvergeConfig& config, std::ostream& out,
                 std::ostream& err);

struct DumpConfig {
  std::string object;  // pauli | fourier | phase_op | sum
  int dim = 2;
  std::optional<std::size_t> amplitude_cap;
  std::optional<std::string> out_path;
};

// Writes an operator's entries as CSV (`row,col,re,im`; the two-matrix
// `pauli` object prepends a `matrix` column).
int cmd_dump(const DumpConfig& config, std::ostream& out, std::ostream& err);

}  // namespace osq::cli

#endif  // OSQ_CLI_HPP
