// Command-line front end: argument parsing only; the work happens in
// osq::cli so tests can call the commands directly.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "osq/cli.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& list) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = list.find(',', pos);
    const std::string item =
        list.substr(pos, comma == std::string::npos ? std::string::npos
                                                    : comma - pos);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillator-qudit circuit simulator"};
  app.set_version_flag("--version", osq::cli::kVersion);
  app.require_subcommand(1);

  osq::cli::RunConfig run;
  std::string sum_mode = "kerr";
  std::string format = "json";
  std::string run_out;
  std::uint64_t amp_cap = 0;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute a circuit file");
  run_cmd->add_option("circuit", run.circuit_path, "Path to a .osq circuit")
      ->required();
  run_cmd->add_option("--shots", run.shots, "Number of shots");
  run_cmd->add_option("--seed", run.seed, "Base RNG seed");
  run_cmd->add_option("--sum-mode", sum_mode, "SUM lowering: kerr|permutation")
      ->check(CLI::IsMember({"kerr", "permutation"}));
  run_cmd->add_option("--format", format, "Output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("--out", run_out, "Write output to this file");
  CLI::Option* run_cap =
      run_cmd->add_option("--amp-cap", amp_cap,
                          "Amplitude cap (overrides OSQ_AMP_CAP)");

  osq::cli::ConvergeConfig converge;
  std::string metrics;
  std::string converge_out;
  CLI::App* converge_cmd =
      app.add_subcommand("converge", "Sweep truncation metrics over dim");
  converge_cmd->add_option("--d-min", converge.d_min, "Smallest dim");
  converge_cmd->add_option("--d-max", converge.d_max, "Largest dim");
  converge_cmd->add_option("--step", converge.step, "Dim increment");
  converge_cmd->add_option(
      "--metrics", metrics,
      "Comma-separated subset of: sum_equivalence_residual, "
      "displacement_fidelity, phase_resolution");
  converge_cmd->add_option("--out", converge_out, "Write output to this file");

  osq::cli::DumpConfig dump;
  std::string dump_out;
  CLI::App* dump_cmd =
      app.add_subcommand("dump", "Print an operator's entries as CSV");
  dump_cmd->add_option("object", dump.object, "pauli|fourier|phase_op|sum")
      ->required();
  dump_cmd->add_option("--d", dump.dim, "Dimension")->required();
  dump_cmd->add_option("--out", dump_out, "Write output to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run_cmd->parsed()) {
    run.sum_mode = (sum_mode == "kerr") ? osq::dsl::SumMode::kerr
                                        : osq::dsl::SumMode::permutation;
    run.format = (format == "json") ? osq::cli::OutputFormat::json
                                    : osq::cli::OutputFormat::csv;
    if (!run_out.empty()) run.out_path = run_out;
    if (run_cap->count() > 0) run.amplitude_cap = amp_cap;
    return osq::cli::cmd_run(run, std::cout, std::cerr);
  }
  if (converge_cmd->parsed()) {
    converge.metrics = split_csv(metrics);
    if (!converge_out.empty()) converge.out_path = converge_out;
    return osq::cli::cmd_converge(converge, std::cout, std::cerr);
  }
  if (!dump_out.empty()) dump.out_path = dump_out;
  return osq::cli::cmd_dump(dump, std::cout, std::cerr);
}
