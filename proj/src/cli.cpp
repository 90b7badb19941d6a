#include "osq/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "osq/gates.hpp"
#include "osq/operators.hpp"

namespace osq::cli {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Entry formatting for dumps: snap sub-roundoff values to a clean 0.
std::string format_entry(double v) {
  if (std::abs(v) < 1e-14) return "0";
  return format_double(v);
}

const char* severity_label(dsl::Severity severity) {
  return severity == dsl::Severity::error ? "error" : "warning";
}

void print_diagnostics(const std::string& path,
                       const std::vector<dsl::Diagnostic>& diags,
                       std::ostream& err) {
  for (const dsl::Diagnostic& d : diags) {
    err << path << ":" << d.span.line << ":" << d.span.column << ": "
        << severity_label(d.severity) << ": " << d.message << "\n";
  }
}

bool has_error(const std::vector<dsl::Diagnostic>& diags) {
  for (const dsl::Diagnostic& d : diags) {
    if (d.severity == dsl::Severity::error) return true;
  }
  return false;
}

// Explicit config > OSQ_AMP_CAP > default.  Returns false (with a message)
// when the environment value is unusable.
bool resolve_amplitude_cap(const std::optional<std::size_t>& explicit_cap,
                           std::size_t& cap, std::ostream& err) {
  if (explicit_cap) {
    cap = *explicit_cap;
    return true;
  }
  if (const char* env = std::getenv("OSQ_AMP_CAP")) {
    std::size_t value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc{} || ptr != end || value == 0) {
      err << "error: invalid OSQ_AMP_CAP value '" << env << "'\n";
      return false;
    }
    cap = value;
    return true;
  }
  cap = kDefaultAmplitudeCap;
  return true;
}

// Writes `content` to the --out path, or to `fallback` when no path is set.
int write_output(const std::optional<std::string>& out_path,
                 const std::string& content, std::ostream& fallback,
                 std::ostream& err) {
  if (!out_path) {
    fallback << content;
    return 0;
  }
  std::ofstream file(*out_path, std::ios::binary);
  if (!file) {
    err << "error: cannot write '" << *out_path << "'\n";
    return 1;
  }
  file << content;
  return file.good() ? 0 : 1;
}

std::string histogram_json(const Program& program, const Histogram& histogram,
                           const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["dim"] = program.dim;
  doc["shots"] = config.shots;
  doc["seed"] = config.seed;
  doc["measurements"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < histogram.sites.size(); ++s) {
    const MeasurementSite& site = histogram.sites[s];
    nlohmann::ordered_json entry;
    entry["qudit"] = site.qudit_name;
    entry["basis"] = to_string(site.basis);
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [outcome, count] : histogram.marginal(s)) {
      counts[std::to_string(outcome)] = count;
    }
    entry["histogram"] = std::move(counts);
    doc["measurements"].push_back(std::move(entry));
  }
  doc["version"] = kVersion;
  return doc.dump(2) + "\n";
}

std::string histogram_csv(const Histogram& histogram) {
  std::string out = "measurement,qudit,basis,outcome,count\n";
  for (std::size_t s = 0; s < histogram.sites.size(); ++s) {
    const MeasurementSite& site = histogram.sites[s];
    for (const auto& [outcome, count] : histogram.marginal(s)) {
      out += std::to_string(s) + "," + site.qudit_name + "," +
             to_string(site.basis) + "," + std::to_string(outcome) + "," +
             std::to_string(count) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convergence metrics
// ---------------------------------------------------------------------------

// Worst-case residual between the Kerr SUM's action and the exact label
// addition, over all (s₁, s₂) pairs of encoded basis labels.
double sum_equivalence_residual(int d) {
  const double chi_t = 2.0 * std::numbers::pi / d;
  double worst = 0.0;
  for (int s1 = 0; s1 < d; ++s1) {
    for (int s2 = 0; s2 < d; ++s2) {
      const CVec in = make_phase_state(d, s2).amplitudes;
      const CVec target = make_phase_state(d, (s1 + s2) % d).amplitudes;
      CVec kerr_out(d);
      for (int n2 = 0; n2 < d; ++n2) {
        kerr_out(n2) =
            std::polar(1.0, -chi_t * static_cast<double>(s1) * n2) * in(n2);
      }
      worst = std::max(worst, (kerr_out - target).norm());
    }
  }
  return worst;
}

// |⟨coh(1)|D(1)|0⟩|² with the analytic coherent state truncated to d levels
// and renormalized.
double displacement_fidelity(int d) {
  const Operator disp = displacement(d, Complex(1.0, 0.0));
  const CVec actual = disp.entries.col(0);
  CVec coherent(d);
  double log_fact = 0.0;
  for (int n = 0; n < d; ++n) {
    if (n > 0) log_fact += std::log(static_cast<double>(n));
    coherent(n) = Complex(std::exp(-0.5 - 0.5 * log_fact), 0.0);
  }
  coherent /= coherent.norm();
  return std::norm(coherent.dot(actual));
}

struct MetricInfo {
  const char* name;
  double (*eval)(int);
};

double phase_resolution(int d) { return 2.0 * std::numbers::pi / d; }

constexpr MetricInfo kMetrics[] = {
    {"sum_equivalence_residual", &sum_equivalence_residual},
    {"displacement_fidelity", &displacement_fidelity},
    {"phase_resolution", &phase_resolution},
};

const MetricInfo* find_metric(const std::string& name) {
  for (const MetricInfo& m : kMetrics) {
    if (name == m.name) return &m;
  }
  return nullptr;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::ifstream file(config.circuit_path, std::ios::binary);
  if (!file) {
    err << "error: cannot open '" << config.circuit_path << "'\n";
    return 1;
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  const std::string source = buffer.str();

  const dsl::ParseResult parsed = dsl::parse(source);
  print_diagnostics(config.circuit_path, parsed.diagnostics, err);
  if (!parsed.ok()) return 1;

  const dsl::ValidateResult checked = dsl::validate(*parsed.ast);
  print_diagnostics(config.circuit_path, checked.diagnostics, err);
  if (!checked.ok) return 1;

  std::size_t cap = 0;
  if (!resolve_amplitude_cap(config.amplitude_cap, cap, err)) return 1;

  try {
    const Program program = dsl::lower(*parsed.ast, config.sum_mode, cap);
    const Histogram histogram = run_shots(program, config.shots, config.seed);
    const std::string output = (config.format == OutputFormat::json)
                                   ? histogram_json(program, histogram, config)
                                   : histogram_csv(histogram);
    return write_output(config.out_path, output, out, err);
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

ConvergenceReport compute_convergence(const ConvergeConfig& config) {
  std::vector<const MetricInfo*> selected;
  if (config.metrics.empty()) {
    for (const MetricInfo& m : kMetrics) selected.push_back(&m);
  } else {
    // Canonical order regardless of how the request was spelled.
    for (const MetricInfo& m : kMetrics) {
      for (const std::string& name : config.metrics) {
        if (name == m.name) {
          selected.push_back(&m);
          break;
        }
      }
    }
  }
  ConvergenceReport report;
  for (int d = config.d_min; d <= config.d_max; d += config.step) {
    for (const MetricInfo* m : selected) {
      report.rows.push_back({d, m->name, m->eval(d)});
    }
  }
  return report;
}

int cmd_converge(const ConvergeConfig& config, std::ostream& out,
                 std::ostream& err) {
  if (config.d_min < 2 || config.d_max < config.d_min || config.step < 1) {
    err << "error: require 2 <= d-min <= d-max and step >= 1\n";
    return 1;
  }
  for (const std::string& name : config.metrics) {
    if (!find_metric(name)) {
      err << "error: unknown metric '" << name
          << "' (available: sum_equivalence_residual, displacement_fidelity, "
             "phase_resolution)\n";
      return 1;
    }
  }
  const ConvergenceReport report = compute_convergence(config);
  std::string csv = "d,metric,value\n";
  for (const ConvergenceRow& row : report.rows) {
    csv += std::to_string(row.dim) + "," + row.metric + "," +
           format_double(row.value) + "\n";
  }
  return write_output(config.out_path, csv, out, err);
}

int cmd_dump(const DumpConfig& config, std::ostream& out, std::ostream& err) {
  if (config.dim < 1) {
    err << "error: --d must be at least 1\n";
    return 1;
  }
  std::size_t cap = 0;
  if (!resolve_amplitude_cap(config.amplitude_cap, cap, err)) return 1;

  const std::size_t d = static_cast<std::size_t>(config.dim);
  const bool two_qudit = (config.object == "sum");
  // Entry budget: d² for one-qudit operators, d⁴ for the SUM permutation.
  std::size_t entries = 1;
  bool oversize = false;
  for (int i = 0; i < (two_qudit ? 4 : 2); ++i) {
    if (entries > cap / d) {
      oversize = true;
      break;
    }
    entries *= d;
  }
  if (oversize) {
    err << "error: dump of '" << config.object << "' at dim " << config.dim
        << " exceeds the amplitude cap of " << cap << "\n";
    return 2;
  }

  const auto matrix_csv = [](const CMat& m, std::string& sink,
                             const std::string& prefix) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        sink += prefix + std::to_string(r) + "," + std::to_string(c) + "," +
                format_entry(m(r, c).real()) + "," +
                format_entry(m(r, c).imag()) + "\n";
      }
    }
  };

  std::string csv;
  if (config.object == "pauli") {
    const PauliPair pauli = pauli_generators(config.dim);
    csv = "matrix,row,col,re,im\n";
    matrix_csv(pauli.x.entries, csv, "X,");
    matrix_csv(pauli.z.entries, csv, "Z,");
  } else if (config.object == "fourier") {
    csv = "row,col,re,im\n";
    matrix_csv(fourier_operator(config.dim).entries, csv, "");
  } else if (config.object == "phase_op") {
    csv = "row,col,re,im\n";
    matrix_csv(phase_operator(config.dim).entries, csv, "");
  } else if (config.object == "sum") {
    csv = "row,col,re,im\n";
    matrix_csv(sum_permutation(config.dim).entries, csv, "");
  } else {
    err << "error: unknown object '" << config.object
        << "' (available: pauli, fourier, phase_op, sum)\n";
    return 1;
  }
  return write_output(config.out_path, csv, out, err);
}

}  // namespace osq::cli
