#include "osq/engine.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace osq {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer; decorrelates consecutive counter values.
std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::size_t pow_size(int base, int exponent) {
  std::size_t result = 1;
  for (int i = 0; i < exponent; ++i) result *= static_cast<std::size_t>(base);
  return result;
}

int digit_at(std::size_t g, std::size_t stride, int d) {
  return static_cast<int>((g / stride) % static_cast<std::size_t>(d));
}

void require_qudit_index(const RegisterState& reg, int qudit) {
  if (qudit < 0 || qudit >= reg.qudits) {
    throw std::out_of_range("qudit index " + std::to_string(qudit) +
                            " out of range [0," + std::to_string(reg.qudits) +
                            ")");
  }
}

// Structure-aware unitarity / consistency check.  `what` names the operator
// in error messages.
void validate_operator(const Operator& op, int d, const std::string& what) {
  if (op.arity != 1 && op.arity != 2) {
    throw std::invalid_argument(what + ": arity must be 1 or 2");
  }
  const std::size_t expected = pow_size(d, op.arity);
  if (static_cast<std::size_t>(op.dim) != expected ||
      op.entries.rows() != op.dim || op.entries.cols() != op.dim) {
    throw std::invalid_argument(what + ": operator dimension must be " +
                                std::to_string(expected) + " for dim " +
                                std::to_string(d) + " and arity " +
                                std::to_string(op.arity));
  }
  constexpr double kUnitaryTol = 1e-8;
  constexpr double kZeroTol = 1e-12;
  switch (op.structure) {
    case OpStructure::diagonal: {
      for (int r = 0; r < op.dim; ++r) {
        for (int c = 0; c < op.dim; ++c) {
          const double mag = std::abs(op.entries(r, c));
          if (r == c) {
            if (std::abs(mag - 1.0) > kUnitaryTol) {
              throw std::invalid_argument(what + ": not unitary (diagonal entry " +
                                          std::to_string(r) + " has modulus " +
                                          std::to_string(mag) + ")");
            }
          } else if (mag > kZeroTol) {
            throw std::invalid_argument(
                what + ": structure tag is diagonal but entry (" +
                std::to_string(r) + "," + std::to_string(c) + ") is nonzero");
          }
        }
      }
      break;
    }
    case OpStructure::permutation: {
      std::vector<int> row_hits(op.dim, 0);
      for (int c = 0; c < op.dim; ++c) {
        int found = -1;
        for (int r = 0; r < op.dim; ++r) {
          const double mag = std::abs(op.entries(r, c));
          if (mag > kZeroTol) {
            if (found >= 0) {
              throw std::invalid_argument(
                  what + ": structure tag is permutation but column " +
                  std::to_string(c) + " has multiple entries");
            }
            if (std::abs(mag - 1.0) > kUnitaryTol) {
              throw std::invalid_argument(what +
                                          ": permutation entry in column " +
                                          std::to_string(c) +
                                          " is not unit modulus");
            }
            found = r;
          }
        }
        if (found < 0) {
          throw std::invalid_argument(what + ": permutation column " +
                                      std::to_string(c) + " is empty");
        }
        ++row_hits[found];
      }
      for (int r = 0; r < op.dim; ++r) {
        if (row_hits[r] != 1) {
          throw std::invalid_argument(what + ": permutation row " +
                                      std::to_string(r) +
                                      " hit " + std::to_string(row_hits[r]) +
                                      " times");
        }
      }
      break;
    }
    case OpStructure::general: {
      if (unitarity_defect(op.entries) > kUnitaryTol) {
        throw std::invalid_argument(what + ": not unitary within 1e-8");
      }
      break;
    }
  }
}

void validate_targets(const RegisterState& reg, const Operator& op,
                      const std::vector<int>& targets) {
  if (targets.size() != static_cast<std::size_t>(op.arity)) {
    throw std::invalid_argument(
        "apply_gate: operator arity " + std::to_string(op.arity) + " but " +
        std::to_string(targets.size()) + " targets given");
  }
  for (int t : targets) require_qudit_index(reg, t);
  if (targets.size() == 2 && targets[0] == targets[1]) {
    throw std::invalid_argument("apply_gate: targets must be distinct");
  }
}

// Core gate application; all validation already done.  Dispatches on the
// structure tag so diagonal and permutation ops never materialize a matvec.
void apply_op_unchecked(CVec& psi, const Operator& op,
                        const std::vector<int>& targets, int d, int m) {
  const int k = op.arity;
  const std::size_t total = static_cast<std::size_t>(psi.size());
  std::array<std::size_t, 2> stride = {1, 1};
  for (int i = 0; i < k; ++i) stride[i] = pow_size(d, m - 1 - targets[i]);

  switch (op.structure) {
    case OpStructure::diagonal: {
      for (std::size_t g = 0; g < total; ++g) {
        int j = digit_at(g, stride[0], d);
        if (k == 2) j = j * d + digit_at(g, stride[1], d);
        psi(g) *= op.entries(j, j);
      }
      return;
    }
    case OpStructure::permutation: {
      std::vector<int> row_of(op.dim, 0);
      std::vector<Complex> phase_of(op.dim);
      for (int c = 0; c < op.dim; ++c) {
        for (int r = 0; r < op.dim; ++r) {
          if (std::abs(op.entries(r, c)) > 0.5) {
            row_of[c] = r;
            phase_of[c] = op.entries(r, c);
            break;
          }
        }
      }
      CVec out = CVec::Zero(psi.size());
      for (std::size_t g = 0; g < total; ++g) {
        const int j0 = digit_at(g, stride[0], d);
        int j = j0;
        if (k == 2) j = j0 * d + digit_at(g, stride[1], d);
        const int r = row_of[j];
        long long delta =
            static_cast<long long>((k == 1 ? r : r / d) - j0) *
            static_cast<long long>(stride[0]);
        if (k == 2) {
          delta += static_cast<long long>(r % d - j % d) *
                   static_cast<long long>(stride[1]);
        }
        out(static_cast<std::size_t>(static_cast<long long>(g) + delta)) =
            phase_of[j] * psi(g);
      }
      psi = std::move(out);
      return;
    }
    case OpStructure::general: {
      const std::size_t block = static_cast<std::size_t>(op.dim);
      std::vector<std::size_t> offset(block);
      for (std::size_t j = 0; j < block; ++j) {
        offset[j] = (k == 1) ? j * stride[0]
                             : (j / d) * stride[0] + (j % d) * stride[1];
      }
      CVec local(block), image(block);
      for (std::size_t g = 0; g < total; ++g) {
        if (digit_at(g, stride[0], d) != 0) continue;
        if (k == 2 && digit_at(g, stride[1], d) != 0) continue;
        for (std::size_t j = 0; j < block; ++j) local(j) = psi(g + offset[j]);
        image.noalias() = op.entries * local;
        for (std::size_t j = 0; j < block; ++j) psi(g + offset[j]) = image(j);
      }
      return;
    }
  }
}

// √(C(n,m)·(1−η)^m·η^(n−m)) in log space; the skips keep η ∈ {0, 1} exact.
double damping_amp(int n, int m, double eta) {
  if (m < 0 || m > n) return 0.0;
  double log_p = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) -
                 std::lgamma(n - m + 1.0);
  if (m > 0) {
    const double leak = 1.0 - eta;
    if (leak <= 0.0) return 0.0;
    log_p += m * std::log(leak);
  }
  if (n > m) {
    if (eta <= 0.0) return 0.0;
    log_p += (n - m) * std::log(eta);
  }
  return std::exp(0.5 * log_p);
}

}  // namespace

double LossModel::eta() const { return std::exp(-gamma_t); }

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RandomSource::uniform01() {
  ++draws_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

RandomSource RandomSource::stream(std::uint64_t index) const {
  return RandomSource(splitmix64(seed_ + (index + 1) * kGoldenGamma));
}

RegisterState init_register(int dim, const std::vector<QuditSpec>& specs,
                            std::size_t amplitude_cap) {
  if (specs.empty()) {
    throw std::invalid_argument("init_register: need at least one qudit");
  }
  std::vector<QuditState> parts;
  parts.reserve(specs.size());
  bool renormalized = false;
  for (std::size_t q = 0; q < specs.size(); ++q) {
    const QuditSpec& spec = specs[q];
    if (spec.encoding != Basis::number && spec.encoding != Basis::phase) {
      throw std::invalid_argument("init_register: qudit " + std::to_string(q) +
                                  " must be number- or phase-encoded");
    }
    if (const int* label = std::get_if<int>(&spec.init)) {
      parts.push_back(spec.encoding == Basis::number
                          ? make_number_state(dim, *label)
                          : make_phase_state(dim, *label));
      continue;
    }
    CVec v = std::get<CVec>(spec.init);
    if (v.size() != dim) {
      throw std::invalid_argument(
          "init_register: qudit " + std::to_string(q) + " amplitude vector has length " +
          std::to_string(v.size()) + ", expected " + std::to_string(dim));
    }
    const double nrm = v.norm();
    if (nrm < 1e-12) {
      throw std::invalid_argument("init_register: qudit " + std::to_string(q) +
                                  " amplitude vector has zero norm");
    }
    if (std::abs(nrm - 1.0) > 1e-8) {
      v /= nrm;
      renormalized = true;
    }
    QuditState state;
    state.dim = dim;
    state.basis_tag = spec.encoding;
    if (spec.encoding == Basis::number) {
      state.amplitudes = std::move(v);
    } else {
      // Coefficients over phase states: Σ_k v_k |φ_k⟩ = F·v in number basis.
      state.amplitudes = fourier_operator(dim).entries * v;
    }
    parts.push_back(std::move(state));
  }
  RegisterState reg = tensor(parts, amplitude_cap);
  reg.renormalized = renormalized;
  return reg;
}

RegisterState apply_gate(const RegisterState& reg, const Operator& op,
                         const std::vector<int>& targets) {
  validate_operator(op, reg.dim, "apply_gate");
  validate_targets(reg, op, targets);
  RegisterState out = reg;
  apply_op_unchecked(out.amplitudes, op, targets, reg.dim, reg.qudits);
  return out;
}

bool check_sum_encoding(const RegisterState& reg, int control, int target) {
  require_qudit_index(reg, control);
  require_qudit_index(reg, target);
  if (control == target) {
    throw std::invalid_argument("check_sum_encoding: control equals target");
  }
  return reg.encodings[control] == Basis::number &&
         reg.encodings[target] == Basis::phase;
}

std::pair<MeasurementRecord, RegisterState> measure(const RegisterState& reg,
                                                    int qudit, Basis basis,
                                                    RandomSource& rng) {
  require_qudit_index(reg, qudit);
  if (basis != Basis::number && basis != Basis::phase) {
    throw std::invalid_argument("measure: basis must be number or phase");
  }
  RegisterState out = reg;
  const Operator fourier = fourier_operator(reg.dim);
  if (basis == Basis::phase) {
    Operator inverse = fourier;
    inverse.entries = CMat(fourier.entries.adjoint());
    apply_op_unchecked(out.amplitudes, inverse, {qudit}, reg.dim, reg.qudits);
  }

  const std::size_t stride =
      pow_size(reg.dim, reg.qudits - 1 - qudit);
  const std::size_t total = static_cast<std::size_t>(out.amplitudes.size());
  std::vector<double> prob(reg.dim, 0.0);
  for (std::size_t g = 0; g < total; ++g) {
    prob[digit_at(g, stride, reg.dim)] += std::norm(out.amplitudes(g));
  }
  double mass = 0.0;
  for (double p : prob) mass += p;
  if (mass <= 0.0) {
    throw std::invalid_argument("measure: register has zero norm");
  }

  const double u = rng.uniform01() * mass;
  int outcome = -1;
  double cum = 0.0;
  for (int k = 0; k < reg.dim; ++k) {
    cum += prob[k];
    if (u < cum) {
      outcome = k;
      break;
    }
  }
  if (outcome < 0) {
    // Roundoff pushed u past the last bin edge; take the last populated bin.
    for (int k = reg.dim - 1; k >= 0; --k) {
      if (prob[k] > 0.0) {
        outcome = k;
        break;
      }
    }
  }

  MeasurementRecord record;
  record.qudit = qudit;
  record.basis = basis;
  record.outcome = outcome;
  record.probability = prob[outcome] / mass;

  const double scale = 1.0 / std::sqrt(prob[outcome]);
  for (std::size_t g = 0; g < total; ++g) {
    if (digit_at(g, stride, reg.dim) == outcome) {
      out.amplitudes(g) *= scale;
    } else {
      out.amplitudes(g) = Complex(0.0, 0.0);
    }
  }
  if (basis == Basis::phase) {
    apply_op_unchecked(out.amplitudes, fourier, {qudit}, reg.dim, reg.qudits);
  }
  return {record, std::move(out)};
}

RegisterState apply_loss(const RegisterState& reg, int qudit,
                         const LossModel& loss, RandomSource& rng) {
  require_qudit_index(reg, qudit);
  if (!(loss.gamma_t >= 0.0) || !std::isfinite(loss.gamma_t)) {
    throw std::invalid_argument("apply_loss: gamma_t must be finite and >= 0");
  }
  const int d = reg.dim;
  const double eta = loss.eta();
  const std::size_t stride = pow_size(d, reg.qudits - 1 - qudit);
  const std::size_t total = static_cast<std::size_t>(reg.amplitudes.size());

  // Kraus amplitudes a(n, m) = ⟨n−m|K_m|n⟩, lower-triangular in (n, m).
  std::vector<double> amp(static_cast<std::size_t>(d) * d, 0.0);
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m <= n; ++m) {
      amp[static_cast<std::size_t>(n) * d + m] = damping_amp(n, m, eta);
    }
  }

  // w[m] = Σ_g a(n_g, m)²·|ψ_g|² — the Born weight of losing m photons.
  std::vector<double> weight(d, 0.0);
  for (std::size_t g = 0; g < total; ++g) {
    const double pg = std::norm(reg.amplitudes(g));
    if (pg == 0.0) continue;
    const int n = digit_at(g, stride, d);
    for (int m = 0; m <= n; ++m) {
      const double a = amp[static_cast<std::size_t>(n) * d + m];
      weight[m] += a * a * pg;
    }
  }
  double mass = 0.0;
  for (double w : weight) mass += w;

  const double u = rng.uniform01() * mass;
  int lost = -1;
  double cum = 0.0;
  for (int m = 0; m < d; ++m) {
    cum += weight[m];
    if (u < cum) {
      lost = m;
      break;
    }
  }
  if (lost < 0) {
    for (int m = d - 1; m >= 0; --m) {
      if (weight[m] > 0.0) {
        lost = m;
        break;
      }
    }
  }

  RegisterState out = reg;
  out.amplitudes = CVec::Zero(reg.amplitudes.size());
  for (std::size_t g = 0; g < total; ++g) {
    const int n = digit_at(g, stride, d);
    if (n < lost) continue;
    const double a = amp[static_cast<std::size_t>(n) * d + lost];
    if (a == 0.0) continue;
    out.amplitudes(g - static_cast<std::size_t>(lost) * stride) +=
        a * reg.amplitudes(g);
  }
  const double norm = out.amplitudes.norm();
  out.amplitudes /= norm;
  return out;
}

void validate_program(const Program& program) {
  if (program.dim < 1) {
    throw std::invalid_argument("program: dim must be at least 1");
  }
  std::vector<QuditSpec> specs;
  specs.reserve(program.qudits.size());
  for (const Preparation& prep : program.qudits) specs.push_back(prep.spec);
  // Exercises every preparation error path (labels, lengths, norms, cap).
  RegisterState probe = init_register(program.dim, specs, program.amplitude_cap);

  for (std::size_t i = 0; i < program.instructions.size(); ++i) {
    const std::string where = "instruction " + std::to_string(i);
    const Instruction& inst = program.instructions[i];
    if (const auto* gate = std::get_if<GateInstruction>(&inst)) {
      validate_operator(gate->op, program.dim, where);
      validate_targets(probe, gate->op, gate->targets);
    } else if (const auto* meas = std::get_if<MeasureInstruction>(&inst)) {
      require_qudit_index(probe, meas->qudit);
      if (meas->basis != Basis::number && meas->basis != Basis::phase) {
        throw std::invalid_argument(where + ": basis must be number or phase");
      }
    } else if (const auto* loss = std::get_if<LossInstruction>(&inst)) {
      require_qudit_index(probe, loss->qudit);
      if (!(loss->loss.gamma_t >= 0.0) || !std::isfinite(loss->loss.gamma_t)) {
        throw std::invalid_argument(where + ": gamma_t must be finite and >= 0");
      }
    }
  }
}

std::map<int, std::uint64_t> Histogram::marginal(std::size_t site) const {
  if (site >= sites.size()) {
    throw std::out_of_range("Histogram::marginal: site " +
                            std::to_string(site) + " out of range");
  }
  std::map<int, std::uint64_t> counts;
  for (const auto& [outcomes, count] : joint) {
    counts[outcomes[site]] += count;
  }
  return counts;
}

Histogram run_shots(const Program& program, std::uint64_t shots,
                    std::uint64_t seed) {
  validate_program(program);

  Histogram histogram;
  histogram.shots = shots;
  for (const Instruction& inst : program.instructions) {
    if (const auto* meas = std::get_if<MeasureInstruction>(&inst)) {
      const std::string& given = program.qudits[meas->qudit].name;
      MeasurementSite site;
      site.qudit_name = given.empty() ? "q" + std::to_string(meas->qudit) : given;
      site.qudit = meas->qudit;
      site.basis = meas->basis;
      histogram.sites.push_back(std::move(site));
    }
  }

  std::vector<QuditSpec> specs;
  specs.reserve(program.qudits.size());
  for (const Preparation& prep : program.qudits) specs.push_back(prep.spec);

  const RandomSource base(seed);
  std::vector<int> outcomes;
  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    RandomSource rng = base.stream(shot);
    RegisterState reg = init_register(program.dim, specs, program.amplitude_cap);
    outcomes.clear();
    for (const Instruction& inst : program.instructions) {
      if (const auto* gate = std::get_if<GateInstruction>(&inst)) {
        apply_op_unchecked(reg.amplitudes, gate->op, gate->targets, reg.dim,
                           reg.qudits);
      } else if (const auto* meas = std::get_if<MeasureInstruction>(&inst)) {
        auto [record, next] = measure(reg, meas->qudit, meas->basis, rng);
        reg = std::move(next);
        outcomes.push_back(record.outcome);
      } else if (const auto* loss = std::get_if<LossInstruction>(&inst)) {
        reg = apply_loss(reg, loss->qudit, loss->loss, rng);
      }
    }
    ++histogram.joint[outcomes];
  }
  return histogram;
}

}  // namespace osq
