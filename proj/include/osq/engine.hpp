#ifndef OSQ_ENGINE_HPP
#define OSQ_ENGINE_HPP

// Shot-based statevector engine.
//
// A Program is a register preparation plus an ordered list of gate, measure,
// and loss instructions.  run_shots executes it `shots` times; every shot
// draws from its own counter-derived random stream, so results are
// reproducible for a given (program, shots, seed) triple and independent of
// evaluation order.
//
// Randomness: the base generator is std::mt19937_64 (output sequence pinned
// by the C++ standard), seeded per shot with the SplitMix64 finalizer of
// (seed + (shot_index+1)·0x9E3779B97F4A7C15).  Uniform doubles take the top
// 53 bits of one engine output: (x >> 11) · 2⁻⁵³ ∈ [0, 1).

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "osq/hilbert.hpp"

namespace osq {

struct MeasurementRecord {
  int qudit = 0;
  Basis basis = Basis::number;
  int outcome = 0;
  double probability = 0.0;  // Born probability of `outcome` before collapse
};

// Amplitude damping of strength γt; eta() = exp(−γt) is the per-photon
// survival probability.  `lifetime_reference` is the hardware T₁ (seconds)
// that calibrates γt = t/T₁ for readers of dumped configurations; it does
// not enter the channel itself.
struct LossModel {
  double gamma_t = 0.0;
  double lifetime_reference = 0.3;
  double eta() const;
};

// Deterministic, splittable random source (see header comment).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  // One double in [0, 1) from the top 53 bits of the next engine output.
  double uniform01();

  // Independent child stream for counter `index`; deterministic in
  // (seed, index) and unaffected by draws already made from this source.
  RandomSource stream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draw_count() const { return draws_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

// Preparation request for one qudit: either a basis label (int) or a custom
// amplitude vector over the declared encoding's basis states.
struct QuditSpec {
  Basis encoding = Basis::number;
  std::variant<int, CVec> init = 0;
};

// Builds the initial register.  Custom vectors must have length d and norm
// within 1e-8 of 1; vectors further off are renormalized and the register's
// `renormalized` flag is set.  Zero vectors (norm < 1e-12) are rejected.
RegisterState init_register(int dim, const std::vector<QuditSpec>& specs,
                            std::size_t amplitude_cap = kDefaultAmplitudeCap);

// Applies `op` to the given target qudits (targets.size() == op.arity; for
// two-qudit ops targets[0] owns the operator's most significant digit).
// Checks unitarity to 1e-8 and dispatches on op.structure: diagonal and
// permutation ops run in O(d^m) without touching non-target amplitudes
// as matrices.
RegisterState apply_gate(const RegisterState& reg, const Operator& op,
                         const std::vector<int>& targets);

// True when `control` is number-encoded and `target` phase-encoded — the
// encoding arrangement under which the Kerr SUM adds labels.
bool check_sum_encoding(const RegisterState& reg, int control, int target);

// Projective measurement of one qudit in the number or phase basis.
// Returns the sampled record and the collapsed, renormalized register.
// Phase-basis measurement conjugates the qudit by F† before sampling and by
// F after collapsing, so the register stays in number-basis storage.
std::pair<MeasurementRecord, RegisterState> measure(const RegisterState& reg,
                                                    int qudit, Basis basis,
                                                    RandomSource& rng);

// Amplitude damping on one qudit via its exact Kraus family
//   K_m|n⟩ = √(C(n,m) (1−η)^m η^(n−m)) |n−m⟩,  η = exp(−γt),
// sampling the photon-loss count m (one uniform draw) and renormalizing.
RegisterState apply_loss(const RegisterState& reg, int qudit,
                         const LossModel& loss, RandomSource& rng);

struct GateInstruction {
  Operator op;
  std::vector<int> targets;
};

struct MeasureInstruction {
  int qudit = 0;
  Basis basis = Basis::number;
};

struct LossInstruction {
  int qudit = 0;
  LossModel loss;
};

using Instruction = std::variant<GateInstruction, MeasureInstruction, LossInstruction>;

struct Preparation {
  std::string name;  // display name; empty means "q<index>"
  QuditSpec spec;
};

struct Program {
  int dim = 0;
  std::vector<Preparation> qudits;
  std::vector<Instruction> instructions;
  std::size_t amplitude_cap = kDefaultAmplitudeCap;
};

// One measure instruction's identity within a program.
struct MeasurementSite {
  std::string qudit_name;
  int qudit = 0;
  Basis basis = Basis::number;
};

// Joint outcome counts over the program's measurement sites, in program
// order.  A program with no measure instructions yields a single entry with
// an empty key counting every shot.
struct Histogram {
  std::uint64_t shots = 0;
  std::vector<MeasurementSite> sites;
  std::map<std::vector<int>, std::uint64_t> joint;

  // Counts for one site, summed over the others' outcomes.
  std::map<int, std::uint64_t> marginal(std::size_t site) const;
};

// Validates a program eagerly (dimensions, target indices, unitarity of every
// gate, loss strengths, the amplitude cap); throws std::invalid_argument /
// std::out_of_range / CapacityError with a message naming the offender.
void validate_program(const Program& program);

// Executes the program `shots` times.  Validation runs once up front, not
// per shot.
Histogram run_shots(const Program& program, std::uint64_t shots,
                    std::uint64_t seed);

}  // namespace osq

#endif  // OSQ_ENGINE_HPP
