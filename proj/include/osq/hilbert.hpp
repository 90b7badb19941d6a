#ifndef OSQ_HILBERT_HPP
#define OSQ_HILBERT_HPP

// Truncated-oscillator Hilbert space ℍ_d and its two conjugate bases.
//
// A qudit is the span of the lowest d Fock (number) states |0⟩ … |d−1⟩ of a
// harmonic oscillator.  The dual basis is the discrete phase basis
//
//   |φ_k⟩ = d^(−1/2) · Σ_n exp(−i·φ_k·n) |n⟩,   φ_k = 2πk/d,  k = 0 … d−1,
//
// so that ⟨φ_k|n⟩ = d^(−1/2) · exp(+i·φ_k·n): number and phase labels are a
// discrete Fourier pair.  The discrete Fourier operator used throughout is
//
//   F[m][n] = d^(−1/2) · exp(−2πi·m·n/d),
//
// which maps number states onto phase states exactly: F|n⟩ = |φ_n⟩.
//
// All state amplitudes are stored in the number basis; `basis_tag` records
// which labelling a state was built from, not a different storage layout.

#include <cstddef>
#include <vector>

#include "osq/linalg.hpp"

namespace osq {

// Registers refuse to allocate more than this many amplitudes unless the
// caller raises the cap explicitly (CLI: --amp-cap / OSQ_AMP_CAP).
inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 20;

// Thrown when a register would exceed its amplitude cap; the CLI maps this
// to exit code 2 so scripted sweeps can tell "too big" from "invalid".
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Basis { number, phase, general };

const char* to_string(Basis basis);

// Single-qudit pure state: `amplitudes` are number-basis coefficients.
struct QuditState {
  int dim = 0;
  CVec amplitudes;
  Basis basis_tag = Basis::general;
};

// Phase-basis label k ↦ angle φ_k = 2πk/d.
struct PhaseLabel {
  int dim = 0;
  int k = 0;
  double angle() const;
};

enum class OpStructure { general, diagonal, permutation };

// Dense operator on one or two qudits (dim = d^arity), row-major entries.
// `structure` is a fast-path hint the engine exploits; the entries are always
// authoritative.
struct Operator {
  int dim = 0;
  int arity = 1;
  OpStructure structure = OpStructure::general;
  CMat entries;
};

// m-qudit register with d^m number-basis amplitudes.  Qudit 0 owns the most
// significant digit: basis index g encodes labels (n_0, …, n_{m−1}) with
// g = Σ_q n_q · d^(m−1−q).  `encodings` records each qudit's declared basis
// (number or phase); `renormalized` is set when a custom amplitude vector had
// to be rescaled to unit norm on preparation.
struct RegisterState {
  int dim = 0;
  int qudits = 0;
  CVec amplitudes;
  std::vector<Basis> encodings;
  bool renormalized = false;
};

// |n⟩.  Throws std::invalid_argument for dim < 1, std::out_of_range for a
// label outside [0, dim).
QuditState make_number_state(int dim, int n);

// |φ_k⟩ with the amplitude convention at the top of this header.
QuditState make_phase_state(int dim, int k);

// ⟨a|b⟩, conjugating `a`.  Throws std::invalid_argument on dimension
// mismatch.
Complex inner_product(const QuditState& a, const QuditState& b);

// Kronecker product of the parts, folded left to right.  All parts must share
// one dim; the result's encodings mirror each part's basis_tag (`general`
// slots are recorded as number: custom vectors are number-basis data).
// Throws CapacityError when d^m would exceed `amplitude_cap`.
RegisterState tensor(const std::vector<QuditState>& parts,
                     std::size_t amplitude_cap = kDefaultAmplitudeCap);

// The d×d discrete Fourier operator defined above.
Operator fourier_operator(int dim);

}  // namespace osq

#endif  // OSQ_HILBERT_HPP
