#ifndef OSQ_GATES_HPP
#define OSQ_GATES_HPP

// Gate synthesis for oscillator qudits.
//
// Two-qudit entangler, built two independent ways:
//
//   SUM (permutation form)  |s₁, s₂⟩ ↦ |s₁, s₁+s₂ mod d⟩ on number labels.
//   SUM (Kerr form)         K = exp(−i·χt · N̂⊗N̂), diagonal in the number
//                           basis.  At the lattice-aligned strength
//                           χt = 2π/d it adds number labels into phase
//                           labels: K(|s₁⟩ ⊗ |φ_{s₂}⟩) = |s₁⟩ ⊗ |φ_{s₁+s₂}⟩,
//                           i.e. (𝟙⊗F†)·K·(𝟙⊗F) equals the permutation form
//                           exactly.
//
// Single-qudit continuous gates, each exponentiated after truncation so the
// result is unitary on ℍ_d by construction:
//
//   displacement  D(α) = exp(α·â† − α*·â)
//   squeeze       S(ζ) = exp((ζ*·â² − ζ·â†²)/2)
//   kerr          exp(−i·κt · N̂²)
//
// commutator_sequence assembles the group-commutator approximation
// exp(A·δ)·exp(B·δ)·exp(−A·δ)·exp(−B·δ) ≈ exp([A,B]·δ²) + O(δ³), and
// sequence_error measures how far a sequence's product sits from a target,
// in spectral norm, minimized over an overall phase.

#include <string>
#include <vector>

#include "osq/hilbert.hpp"

namespace osq {

// Parameter record attached to gate constructions (one field per family).
struct GateParams {
  Complex alpha{0.0, 0.0};  // displacement
  Complex zeta{0.0, 0.0};   // squeeze
  double kappa_t = 0.0;     // self-Kerr strength × time
  double chi_t = 0.0;       // cross-Kerr strength × time
};

struct SequenceStep {
  std::string label;  // e.g. "exp(+delta*A)"
  Operator op;
};

// Ordered factor list; product() multiplies the steps left to right as
// written, returning the identity for an empty sequence.
struct GateSequence {
  int dim = 0;
  std::vector<SequenceStep> steps;
  CMat product() const;
};

// |s₁,s₂⟩ ↦ |s₁, s₁+s₂ mod d⟩ as an exact d²×d² permutation (qudit order:
// first factor is the control / most significant digit).
Operator sum_permutation(int dim);

// exp(−i·χt·N̂⊗N̂); pass chi_t = 2π/d for the lattice-aligned SUM.
Operator sum_via_kerr(int dim, double chi_t);

// D(α) = exp(α·â† − α*·â) on the truncated space.
Operator displacement(int dim, Complex alpha);

// S(ζ) = exp((ζ*·â² − ζ·â†²)/2) on the truncated space.
Operator squeeze(int dim, Complex zeta);

// exp(−i·κt·N̂²), diagonal.
Operator kerr(int dim, double kappa_t);

// The four-factor group commutator at step δ ≥ 0.  gen_a/gen_b must be
// anti-Hermitian single- or multi-qudit generators of equal dimension
// (residual ≤ 1e-10), else std::invalid_argument.
GateSequence commutator_sequence(const Operator& gen_a, const Operator& gen_b,
                                 double delta);

// min over φ of ‖ product(seq) − e^{iφ}·target ‖ in spectral norm.
// Dimension mismatch throws std::invalid_argument.
double sequence_error(const GateSequence& seq, const Operator& target);

}  // namespace osq

#endif  // OSQ_GATES_HPP
