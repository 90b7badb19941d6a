#ifndef OSQ_OPERATORS_HPP
#define OSQ_OPERATORS_HPP

// Canonical single-qudit operators on ℍ_d.
//
// Number side:  N̂ = diag(0, …, d−1),  â|n⟩ = √n |n−1⟩ (truncated), â† = âᵀ*.
// Phase side:   θ̂ = Σ_k φ_k |φ_k⟩⟨φ_k| — the Pegg–Barnett phase operator on
//               the same truncated space.
//
// The generalized Pauli pair lives where the two sides meet:
//
//   Z = exp(2πi·N̂/d) = diag(ω^n),  ω = exp(2πi/d)   (number-basis shift of φ)
//   X = exp(i·θ̂)                                     (phase-basis shift of n)
//
// exp(i·θ̂) works out to the exact cyclic shift |n⟩ ↦ |n+1 mod d⟩, giving the
// Weyl relation Z·X = ω·X·Z and X^d = Z^d = 𝟙; pauli_generators verifies the
// shift identity numerically before returning the exact forms.

#include "osq/hilbert.hpp"

namespace osq {

// N̂ = diag(0, 1, …, d−1).
Operator number_operator(int dim);

// Truncated lowering operator: â|n⟩ = √n·|n−1⟩, â|0⟩ = 0.
Operator lowering_operator(int dim);

// â† (adjoint of the truncated â; note â†|d−1⟩ = 0 on the truncated space).
Operator raising_operator(int dim);

// θ̂ = Σ_k φ_k|φ_k⟩⟨φ_k|, Hermitian with spectrum {2πk/d}.
Operator phase_operator(int dim);

// Exact permutation |n⟩ ↦ |n+1 mod d⟩.
Operator cyclic_shift(int dim);

struct PauliPair {
  Operator x;  // structure: permutation
  Operator z;  // structure: diagonal
};

// Builds X = exp(i·θ̂) and Z = exp(2πi·N̂/d), checks that the exponential of
// the phase operator reproduces the cyclic shift to 1e-10, and returns the
// exact shift/diagonal forms.  Throws std::logic_error if the check fails.
PauliPair pauli_generators(int dim);

// One-stop bundle for callers that want the whole family at a given dim.
struct OperatorSet {
  int dim = 0;
  Operator number_op;
  Operator lowering_op;
  Operator raising_op;
  Operator phase_op;
  Operator pauli_x;
  Operator pauli_z;
};

OperatorSet make_operator_set(int dim);

}  // namespace osq

#endif  // OSQ_OPERATORS_HPP
