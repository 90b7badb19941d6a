#include "osq/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace osq {

namespace {

void require_dim(int dim) {
  if (dim < 1) {
    throw std::invalid_argument("dimension must be at least 1, got " +
                                std::to_string(dim));
  }
}

}  // namespace

Operator number_operator(int dim) {
  require_dim(dim);
  Operator op;
  op.dim = dim;
  op.arity = 1;
  op.structure = OpStructure::diagonal;
  op.entries = CMat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    op.entries(n, n) = Complex(static_cast<double>(n), 0.0);
  }
  return op;
}

Operator lowering_operator(int dim) {
  require_dim(dim);
  Operator op;
  op.dim = dim;
  op.arity = 1;
  op.structure = OpStructure::general;
  op.entries = CMat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) {
    op.entries(n - 1, n) = Complex(std::sqrt(static_cast<double>(n)), 0.0);
  }
  return op;
}

Operator raising_operator(int dim) {
  Operator op = lowering_operator(dim);
  op.entries = CMat(op.entries.adjoint());
  return op;
}

Operator phase_operator(int dim) {
  require_dim(dim);
  Operator op;
  op.dim = dim;
  op.arity = 1;
  op.structure = OpStructure::general;
  op.entries = CMat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const QuditState phi = make_phase_state(dim, k);
    const double angle = PhaseLabel{dim, k}.angle();
    op.entries +=
        angle * (phi.amplitudes * phi.amplitudes.adjoint());
  }
  // The spectral sum is Hermitian up to roundoff; symmetrize so downstream
  // exponentials see an exactly Hermitian matrix.
  op.entries = CMat(0.5 * (op.entries + op.entries.adjoint()));
  return op;
}

Operator cyclic_shift(int dim) {
  require_dim(dim);
  Operator op;
  op.dim = dim;
  op.arity = 1;
  op.structure = OpStructure::permutation;
  op.entries = CMat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    op.entries((n + 1) % dim, n) = Complex(1.0, 0.0);
  }
  return op;
}

PauliPair pauli_generators(int dim) {
  require_dim(dim);

  // X from first principles: exponentiate the phase operator, then confirm
  // it is the exact cyclic shift before handing out the clean form.
  const Operator theta = phase_operator(dim);
  const CMat x_exp =
      expm_antihermitian(CMat(Complex(0.0, 1.0) * theta.entries));
  Operator x = cyclic_shift(dim);
  const double shift_residual = max_abs(CMat(x_exp - x.entries));
  if (shift_residual > 1e-10) {
    throw std::logic_error(
        "pauli_generators: exp(i*theta) deviates from the cyclic shift by " +
        std::to_string(shift_residual) + " at dim " + std::to_string(dim));
  }

  Operator z;
  z.dim = dim;
  z.arity = 1;
  z.structure = OpStructure::diagonal;
  z.entries = CMat::Zero(dim, dim);
  const double unit = 2.0 * std::numbers::pi / static_cast<double>(dim);
  for (int n = 0; n < dim; ++n) {
    z.entries(n, n) = std::polar(1.0, unit * static_cast<double>(n));
  }
  return PauliPair{std::move(x), std::move(z)};
}

OperatorSet make_operator_set(int dim) {
  OperatorSet set;
  set.dim = dim;
  set.number_op = number_operator(dim);
  set.lowering_op = lowering_operator(dim);
  set.raising_op = raising_operator(dim);
  set.phase_op = phase_operator(dim);
  PauliPair pauli = pauli_generators(dim);
  set.pauli_x = std::move(pauli.x);
  set.pauli_z = std::move(pauli.z);
  return set;
}

}  // namespace osq
