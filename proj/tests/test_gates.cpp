#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "osq/gates.hpp"
#include "osq/hilbert.hpp"
#include "osq/operators.hpp"
#include "test_util.hpp"

using namespace osq;

namespace {

constexpr double kPi = std::numbers::pi;

// x̂ = (â + â†)/√2 on the truncated space.
CMat position_op(int dim) {
  const CMat a = lowering_operator(dim).entries;
  return (a + CMat(a.adjoint())) / std::sqrt(2.0);
}

// p̂ = i·(â† − â)/√2 on the truncated space.
CMat momentum_op(int dim) {
  const CMat a = lowering_operator(dim).entries;
  return Complex(0.0, 1.0) * (CMat(a.adjoint()) - a) / std::sqrt(2.0);
}

Operator general_op(int dim, CMat entries) {
  Operator op;
  op.dim = dim;
  op.arity = 1;
  op.structure = OpStructure::general;
  op.entries = std::move(entries);
  return op;
}

}  // namespace

TEST_CASE("sum permutation matches the label map |s1,s2> -> |s1,s1+s2>") {
  const Operator p = sum_permutation(2);
  CHECK(p.dim == 4);
  CHECK(p.arity == 2);
  CHECK(p.structure == OpStructure::permutation);
  // Column 3 encodes (s1,s2)=(1,1); 1+1 mod 2 = 0, so it lands on row 2.
  CHECK(p.entries(2, 3) == Complex(1.0, 0.0));
  CHECK(p.entries(3, 3) == Complex(0.0, 0.0));
  // Control 0 leaves the target alone: top-left block is the identity.
  CHECK(p.entries(0, 0) == Complex(1.0, 0.0));
  CHECK(p.entries(1, 1) == Complex(1.0, 0.0));
  CHECK(p.entries(1, 0) == Complex(0.0, 0.0));
}

TEST_CASE("sum permutation has order d") {
  const int d = 3;
  const CMat p = sum_permutation(d).entries;
  CMat acc = CMat::Identity(d * d, d * d);
  for (int i = 0; i < d; ++i) acc = acc * p;
  CHECK(testutil::max_abs_diff(acc, CMat::Identity(d * d, d * d)) == 0.0);
}

TEST_CASE("cross-kerr entangler is diagonal with the advertised phases") {
  const int d = 3;
  const double chi_t = 2.0 * kPi / d;
  const Operator k = sum_via_kerr(d, chi_t);
  CHECK(k.structure == OpStructure::diagonal);
  CHECK(k.dim == 9);
  for (int n1 = 0; n1 < d; ++n1) {
    for (int n2 = 0; n2 < d; ++n2) {
      const Complex expected = std::polar(1.0, -chi_t * n1 * n2);
      CHECK(std::abs(k.entries(n1 * d + n2, n1 * d + n2) - expected) < 1e-14);
    }
  }
  // Zero interaction time is the identity.
  CHECK(testutil::max_abs_diff(sum_via_kerr(d, 0.0).entries,
                               CMat::Identity(9, 9)) == 0.0);
}

TEST_CASE("kerr entangler conjugated by the target fourier is the sum gate") {
  // The load-bearing equivalence of the whole gate set: with χt = 2π/d,
  // (1⊗F†)·K·(1⊗F) must reproduce the permutation SUM exactly.
  for (int d = 2; d <= 16; ++d) {
    const CMat f = fourier_operator(d).entries;
    const CMat if_right = kron(CMat::Identity(d, d), f);
    const CMat k = sum_via_kerr(d, 2.0 * kPi / d).entries;
    const CMat conj = if_right.adjoint() * k * if_right;
    CHECK(testutil::max_abs_diff(conj, sum_permutation(d).entries) < 1e-10);
  }
}

TEST_CASE("kerr entangler adds the control's number into the target's phase") {
  const int d = 4;
  const RegisterState in =
      tensor({make_number_state(d, 1), make_phase_state(d, 2)});
  const RegisterState expected =
      tensor({make_number_state(d, 1), make_phase_state(d, 3)});
  const CVec out = sum_via_kerr(d, 2.0 * kPi / d).entries * in.amplitudes;
  // The map is exact, with no leftover global phase.
  CHECK((out - expected.amplitudes).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("displacement basics") {
  const int d = 64;
  CHECK(testutil::max_abs_diff(displacement(8, Complex(0.0, 0.0)).entries,
                               CMat::Identity(8, 8)) < 1e-14);

  // D(α)·D(−α) = 1: the two factors are exact matrix inverses.
  const Complex alpha(0.4, -0.3);
  const CMat fwd = displacement(d, alpha).entries;
  const CMat back = displacement(d, -alpha).entries;
  CHECK(testutil::max_abs_diff(CMat(fwd * back), CMat::Identity(d, d)) <
        1e-12);
}

TEST_CASE("displacing vacuum yields the coherent state") {
  const int d = 64;
  const CVec psi =
      displacement(d, Complex(1.0, 0.0)).entries.col(0);
  // Coherent amplitudes for α = 1: e^{−1/2}/√(n!).
  CVec coherent(d);
  for (int n = 0; n < d; ++n) {
    coherent(n) = Complex(std::exp(-0.5 - 0.5 * std::lgamma(n + 1.0)), 0.0);
  }
  const double fidelity = std::norm(coherent.dot(psi));
  CHECK(fidelity > 1.0 - 1e-9);
}

TEST_CASE("displacements compose with the canonical phase") {
  // D(α)·D(β) = e^{i·Im(α·β*)}·D(α+β); checked on vacuum, where the state
  // stays far from the truncation edge.
  const int d = 64;
  const Complex alpha(0.3, 0.2);
  const Complex beta(-0.1, 0.4);
  const CVec lhs = displacement(d, alpha).entries *
                   CVec(displacement(d, beta).entries.col(0));
  const Complex phase =
      std::polar(1.0, std::imag(alpha * std::conj(beta)));
  const CVec rhs = phase * CVec(displacement(d, alpha + beta).entries.col(0));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("squeeze basics") {
  CHECK(testutil::max_abs_diff(squeeze(8, Complex(0.0, 0.0)).entries,
                               CMat::Identity(8, 8)) < 1e-14);

  // The generator is quadratic in ladder operators, so squeezed vacuum only
  // populates even number states.
  const int d = 32;
  const CVec psi = squeeze(d, Complex(0.5, 0.0)).entries.col(0);
  for (int n = 1; n < d; n += 2) {
    CHECK(std::abs(psi(n)) < 1e-12);
  }
  CHECK(std::abs(psi(0)) > 0.5);  // dominated by vacuum for moderate ζ
}

TEST_CASE("squeezed vacuum has quadrature variance e^{-2r}/2") {
  const int d = 64;
  const double r = 0.5;
  const CVec psi = squeeze(d, Complex(r, 0.0)).entries.col(0);
  const CMat x = position_op(d);
  const Complex mean = psi.dot(x * psi);
  const Complex second = psi.dot(x * CVec(x * psi));
  const double variance = std::real(second) - std::norm(mean);
  const double expected = std::exp(-2.0 * r) / 2.0;
  CHECK(std::abs(variance - expected) / expected < 1e-6);
}

TEST_CASE("self-kerr is the advertised diagonal") {
  const Operator k = kerr(3, kPi);
  CHECK(k.structure == OpStructure::diagonal);
  // Phases e^{−iπ·n²}: n=0 → 1, n=1 → −1, n=2 → e^{−4πi} = 1.
  CHECK(std::abs(k.entries(0, 0) - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(k.entries(1, 1) - Complex(-1.0, 0.0)) < 1e-14);
  CHECK(std::abs(k.entries(2, 2) - Complex(1.0, 0.0)) < 1e-14);
  CHECK(testutil::max_abs_diff(kerr(5, 0.0).entries, CMat::Identity(5, 5)) ==
        0.0);
}

TEST_CASE("gate constructors stay unitary at d=64") {
  const int d = 64;
  CHECK(unitarity_defect(displacement(d, Complex(0.7, 0.3)).entries) < 1e-10);
  CHECK(unitarity_defect(squeeze(d, Complex(0.4, -0.2)).entries) < 1e-10);
  for (int n = 0; n < d; ++n) {
    CHECK(std::abs(std::abs(kerr(d, 0.37).entries(n, n)) - 1.0) < 1e-12);
  }
  // Two-qudit constructors at d=64 are 4096×4096; check them through their
  // structure instead of a dense unitarity product.
  const Operator k2 = sum_via_kerr(d, 2.0 * kPi / d);
  for (int g = 0; g < k2.dim; ++g) {
    CHECK(std::abs(std::abs(k2.entries(g, g)) - 1.0) < 1e-12);
  }
  const Operator p = sum_permutation(d);
  for (int r = 0; r < p.dim; ++r) {
    CHECK(std::abs(p.entries.row(r).cwiseAbs().sum() - 1.0) < 1e-14);
    CHECK(std::abs(p.entries.col(r).cwiseAbs().sum() - 1.0) < 1e-14);
  }
}

TEST_CASE("empty gate sequence multiplies to the identity") {
  GateSequence seq;
  seq.dim = 3;
  CHECK(testutil::max_abs_diff(seq.product(), CMat::Identity(3, 3)) == 0.0);

  GateSequence unset;
  CHECK_THROWS_AS(unset.product(), std::invalid_argument);
}

TEST_CASE("commutator sequence shape and degenerate cases") {
  const int d = 8;
  const Operator a = general_op(d, CMat(Complex(0.0, 1.0) * position_op(d)));
  const Operator b = general_op(d, CMat(Complex(0.0, 1.0) * momentum_op(d)));

  const GateSequence seq = commutator_sequence(a, b, 0.1);
  REQUIRE(seq.steps.size() == 4);
  CHECK(seq.steps[0].label == "exp(+delta*A)");
  CHECK(seq.steps[1].label == "exp(+delta*B)");
  CHECK(seq.steps[2].label == "exp(-delta*A)");
  CHECK(seq.steps[3].label == "exp(-delta*B)");

  // Identical generators cancel pairwise.
  const GateSequence same = commutator_sequence(a, a, 0.3);
  CHECK(testutil::max_abs_diff(same.product(), CMat::Identity(d, d)) < 1e-12);

  // Zero step size is the identity outright.
  const GateSequence frozen = commutator_sequence(a, b, 0.0);
  CHECK(testutil::max_abs_diff(frozen.product(), CMat::Identity(d, d)) <
        1e-13);
}

TEST_CASE("commutator sequence rejects bad input") {
  const int d = 4;
  const Operator a = general_op(d, CMat(Complex(0.0, 1.0) * position_op(d)));
  const Operator hermitian = general_op(d, position_op(d));
  const Operator other = general_op(6, CMat(Complex(0.0, 1.0) * position_op(6)));

  CHECK_THROWS_AS(commutator_sequence(a, hermitian, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(commutator_sequence(hermitian, a, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(commutator_sequence(a, other, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(commutator_sequence(a, a, -0.01), std::invalid_argument);
}

TEST_CASE("group commutator converges at second order") {
  // Generators A = i·x̂, B = i·p̂ at d=32; the sequence should approach
  // exp([A,B]·δ²) with error falling roughly as δ³ (ratio ≈ 8 per halving).
  const int d = 32;
  const Operator a = general_op(d, CMat(Complex(0.0, 1.0) * position_op(d)));
  const Operator b = general_op(d, CMat(Complex(0.0, 1.0) * momentum_op(d)));
  const CMat comm =
      a.entries * b.entries - b.entries * a.entries;

  const auto error_at = [&](double delta) {
    const Operator target =
        general_op(d, expm_antihermitian(CMat(delta * delta * comm)));
    return sequence_error(commutator_sequence(a, b, delta), target);
  };

  const double e1 = error_at(0.2);
  const double e2 = error_at(0.1);
  const double e3 = error_at(0.05);

  // Reference values recomputed independently (numpy, same left-to-right
  // factor order and spectral-norm phase minimization).
  CHECK(e1 == doctest::Approx(0.5457032856).epsilon(1e-4));
  CHECK(e2 == doctest::Approx(0.0834975269).epsilon(1e-4));
  CHECK(e3 == doctest::Approx(0.0109577786).epsilon(1e-4));

  const double r12 = e1 / e2;
  const double r23 = e2 / e3;
  CHECK(r12 > 6.0);
  CHECK(r12 < 10.0);
  CHECK(r23 > 6.0);
  CHECK(r23 < 10.0);
}

TEST_CASE("sequence error is phase-blind") {
  const int d = 2;
  GateSequence seq;
  seq.dim = d;
  seq.steps.push_back({"X", pauli_generators(d).x});

  // Target equal to the product up to a global phase: error ≈ 0.
  Operator target = pauli_generators(d).x;
  target.entries = std::polar(1.0, kPi / 7.0) * target.entries;
  CHECK(sequence_error(seq, target) < 1e-9);
}

TEST_CASE("sequence error of identity against X is sqrt(2)") {
  // min over φ of ‖1 − e^{iφ}X‖ in spectral norm: the eigenvalues of e^{iφ}X
  // are ±e^{iφ}, so the best φ balances |1−e^{iφ}| and |1+e^{iφ}| at √2.
  GateSequence empty;
  empty.dim = 2;
  CHECK(sequence_error(empty, pauli_generators(2).x) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("sequence error rejects dimension mismatch") {
  GateSequence seq;
  seq.dim = 2;
  CHECK_THROWS_AS(sequence_error(seq, pauli_generators(3).x),
                  std::invalid_argument);
}
