#include <cmath>
#include <numbers>
#include <stdexcept>

#include <doctest.h>

#include "osq/hilbert.hpp"
#include "test_util.hpp"

using namespace osq;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("number states are unit basis vectors") {
  const QuditState s = make_number_state(3, 1);
  CHECK(s.dim == 3);
  CHECK(s.basis_tag == Basis::number);
  CHECK(s.amplitudes(0) == Complex(0.0, 0.0));
  CHECK(s.amplitudes(1) == Complex(1.0, 0.0));
  CHECK(s.amplitudes(2) == Complex(0.0, 0.0));

  const QuditState degenerate = make_number_state(1, 0);
  CHECK(degenerate.amplitudes(0) == Complex(1.0, 0.0));
}

TEST_CASE("state factories reject bad labels and dimensions") {
  CHECK_THROWS_AS(make_number_state(4, 4), std::out_of_range);
  CHECK_THROWS_AS(make_number_state(4, -1), std::out_of_range);
  CHECK_THROWS_AS(make_phase_state(4, 4), std::out_of_range);
  CHECK_THROWS_AS(make_number_state(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_phase_state(-2, 0), std::invalid_argument);
  CHECK_THROWS_AS(fourier_operator(0), std::invalid_argument);
}

TEST_CASE("phase states match the analytic amplitudes") {
  // d=2: |φ₀⟩ = (|0⟩+|1⟩)/√2, |φ₁⟩ = (|0⟩−|1⟩)/√2.
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const QuditState phi0 = make_phase_state(2, 0);
  CHECK(std::abs(phi0.amplitudes(0) - inv_sqrt2) < 1e-15);
  CHECK(std::abs(phi0.amplitudes(1) - inv_sqrt2) < 1e-15);
  const QuditState phi1 = make_phase_state(2, 1);
  CHECK(std::abs(phi1.amplitudes(0) - inv_sqrt2) < 1e-15);
  CHECK(std::abs(phi1.amplitudes(1) + inv_sqrt2) < 1e-15);
  CHECK(phi1.basis_tag == Basis::phase);

  // d=4, k=1: ⟨3|φ₁⟩ = exp(−i·(π/2)·3)/2 = +0.5i.
  const QuditState phi = make_phase_state(4, 1);
  CHECK(std::abs(phi.amplitudes(3) - Complex(0.0, 0.5)) < 1e-15);
}

TEST_CASE("phase label angles are multiples of 2 pi over d") {
  CHECK(PhaseLabel{8, 3}.angle() == doctest::Approx(3.0 * kPi / 4.0));
  CHECK(PhaseLabel{5, 0}.angle() == 0.0);
}

TEST_CASE("phase states are unit norm and pairwise orthogonal") {
  for (int d : {2, 3, 8}) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        const Complex ip =
            inner_product(make_phase_state(d, j), make_phase_state(d, k));
        const double expected = (j == k) ? 1.0 : 0.0;
        CHECK(std::abs(ip - expected) < 1e-12);
      }
    }
  }
}

TEST_CASE("number and phase bases are dual: <phi_k|n> = exp(i phi_k n)/sqrt(d)") {
  for (int d = 2; d <= 32; ++d) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < d; ++k) {
      for (int n = 0; n < d; ++n) {
        const Complex ip =
            inner_product(make_phase_state(d, k), make_number_state(d, n));
        const Complex expected =
            std::polar(scale, PhaseLabel{d, k}.angle() * n);
        CHECK(std::abs(ip - expected) < 1e-12);
        CHECK(std::abs(std::abs(ip) - scale) < 1e-12);  // mutually unbiased
      }
    }
  }
}

TEST_CASE("phase states resolve the identity") {
  for (int d = 2; d <= 32; ++d) {
    CMat sum = CMat::Zero(d, d);
    for (int k = 0; k < d; ++k) {
      const CVec& phi = make_phase_state(d, k).amplitudes;
      sum += phi * phi.adjoint();
    }
    sum -= CMat::Identity(d, d);
    CHECK(max_abs(sum) < 1e-12);
  }
}

TEST_CASE("inner_product conjugates its left argument") {
  const QuditState a = make_phase_state(3, 1);
  const QuditState b = make_number_state(3, 2);
  // ⟨φ₁|2⟩ = exp(+i·(2π/3)·2)/√3.
  const Complex expected = std::polar(1.0 / std::sqrt(3.0), 4.0 * kPi / 3.0);
  CHECK(std::abs(inner_product(a, b) - expected) < 1e-14);
  CHECK(std::abs(inner_product(b, a) - std::conj(expected)) < 1e-14);
  CHECK_THROWS_AS(inner_product(a, make_number_state(4, 0)),
                  std::invalid_argument);
}

TEST_CASE("tensor combines amplitudes in register order") {
  const RegisterState both_zero =
      tensor({make_number_state(2, 0), make_number_state(2, 0)});
  CHECK(both_zero.dim == 2);
  CHECK(both_zero.qudits == 2);
  REQUIRE(both_zero.amplitudes.size() == 4);
  CHECK(both_zero.amplitudes(0) == Complex(1.0, 0.0));
  CHECK(std::abs(both_zero.amplitudes(1)) == 0.0);
  CHECK(both_zero.encodings[0] == Basis::number);

  // |1⟩ ⊗ |φ₀⟩ at d=2: amplitudes (0, 0, 1/√2, 1/√2) — qudit 0 is the most
  // significant digit.
  const RegisterState mixed =
      tensor({make_number_state(2, 1), make_phase_state(2, 0)});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(mixed.amplitudes(0)) == 0.0);
  CHECK(std::abs(mixed.amplitudes(1)) == 0.0);
  CHECK(std::abs(mixed.amplitudes(2) - inv_sqrt2) < 1e-15);
  CHECK(std::abs(mixed.amplitudes(3) - inv_sqrt2) < 1e-15);
  CHECK(mixed.encodings[0] == Basis::number);
  CHECK(mixed.encodings[1] == Basis::phase);

  const RegisterState single = tensor({make_phase_state(3, 1)});
  CHECK(single.qudits == 1);
  CHECK(single.amplitudes.size() == 3);

  CHECK_THROWS_AS(tensor({}), std::invalid_argument);
  CHECK_THROWS_AS(
      tensor({make_number_state(2, 0), make_number_state(3, 0)}),
      std::invalid_argument);
}

TEST_CASE("tensor folds left so grouping cannot change the result") {
  const QuditState a = testutil::random_qudit_state(3, 11);
  const QuditState b = testutil::random_qudit_state(3, 22);
  const QuditState c = testutil::random_qudit_state(3, 33);
  const RegisterState abc = tensor({a, b, c});

  // Reference: ((a ⊗ b) ⊗ c) with the same multiplication order.
  CVec ab(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      ab(i * 3 + j) = a.amplitudes(i) * b.amplitudes(j);
  CVec ref(27);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 3; ++j) ref(i * 3 + j) = ab(i) * c.amplitudes(j);

  for (int i = 0; i < 27; ++i) {
    CHECK(abc.amplitudes(i) == ref(i));  // bitwise: same fold order
  }
}

TEST_CASE("registers refuse to exceed the amplitude cap") {
  std::vector<QuditState> qubits(21, make_number_state(2, 0));
  CHECK_THROWS_AS(tensor(qubits), CapacityError);  // 2^21 > 2^20

  std::vector<QuditState> pair(2, make_number_state(4, 0));
  CHECK_THROWS_AS(tensor(pair, 8), CapacityError);  // 16 > 8
  CHECK_NOTHROW(tensor(pair, 16));
}

TEST_CASE("fourier operator maps number states onto phase states") {
  for (int d = 2; d <= 32; ++d) {
    const Operator f = fourier_operator(d);
    for (int n = 0; n < d; ++n) {
      const CVec mapped = f.entries * make_number_state(d, n).amplitudes;
      const CVec expected = make_phase_state(d, n).amplitudes;
      CHECK((mapped - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("fourier matrix at d=2 is the hadamard") {
  const Operator f = fourier_operator(2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(f.entries(0, 0) - inv_sqrt2) < 1e-15);
  CHECK(std::abs(f.entries(0, 1) - inv_sqrt2) < 1e-15);
  CHECK(std::abs(f.entries(1, 0) - inv_sqrt2) < 1e-15);
  CHECK(std::abs(f.entries(1, 1) + inv_sqrt2) < 1e-15);

  const Operator trivial = fourier_operator(1);
  CHECK(std::abs(trivial.entries(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("fourier operator is unitary") {
  for (int d : {1, 2, 3, 7, 16}) {
    CHECK(unitarity_defect(fourier_operator(d).entries) < 1e-12);
  }
}

TEST_CASE("basis names render for output layers") {
  CHECK(std::string(to_string(Basis::number)) == "number");
  CHECK(std::string(to_string(Basis::phase)) == "phase");
  CHECK(std::string(to_string(Basis::general)) == "general");
}
