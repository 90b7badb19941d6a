#ifndef OSQ_LINALG_HPP
#define OSQ_LINALG_HPP

// Small linear-algebra layer shared by the simulator: complex matrix/vector
// aliases plus the handful of dense routines everything else is built on
// (anti-Hermitian matrix exponential, norms, unitarity checks).

#include <complex>

#include <Eigen/Dense>

namespace osq {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
// Row-major so Operator entries can be reasoned about as entries[row*dim+col].
using CMat =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Largest absolute entry; zero for empty matrices.
double max_abs(const CMat& m);

// ‖U†U − I‖_max — how far u is from unitary.
double unitarity_defect(const CMat& u);

// ‖H − H†‖_max — how far h is from Hermitian.
double hermiticity_defect(const CMat& h);

// ‖G + G†‖_max — how far g is from anti-Hermitian.
double antihermiticity_defect(const CMat& g);

// Largest singular value.
double spectral_norm(const CMat& m);

// exp(G) for anti-Hermitian G, computed through the eigendecomposition of the
// Hermitian matrix −iG, so the result is unitary to machine precision at any
// generator norm.  Throws std::invalid_argument when G is not anti-Hermitian
// (defect above `tolerance`) and std::runtime_error if the eigensolver fails.
CMat expm_antihermitian(const CMat& g, double tolerance = 1e-10);

// Kronecker product, row-major, a ⊗ b.
CMat kron(const CMat& a, const CMat& b);

}  // namespace osq

#endif  // OSQ_LINALG_HPP
