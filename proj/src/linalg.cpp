#include "osq/linalg.hpp"

#include <stdexcept>

namespace osq {

double max_abs(const CMat& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMat& u) {
  CMat gram = u.adjoint() * u;
  gram -= CMat::Identity(u.cols(), u.cols());
  return max_abs(gram);
}

double hermiticity_defect(const CMat& h) {
  CMat diff = h - h.adjoint();
  return max_abs(diff);
}

double antihermiticity_defect(const CMat& g) {
  CMat sum = g + g.adjoint();
  return max_abs(sum);
}

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

CMat expm_antihermitian(const CMat& g, double tolerance) {
  if (g.rows() != g.cols()) {
    throw std::invalid_argument("expm_antihermitian: matrix must be square");
  }
  if (antihermiticity_defect(g) > tolerance) {
    throw std::invalid_argument(
        "expm_antihermitian: generator is not anti-Hermitian");
  }
  // G = iH with H = −iG Hermitian; exp(G) = V · diag(exp(iλ)) · V†.
  CMat h = Complex(0.0, -1.0) * g;
  Eigen::SelfAdjointEigenSolver<CMat> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("expm_antihermitian: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  CVec phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::polar(1.0, lambda(i));
  }
  CMat v = solver.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace osq
