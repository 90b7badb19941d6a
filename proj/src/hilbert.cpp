#include "osq/hilbert.hpp"

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

void require_label(int dim, int label) {
  if (label < 0 || label >= dim) {
    throw std::out_of_range("label " + std::to_string(label) +
                            " out of range [0," + std::to_string(dim) + ")");
  }
}

}  // namespace

const char* to_string(Basis basis) {
  switch (basis) {
    case Basis::number:
      return "number";
    case Basis::phase:
      return "phase";
    case Basis::general:
      return "general";
  }
  return "unknown";
}

double PhaseLabel::angle() const {
  return 2.0 * std::numbers::pi * static_cast<double>(k) /
         static_cast<double>(dim);
}

QuditState make_number_state(int dim, int n) {
  require_dim(dim);
  require_label(dim, n);
  QuditState state;
  state.dim = dim;
  state.amplitudes = CVec::Zero(dim);
  state.amplitudes(n) = Complex(1.0, 0.0);
  state.basis_tag = Basis::number;
  return state;
}

QuditState make_phase_state(int dim, int k) {
  require_dim(dim);
  require_label(dim, k);
  QuditState state;
  state.dim = dim;
  state.amplitudes = CVec(dim);
  const double phi = PhaseLabel{dim, k}.angle();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int n = 0; n < dim; ++n) {
    state.amplitudes(n) = std::polar(scale, -phi * static_cast<double>(n));
  }
  state.basis_tag = Basis::phase;
  return state;
}

Complex inner_product(const QuditState& a, const QuditState& b) {
  if (a.dim != b.dim) {
    throw std::invalid_argument("inner_product: dimension mismatch (" +
                                std::to_string(a.dim) + " vs " +
                                std::to_string(b.dim) + ")");
  }
  // Eigen's dot conjugates its left operand, matching ⟨a|b⟩.
  return a.amplitudes.dot(b.amplitudes);
}

RegisterState tensor(const std::vector<QuditState>& parts,
                     std::size_t amplitude_cap) {
  if (parts.empty()) {
    throw std::invalid_argument("tensor: need at least one qudit");
  }
  const int dim = parts.front().dim;
  require_dim(dim);
  std::size_t total = 1;
  for (const QuditState& part : parts) {
    if (part.dim != dim) {
      throw std::invalid_argument("tensor: mixed dimensions (" +
                                  std::to_string(dim) + " vs " +
                                  std::to_string(part.dim) + ")");
    }
    if (total > amplitude_cap / static_cast<std::size_t>(dim)) {
      throw CapacityError("register of " + std::to_string(parts.size()) +
                          " qudits at dim " + std::to_string(dim) +
                          " exceeds the amplitude cap of " +
                          std::to_string(amplitude_cap));
    }
    total *= static_cast<std::size_t>(dim);
  }

  RegisterState reg;
  reg.dim = dim;
  reg.qudits = static_cast<int>(parts.size());
  reg.encodings.reserve(parts.size());
  reg.amplitudes = parts.front().amplitudes;
  reg.encodings.push_back(parts.front().basis_tag == Basis::phase
                              ? Basis::phase
                              : Basis::number);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const CVec& next = parts[i].amplitudes;
    CVec folded(reg.amplitudes.size() * next.size());
    for (Eigen::Index a = 0; a < reg.amplitudes.size(); ++a) {
      for (Eigen::Index b = 0; b < next.size(); ++b) {
        folded(a * next.size() + b) = reg.amplitudes(a) * next(b);
      }
    }
    reg.amplitudes = std::move(folded);
    reg.encodings.push_back(parts[i].basis_tag == Basis::phase ? Basis::phase
                                                               : Basis::number);
  }
  return reg;
}

Operator fourier_operator(int dim) {
  require_dim(dim);
  Operator f;
  f.dim = dim;
  f.arity = 1;
  f.structure = OpStructure::general;
  f.entries = CMat(dim, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  const double unit = 2.0 * std::numbers::pi / static_cast<double>(dim);
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      // Reduce m·n mod d before forming the angle so large labels lose no
      // precision to the multiplication.
      const long long mn = (static_cast<long long>(m) * n) % dim;
      f.entries(m, n) = std::polar(scale, -unit * static_cast<double>(mn));
    }
  }
  return f;
}

}  // namespace osq
