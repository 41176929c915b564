#include "cridge/common.hpp"
#include "cridge/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace cridge {

std::string_view to_string(Target target) {
  return target == Target::Causal ? "causal" : "statistical";
}

Matrix psd_pseudo_inverse(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector& values = eig.eigenvalues();
  const double largest = values.cwiseAbs().maxCoeff();
  const double cutoff = kPinvCutoff * largest;
  Vector inv = Vector::Zero(values.size());
  for (Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i)) > cutoff) inv(i) = 1.0 / values(i);
  }
  const Matrix& vecs = eig.eigenvectors();
  return vecs * inv.asDiagonal() * vecs.transpose();
}

double sq_norm(const Vector& x, const Matrix& sigma) { return x.dot(sigma * x); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace cridge
