#pragma once

#include "cridge/common.hpp"

namespace cridge {

/// Moore-Penrose inverse of a symmetric positive-semidefinite matrix.
/// Eigenvalues below kPinvCutoff * max|eigenvalue| are treated as zero.
Matrix psd_pseudo_inverse(const Matrix& sym);

/// Squared generalized norm x^T S x.
double sq_norm(const Vector& x, const Matrix& sigma);

bool all_finite(const Matrix& m);

}  // namespace cridge
