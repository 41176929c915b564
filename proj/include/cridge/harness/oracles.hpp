#pragma once

#include <cmath>
#include <vector>

#include "cridge/common.hpp"

namespace cridge::oracle {

/// Central difference (f(x + h) - f(x - h)) / 2h.
template <class F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

/// Golden-section search for the minimizer of a unimodal f on [lo, hi].
template <class F>
double golden_section_minimize(F&& f, double lo, double hi, double tol = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 400 && (b - a) > tol * (1 + std::abs(c)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Eigenvalues of X^T X / n (d of them, zeros included) through the smaller Gram matrix.
inline Vector sample_covariance_spectrum(const Matrix& x) {
  const Index n = x.rows();
  const Index d = x.cols();
  Vector out = Vector::Zero(d);
  if (n >= d) {
    Matrix gram = Matrix::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / n);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    out = eig.eigenvalues().cwiseMax(0.0);
  } else {
    Matrix gram = Matrix::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / n);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    out.head(n) = eig.eigenvalues().cwiseMax(0.0);
  }
  return out;
}

/// (1/d) Tr[(S + lambda I)^{-1}] from the spectrum of S.
inline double resolvent_trace(const Vector& spectrum, double lambda) {
  return (1.0 / (spectrum.array() + lambda)).mean();
}

}  // namespace cridge::oracle
