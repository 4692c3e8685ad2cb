#ifndef AHCERT_MATRIX_HPP
#define AHCERT_MATRIX_HPP

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ahcert/metric_space.hpp"

namespace ahcert {

using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Largest singular value (the C*-norm realized on matrices).
double operator_norm(const CMatrix& m);

/// Smallest singular value; 0 for 0x0 matrices.
double sigma_min(const CMatrix& m);

bool is_unitary(const CMatrix& m, double tol = 1e-10);

/// An element of M_n(C(X)) sampled at the net points of X.
struct MatrixFunction {
  SpacePtr space;
  int n = 0;
  std::vector<CMatrix> values;  // one n x n matrix per point

  static MatrixFunction constant(SpacePtr space, const CMatrix& m);
  static MatrixFunction zero(SpacePtr space, int n);
  static MatrixFunction identity(SpacePtr space, int n);
  /// Pointwise diagonal matrix from scalar functions on a common space.
  static MatrixFunction diagonal(std::span<const ScalarFunction> entries);
  static MatrixFunction from_scalar(const ScalarFunction& f);

  const CMatrix& at(int p) const { return values[p]; }
  CMatrix& at(int p) { return values[p]; }
  int points() const { return static_cast<int>(values.size()); }

  MatrixFunction adjoint() const;
  MatrixFunction scaled(Complex c) const;
  /// Pointwise sub-block [r0, r0+rows) x [c0, c0+cols).
  MatrixFunction block(int r0, int c0, int rows, int cols) const;
};

MatrixFunction operator*(const MatrixFunction& a, const MatrixFunction& b);
MatrixFunction operator+(const MatrixFunction& a, const MatrixFunction& b);
MatrixFunction operator-(const MatrixFunction& a, const MatrixFunction& b);

/// Max over net points of the pointwise operator norm.
double sup_norm(const MatrixFunction& f);

struct MarginResult {
  double margin;  // min over points of sigma_min(f(x))
  int witness;    // an argmin point (lowest index on ties)
};
/// Pointwise invertibility margin; f is pointwise invertible iff margin > 0.
MarginResult invertibility_margin(const MatrixFunction& f);

/// Zero-corner normal form at a singular matrix: unitaries u, v and an
/// (n-1) x (n-1) matrix c with  u m v = diag(0, c)  up to sigma_min(m).
/// The smallest singular value is moved to position (1,1) and replaced by
/// exact zero; exactly-diagonal inputs take a permutation-only fast path so
/// their entries are preserved verbatim.
struct ZeroCornerForm {
  CMatrix u, v;  // unitary
  CMatrix c;     // size n-1
  double residual;  // sigma_min(m), the norm defect of the exact-zero form
};
ZeroCornerForm svd_zero_corner(const CMatrix& m, double tol = 1e-10);

/// Invertible approximation in a matrix algebra: singular values below
/// eps/2 are floored to eps/2 (diagonal inputs floored entrywise, keeping
/// phases).  Inputs with sigma_min >= eps/2 are returned unchanged.
/// ||result - m|| <= eps/2 and sigma_min(result) >= min(sigma_min(m), eps/2).
CMatrix finite_dim_invertible_approx(const CMatrix& m, double eps);

/// Pointwise block-diagonal direct sum of functions on one space.
MatrixFunction assemble_block_diag(std::span<const MatrixFunction> blocks);

/// Matrix-valued analogue of the scalar modulus rule, with the operator
/// norm measuring value gaps.
double modulus_eta(const MatrixFunction& f, double eps);

}  // namespace ahcert

#endif
