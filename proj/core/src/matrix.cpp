#include "ahcert/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace ahcert {

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double sigma_min(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

bool is_unitary(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  CMatrix d = m * m.adjoint() - CMatrix::Identity(m.rows(), m.cols());
  return operator_norm(d) < tol;
}

MatrixFunction MatrixFunction::constant(SpacePtr space, const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(Errc::SizeMismatch, "matrix function values must be square");
  MatrixFunction f;
  f.n = static_cast<int>(m.rows());
  f.values.assign(space->size(), m);
  f.space = std::move(space);
  return f;
}

MatrixFunction MatrixFunction::zero(SpacePtr space, int n) {
  return constant(std::move(space), CMatrix::Zero(n, n));
}

MatrixFunction MatrixFunction::identity(SpacePtr space, int n) {
  return constant(std::move(space), CMatrix::Identity(n, n));
}

MatrixFunction MatrixFunction::diagonal(std::span<const ScalarFunction> entries) {
  if (entries.empty()) throw Error(Errc::EmptySet, "diagonal needs at least one entry");
  const SpacePtr& space = entries.front().space;
  for (const auto& e : entries)
    if (e.space != space) throw Error(Errc::SpaceMismatch, "diagonal entries on different spaces");
  MatrixFunction f;
  f.space = space;
  f.n = static_cast<int>(entries.size());
  f.values.assign(space->size(), CMatrix::Zero(f.n, f.n));
  for (int p = 0; p < space->size(); ++p)
    for (int i = 0; i < f.n; ++i) f.values[p](i, i) = entries[i].values[p];
  return f;
}

MatrixFunction MatrixFunction::from_scalar(const ScalarFunction& f) {
  return diagonal(std::span<const ScalarFunction>(&f, 1));
}

MatrixFunction MatrixFunction::adjoint() const {
  MatrixFunction out = *this;
  for (auto& v : out.values) v = v.adjoint().eval();
  return out;
}

MatrixFunction MatrixFunction::scaled(Complex c) const {
  MatrixFunction out = *this;
  for (auto& v : out.values) v *= c;
  return out;
}

MatrixFunction MatrixFunction::block(int r0, int c0, int rows, int cols) const {
  MatrixFunction out;
  out.space = space;
  out.n = rows;  // callers use square blocks; rows is the block size
  out.values.reserve(values.size());
  for (const auto& v : values) out.values.push_back(v.block(r0, c0, rows, cols));
  return out;
}

static void require_compatible(const MatrixFunction& a, const MatrixFunction& b) {
  if (a.space != b.space) throw Error(Errc::SpaceMismatch, "matrix functions on different spaces");
  if (a.n != b.n) throw Error(Errc::SizeMismatch, "matrix functions of different sizes");
}

MatrixFunction operator*(const MatrixFunction& a, const MatrixFunction& b) {
  require_compatible(a, b);
  MatrixFunction out = a;
  for (int p = 0; p < a.points(); ++p) out.values[p] = a.values[p] * b.values[p];
  return out;
}

MatrixFunction operator+(const MatrixFunction& a, const MatrixFunction& b) {
  require_compatible(a, b);
  MatrixFunction out = a;
  for (int p = 0; p < a.points(); ++p) out.values[p] = a.values[p] + b.values[p];
  return out;
}

MatrixFunction operator-(const MatrixFunction& a, const MatrixFunction& b) {
  require_compatible(a, b);
  MatrixFunction out = a;
  for (int p = 0; p < a.points(); ++p) out.values[p] = a.values[p] - b.values[p];
  return out;
}

double sup_norm(const MatrixFunction& f) {
  double s = 0;
  for (const auto& v : f.values) s = std::max(s, operator_norm(v));
  return s;
}

MarginResult invertibility_margin(const MatrixFunction& f) {
  MarginResult r{std::numeric_limits<double>::infinity(), 0};
  for (int p = 0; p < f.points(); ++p) {
    double s = sigma_min(f.values[p]);
    if (s < r.margin) {
      r.margin = s;
      r.witness = p;
    }
  }
  if (f.points() == 0) r.margin = 0;
  return r;
}

static bool exactly_diagonal(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != Complex(0, 0)) return false;
  return true;
}

// Permutation matrix P with row i picking original index order[i], so that
// (P m P^T)(i,j) = m(order[i], order[j]).
static CMatrix gather_matrix(const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  CMatrix p = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, order[i]) = 1.0;
  return p;
}

ZeroCornerForm svd_zero_corner(const CMatrix& m, double tol) {
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.rows() != m.cols())
    throw Error(Errc::SizeMismatch, "zero corner form needs a nonempty square matrix");

  ZeroCornerForm out;
  if (exactly_diagonal(m)) {
    // Move the smallest diagonal entry to the front with a permutation and
    // keep everything else verbatim.
    int k = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(m(i, i)) < std::abs(m(k, k))) k = i;
    out.residual = std::abs(m(k, k));
    if (out.residual > tol) throw Error(Errc::NotSingular, "smallest singular value exceeds tol");
    std::vector<int> order;
    order.push_back(k);
    for (int i = 0; i < n; ++i)
      if (i != k) order.push_back(i);
    CMatrix p = gather_matrix(order);
    out.u = p;
    out.v = p.transpose();
    out.c = CMatrix::Zero(n - 1, n - 1);
    for (int i = 1; i < n; ++i) out.c(i - 1, i - 1) = m(order[i], order[i]);
    return out;
  }

  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  out.residual = sv(n - 1);
  if (out.residual > tol) throw Error(Errc::NotSingular, "smallest singular value exceeds tol");
  std::vector<int> order(n);
  order[0] = n - 1;
  for (int i = 1; i < n; ++i) order[i] = i - 1;
  CMatrix p = gather_matrix(order);
  out.u = p * svd.matrixU().adjoint();
  out.v = svd.matrixV() * p.transpose();
  out.c = CMatrix::Zero(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) out.c(i, i) = sv(i);
  return out;
}

CMatrix finite_dim_invertible_approx(const CMatrix& m, double eps) {
  if (eps <= 0) throw Error(Errc::BadIndices, "finite_dim_invertible_approx needs eps > 0");
  const double floor = eps / 2.0;
  if (m.rows() != m.cols()) throw Error(Errc::SizeMismatch, "needs a square matrix");
  if (sigma_min(m) >= floor) return m;

  if (exactly_diagonal(m)) {
    CMatrix out = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      Complex d = m(i, i);
      double a = std::abs(d);
      if (a < floor) out(i, i) = (a == 0.0) ? Complex(floor, 0) : d * (floor / a);
    }
    return out;
  }

  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) sv(i) = std::max(sv(i), floor);
  return svd.matrixU() * sv.asDiagonal() * svd.matrixV().adjoint();
}

MatrixFunction assemble_block_diag(std::span<const MatrixFunction> blocks) {
  if (blocks.empty()) throw Error(Errc::EmptySet, "block direct sum needs at least one block");
  const SpacePtr& space = blocks.front().space;
  int total = 0;
  for (const auto& b : blocks) {
    if (b.space != space) throw Error(Errc::SpaceMismatch, "blocks live on different spaces");
    total += b.n;
  }
  MatrixFunction out;
  out.space = space;
  out.n = total;
  out.values.assign(space->size(), CMatrix::Zero(total, total));
  for (int p = 0; p < space->size(); ++p) {
    int off = 0;
    for (const auto& b : blocks) {
      out.values[p].block(off, off, b.n, b.n) = b.values[p];
      off += b.n;
    }
  }
  return out;
}

double modulus_eta(const MatrixFunction& f, double eps) {
  if (eps <= 0) throw Error(Errc::BadIndices, "modulus_eta needs eps > 0");
  const auto& space = *f.space;
  return detail::half_min_rule(
      space, space.diameter() / 2.0,
      [&](int x, int y) { return operator_norm(f.values[x] - f.values[y]); }, eps);
}

}  // namespace ahcert
