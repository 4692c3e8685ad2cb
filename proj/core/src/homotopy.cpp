#include "ahcert/homotopy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ahcert {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (int v : images_) {
    if (v < 0 || v >= n() || seen[v])
      throw Error(Errc::BadIndices, "images do not form a permutation");
    seen[v] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> im(n);
  for (int i = 0; i < n; ++i) im[i] = i;
  return Permutation(std::move(im));
}

Permutation Permutation::transposition(int n, int a, int b) {
  Permutation p = identity(n);
  if (a < 0 || b < 0 || a >= n || b >= n) throw Error(Errc::BadIndices, "transposition out of range");
  std::swap(p.images_[a], p.images_[b]);
  return p;
}

Permutation Permutation::from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
  Permutation p = identity(n);
  for (const auto& cyc : cycles) {
    for (size_t i = 0; i < cyc.size(); ++i) {
      int from = cyc[i], to = cyc[(i + 1) % cyc.size()];
      if (from < 0 || from >= n) throw Error(Errc::BadIndices, "cycle letter out of range");
      p.images_[from] = to;
    }
  }
  return Permutation(std::move(p.images_));  // revalidate
}

bool Permutation::is_identity() const {
  for (int i = 0; i < n(); ++i)
    if (images_[i] != i) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<int> im(n());
  for (int i = 0; i < n(); ++i) im[images_[i]] = i;
  return Permutation(std::move(im));
}

Permutation Permutation::after(const Permutation& other) const {
  if (n() != other.n()) throw Error(Errc::SizeMismatch, "permutations of different degree");
  std::vector<int> im(n());
  for (int i = 0; i < n(); ++i) im[i] = images_[other.images_[i]];
  return Permutation(std::move(im));
}

std::vector<std::vector<int>> Permutation::nontrivial_cycles() const {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(n(), false);
  for (int i = 0; i < n(); ++i) {
    if (seen[i] || images_[i] == i) continue;
    std::vector<int> cyc;
    int j = i;
    while (!seen[j]) {
      seen[j] = true;
      cyc.push_back(j);
      j = images_[j];
    }
    out.push_back(std::move(cyc));
  }
  return out;
}

std::string Permutation::cycle_notation() const {
  auto cycles = nontrivial_cycles();
  if (cycles.empty()) return "id";
  std::ostringstream os;
  for (const auto& cyc : cycles) {
    os << '(';
    for (size_t i = 0; i < cyc.size(); ++i) os << (i ? " " : "") << cyc[i] + 1;
    os << ')';
  }
  return os.str();
}

Permutation Permutation::parse_cycles(const std::string& text, int n) {
  if (text == "id" || text.empty()) return identity(n);
  std::vector<std::vector<int>> cycles;
  std::vector<int> cur;
  bool in_cycle = false;
  std::string num;
  auto flush_num = [&]() {
    if (num.empty()) return;
    cur.push_back(std::stoi(num) - 1);
    num.clear();
  };
  for (char c : text) {
    if (c == '(') {
      if (in_cycle) throw Error(Errc::ParseError, "nested cycle in '" + text + "'");
      in_cycle = true;
      cur.clear();
    } else if (c == ')') {
      flush_num();
      if (!in_cycle) throw Error(Errc::ParseError, "unbalanced ')' in '" + text + "'");
      in_cycle = false;
      if (!cur.empty()) cycles.push_back(cur);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      num += c;
    } else if (c == ' ' || c == ',') {
      flush_num();
    } else {
      throw Error(Errc::ParseError, std::string("unexpected character '") + c + "' in permutation");
    }
  }
  if (in_cycle) throw Error(Errc::ParseError, "unterminated cycle in '" + text + "'");
  return from_cycles(n, cycles);
}

CMatrix perm_matrix(const Permutation& pi) {
  CMatrix u = CMatrix::Zero(pi.n(), pi.n());
  for (int i = 0; i < pi.n(); ++i) u(pi(i), i) = 1.0;
  return u;
}

namespace {

constexpr double kPi = std::numbers::pi;

// Normalize a phase into (-pi, pi], choosing +pi at the branch point.
double normalize_phase(double theta) {
  if (theta <= -kPi + 1e-15) return kPi;
  return theta;
}

}  // namespace

CMatrix UnitaryPath::eval(double t) const {
  if (t == 0.0) return start_;
  if (t == 1.0) return end_;
  CMatrix out = base_;
  for (const auto& f : factors_) {
    const int k = static_cast<int>(f.support.size());
    CMatrix local = CMatrix::Zero(k, k);
    for (int j = 0; j < k; ++j) {
      Complex phase = std::polar(1.0, t * f.phases[j]);
      local += phase * (f.basis.col(j) * f.basis.col(j).adjoint());
    }
    // The factor is the identity off its support, so it only rewrites the
    // supported rows of the running product.
    CMatrix rows(k, n_);
    for (int j = 0; j < k; ++j) rows.row(j) = out.row(f.support[j]);
    CMatrix mixed = local * rows;
    for (int j = 0; j < k; ++j) out.row(f.support[j]) = mixed.row(j);
  }
  return out;
}

UnitaryPath UnitaryPath::bridge(const CMatrix& u, const CMatrix& v, double tol) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
    throw Error(Errc::SizeMismatch, "bridge endpoints must be square of equal size");
  if (!is_unitary(u, tol) || !is_unitary(v, tol))
    throw Error(Errc::NotUnitary, "bridge endpoints must be unitary");

  const int n = static_cast<int>(u.rows());
  CMatrix s = u * v.adjoint();
  Eigen::ComplexSchur<CMatrix> schur(s);
  // s is normal, so the Schur form is diagonal up to roundoff and the Schur
  // basis is an orthonormal eigenbasis.
  CMatrix q = schur.matrixU();
  std::vector<double> phases(n);
  for (int i = 0; i < n; ++i) phases[i] = normalize_phase(std::arg(schur.matrixT()(i, i)));

  // Deterministic column order: by phase, ties by rounded component lex.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  auto rounded = [&](int col, int row, bool re) {
    double x = re ? q(row, col).real() : q(row, col).imag();
    return std::round(x * 1e12);
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (phases[a] != phases[b]) return phases[a] < phases[b];
    for (int r = 0; r < n; ++r) {
      if (rounded(a, r, true) != rounded(b, r, true)) return rounded(a, r, true) < rounded(b, r, true);
      if (rounded(a, r, false) != rounded(b, r, false)) return rounded(a, r, false) < rounded(b, r, false);
    }
    return false;
  });

  UnitaryPath path;
  path.n_ = n;
  path.base_ = v;
  path.start_ = v;
  path.end_ = u;
  Factor f;
  f.support.resize(n);
  for (int i = 0; i < n; ++i) f.support[i] = i;
  f.basis.resize(n, n);
  f.phases.resize(n);
  for (int i = 0; i < n; ++i) {
    f.basis.col(i) = q.col(order[i]);
    f.phases[i] = phases[order[i]];
  }
  path.factors_.push_back(std::move(f));
  return path;
}

UnitaryPath UnitaryPath::sigma_path(const Permutation& sigma) {
  const int n = sigma.n();
  UnitaryPath path;
  path.n_ = n;
  path.base_ = CMatrix::Identity(n, n);
  path.start_ = CMatrix::Identity(n, n);
  path.end_ = perm_matrix(sigma);

  for (const auto& cyc : sigma.nontrivial_cycles()) {
    const int k = static_cast<int>(cyc.size());
    // Restricted to its support (ordered along the cycle), the permutation
    // is the cyclic shift e_l -> e_{l+1}, whose eigenbasis is the discrete
    // Fourier basis: w_j(l) = omega^{jl}/sqrt(k) with eigenvalue
    // omega^{-j}, omega = exp(2 pi i / k).
    Factor f;
    f.support = cyc;
    f.basis.resize(k, k);
    f.phases.resize(k);
    for (int j = 0; j < k; ++j) {
      for (int l = 0; l < k; ++l)
        f.basis(l, j) = std::polar(1.0 / std::sqrt(static_cast<double>(k)),
                                   2.0 * kPi * j * l / k);
      f.phases[j] = normalize_phase(-2.0 * kPi * j / k);
    }
    path.factors_.push_back(std::move(f));
  }
  return path;
}

MatrixFunction crossing_unitary(const Subset& a, const Subset& b, const Permutation& sigma,
                                std::span<const ScalarFunction> lambdas) {
  if (!lambdas.empty() && static_cast<int>(lambdas.size()) != sigma.n())
    throw Error(Errc::SizeMismatch, "one eigenvalue function per letter expected");
  ScalarFunction f = urysohn(a, b);  // EmptySet / Overlap checked there
  UnitaryPath path = UnitaryPath::sigma_path(sigma);

  MatrixFunction v;
  v.space = a.space();
  v.n = sigma.n();
  v.values.reserve(v.space->size());
  for (int p = 0; p < v.space->size(); ++p) v.values.push_back(path.eval(f.values[p].real()));
  return v;
}

CMatrix TranspositionFactorization::reconstruct(double t) const {
  CMatrix inner = CMatrix::Identity(n, n);
  inner.block(0, 0, 2, 2) = slot.eval(t);
  return outer * inner * outer;
}

TranspositionFactorization transposition_factorization(int k, int n) {
  if (k < 1 || k + 1 > n) throw Error(Errc::BadIndices, "need 2 <= k+1 <= n");
  TranspositionFactorization out;
  out.n = n;
  out.k = k;
  out.outer = perm_matrix(Permutation::transposition(n, 1, k));  // (2 k+1), 0-based {1, k}
  out.slot = UnitaryPath::sigma_path(Permutation::transposition(2, 0, 1));
  return out;
}

}  // namespace ahcert
