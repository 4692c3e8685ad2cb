#ifndef AHCERT_HOMOTOPY_HPP
#define AHCERT_HOMOTOPY_HPP

#include <string>
#include <vector>

#include "ahcert/matrix.hpp"
#include "ahcert/metric_space.hpp"

namespace ahcert {

/// A permutation of {0,...,n-1}; images[i] is the image of letter i.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int n);
  static Permutation transposition(int n, int a, int b);
  /// cycles use 0-based letters, e.g. {{0,2,1}} maps 0->2, 2->1, 1->0.
  static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles);

  int n() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[i]; }
  const std::vector<int>& images() const { return images_; }
  bool is_identity() const;

  Permutation inverse() const;
  /// this after other.
  Permutation after(const Permutation& other) const;

  /// Nontrivial cycles (length >= 2), each starting at its smallest letter,
  /// ordered by that letter.
  std::vector<std::vector<int>> nontrivial_cycles() const;

  /// 1-based cycle notation, e.g. "(1 3)(2 4)"; "id" for the identity.
  std::string cycle_notation() const;
  static Permutation parse_cycles(const std::string& text, int n);

 private:
  std::vector<int> images_;
};

/// Permutation matrix: U e_i = e_{pi(i)} (row i of the identity moves to
/// row pi(i)).
CMatrix perm_matrix(const Permutation& pi);

/// A path of unitaries built from spectral data, evaluable at any
/// t in [0,1].  Stored as a product of factors supported on disjoint index
/// sets (one per cycle, for permutation paths) or a single full factor (for
/// a generic bridge).  Each factor evaluates as
///     Q diag(exp(i t theta)) Q^*  restricted to its support,
/// right-multiplied by the factor's base.  Evaluation at t = 0 and t = 1
/// returns the stored endpoints verbatim, so permutation endpoints have
/// exact 0/1 entries.
class UnitaryPath {
 public:
  int dim() const { return n_; }
  CMatrix eval(double t) const;
  const CMatrix& start() const { return start_; }  // value at t = 0
  const CMatrix& end() const { return end_; }      // value at t = 1

  /// Spectral geodesic between unitaries: g(0) = v, g(1) = u, via the
  /// Schur diagonalization of u v^* with phases in (-pi, pi] (branch +pi at
  /// eigenvalue -1).  Throws NotUnitary if either input fails the check.
  static UnitaryPath bridge(const CMatrix& u, const CMatrix& v, double tol = 1e-10);

  /// Path from the identity to U[sigma], the product over the disjoint
  /// cycles of sigma of fixed-subspace bridges.  Each cycle factor uses the
  /// discrete Fourier eigenbasis of the cyclic shift on its support, so the
  /// factor is exactly the identity outside its own cycle.  For any
  /// diagonal D constant on the orbits of sigma, [u(t), D] = 0.
  static UnitaryPath sigma_path(const Permutation& sigma);

  struct Factor {
    std::vector<int> support;     // global indices, identity elsewhere
    CMatrix basis;                // columns: orthonormal eigenbasis on the support
    std::vector<double> phases;   // theta_k in (-pi, pi]
  };
  const std::vector<Factor>& factors() const { return factors_; }

 private:
  int n_ = 0;
  std::vector<Factor> factors_;
  CMatrix base_;   // right factor (identity for sigma paths)
  CMatrix start_, end_;
};

/// Crossing unitary of the Urysohn construction: v(x) = u(f(x)) with u the
/// sigma path and f the Urysohn function for (A, B).  Exactly the identity
/// on A and exactly U[sigma] on B; commutes with diag(lambda_1(x), ...,
/// lambda_n(x)) wherever lambda_i(x) == lambda_{sigma(i)}(x) for all i
/// (exact equality of samples).  lambdas may be empty; when present it must
/// have sigma.n() entries and is used only for the commutation check in
/// tests and reports, not for the construction.
MatrixFunction crossing_unitary(const Subset& a, const Subset& b, const Permutation& sigma,
                                std::span<const ScalarFunction> lambdas = {});

/// Factorized form of the crossing unitary for sigma = (1 k+1) (1-based):
///     v(y) = U[(2 k+1)] (v'(y) ⊕ 1_{n-2}) U[(2 k+1)],
/// with v' the 2x2 bridge from 1 to the swap.  `outer` is U[(2 k+1)].
struct TranspositionFactorization {
  int n = 0;
  int k = 0;           // 1-based, sigma = (1 k+1)
  CMatrix outer;       // self-inverse permutation matrix
  UnitaryPath slot;    // 2x2 path: slot.eval(0) = 1_2, slot.eval(1) = swap

  /// outer * (slot(t) ⊕ 1_{n-2}) * outer.
  CMatrix reconstruct(double t) const;
};
TranspositionFactorization transposition_factorization(int k, int n);

}  // namespace ahcert

#endif
