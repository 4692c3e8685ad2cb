#ifndef AHCERT_DIAGONAL_HOM_HPP
#define AHCERT_DIAGONAL_HOM_HPP

#include <optional>
#include <vector>

#include "ahcert/homotopy.hpp"
#include "ahcert/matrix.hpp"
#include "ahcert/metric_space.hpp"

namespace ahcert {

/// Ordered multiset of eigenvalue maps with common domain and codomain.
/// The order is part of the data: it fixes the diagonal block order.
class EigenvaluePattern {
 public:
  EigenvaluePattern() = default;
  explicit EigenvaluePattern(std::vector<PointMap> maps);

  int count() const { return static_cast<int>(maps_.size()); }
  const PointMap& map(int i) const { return maps_[i]; }
  const std::vector<PointMap>& maps() const { return maps_; }
  const SpacePtr& domain() const { return maps_.front().domain(); }      // Y
  const SpacePtr& codomain() const { return maps_.front().codomain(); }  // X

 private:
  std::vector<PointMap> maps_;
};

/// Union over the pattern of the pointwise preimages of U.
Subset ep_preimage(const EigenvaluePattern& pattern, const Subset& u);

/// A diagonal *-homomorphism M_m(C(X)) -> M_{nm}(C(Y)):
///   f |-> blockdiag(f(lambda_1(y)), ..., f(lambda_n(y)))
/// in pattern order.  source_space() is X (= map codomain), target_space()
/// is Y (= map domain).
class DiagonalHom {
 public:
  DiagonalHom() = default;
  DiagonalHom(int source_size, EigenvaluePattern pattern);

  int source_size() const { return source_size_; }  // m
  int multiplicity() const { return pattern_.count(); }  // n
  int target_size() const { return source_size_ * pattern_.count(); }
  const EigenvaluePattern& pattern() const { return pattern_; }
  const SpacePtr& source_space() const { return pattern_.codomain(); }
  const SpacePtr& target_space() const { return pattern_.domain(); }

 private:
  int source_size_ = 0;
  EigenvaluePattern pattern_;
};

/// Evaluate the homomorphism on a matrix function of matching size/space.
MatrixFunction apply(const DiagonalHom& phi, const MatrixFunction& f);

/// Composite of two diagonal homomorphisms (later ∘ earlier).  The pattern
/// enumerates, for each map mu of the later hom, all maps lambda of the
/// earlier one (lambda ∘ mu), which makes apply(compose(..)) equal
/// apply-then-apply block for block; block_reorder records the reconciling
/// permutation of blocks (the identity under this enumeration).
struct ComposedHom {
  DiagonalHom hom;
  Permutation block_reorder;
};
ComposedHom compose(const DiagonalHom& later, const DiagonalHom& earlier);

/// The permutation pi of S_{nm} with pi(kn + i) = (i-1)m + k + 1 (1-based),
/// for k in {0..m-1}, i in {1..n}.  Conjugation by U[pi] carries the tensor
/// form of a diagonal map onto its block-diagonal form.
Permutation tensor_intertwiner(int n, int m);

/// The tensor form of phi(f): the m x m block matrix whose (a,b) block is
/// the n x n diagonal matrix diag(f_ab(lambda_1(y)), ..., f_ab(lambda_n(y))).
MatrixFunction tensor_form(const DiagonalHom& phi, const MatrixFunction& f);

// ---------------------------------------------------------------------------
// AH systems

struct StageSummand {
  int size = 0;  // matrix size n_{i,t}
  SpacePtr space;
};

/// Bonding map between consecutive stages; partial(t, l) is the diagonal
/// hom from source summand t into target summand l, absent when the
/// multiplicity is zero.  Inside each target summand the source blocks are
/// laid out in ascending t, each with its pattern in stored order.
class BondingMap {
 public:
  BondingMap() = default;
  BondingMap(int from_stage, int num_source, int num_target);

  int from_stage() const { return from_stage_; }
  int sources() const { return num_source_; }
  int targets() const { return num_target_; }
  const std::optional<DiagonalHom>& partial(int t, int l) const { return partial_[t][l]; }
  void set_partial(int t, int l, DiagonalHom hom) { partial_[t][l] = std::move(hom); }

 private:
  int from_stage_ = 0;
  int num_source_ = 0, num_target_ = 0;
  std::vector<std::vector<std::optional<DiagonalHom>>> partial_;
};

/// A finite AH system: stages A_i = ⊕_t M_{n_{i,t}}(C(X_{i,t})) and bonds
/// between consecutive stages.  Stages and summands are 0-based here; the
/// file format and CLI use 1-based indices.
struct AHSystem {
  std::string name;
  std::vector<std::vector<StageSummand>> stages;
  std::vector<BondingMap> bonds;  // bonds[i]: stage i -> i+1
  bool horizon_approximate = false;
  int horizon_tag = -1;

  int num_stages() const { return static_cast<int>(stages.size()); }
  int num_summands(int i) const { return static_cast<int>(stages[i].size()); }
  const StageSummand& summand(int i, int t) const { return stages[i][t]; }
};

/// An element of a stage: one matrix function per summand.
using StageElement = std::vector<MatrixFunction>;

StageElement stage_identity(const AHSystem& sys, int i);

/// Apply the bond i -> i+1 to a stage-i element.
StageElement bond_apply(const AHSystem& sys, int i, const StageElement& x);

/// Push a stage-i element forward to stage j by iterating bonds.
StageElement push_forward(const AHSystem& sys, int i, int j, const StageElement& x);

/// The composed partial map phi^{t,l}_{i,j} as a diagonal homomorphism,
/// absent when no chain of nonzero partial maps connects t to l.  The
/// pattern enumeration matches the stepwise block layout of bond_apply, so
/// apply(result, f) reproduces exactly the sub-blocks of the pushforward
/// with provenance (i, t).
std::optional<DiagonalHom> system_compose(const AHSystem& sys, int i, int j, int t, int l);

/// Stage-j indices (ascending) whose pushforward blocks originate from
/// stage-i summand t, per stage-j summand l.  This is the support of the
/// cut-down by phi^{t,l}_{i,j}(1).
std::vector<int> cutdown_indices(const AHSystem& sys, int i, int j, int t, int l);

/// Horizon-approximate injectivization: every space X_{i,t} with i below
/// the horizon is replaced by the intersection over j <= horizon of the
/// unions of eigenvalue-map images of the composed partial maps, and all
/// map tables are restricted accordingly.  The result is tagged
/// horizon-approximate.
AHSystem injectivize(const AHSystem& sys, int horizon);

/// Diagnostics: metric axioms of every space, table totality, bond
/// unitality, and stage chaining.  Empty result means valid.
std::vector<std::string> validate(const AHSystem& sys);

}  // namespace ahcert

#endif
