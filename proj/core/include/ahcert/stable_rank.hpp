#ifndef AHCERT_STABLE_RANK_HPP
#define AHCERT_STABLE_RANK_HPP

#include <string>
#include <vector>

#include "ahcert/corner.hpp"
#include "ahcert/diagonal_hom.hpp"

namespace ahcert {

/// Declared block shape of a block-diagonal element diag(0_corner, a_1,
/// ..., a_n) with blocks[r] the size of a_r.
struct BlockStructure {
  int corner = 0;
  std::vector<int> blocks;
};

/// Zero-corner invertible approximation (nilpotent trick): the cyclic
/// block-row shift U (rows move up by `corner`) makes U a strictly upper
/// triangular at every point whenever corner > max block, so
///     b = U^{-1}(U a + delta 1) = a + delta U^{-1}
/// is pointwise invertible at distance exactly delta = eps/2 from a.
struct ZeroCornerInvertible {
  MatrixFunction b;
  double delta = 0;
  Permutation shift;  // U = perm_matrix(shift)
};
ZeroCornerInvertible zero_corner_invertible(const MatrixFunction& a, const BlockStructure& bs,
                                            double eps);

/// An invertible approximation within a contiguous corner (block slot) of
/// one summand.
struct CornerApproximant {
  int summand = 0;
  int offset = 0;
  MatrixFunction element;  // element.n is the slot size (may be 0)
  double distance = 0;
  double margin = 0;
};

/// Direct sum of approximants in adjacent orthogonal slots: distance is
/// the max, margin the min of the parts.  SlotOverlap when the slots
/// intersect; zero-sized parts pass straight through.
CornerApproximant corner_sum_invertible(const CornerApproximant& p, const CornerApproximant& q);

/// Result of the invertible-approximation pipeline, with an independently
/// recomputed distance (sup norm to the raw pushforward of the input) and
/// invertibility margin.
struct InvertibleApproximant {
  int stage = 0;           // stage of the element (0-based)
  StageElement element;    // one matrix function per summand
  double distance = 0;
  double margin = 0;
  std::string trace;       // structured step log for regression diffing
};

/// The full stable-rank-one pipeline: witness point, zero-corner normal
/// form, property-P certification with an eps/4 budget, advancement to a
/// stage with large enough multiplicities, collection of the per-copy
/// zeros into a leading corner, the nilpotent trick, and the un-conjugation
/// of every intermediate unitary.  Distance < eps and margin > 0 are
/// verified against the raw pushforward.
InvertibleApproximant invertible_approx(const AHSystem& sys, int i, const StageElement& a,
                                        double eps, int horizon, double tol = 1e-10);

}  // namespace ahcert

#endif
