#ifndef AHCERT_SIMPLICITY_HPP
#define AHCERT_SIMPLICITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "ahcert/diagonal_hom.hpp"

namespace ahcert {

enum class CoverVerdict { Covered, FailedAtHorizon };

/// Finite-horizon evidence for the covering condition: for every stage
/// j in (i, horizon] and every summand l, the eigenvalue-pattern preimage
/// of U under the composed partial map equals X_{j,l}.  Covered means the
/// condition holds for every j >= j0 through the horizon; the verdict is
/// horizon-relative by construction.
struct SimplicityCertificate {
  int stage_i = 0;
  int summand_t = 0;
  int center = -1;      // ball descriptor when known (-1: raw subset)
  double radius = 0;
  int horizon = 0;
  int j0 = -1;          // first stage of the all-covered suffix; -1 if none
  CoverVerdict verdict = CoverVerdict::FailedAtHorizon;
  // covered[j - (stage_i+1)][l]
  std::vector<std::vector<bool>> covered;
};

/// Check Prop-2.3(ii)-style covering of a nonempty subset U of X_{i,t}.
SimplicityCertificate covering_check(const AHSystem& sys, int i, int t, const Subset& u,
                                     int horizon);

/// Prop-2.3(iii)-style check: least j0 such that for every j in
/// [j0, horizon] and every l the pushforward of `a` is pointwise nonzero
/// (operator norm > tol).  ZeroInput when a vanishes identically.
struct NowhereZeroReport {
  int stage_i = 0;
  int summand_t = 0;
  int horizon = 0;
  int j0 = -1;
  CoverVerdict verdict = CoverVerdict::FailedAtHorizon;
  double min_norm = 0;  // min pointwise norm over the certified suffix
};
NowhereZeroReport nowhere_zero_check(const AHSystem& sys, int i, int t, const MatrixFunction& a,
                                     int horizon, double tol = 1e-10);

/// Batched covering check over a grid of balls.
struct ProbeRow {
  int summand_t = 0;
  int center = 0;
  double radius = 0;
  int j0 = -1;  // -1: failed at horizon
};
struct ProbeReport {
  int stage_i = 0;
  int horizon = 0;
  std::vector<ProbeRow> rows;
  bool all_covered = false;
  std::optional<ProbeRow> first_fail;

  /// CSV: "center,radius,j0,horizon" with FAIL in the j0 column.  Center
  /// labels are prefixed "s<t>:" when the stage has several summands.
  std::string to_csv(const AHSystem& sys) const;
};
/// Centers walk each summand's net with the given stride (1 = every
/// point); radii as given.
ProbeReport simplicity_probe(const AHSystem& sys, int i, int horizon,
                             std::span<const double> radii, int center_stride);

}  // namespace ahcert

#endif
