#ifndef AHCERT_CORNER_HPP
#define AHCERT_CORNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "ahcert/diagonal_hom.hpp"

namespace ahcert {

struct CornerStepReport {
  int k = 0;              // recursion step (1-based slot count after the step)
  double claim_defect = 0;  // || u_k g u_k^* - claimed diagonal form || on the union so far
  bool constant_swap = false;  // step degenerated to a constant transposition (A was empty)
};

/// Result of the corner-extraction recursion.  `u` is unitary on Y; for
/// corner_extract it lies exactly in M_{m s}(C(Y)) ⊕ 1 (off-block entries
/// are exact 0/1).  `achieved` is the sup norm of
///     u phi(f) u^* - diag(f(x0), b, f∘lambda_{m+1}, ...)
/// over the certified set; the recursion guarantees achieved <= eps_sup +
/// claim_defect < 2 eps, with eps_sup <= eps the largest extension norm.
struct CornerResult {
  MatrixFunction u;
  MatrixFunction b;        // remainder block (claim block for extract, full tail for covering)
  double eta = 0;
  double delta = 0;
  double eps = 0;
  double eps_sup = 0;
  double achieved = 0;
  double claim_defect = 0;  // max over steps
  std::vector<CornerStepReport> steps;
  Subset certified;         // union of the F_i (whole Y for covering_corner)
};

/// Theorem-style corner extraction for a scalar diagonal map (m = 1 source
/// size).  Preconditions: the F_i are nonempty and, with
/// eta = modulus_eta(f, eps), every y in F_i has d(lambda_i(y), x0) < eta;
/// HypothesisFailed / EmptyF otherwise.
CornerResult corner_extract(const DiagonalHom& phi, const ScalarFunction& f, int x0,
                            double eps, std::span<const Subset> fs);

/// Covering version: with U the open eta-ball at x0, requires the pattern
/// preimages of U to cover Y (NotCovering otherwise) and produces a unitary
/// on all of Y with || u phi(f) u^* - diag(f(x0), b) || < 2 eps in sup norm.
/// Matrix source sizes m > 1 are handled by running the same recursion with
/// M_m coefficients, which realizes the tensor-identification of the
/// block-diagonal and tensor forms.
CornerResult covering_corner(const DiagonalHom& phi, const MatrixFunction& f, int x0,
                             double eps);

/// A property-P witness: stage j and, per target summand l, a unitary on
/// the cut-down of A_{j,l} by phi^{t,l}_{i,j}(1) conjugating the image of f
/// to within 2 eps of diag(f(x0), b_l).
struct CornerCertificate {
  std::string system;
  int stage_i = 0, summand_t = 0;  // source (0-based)
  int stage_j = 0;                 // certified stage (0-based)
  int x0 = 0;
  double eps = 0;

  struct Part {
    int l = 0;                     // target summand (0-based)
    std::vector<int> cutdown;      // stage-j indices supporting the cut-down
    MatrixFunction u;              // unitary on the cut-down
    MatrixFunction b;              // remainder
    double achieved = 0;
    double claim_defect = 0;
    int corner_size = 0;           // = source matrix size
    int rest_size = 0;             // cut-down size - corner_size
  };
  std::vector<Part> parts;

  double achieved_max() const;

  /// Structured text report; unitaries and remainders are included in
  /// point-indexed matrix form when requested, enabling bit-exact replay.
  std::string to_text(bool include_matrices) const;
  static CornerCertificate from_text(const std::string& text, const AHSystem& sys);
};

/// Scan j = i+1..horizon for the first stage at which the covering
/// hypothesis holds for every summand l, then certify there.  Throws
/// HorizonExhausted when no stage works (undetermined, not a disproof).
CornerCertificate property_p_certify(const AHSystem& sys, int i, int t,
                                     const MatrixFunction& f, int x0, double eps, int horizon);

/// Certification at one fixed stage j (NotCovering when the hypothesis
/// fails there).
CornerCertificate certify_at_stage(const AHSystem& sys, int i, int t, const MatrixFunction& f,
                                   int x0, double eps, int j);

/// Does the covering hypothesis of the certificate hold at stage j?
bool covering_hypothesis(const AHSystem& sys, int i, int t, const MatrixFunction& f, int x0,
                         double eps, int j);

/// Recompute a certificate's achieved norms from the system and f; used by
/// the replay check (results are bit-identical to the stored ones).
std::vector<double> replay_achieved(const AHSystem& sys, const CornerCertificate& cert,
                                    const MatrixFunction& f);

/// Theorem 3.4 direction "property P => images nowhere zero": with
/// ||f(x0)|| > 2 eps, the pushforward at the certified stage has pointwise
/// norm at least ||f(x0)|| - achieved > 0.  ToleranceTooLarge if
/// ||f(x0)|| <= 2 eps.
struct NonvanishingReport {
  double margin = 0;       // min over summands and points of ||phi_ij(f)(x)||
  double lower_bound = 0;  // ||f(x0)|| - max achieved
  int witness_summand = 0;
  int witness_point = 0;
  bool nowhere_zero = false;
};
NonvanishingReport property_p_implies_nonvanishing(const AHSystem& sys,
                                                   const CornerCertificate& cert,
                                                   const MatrixFunction& f);

}  // namespace ahcert

#endif
