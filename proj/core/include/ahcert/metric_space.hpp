#ifndef AHCERT_METRIC_SPACE_HPP
#define AHCERT_METRIC_SPACE_HPP

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ahcert/errors.hpp"

namespace ahcert {

/// A finite metric space: an epsilon-net stand-in for a compact metric
/// space.  Points are indexed 0..size()-1 and carry text labels; spaces
/// generated from an interval grid also carry 1-d coordinates, which the
/// analytic eigenvalue maps (identity/const/affine) use for nearest-sample
/// projection.
///
/// Construction does not enforce the metric axioms; check_axioms() reports
/// violations so that system validation can surface them as diagnostics.
class FiniteMetricSpace {
 public:
  using Ptr = std::shared_ptr<const FiniteMetricSpace>;

  /// Uniform grid of n points on [a, b] with the Euclidean metric.
  /// Labels are the exact decimal text of the coordinates.
  static Ptr interval(double a, double b, int n, const std::string& name = "");

  /// Explicit point list + full distance matrix.  Coordinates are optional.
  static Ptr make(std::string name, std::vector<std::string> labels,
                  Eigen::MatrixXd dist, std::vector<double> coords = {});

  int size() const { return static_cast<int>(labels_.size()); }
  double dist(int x, int y) const { return dist_(x, y); }
  const Eigen::MatrixXd& dist_matrix() const { return dist_; }
  const std::string& label(int i) const { return labels_[i]; }
  const std::string& name() const { return name_; }

  bool has_coords() const { return !coords_.empty(); }
  double coord(int i) const { return coords_[i]; }

  /// Nearest net point to a 1-d coordinate; ties break to the smaller index.
  /// Requires has_coords().
  int nearest(double c) const;

  /// Index of a point by label; -1 if absent.
  int find_label(const std::string& label) const;

  double diameter() const;

  /// Metric-axiom diagnostics: zero diagonal, symmetry, positivity off the
  /// diagonal, and the triangle inequality.  Empty result means valid.
  std::vector<std::string> check_axioms() const;

  FiniteMetricSpace(std::string name, std::vector<std::string> labels,
                    Eigen::MatrixXd dist, std::vector<double> coords);

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::vector<double> coords_;
  Eigen::MatrixXd dist_;
};

using SpacePtr = FiniteMetricSpace::Ptr;

/// A subset of a finite metric space (every subset of a finite space is
/// closed).  Members are kept sorted and unique.
class Subset {
 public:
  Subset() = default;
  Subset(SpacePtr space, std::vector<int> members);

  static Subset empty(SpacePtr space) { return Subset(std::move(space), {}); }
  static Subset whole(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  const std::vector<int>& members() const { return members_; }
  int count() const { return static_cast<int>(members_.size()); }
  bool is_empty() const { return members_.empty(); }
  bool is_whole() const { return space_ && count() == space_->size(); }
  bool contains(int p) const;

  Subset unite(const Subset& other) const;
  Subset intersect(const Subset& other) const;
  bool subset_of(const Subset& other) const;
  bool operator==(const Subset& other) const;

  /// min distance from x to the set; +inf for the empty set.
  double dist_to(int x) const;

 private:
  SpacePtr space_;
  std::vector<int> members_;  // sorted, unique
};

/// A scalar (complex-valued) function sampled at every net point.
struct ScalarFunction {
  SpacePtr space;
  Eigen::VectorXcd values;

  static ScalarFunction constant(SpacePtr space, std::complex<double> c);
  /// The coordinate function x |-> x (requires coordinates).
  static ScalarFunction coordinate(SpacePtr space);
};

/// A total map between finite metric spaces, stored as a point table.
/// domain() is where arguments live, codomain() where values live.  In a
/// diagonal homomorphism M_m(C(X)) -> M_nm(C(Y)) the eigenvalue maps run
/// Y -> X, i.e. domain Y, codomain X.
class PointMap {
 public:
  PointMap() = default;
  PointMap(SpacePtr domain, SpacePtr codomain, std::vector<int> table);

  /// Identity between nets: nearest-sample projection of each domain
  /// coordinate into the codomain (exact index copy when the spaces are the
  /// same object).
  static PointMap identity(SpacePtr domain, SpacePtr codomain);
  static PointMap constant(SpacePtr domain, SpacePtr codomain, int point);
  /// y |-> nearest codomain sample to c0 + c1 * coord(y).
  static PointMap affine(SpacePtr domain, SpacePtr codomain, double c0, double c1);

  const SpacePtr& domain() const { return domain_; }
  const SpacePtr& codomain() const { return codomain_; }
  int operator()(int y) const { return table_[y]; }
  const std::vector<int>& table() const { return table_; }

  /// this after other:  (this ∘ other)(z) = this(other(z)).
  /// other's codomain must be this->domain().
  PointMap after(const PointMap& other) const;

  Subset image() const;
  Subset preimage(const Subset& u) const;

 private:
  SpacePtr domain_, codomain_;
  std::vector<int> table_;
};

/// Open metric ball around a subset: { x : d(x, E) < delta }.  By
/// convention the ball around the empty set is empty.
Subset ball(const Subset& e, double delta);

/// Urysohn witness for disjoint nonempty A, B:
///   f(x) = d(x,A) / (d(x,A) + d(x,B)),
/// real-valued in [0,1], exactly 0 on A and exactly 1 on B.
ScalarFunction urysohn(const Subset& a, const Subset& b);

/// Bounded extension of f|Y to the whole space: per real coordinate the
/// McShane extension min_{y in Y}(f(y) + L d(x,y)) with L the empirical
/// Lipschitz constant of that coordinate on Y, then a radial clamp into the
/// disk of radius r.  Agrees with f bit-identically on Y.
/// Throws BoundViolated if |f(y)| > r somewhere on Y, EmptySet if Y is empty.
ScalarFunction bounded_extension(const Subset& y_set, const ScalarFunction& f, double r);

/// Largest eta (under the half-minimum rule) such that for all sampled
/// pairs, dist(x,y) < 2*eta implies |f(x) - f(y)| < eps:
///   eta = min{ d(x,y) : |f(x)-f(y)| >= eps } / 2,
/// capped at diameter/2 when no violating pair exists.  Single-point
/// spaces return the sentinel 1.0.
double modulus_eta(const ScalarFunction& f, double eps);

/// Largest delta (same half-minimum rule) such that rho(x,y) <= delta
/// implies dist(map(x), map(y)) < eta for every map in the list; capped at
/// the domain diameter, sentinel 1.0 for single-point domains.
double continuity_delta(std::span<const PointMap> maps, double eta);

namespace detail {
// Shared pair-scan core for the modulus rules; `value_gap(x, y)` returns the
// displacement measured in the target.
double half_min_rule(const FiniteMetricSpace& space, double cap_default,
                     const std::function<double(int, int)>& value_gap, double threshold);
}  // namespace detail

}  // namespace ahcert

#endif
