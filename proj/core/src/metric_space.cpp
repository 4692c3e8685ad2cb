#include "ahcert/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ahcert {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptySet: return "EmptySet";
    case Errc::Overlap: return "Overlap";
    case Errc::BoundViolated: return "BoundViolated";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::SpaceMismatch: return "SpaceMismatch";
    case Errc::ChainMismatch: return "ChainMismatch";
    case Errc::BadIndices: return "BadIndices";
    case Errc::NotSingular: return "NotSingular";
    case Errc::NotUnitary: return "NotUnitary";
    case Errc::HypothesisFailed: return "HypothesisFailed";
    case Errc::EmptyF: return "EmptyF";
    case Errc::NotCovering: return "NotCovering";
    case Errc::HorizonExhausted: return "HorizonExhausted";
    case Errc::ToleranceTooLarge: return "ToleranceTooLarge";
    case Errc::CornerTooSmall: return "CornerTooSmall";
    case Errc::MissingStructure: return "MissingStructure";
    case Errc::SlotOverlap: return "SlotOverlap";
    case Errc::ZeroInput: return "ZeroInput";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::UnknownDemo: return "UnknownDemo";
  }
  return "UnknownError";
}

FiniteMetricSpace::FiniteMetricSpace(std::string name, std::vector<std::string> labels,
                                     Eigen::MatrixXd dist, std::vector<double> coords)
    : name_(std::move(name)),
      labels_(std::move(labels)),
      coords_(std::move(coords)),
      dist_(std::move(dist)) {
  if (dist_.rows() != dist_.cols() || dist_.rows() != static_cast<Eigen::Index>(labels_.size()))
    throw Error(Errc::SizeMismatch, "distance matrix does not match point count in space '" + name_ + "'");
  if (!coords_.empty() && coords_.size() != labels_.size())
    throw Error(Errc::SizeMismatch, "coordinate list does not match point count in space '" + name_ + "'");
}

SpacePtr FiniteMetricSpace::interval(double a, double b, int n, const std::string& name) {
  if (n < 1) throw Error(Errc::BadIndices, "interval grid needs at least one point");
  std::vector<double> coords(n);
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) {
    coords[i] = (n == 1) ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", coords[i]);
    labels[i] = buf;
  }
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dist(i, j) = std::abs(coords[i] - coords[j]);
  return std::make_shared<FiniteMetricSpace>(name.empty() ? "interval" : name,
                                             std::move(labels), std::move(dist), std::move(coords));
}

SpacePtr FiniteMetricSpace::make(std::string name, std::vector<std::string> labels,
                                 Eigen::MatrixXd dist, std::vector<double> coords) {
  return std::make_shared<FiniteMetricSpace>(std::move(name), std::move(labels),
                                             std::move(dist), std::move(coords));
}

int FiniteMetricSpace::nearest(double c) const {
  if (!has_coords())
    throw Error(Errc::MissingStructure, "space '" + name_ + "' has no coordinates");
  int best = 0;
  double best_d = std::abs(coords_[0] - c);
  for (int i = 1; i < size(); ++i) {
    double d = std::abs(coords_[i] - c);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

int FiniteMetricSpace::find_label(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (labels_[i] == label) return i;
  return -1;
}

double FiniteMetricSpace::diameter() const {
  return dist_.size() == 0 ? 0.0 : dist_.maxCoeff();
}

std::vector<std::string> FiniteMetricSpace::check_axioms() const {
  std::vector<std::string> out;
  const int n = size();
  auto fail = [&](const std::string& s) { out.push_back("space '" + name_ + "': " + s); };
  for (int i = 0; i < n; ++i) {
    if (dist_(i, i) != 0.0) fail("d(" + labels_[i] + "," + labels_[i] + ") != 0");
    for (int j = i + 1; j < n; ++j) {
      if (dist_(i, j) != dist_(j, i))
        fail("asymmetric: d(" + labels_[i] + "," + labels_[j] + ") != d(" + labels_[j] + "," + labels_[i] + ")");
      if (!(dist_(i, j) > 0.0))
        fail("non-positive distance between distinct points " + labels_[i] + ", " + labels_[j]);
    }
  }
  for (int i = 0; i < n && out.size() < 64; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (dist_(i, k) > dist_(i, j) + dist_(j, k) + 1e-12 * dist_.maxCoeff()) {
          fail("triangle inequality fails at (" + labels_[i] + "," + labels_[j] + "," + labels_[k] + ")");
          j = n;  // one report per i is enough
          break;
        }
  return out;
}

Subset::Subset(SpacePtr space, std::vector<int> members)
    : space_(std::move(space)), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  for (int p : members_)
    if (p < 0 || p >= space_->size())
      throw Error(Errc::BadIndices, "subset member out of range in space '" + space_->name() + "'");
}

Subset Subset::whole(SpacePtr space) {
  std::vector<int> all(space->size());
  for (int i = 0; i < space->size(); ++i) all[i] = i;
  return Subset(std::move(space), std::move(all));
}

bool Subset::contains(int p) const {
  return std::binary_search(members_.begin(), members_.end(), p);
}

static void require_same_space(const Subset& a, const Subset& b) {
  if (a.space() != b.space())
    throw Error(Errc::SpaceMismatch, "subsets live on different spaces");
}

Subset Subset::unite(const Subset& other) const {
  require_same_space(*this, other);
  std::vector<int> m;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                 std::back_inserter(m));
  return Subset(space_, std::move(m));
}

Subset Subset::intersect(const Subset& other) const {
  require_same_space(*this, other);
  std::vector<int> m;
  std::set_intersection(members_.begin(), members_.end(), other.members_.begin(),
                        other.members_.end(), std::back_inserter(m));
  return Subset(space_, std::move(m));
}

bool Subset::subset_of(const Subset& other) const {
  require_same_space(*this, other);
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

bool Subset::operator==(const Subset& other) const {
  return space_ == other.space_ && members_ == other.members_;
}

double Subset::dist_to(int x) const {
  if (members_.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (int p : members_) best = std::min(best, space_->dist(x, p));
  return best;
}

ScalarFunction ScalarFunction::constant(SpacePtr space, std::complex<double> c) {
  ScalarFunction f;
  f.values = Eigen::VectorXcd::Constant(space->size(), c);
  f.space = std::move(space);
  return f;
}

ScalarFunction ScalarFunction::coordinate(SpacePtr space) {
  if (!space->has_coords())
    throw Error(Errc::MissingStructure, "coordinate function needs a space with coordinates");
  ScalarFunction f;
  f.values.resize(space->size());
  for (int i = 0; i < space->size(); ++i) f.values[i] = space->coord(i);
  f.space = std::move(space);
  return f;
}

PointMap::PointMap(SpacePtr domain, SpacePtr codomain, std::vector<int> table)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), table_(std::move(table)) {
  if (static_cast<int>(table_.size()) != domain_->size())
    throw Error(Errc::SizeMismatch, "point map table does not cover its domain");
  for (int v : table_)
    if (v < 0 || v >= codomain_->size())
      throw Error(Errc::BadIndices, "point map value out of range");
}

PointMap PointMap::identity(SpacePtr domain, SpacePtr codomain) {
  std::vector<int> table(domain->size());
  if (domain == codomain) {
    for (int i = 0; i < domain->size(); ++i) table[i] = i;
  } else {
    // Nearest-sample projection between different nets.
    for (int i = 0; i < domain->size(); ++i) table[i] = codomain->nearest(domain->coord(i));
  }
  return PointMap(std::move(domain), std::move(codomain), std::move(table));
}

PointMap PointMap::constant(SpacePtr domain, SpacePtr codomain, int point) {
  if (point < 0 || point >= codomain->size())
    throw Error(Errc::BadIndices, "constant map value out of range");
  std::vector<int> table(domain->size(), point);
  return PointMap(std::move(domain), std::move(codomain), std::move(table));
}

PointMap PointMap::affine(SpacePtr domain, SpacePtr codomain, double c0, double c1) {
  std::vector<int> table(domain->size());
  for (int i = 0; i < domain->size(); ++i)
    table[i] = codomain->nearest(c0 + c1 * domain->coord(i));
  return PointMap(std::move(domain), std::move(codomain), std::move(table));
}

PointMap PointMap::after(const PointMap& other) const {
  if (other.codomain_ != domain_)
    throw Error(Errc::ChainMismatch, "point maps do not chain");
  std::vector<int> table(other.domain_->size());
  for (int i = 0; i < other.domain_->size(); ++i) table[i] = table_[other.table_[i]];
  return PointMap(other.domain_, codomain_, std::move(table));
}

Subset PointMap::image() const {
  return Subset(codomain_, table_);
}

Subset PointMap::preimage(const Subset& u) const {
  if (u.space() != codomain_)
    throw Error(Errc::SpaceMismatch, "preimage of a subset of the wrong space");
  std::vector<int> m;
  for (int y = 0; y < domain_->size(); ++y)
    if (u.contains(table_[y])) m.push_back(y);
  return Subset(domain_, std::move(m));
}

Subset ball(const Subset& e, double delta) {
  if (delta <= 0) throw Error(Errc::BadIndices, "ball radius must be positive");
  if (e.is_empty()) return Subset::empty(e.space());
  std::vector<int> m;
  const auto& space = *e.space();
  for (int x = 0; x < space.size(); ++x)
    if (e.dist_to(x) < delta) m.push_back(x);
  return Subset(e.space(), std::move(m));
}

ScalarFunction urysohn(const Subset& a, const Subset& b) {
  require_same_space(a, b);
  if (a.is_empty() || b.is_empty())
    throw Error(Errc::EmptySet, "urysohn needs nonempty sets");
  if (!a.intersect(b).is_empty())
    throw Error(Errc::Overlap, "urysohn needs disjoint sets");
  ScalarFunction f;
  f.space = a.space();
  f.values.resize(f.space->size());
  for (int x = 0; x < f.space->size(); ++x) {
    double da = a.dist_to(x), db = b.dist_to(x);
    f.values[x] = da / (da + db);
  }
  return f;
}

ScalarFunction bounded_extension(const Subset& y_set, const ScalarFunction& f, double r) {
  if (y_set.space() != f.space)
    throw Error(Errc::SpaceMismatch, "extension domain lives on the wrong space");
  if (y_set.is_empty()) throw Error(Errc::EmptySet, "cannot extend from the empty set");
  const auto& members = y_set.members();
  for (int y : members)
    if (std::abs(f.values[y]) > r)
      throw Error(Errc::BoundViolated, "function exceeds the required bound on Y");

  const auto& space = *f.space;
  // Empirical Lipschitz constants of the two real coordinates on Y.
  double lre = 0, lim = 0;
  for (size_t i = 0; i < members.size(); ++i)
    for (size_t j = i + 1; j < members.size(); ++j) {
      double d = space.dist(members[i], members[j]);
      lre = std::max(lre, std::abs(f.values[members[i]].real() - f.values[members[j]].real()) / d);
      lim = std::max(lim, std::abs(f.values[members[i]].imag() - f.values[members[j]].imag()) / d);
    }

  ScalarFunction out;
  out.space = f.space;
  out.values.resize(space.size());
  for (int x = 0; x < space.size(); ++x) {
    if (y_set.contains(x)) {
      out.values[x] = f.values[x];  // exact on Y
      continue;
    }
    double re = std::numeric_limits<double>::infinity();
    double im = std::numeric_limits<double>::infinity();
    for (int y : members) {
      double d = space.dist(x, y);
      re = std::min(re, f.values[y].real() + lre * d);
      im = std::min(im, f.values[y].imag() + lim * d);
    }
    std::complex<double> v(re, im);
    if (std::abs(v) > r) v *= r / std::abs(v);
    out.values[x] = v;
  }
  return out;
}

namespace detail {
double half_min_rule(const FiniteMetricSpace& space, double cap_default,
                     const std::function<double(int, int)>& value_gap, double threshold) {
  const int n = space.size();
  if (n <= 1) return 1.0;  // degenerate: every implication is vacuous
  double cap = cap_default;
  double min_violating = std::numeric_limits<double>::infinity();
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (value_gap(x, y) >= threshold) min_violating = std::min(min_violating, space.dist(x, y));
  if (!std::isfinite(min_violating)) return cap;
  return std::min(min_violating / 2.0, cap);
}
}  // namespace detail

double modulus_eta(const ScalarFunction& f, double eps) {
  if (eps <= 0) throw Error(Errc::BadIndices, "modulus_eta needs eps > 0");
  const auto& space = *f.space;
  return detail::half_min_rule(
      space, space.diameter() / 2.0,
      [&](int x, int y) { return std::abs(f.values[x] - f.values[y]); }, eps);
}

double continuity_delta(std::span<const PointMap> maps, double eta) {
  if (eta <= 0) throw Error(Errc::BadIndices, "continuity_delta needs eta > 0");
  if (maps.empty()) throw Error(Errc::EmptySet, "continuity_delta needs at least one map");
  const SpacePtr& domain = maps.front().domain();
  for (const auto& m : maps)
    if (m.domain() != domain) throw Error(Errc::SpaceMismatch, "maps do not share a domain");
  return detail::half_min_rule(
      *domain, domain->diameter(),
      [&](int x, int y) {
        double worst = 0;
        for (const auto& m : maps) worst = std::max(worst, m.codomain()->dist(m(x), m(y)));
        return worst;
      },
      eta);
}

}  // namespace ahcert
