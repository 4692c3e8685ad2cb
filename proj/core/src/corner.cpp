#include "ahcert/corner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace ahcert {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// sup over the listed points of || u x u^* - d ||.  Shared by the
// certification path and the certificate replay so the two produce
// bit-identical numbers.
double conj_defect_sup(const MatrixFunction& u, const MatrixFunction& x, const MatrixFunction& d,
                       std::span<const int> points) {
  double worst = 0;
  for (int p : points) {
    CMatrix m = u.values[p] * x.values[p] * u.values[p].adjoint() - d.values[p];
    worst = std::max(worst, operator_norm(m));
  }
  return worst;
}

std::vector<int> all_points(const SpacePtr& space) {
  std::vector<int> pts(space->size());
  for (int i = 0; i < space->size(); ++i) pts[i] = i;
  return pts;
}

// Closed delta-neighbourhood { y : d(y, F) <= delta }.
Subset closed_ball(const Subset& f, double delta) {
  std::vector<int> m;
  for (int y = 0; y < f.space()->size(); ++y)
    if (f.dist_to(y) <= delta) m.push_back(y);
  return Subset(f.space(), std::move(m));
}

Subset complement(const Subset& s) {
  std::vector<int> m;
  for (int y = 0; y < s.space()->size(); ++y)
    if (!s.contains(y)) m.push_back(y);
  return Subset(s.space(), std::move(m));
}

// Entrywise McShane extension of (f∘lambda_i - f(x0)) from G to all of Y,
// clamped so the pointwise operator norm stays <= eps.  Exact on G.
MatrixFunction extend_defect(const Subset& g_set, const PointMap& lambda,
                             const MatrixFunction& f, int x0, double eps) {
  const SpacePtr& y = lambda.domain();
  const int s = f.n;
  MatrixFunction out = MatrixFunction::zero(y, s);
  for (int a = 0; a < s; ++a)
    for (int bcol = 0; bcol < s; ++bcol) {
      ScalarFunction entry;
      entry.space = y;
      entry.values.resize(y->size());
      for (int p : g_set.members())
        entry.values[p] = f.values[lambda(p)](a, bcol) - f.values[x0](a, bcol);
      ScalarFunction ext = bounded_extension(g_set, entry, eps);
      for (int p = 0; p < y->size(); ++p) out.values[p](a, bcol) = ext.values[p];
    }
  for (int p = 0; p < y->size(); ++p) {
    double nrm = operator_norm(out.values[p]);
    if (nrm > eps) out.values[p] *= eps / nrm;
  }
  return out;
}

struct EngineOutput {
  MatrixFunction u;       // full n*s unitary, exact identity outside the active block
  MatrixFunction m_conj;  // u g u^*, assembled structurally
  double eta = 0, delta = 0, eps_sup = 0, claim_defect = 0;
  std::vector<CornerStepReport> steps;
  Subset certified;
};

// The Theorem-3.1 recursion with M_s coefficients: collect the slots
// named by the F-sets into the leading corner, one crossing unitary per
// step.  Slot q occupies rows/columns [q s, (q+1) s).
EngineOutput corner_engine(const EigenvaluePattern& pattern, const MatrixFunction& f, int x0,
                           double eps, std::span<const Subset> fs) {
  const SpacePtr& y_space = pattern.domain();
  const SpacePtr& x_space = pattern.codomain();
  const int n = pattern.count();
  const int m = static_cast<int>(fs.size());
  const int s = f.n;
  const int np = y_space->size();

  if (m < 1) throw Error(Errc::EmptyF, "need at least one F set");
  if (m > n) throw Error(Errc::BadIndices, "more F sets than eigenvalue maps");
  if (x0 < 0 || x0 >= x_space->size()) throw Error(Errc::BadIndices, "x0 outside the space");
  for (const auto& fi : fs) {
    if (fi.space() != y_space) throw Error(Errc::SpaceMismatch, "F set on the wrong space");
    if (fi.is_empty()) throw Error(Errc::EmptyF, "empty F set");
  }

  EngineOutput out;
  out.eta = modulus_eta(f, eps);
  for (int i = 0; i < m; ++i)
    for (int yy : fs[i].members())
      if (!(x_space->dist(pattern.map(i)(yy), x0) < out.eta))
        throw Error(Errc::HypothesisFailed,
                    "d(lambda_" + std::to_string(i + 1) + "(y), x0) >= eta at y=" +
                        y_space->label(yy));
  out.delta = continuity_delta(pattern.maps(), out.eta);

  // Adjusted diagonal slots g_q = f∘lambda_q - eps_q.
  const CMatrix& fx0 = f.values[x0];
  std::vector<MatrixFunction> slot_g(n);
  for (int q = 0; q < n; ++q) {
    MatrixFunction comp;
    comp.space = y_space;
    comp.n = s;
    comp.values.reserve(np);
    for (int p = 0; p < np; ++p) comp.values.push_back(f.values[pattern.map(q)(p)]);
    if (q < m) {
      Subset g_set = closed_ball(fs[q], out.delta);
      MatrixFunction defect = extend_defect(g_set, pattern.map(q), f, x0, eps);
      double nrm = sup_norm(defect);
      out.eps_sup = std::max(out.eps_sup, nrm);
      slot_g[q] = comp - defect;
    } else {
      slot_g[q] = comp;
    }
  }

  out.certified = Subset::empty(y_space);
  for (const auto& fi : fs) out.certified = out.certified.unite(fi);

  out.u = MatrixFunction::identity(y_space, n * s);

  // Fast path: when every slot is exactly the constant f(x0) the identity
  // already realizes the claim, with achieved norm exactly zero.
  bool all_const = true;
  for (int q = 0; q < n && all_const; ++q)
    for (int p = 0; p < np && all_const; ++p)
      if (slot_g[q].values[p] != fx0) all_const = false;

  if (!all_const) {
    Subset union_so_far = fs[0];
    for (int k = 1; k < m; ++k) {
      const Subset& b_set = fs[k];
      Subset b_delta = ball(b_set, out.delta);
      Subset a_set = complement(b_delta);
      CornerStepReport step;
      step.k = k + 1;
      step.constant_swap = a_set.is_empty();

      std::vector<Complex> v11(np), v12(np);
      if (step.constant_swap) {
        // B_delta(F_k) covers Y, so g_k == f(x0) everywhere and the constant
        // transposition works (the 2x2 corner commutation needs no path).
        for (int p = 0; p < np; ++p) {
          v11[p] = 0.0;
          v12[p] = 1.0;
        }
      } else {
        ScalarFunction ury = urysohn(a_set, b_set);
        for (int p = 0; p < np; ++p) {
          double t = ury.values[p].real();
          if (t == 0.0) {
            v11[p] = 1.0;
            v12[p] = 0.0;
          } else if (t == 1.0) {
            v11[p] = 0.0;
            v12[p] = 1.0;
          } else {
            Complex z = std::polar(1.0, std::numbers::pi * t);
            v11[p] = (1.0 + z) / 2.0;
            v12[p] = (1.0 - z) / 2.0;
          }
        }
      }

      // u <- v u: the crossing unitary is supported on slots {0, k}, so it
      // rewrites those two row blocks and leaves everything else untouched.
      for (int p = 0; p < np; ++p) {
        if (v11[p] == 1.0 && v12[p] == 0.0) continue;
        CMatrix& up = out.u.values[p];
        CMatrix r0 = up.middleRows(0, s);
        CMatrix rk = up.middleRows(k * s, s);
        up.middleRows(0, s) = v11[p] * r0 + v12[p] * rk;
        up.middleRows(k * s, s) = v12[p] * r0 + v11[p] * rk;
      }

      union_so_far = union_so_far.unite(b_set);
      // Claim check at level k+1 on the union collected so far.
      const int active = (k + 1) * s;
      for (int p : union_so_far.members()) {
        CMatrix utop = out.u.values[p].topLeftCorner(active, active);
        CMatrix gtop = CMatrix::Zero(active, active);
        for (int q = 0; q <= k; ++q) gtop.block(q * s, q * s, s, s) = slot_g[q].values[p];
        CMatrix mtop = utop * gtop * utop.adjoint();
        CMatrix d = mtop;
        d.topRows(s).setZero();
        d.leftCols(s).setZero();
        d.topLeftCorner(s, s) = fx0;
        step.claim_defect = std::max(step.claim_defect, operator_norm(mtop - d));
      }
      out.claim_defect = std::max(out.claim_defect, step.claim_defect);
      out.steps.push_back(step);
    }
  }

  // u g u^*, assembled structurally: the active corner is conjugated, the
  // tail slots pass through exactly.
  const int active = m * s;
  out.m_conj = MatrixFunction::zero(y_space, n * s);
  for (int p = 0; p < np; ++p) {
    CMatrix gtop = CMatrix::Zero(active, active);
    for (int q = 0; q < m; ++q) gtop.block(q * s, q * s, s, s) = slot_g[q].values[p];
    CMatrix utop = out.u.values[p].topLeftCorner(active, active);
    out.m_conj.values[p].topLeftCorner(active, active) = utop * gtop * utop.adjoint();
    for (int q = m; q < n; ++q)
      out.m_conj.values[p].block(q * s, q * s, s, s) = slot_g[q].values[p];
  }
  return out;
}

MatrixFunction claim_diagonal(const MatrixFunction& m_conj, const CMatrix& fx0) {
  MatrixFunction d = m_conj;
  const int s = static_cast<int>(fx0.rows());
  for (auto& v : d.values) {
    v.topRows(s).setZero();
    v.leftCols(s).setZero();
    v.topLeftCorner(s, s) = fx0;
  }
  return d;
}

}  // namespace

CornerResult corner_extract(const DiagonalHom& phi, const ScalarFunction& f, int x0, double eps,
                            std::span<const Subset> fs) {
  if (phi.source_size() != 1)
    throw Error(Errc::SizeMismatch, "corner_extract is the scalar (m = 1) form");
  if (f.space != phi.source_space())
    throw Error(Errc::SpaceMismatch, "function does not live on the source space");
  if (eps <= 0) throw Error(Errc::BadIndices, "eps must be positive");

  MatrixFunction fm = MatrixFunction::from_scalar(f);
  EngineOutput eng = corner_engine(phi.pattern(), fm, x0, eps, fs);

  const int n = phi.multiplicity();
  const int m = static_cast<int>(fs.size());
  CornerResult res;
  res.u = eng.u;
  res.b = (m > 1) ? eng.m_conj.block(1, 1, m - 1, m - 1)
                  : MatrixFunction::zero(phi.target_space(), 0);
  res.eta = eng.eta;
  res.delta = eng.delta;
  res.eps = eps;
  res.eps_sup = eng.eps_sup;
  res.claim_defect = eng.claim_defect;
  res.steps = eng.steps;
  res.certified = eng.certified;

  // Theorem comparison matrix: diag(f(x0), b, f∘lambda_{m+1}, ..., f∘lambda_n),
  // with b read off the claim.
  MatrixFunction d = claim_diagonal(eng.m_conj, fm.values[x0]);
  for (int p = 0; p < d.points(); ++p)
    for (int q = m; q < n; ++q) d.values[p](q, q) = f.values[phi.pattern().map(q)(p)];
  res.achieved = conj_defect_sup(res.u, apply(phi, fm), d, res.certified.members());
  return res;
}

CornerResult covering_corner(const DiagonalHom& phi, const MatrixFunction& f, int x0,
                             double eps) {
  if (f.space != phi.source_space())
    throw Error(Errc::SpaceMismatch, "function does not live on the source space");
  if (f.n != phi.source_size())
    throw Error(Errc::SizeMismatch, "function size does not match the source size");
  if (eps <= 0) throw Error(Errc::BadIndices, "eps must be positive");

  const int n = phi.multiplicity();
  const int s = phi.source_size();
  double eta = modulus_eta(f, eps);
  Subset u_ball = ball(Subset(phi.source_space(), {x0}), eta);
  if (!ep_preimage(phi.pattern(), u_ball).is_whole())
    throw Error(Errc::NotCovering, "pattern preimages of the eta-ball do not cover Y");

  // Maps with nonempty preimage come first (stable); their preimages are
  // the F sets of the recursion.
  std::vector<int> order;
  std::vector<Subset> fsets;
  std::vector<int> tail;
  for (int q = 0; q < n; ++q) {
    Subset pre = phi.pattern().map(q).preimage(u_ball);
    if (pre.is_empty()) {
      tail.push_back(q);
    } else {
      order.push_back(q);
      fsets.push_back(std::move(pre));
    }
  }
  const int m = static_cast<int>(order.size());
  order.insert(order.end(), tail.begin(), tail.end());

  std::vector<PointMap> reordered;
  reordered.reserve(n);
  for (int q : order) reordered.push_back(phi.pattern().map(q));
  EigenvaluePattern pattern(std::move(reordered));

  EngineOutput eng = corner_engine(pattern, f, x0, eps, fsets);

  // Undo the slot reordering: u_total = u' P with P the block permutation
  // carrying old slot order[q] to new slot q (an exact column gather).
  MatrixFunction u_total;
  u_total.space = phi.target_space();
  u_total.n = n * s;
  u_total.values.assign(eng.u.points(), CMatrix::Zero(n * s, n * s));
  for (int p = 0; p < eng.u.points(); ++p)
    for (int q = 0; q < n; ++q)
      u_total.values[p].middleCols(order[q] * s, s) = eng.u.values[p].middleCols(q * s, s);

  CornerResult res;
  res.u = std::move(u_total);
  res.b = eng.m_conj.block(s, s, (n - 1) * s, (n - 1) * s);
  res.eta = eta;
  res.delta = eng.delta;
  res.eps = eps;
  res.eps_sup = eng.eps_sup;
  res.claim_defect = eng.claim_defect;
  res.steps = eng.steps;
  res.certified = Subset::whole(phi.target_space());

  MatrixFunction d = claim_diagonal(eng.m_conj, f.values[x0]);
  res.achieved = conj_defect_sup(res.u, apply(phi, f), d, res.certified.members());
  return res;
}

bool covering_hypothesis(const AHSystem& sys, int i, int t, const MatrixFunction& f, int x0,
                         double eps, int j) {
  double eta = modulus_eta(f, eps);
  Subset u_ball = ball(Subset(sys.summand(i, t).space, {x0}), eta);
  for (int l = 0; l < sys.num_summands(j); ++l) {
    auto comp = system_compose(sys, i, j, t, l);
    if (!comp) return false;
    if (!ep_preimage(comp->pattern(), u_ball).is_whole()) return false;
  }
  return true;
}

CornerCertificate certify_at_stage(const AHSystem& sys, int i, int t, const MatrixFunction& f,
                                   int x0, double eps, int j) {
  if (i < 0 || j <= i || j >= sys.num_stages() || t < 0 || t >= sys.num_summands(i))
    throw Error(Errc::BadIndices, "certify_at_stage indices out of range");
  if (f.space != sys.summand(i, t).space || f.n != sys.summand(i, t).size)
    throw Error(Errc::SizeMismatch, "element does not live in the named summand");

  CornerCertificate cert;
  cert.system = sys.name;
  cert.stage_i = i;
  cert.summand_t = t;
  cert.stage_j = j;
  cert.x0 = x0;
  cert.eps = eps;
  for (int l = 0; l < sys.num_summands(j); ++l) {
    auto comp = system_compose(sys, i, j, t, l);
    if (!comp)
      throw Error(Errc::NotCovering, "no partial map into summand " + std::to_string(l + 1));
    CornerResult res = covering_corner(*comp, f, x0, eps);
    CornerCertificate::Part part;
    part.l = l;
    part.cutdown = cutdown_indices(sys, i, j, t, l);
    part.u = std::move(res.u);
    part.b = std::move(res.b);
    part.achieved = res.achieved;
    part.claim_defect = res.claim_defect;
    part.corner_size = f.n;
    part.rest_size = comp->target_size() - f.n;
    cert.parts.push_back(std::move(part));
  }
  return cert;
}

CornerCertificate property_p_certify(const AHSystem& sys, int i, int t, const MatrixFunction& f,
                                     int x0, double eps, int horizon) {
  if (horizon >= sys.num_stages() || horizon <= i)
    throw Error(Errc::BadIndices, "horizon must lie strictly between the stage and the system end");
  for (int j = i + 1; j <= horizon; ++j)
    if (covering_hypothesis(sys, i, t, f, x0, eps, j)) return certify_at_stage(sys, i, t, f, x0, eps, j);
  throw Error(Errc::HorizonExhausted,
              "no stage <= horizon satisfies the covering hypothesis (undetermined)");
}

double CornerCertificate::achieved_max() const {
  double worst = 0;
  for (const auto& p : parts) worst = std::max(worst, p.achieved);
  return worst;
}

namespace {

void write_matrix_function(std::ostringstream& os, const std::string& tag,
                           const MatrixFunction& f) {
  os << tag << " points " << f.points() << " dim " << f.n << "\n";
  for (int p = 0; p < f.points(); ++p) {
    os << "point " << p;
    for (int r = 0; r < f.n; ++r)
      for (int c = 0; c < f.n; ++c)
        os << " " << fmt17(f.values[p](r, c).real()) << " " << fmt17(f.values[p](r, c).imag());
    os << "\n";
  }
}

MatrixFunction read_matrix_function(std::istringstream& is, const std::string& expect_tag,
                                    const SpacePtr& space) {
  std::string tag, kw;
  int points = 0, dim = 0;
  is >> tag >> kw >> points;
  if (tag != expect_tag || kw != "points")
    throw Error(Errc::ParseError, "expected '" + expect_tag + "' block in certificate");
  is >> kw >> dim;
  if (kw != "dim") throw Error(Errc::ParseError, "expected 'dim' in certificate");
  if (points != space->size())
    throw Error(Errc::ParseError, "certificate matrices do not match the stage space");
  MatrixFunction f;
  f.space = space;
  f.n = dim;
  f.values.assign(points, CMatrix::Zero(dim, dim));
  for (int p = 0; p < points; ++p) {
    int idx = -1;
    is >> kw >> idx;
    if (kw != "point" || idx != p) throw Error(Errc::ParseError, "bad point row in certificate");
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        double re, im;
        is >> re >> im;
        f.values[p](r, c) = Complex(re, im);
      }
  }
  return f;
}

}  // namespace

std::string CornerCertificate::to_text(bool include_matrices) const {
  std::ostringstream os;
  os << "ahcert-corner-certificate v1\n";
  os << "system " << (system.empty() ? "-" : system) << "\n";
  os << "stage_i " << stage_i + 1 << " summand_t " << summand_t + 1 << " stage_j " << stage_j + 1
     << "\n";
  os << "x0 " << x0 << "\n";
  os << "eps " << fmt17(eps) << "\n";
  os << "claimed_bound " << fmt17(2 * eps) << "\n";
  os << "parts " << parts.size() << "\n";
  for (const auto& p : parts) {
    os << "part l " << p.l + 1 << " corner " << p.corner_size << " rest " << p.rest_size << "\n";
    os << "achieved " << fmt17(p.achieved) << "\n";
    os << "claim_defect " << fmt17(p.claim_defect) << "\n";
    os << "cutdown";
    for (int idx : p.cutdown) os << " " << idx;
    os << "\n";
    if (include_matrices) {
      std::ostringstream tmp;
      write_matrix_function(tmp, "unitary", p.u);
      write_matrix_function(tmp, "remainder", p.b);
      os << tmp.str();
    }
  }
  os << "end\n";
  return os.str();
}

CornerCertificate CornerCertificate::from_text(const std::string& text, const AHSystem& sys) {
  std::istringstream is(text);
  std::string line, kw;
  std::getline(is, line);
  if (line != "ahcert-corner-certificate v1")
    throw Error(Errc::ParseError, "not a corner certificate");
  CornerCertificate cert;
  is >> kw >> cert.system;
  if (kw != "system") throw Error(Errc::ParseError, "expected 'system'");
  if (cert.system == "-") cert.system.clear();
  is >> kw >> cert.stage_i >> kw >> cert.summand_t >> kw >> cert.stage_j;
  cert.stage_i--;
  cert.summand_t--;
  cert.stage_j--;
  is >> kw >> cert.x0;
  if (kw != "x0") throw Error(Errc::ParseError, "expected 'x0'");
  is >> kw >> cert.eps;
  double claimed = 0;
  is >> kw >> claimed;
  (void)claimed;
  size_t nparts = 0;
  is >> kw >> nparts;
  if (kw != "parts") throw Error(Errc::ParseError, "expected 'parts'");
  if (cert.stage_j < 0 || cert.stage_j >= sys.num_stages())
    throw Error(Errc::ParseError, "certificate stage outside the system");
  for (size_t k = 0; k < nparts; ++k) {
    Part p;
    is >> kw >> kw >> p.l >> kw >> p.corner_size >> kw >> p.rest_size;
    p.l--;
    if (p.l < 0 || p.l >= sys.num_summands(cert.stage_j))
      throw Error(Errc::ParseError, "certificate summand outside the stage");
    is >> kw >> p.achieved;
    if (kw != "achieved") throw Error(Errc::ParseError, "expected 'achieved'");
    is >> kw >> p.claim_defect;
    std::getline(is, line);  // finish claim_defect line
    std::getline(is, line);  // cutdown line
    {
      std::istringstream cs(line);
      cs >> kw;
      if (kw != "cutdown") throw Error(Errc::ParseError, "expected 'cutdown'");
      int idx;
      while (cs >> idx) p.cutdown.push_back(idx);
    }
    const SpacePtr& space = sys.summand(cert.stage_j, p.l).space;
    auto peek = is.tellg();
    std::string next;
    is >> next;
    is.clear();
    is.seekg(peek);
    if (next == "unitary") {
      p.u = read_matrix_function(is, "unitary", space);
      p.b = read_matrix_function(is, "remainder", space);
    }
    cert.parts.push_back(std::move(p));
  }
  return cert;
}

std::vector<double> replay_achieved(const AHSystem& sys, const CornerCertificate& cert,
                                    const MatrixFunction& f) {
  std::vector<double> out;
  for (const auto& part : cert.parts) {
    if (part.u.points() == 0)
      throw Error(Errc::MissingStructure, "certificate was serialized without matrices");
    auto comp = system_compose(sys, cert.stage_i, cert.stage_j, cert.summand_t, part.l);
    if (!comp) throw Error(Errc::BadIndices, "certificate does not match the system");
    MatrixFunction phif = apply(*comp, f);
    const SpacePtr& space = sys.summand(cert.stage_j, part.l).space;
    MatrixFunction d = MatrixFunction::zero(space, phif.n);
    for (int p = 0; p < d.points(); ++p) {
      d.values[p].topLeftCorner(f.n, f.n) = f.values[cert.x0];
      d.values[p].bottomRightCorner(part.b.n, part.b.n) = part.b.values[p];
    }
    out.push_back(conj_defect_sup(part.u, phif, d, all_points(space)));
  }
  return out;
}

NonvanishingReport property_p_implies_nonvanishing(const AHSystem& sys,
                                                   const CornerCertificate& cert,
                                                   const MatrixFunction& f) {
  double fx0_norm = operator_norm(f.values[cert.x0]);
  if (fx0_norm <= 2 * cert.eps)
    throw Error(Errc::ToleranceTooLarge, "||f(x0)|| must exceed twice the certificate tolerance");
  NonvanishingReport rep;
  rep.lower_bound = fx0_norm - cert.achieved_max();
  rep.margin = std::numeric_limits<double>::infinity();
  for (const auto& part : cert.parts) {
    auto comp = system_compose(sys, cert.stage_i, cert.stage_j, cert.summand_t, part.l);
    if (!comp) throw Error(Errc::BadIndices, "certificate does not match the system");
    MatrixFunction phif = apply(*comp, f);
    for (int p = 0; p < phif.points(); ++p) {
      double nrm = operator_norm(phif.values[p]);
      if (nrm < rep.margin) {
        rep.margin = nrm;
        rep.witness_summand = part.l;
        rep.witness_point = p;
      }
    }
  }
  rep.nowhere_zero = rep.margin > 0;
  return rep;
}

}  // namespace ahcert
