#include "ahcert/simplicity.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ahcert {

namespace {

void check_stage_indices(const AHSystem& sys, int i, int t, int horizon) {
  if (i < 0 || i >= sys.num_stages() || t < 0 || t >= sys.num_summands(i))
    throw Error(Errc::BadIndices, "stage or summand out of range");
  if (horizon <= i || horizon >= sys.num_stages())
    throw Error(Errc::BadIndices, "horizon must lie strictly between the stage and the system end");
}

// j0 of the maximal all-true suffix of per-stage verdicts; -1 if the last
// stage already fails.
int suffix_start(const std::vector<bool>& stage_ok, int first_stage) {
  int j0 = -1;
  for (int k = static_cast<int>(stage_ok.size()) - 1; k >= 0; --k) {
    if (!stage_ok[k]) break;
    j0 = first_stage + k;
  }
  return j0;
}

}  // namespace

SimplicityCertificate covering_check(const AHSystem& sys, int i, int t, const Subset& u,
                                     int horizon) {
  check_stage_indices(sys, i, t, horizon);
  if (u.space() != sys.summand(i, t).space)
    throw Error(Errc::SpaceMismatch, "subset does not live on the named summand");
  if (u.is_empty()) throw Error(Errc::EmptySet, "covering check needs a nonempty open set");

  SimplicityCertificate cert;
  cert.stage_i = i;
  cert.summand_t = t;
  cert.horizon = horizon;

  std::vector<bool> stage_ok;
  for (int j = i + 1; j <= horizon; ++j) {
    std::vector<bool> row;
    bool all = true;
    for (int l = 0; l < sys.num_summands(j); ++l) {
      auto comp = system_compose(sys, i, j, t, l);
      bool ok = comp && ep_preimage(comp->pattern(), u).is_whole();
      row.push_back(ok);
      all = all && ok;
    }
    cert.covered.push_back(std::move(row));
    stage_ok.push_back(all);
  }
  cert.j0 = suffix_start(stage_ok, i + 1);
  cert.verdict = cert.j0 >= 0 ? CoverVerdict::Covered : CoverVerdict::FailedAtHorizon;
  return cert;
}

NowhereZeroReport nowhere_zero_check(const AHSystem& sys, int i, int t, const MatrixFunction& a,
                                     int horizon, double tol) {
  check_stage_indices(sys, i, t, horizon);
  if (a.space != sys.summand(i, t).space || a.n != sys.summand(i, t).size)
    throw Error(Errc::SizeMismatch, "element does not live in the named summand");
  if (sup_norm(a) == 0.0) throw Error(Errc::ZeroInput, "element vanishes identically");

  NowhereZeroReport rep;
  rep.stage_i = i;
  rep.summand_t = t;
  rep.horizon = horizon;

  std::vector<bool> stage_ok;
  std::vector<double> stage_min;
  for (int j = i + 1; j <= horizon; ++j) {
    bool all = true;
    double min_norm = std::numeric_limits<double>::infinity();
    for (int l = 0; l < sys.num_summands(j); ++l) {
      auto comp = system_compose(sys, i, j, t, l);
      if (!comp) {
        all = false;
        min_norm = 0;
        continue;
      }
      MatrixFunction image = apply(*comp, a);
      for (const auto& v : image.values) min_norm = std::min(min_norm, operator_norm(v));
    }
    all = all && min_norm > tol;
    stage_ok.push_back(all);
    stage_min.push_back(min_norm);
  }
  rep.j0 = suffix_start(stage_ok, i + 1);
  rep.verdict = rep.j0 >= 0 ? CoverVerdict::Covered : CoverVerdict::FailedAtHorizon;
  if (rep.j0 >= 0) {
    rep.min_norm = std::numeric_limits<double>::infinity();
    for (int j = rep.j0; j <= horizon; ++j) rep.min_norm = std::min(rep.min_norm, stage_min[j - (i + 1)]);
  }
  return rep;
}

ProbeReport simplicity_probe(const AHSystem& sys, int i, int horizon,
                             std::span<const double> radii, int center_stride) {
  if (center_stride < 1) throw Error(Errc::BadIndices, "center stride must be >= 1");
  if (radii.empty()) throw Error(Errc::EmptySet, "probe needs at least one radius");
  ProbeReport rep;
  rep.stage_i = i;
  rep.horizon = horizon;
  rep.all_covered = true;
  for (int t = 0; t < sys.num_summands(i); ++t) {
    const SpacePtr& space = sys.summand(i, t).space;
    for (int c = 0; c < space->size(); c += center_stride)
      for (double r : radii) {
        SimplicityCertificate cert =
            covering_check(sys, i, t, ball(Subset(space, {c}), r), horizon);
        ProbeRow row{t, c, r, cert.verdict == CoverVerdict::Covered ? cert.j0 : -1};
        if (row.j0 < 0 && !rep.first_fail) {
          rep.first_fail = row;
          rep.all_covered = false;
        }
        rep.rows.push_back(row);
      }
  }
  return rep;
}

std::string ProbeReport::to_csv(const AHSystem& sys) const {
  std::ostringstream os;
  os << "center,radius,j0,horizon\n";
  const bool multi = sys.num_summands(stage_i) > 1;
  char buf[64];
  for (const auto& row : rows) {
    const auto& space = sys.summand(stage_i, row.summand_t).space;
    std::snprintf(buf, sizeof(buf), "%.17g", row.radius);
    os << (multi ? "s" + std::to_string(row.summand_t + 1) + ":" : "") << space->label(row.center)
       << "," << buf << ",";
    if (row.j0 >= 0)
      os << row.j0 + 1;
    else
      os << "FAIL";
    os << "," << horizon + 1 << "\n";
  }
  return os.str();
}

}  // namespace ahcert
