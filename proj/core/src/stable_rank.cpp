#include "ahcert/stable_rank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace ahcert {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

CMatrix gather(const CMatrix& m, const std::vector<int>& idx) {
  CMatrix out(idx.size(), idx.size());
  for (size_t r = 0; r < idx.size(); ++r)
    for (size_t c = 0; c < idx.size(); ++c) out(r, c) = m(idx[r], idx[c]);
  return out;
}

void scatter_into(CMatrix& m, const std::vector<int>& idx, const CMatrix& sub) {
  for (size_t r = 0; r < idx.size(); ++r)
    for (size_t c = 0; c < idx.size(); ++c) m(idx[r], idx[c]) = sub(r, c);
}

}  // namespace

ZeroCornerInvertible zero_corner_invertible(const MatrixFunction& a, const BlockStructure& bs,
                                            double eps) {
  if (eps <= 0) throw Error(Errc::BadIndices, "eps must be positive");
  const int k = bs.corner;
  int total = k;
  int max_block = 0;
  for (int b : bs.blocks) {
    if (b < 1) throw Error(Errc::MissingStructure, "block sizes must be positive");
    total += b;
    max_block = std::max(max_block, b);
  }
  if (k < 1 || total != a.n)
    throw Error(Errc::MissingStructure, "declared block structure does not match the element");
  if (k <= max_block)
    throw Error(Errc::CornerTooSmall, "zero corner must be strictly larger than every block");

  // The element must genuinely be diag(0_k, a_1, ..., a_n): exact zeros
  // outside the diagonal blocks and in the corner.
  std::vector<int> block_of(total, -1);
  {
    int off = k;
    for (size_t r = 0; r < bs.blocks.size(); ++r) {
      for (int q = 0; q < bs.blocks[r]; ++q) block_of[off + q] = static_cast<int>(r);
      off += bs.blocks[r];
    }
  }
  for (const auto& v : a.values)
    for (int r = 0; r < total; ++r)
      for (int c = 0; c < total; ++c) {
        bool inside = block_of[r] >= 0 && block_of[r] == block_of[c];
        if (!inside && v(r, c) != Complex(0, 0))
          throw Error(Errc::MissingStructure, "element has entries outside the declared blocks");
      }

  // Cyclic block-row shift: row x of U a is row (x + k) mod total of a.
  // Every surviving entry lands strictly above the diagonal (column - row
  // >= k - max_block + 1).
  std::vector<int> images(total);
  for (int x = 0; x < total; ++x) images[(x + k) % total] = x;
  Permutation shift(std::move(images));  // U e_{x+k} = e_x
  CMatrix u_inv = perm_matrix(shift).transpose();

  ZeroCornerInvertible out;
  out.delta = eps / 2.0;
  out.shift = shift;
  out.b = a;
  for (auto& v : out.b.values) v += out.delta * u_inv;
  return out;
}

CornerApproximant corner_sum_invertible(const CornerApproximant& p, const CornerApproximant& q) {
  if (p.element.n == 0) return q;
  if (q.element.n == 0) return p;
  if (p.summand != q.summand)
    throw Error(Errc::SlotOverlap, "corner approximants live in different summands");
  if (p.element.space != q.element.space)
    throw Error(Errc::SpaceMismatch, "corner approximants live on different spaces");
  const CornerApproximant& lo = p.offset <= q.offset ? p : q;
  const CornerApproximant& hi = p.offset <= q.offset ? q : p;
  if (lo.offset + lo.element.n > hi.offset)
    throw Error(Errc::SlotOverlap, "corner slots overlap");
  if (lo.offset + lo.element.n != hi.offset)
    throw Error(Errc::BadIndices, "corner slots must be adjacent");

  CornerApproximant out;
  out.summand = p.summand;
  out.offset = lo.offset;
  std::vector<MatrixFunction> blocks{lo.element, hi.element};
  out.element = assemble_block_diag(blocks);
  out.distance = std::max(p.distance, q.distance);
  out.margin = std::min(p.margin, q.margin);
  return out;
}

namespace {

// Stepwise provenance of the pushforward from stage j to stage M: for each
// stage-M summand, the ordered list of (stage-j summand, copy) blocks.
struct CopyBlock {
  int l = 0;       // stage-j summand of origin
  int offset = 0;  // row offset of this copy inside the stage-M summand
};
std::vector<std::vector<CopyBlock>> copy_layout(const AHSystem& sys, int j, int m_stage) {
  std::vector<std::vector<CopyBlock>> cur(sys.num_summands(j));
  for (int l = 0; l < sys.num_summands(j); ++l) cur[l] = {CopyBlock{l, 0}};
  std::vector<int> cur_size(sys.num_summands(j));
  for (int l = 0; l < sys.num_summands(j); ++l) cur_size[l] = sys.summand(j, l).size;

  for (int p = j + 1; p <= m_stage; ++p) {
    const BondingMap& bond = sys.bonds[p - 1];
    std::vector<std::vector<CopyBlock>> next(sys.num_summands(p));
    std::vector<int> next_size(sys.num_summands(p), 0);
    for (int lp = 0; lp < sys.num_summands(p); ++lp) {
      int off = 0;
      for (int s = 0; s < sys.num_summands(p - 1); ++s) {
        if (!bond.partial(s, lp)) continue;
        for (int c = 0; c < bond.partial(s, lp)->multiplicity(); ++c) {
          for (const CopyBlock& blk : cur[s]) next[lp].push_back(CopyBlock{blk.l, off + blk.offset});
          off += cur_size[s];
        }
      }
      next_size[lp] = off;
    }
    cur = std::move(next);
    cur_size = std::move(next_size);
  }
  return cur;
}

StageElement constant_stage_element(const AHSystem& sys, int i, const std::vector<CMatrix>& m) {
  StageElement x;
  for (int t = 0; t < sys.num_summands(i); ++t)
    x.push_back(MatrixFunction::constant(sys.summand(i, t).space, m[t]));
  return x;
}

}  // namespace

InvertibleApproximant invertible_approx(const AHSystem& sys, int i, const StageElement& a,
                                        double eps, int horizon, double tol) {
  if (eps <= 0) throw Error(Errc::BadIndices, "eps must be positive");
  if (i < 0 || i >= sys.num_stages() || horizon < i || horizon >= sys.num_stages())
    throw Error(Errc::BadIndices, "stage or horizon out of range");
  if (static_cast<int>(a.size()) != sys.num_summands(i))
    throw Error(Errc::SizeMismatch, "element has the wrong number of summands");
  for (int t = 0; t < sys.num_summands(i); ++t)
    if (a[t].space != sys.summand(i, t).space || a[t].n != sys.summand(i, t).size)
      throw Error(Errc::SizeMismatch, "element does not match summand " + std::to_string(t + 1));

  std::ostringstream trace;
  trace << "invertible-approx stage " << i + 1 << " eps " << fmt(eps) << " horizon "
        << horizon + 1 << "\n";

  // (1) Already invertible: done at this stage.
  std::vector<MarginResult> margins;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& mf : a) {
    margins.push_back(invertibility_margin(mf));
    min_margin = std::min(min_margin, margins.back().margin);
  }
  if (min_margin > tol) {
    trace << "input invertible, margin " << fmt(min_margin) << ", distance 0\n";
    InvertibleApproximant res;
    res.stage = i;
    res.element = a;
    res.distance = 0;
    res.margin = min_margin;
    res.trace = trace.str();
    return res;
  }

  // (2)+(3) Per singular summand: witness point and zero-corner normal form
  // by constant unitaries; b = u a v.
  std::vector<bool> singular(sys.num_summands(i), false);
  std::vector<CMatrix> u_const, v_const;
  std::vector<CMatrix> c_blocks(sys.num_summands(i));
  StageElement b = a;
  for (int t = 0; t < sys.num_summands(i); ++t) {
    const int size = sys.summand(i, t).size;
    if (margins[t].margin > tol) {
      u_const.push_back(CMatrix::Identity(size, size));
      v_const.push_back(CMatrix::Identity(size, size));
      continue;
    }
    singular[t] = true;
    const int x0 = margins[t].witness;
    ZeroCornerForm zc = svd_zero_corner(a[t].values[x0], tol);
    u_const.push_back(zc.u);
    v_const.push_back(zc.v);
    c_blocks[t] = zc.c;
    MatrixFunction uf = MatrixFunction::constant(a[t].space, zc.u);
    MatrixFunction vf = MatrixFunction::constant(a[t].space, zc.v);
    b[t] = uf * a[t] * vf;
    trace << "summand " << t + 1 << " singular at " << sys.summand(i, t).space->label(x0)
          << " (sigma_min " << fmt(margins[t].margin) << ", residual " << fmt(zc.residual)
          << ")\n";
  }

  // (4) Common certification stage j for every singular summand, with an
  // eps/4 budget so the achieved bound stays below eps/2.
  const double eps_cert = eps / 4.0;
  int stage_j = -1;
  for (int j = i + 1; j <= horizon && stage_j < 0; ++j) {
    bool ok = true;
    for (int t = 0; t < sys.num_summands(i) && ok; ++t)
      if (singular[t])
        ok = covering_hypothesis(sys, i, t, b[t], margins[t].witness, eps_cert, j);
    if (ok) stage_j = j;
  }
  if (stage_j < 0)
    throw Error(Errc::HorizonExhausted, "no stage within the horizon satisfies the covering hypothesis");

  std::vector<CornerCertificate> certs(sys.num_summands(i));
  for (int t = 0; t < sys.num_summands(i); ++t)
    if (singular[t]) {
      certs[t] = certify_at_stage(sys, i, t, b[t], margins[t].witness, eps_cert, stage_j);
      trace << "certified summand " << t + 1 << " at stage " << stage_j + 1 << " (achieved "
            << fmt(certs[t].achieved_max()) << " < " << fmt(eps / 2.0) << ")\n";
    }

  // Stage-j data: W (certificate unitaries embedded at their cut-downs),
  // D = W phi_{ij}(b) W^*, and the idealized E with exact zeros.
  StageElement phib = push_forward(sys, i, stage_j, b);
  StageElement w_elem;
  for (int l = 0; l < sys.num_summands(stage_j); ++l)
    w_elem.push_back(MatrixFunction::identity(sys.summand(stage_j, l).space,
                                              sys.summand(stage_j, l).size));
  for (int t = 0; t < sys.num_summands(i); ++t) {
    if (!singular[t]) continue;
    for (const auto& part : certs[t].parts)
      for (int p = 0; p < w_elem[part.l].points(); ++p)
        scatter_into(w_elem[part.l].values[p], part.cutdown, part.u.values[p]);
  }

  StageElement d_elem, e_elem;
  for (int l = 0; l < sys.num_summands(stage_j); ++l) {
    d_elem.push_back(w_elem[l] * phib[l] * w_elem[l].adjoint());
    e_elem.push_back(MatrixFunction::zero(sys.summand(stage_j, l).space,
                                          sys.summand(stage_j, l).size));
  }
  // E: invertible summands keep their pushforward blocks; singular ones are
  // replaced by diag(0, c_t, b'_{t,l}) on the cut-down.
  for (int t = 0; t < sys.num_summands(i); ++t) {
    const int nt = sys.summand(i, t).size;
    if (!singular[t]) {
      for (int l = 0; l < sys.num_summands(stage_j); ++l) {
        std::vector<int> idx = cutdown_indices(sys, i, stage_j, t, l);
        if (idx.empty()) continue;
        for (int p = 0; p < e_elem[l].points(); ++p)
          scatter_into(e_elem[l].values[p], idx, gather(phib[l].values[p], idx));
      }
      continue;
    }
    for (const auto& part : certs[t].parts) {
      const int cut = static_cast<int>(part.cutdown.size());
      for (int p = 0; p < e_elem[part.l].points(); ++p) {
        CMatrix slot = CMatrix::Zero(cut, cut);
        slot.block(1, 1, nt - 1, nt - 1) = c_blocks[t];
        slot.bottomRightCorner(cut - nt, cut - nt) = part.b.values[p];
        scatter_into(e_elem[part.l].values[p], part.cutdown, slot);
      }
    }
  }
  double d1 = 0;
  for (int l = 0; l < sys.num_summands(stage_j); ++l) d1 = std::max(d1, sup_norm(d_elem[l] - e_elem[l]));
  trace << "stage-" << (stage_j + 1) << " defect ||D - E|| = " << fmt(d1) << "\n";

  // (5) Advance to a stage M where every summand either has a single-point
  // space or a zero count exceeding every singular block size.
  int num_singular = 0;
  for (int t = 0; t < sys.num_summands(i); ++t)
    if (singular[t]) ++num_singular;

  // Largest singular block size per stage-j summand l, and their in-slot
  // zero/rest positions.
  std::vector<std::vector<std::pair<int, const CornerCertificate::Part*>>> sing_parts(
      sys.num_summands(stage_j));
  for (int t = 0; t < sys.num_summands(i); ++t)
    if (singular[t])
      for (const auto& part : certs[t].parts) sing_parts[part.l].push_back({t, &part});
  std::vector<std::vector<int>> inv_idx(sys.num_summands(stage_j));
  for (int t = 0; t < sys.num_summands(i); ++t)
    if (!singular[t])
      for (int l = 0; l < sys.num_summands(stage_j); ++l)
        inv_idx[l].push_back(t);

  int stage_m = -1;
  std::vector<std::vector<CopyBlock>> layout;
  for (int m = stage_j + 1; m <= horizon && stage_m < 0; ++m) {
    auto cand = copy_layout(sys, stage_j, m);
    bool ok = true;
    for (int s = 0; s < sys.num_summands(m) && ok; ++s) {
      if (sys.summand(m, s).space->size() == 1) continue;  // finite-dimensional target
      long zeros = 0;
      int max_block = 0;
      for (const CopyBlock& blk : cand[s]) {
        zeros += static_cast<long>(sing_parts[blk.l].size());
        for (const auto& [t, part] : sing_parts[blk.l])
          max_block = std::max(max_block, static_cast<int>(part->cutdown.size()) - 1);
      }
      if (zeros <= max_block) ok = false;
    }
    if (ok) {
      stage_m = m;
      layout = std::move(cand);
    }
  }
  if (stage_m < 0)
    throw Error(Errc::HorizonExhausted,
                "no stage within the horizon has large enough multiplicities");
  trace << "advance to stage " << stage_m + 1 << "\n";

  // Unitaries pushed to stage M.
  StageElement u_push = push_forward(sys, i, stage_m, constant_stage_element(sys, i, u_const));
  StageElement v_push = push_forward(sys, i, stage_m, constant_stage_element(sys, i, v_const));
  StageElement w_push = push_forward(sys, stage_j, stage_m, w_elem);
  StageElement e_push = push_forward(sys, stage_j, stage_m, e_elem);

  const double delta_budget = std::max(eps / 2.0 - 2.0 * tol, eps / 4.0);
  InvertibleApproximant res;
  res.stage = stage_m;
  res.margin = std::numeric_limits<double>::infinity();

  for (int s = 0; s < sys.num_summands(stage_m); ++s) {
    const SpacePtr& space = sys.summand(stage_m, s).space;
    const int size = sys.summand(stage_m, s).size;

    if (space->size() == 1) {
      // Finite-dimensional target: floor the singular values directly.
      StageElement pa = push_forward(sys, i, stage_m, a);
      CMatrix z = finite_dim_invertible_approx(pa[s].values[0], eps);
      res.element.push_back(MatrixFunction::constant(space, z));
      trace << "summand " << s + 1 << ": finite-dimensional floor\n";
      continue;
    }

    // Collection order: all per-copy zeros first, then the singular block
    // remainders, then the invertible blocks.
    std::vector<int> coll;
    std::vector<int> sing_sizes;
    for (const CopyBlock& blk : layout[s])
      for (const auto& [t, part] : sing_parts[blk.l]) coll.push_back(blk.offset + part->cutdown[0]);
    const int zeros = static_cast<int>(coll.size());
    for (const CopyBlock& blk : layout[s])
      for (const auto& [t, part] : sing_parts[blk.l]) {
        for (size_t q = 1; q < part->cutdown.size(); ++q)
          coll.push_back(blk.offset + part->cutdown[q]);
        sing_sizes.push_back(static_cast<int>(part->cutdown.size()) - 1);
      }
    const int sing_total = static_cast<int>(coll.size());
    for (const CopyBlock& blk : layout[s])
      for (int t : inv_idx[blk.l]) {
        std::vector<int> idx = cutdown_indices(sys, i, stage_j, t, blk.l);
        for (int q : idx) coll.push_back(blk.offset + q);
      }
    if (static_cast<int>(coll.size()) != size)
      throw Error(Errc::MissingStructure, "collection does not exhaust the summand");

    // Collected = Pi E Pi^T, exactly diag(0_zeros, B_sing..., B_inv...).
    MatrixFunction collected;
    collected.space = space;
    collected.n = size;
    collected.values.reserve(space->size());
    for (int p = 0; p < space->size(); ++p) collected.values.push_back(gather(e_push[s].values[p], coll));

    CornerApproximant part_a;
    part_a.summand = s;
    part_a.offset = 0;
    if (zeros > 0) {
      MatrixFunction lead = collected.block(0, 0, sing_total, sing_total);
      ZeroCornerInvertible zc =
          zero_corner_invertible(lead, BlockStructure{zeros, sing_sizes}, 2.0 * delta_budget);
      part_a.element = std::move(zc.b);
      part_a.distance = zc.delta;
      part_a.margin = invertibility_margin(part_a.element).margin;
      trace << "summand " << s + 1 << ": zero corner " << zeros << " > max block "
            << (sing_sizes.empty() ? 0 : *std::max_element(sing_sizes.begin(), sing_sizes.end()))
            << ", delta " << fmt(zc.delta) << "\n";
    } else {
      part_a.element = MatrixFunction::zero(space, 0);
    }

    CornerApproximant part_b;
    part_b.summand = s;
    part_b.offset = sing_total;
    part_b.element = collected.block(sing_total, sing_total, size - sing_total, size - sing_total);
    part_b.distance = 0;
    part_b.margin =
        part_b.element.n > 0 ? invertibility_margin(part_b.element).margin
                             : std::numeric_limits<double>::infinity();

    CornerApproximant combined = corner_sum_invertible(part_a, part_b);

    // Undo the collection and every conjugation:
    //   Z = U^* W^* Pi^T C Pi W V^*.
    MatrixFunction z;
    z.space = space;
    z.n = size;
    z.values.reserve(space->size());
    for (int p = 0; p < space->size(); ++p) {
      CMatrix un = CMatrix::Zero(size, size);
      scatter_into(un, coll, combined.element.values[p]);
      CMatrix conj = w_push[s].values[p].adjoint() * un * w_push[s].values[p];
      z.values.push_back(u_push[s].values[p].adjoint() * conj * v_push[s].values[p].adjoint());
    }
    res.element.push_back(std::move(z));
  }

  // (7) Independent verification against the raw pushforward.
  StageElement target = push_forward(sys, i, stage_m, a);
  res.distance = 0;
  for (int s = 0; s < sys.num_summands(stage_m); ++s) {
    res.distance = std::max(res.distance, sup_norm(res.element[s] - target[s]));
    res.margin = std::min(res.margin, invertibility_margin(res.element[s]).margin);
  }
  trace << "verified distance " << fmt(res.distance) << " (< " << fmt(eps) << "), margin "
        << fmt(res.margin) << "\n";
  res.trace = trace.str();
  return res;
}

}  // namespace ahcert
