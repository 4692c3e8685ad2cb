#include "ahcert/diagonal_hom.hpp"

#include <algorithm>
#include <map>

namespace ahcert {

EigenvaluePattern::EigenvaluePattern(std::vector<PointMap> maps) : maps_(std::move(maps)) {
  if (maps_.empty()) throw Error(Errc::EmptySet, "eigenvalue pattern must be nonempty");
  for (const auto& m : maps_)
    if (m.domain() != maps_.front().domain() || m.codomain() != maps_.front().codomain())
      throw Error(Errc::SpaceMismatch, "pattern maps must share domain and codomain");
}

Subset ep_preimage(const EigenvaluePattern& pattern, const Subset& u) {
  if (u.space() != pattern.codomain())
    throw Error(Errc::SpaceMismatch, "preimage of a subset of the wrong space");
  Subset acc = Subset::empty(pattern.domain());
  for (const auto& m : pattern.maps()) acc = acc.unite(m.preimage(u));
  return acc;
}

DiagonalHom::DiagonalHom(int source_size, EigenvaluePattern pattern)
    : source_size_(source_size), pattern_(std::move(pattern)) {
  if (source_size_ < 1) throw Error(Errc::SizeMismatch, "source size must be positive");
}

MatrixFunction apply(const DiagonalHom& phi, const MatrixFunction& f) {
  if (f.space != phi.source_space())
    throw Error(Errc::SpaceMismatch, "function does not live on the source space");
  if (f.n != phi.source_size())
    throw Error(Errc::SizeMismatch, "function size does not match the source size");
  const auto& y = phi.target_space();
  const int m = phi.source_size();
  const int n = phi.multiplicity();
  MatrixFunction out;
  out.space = y;
  out.n = n * m;
  out.values.assign(y->size(), CMatrix::Zero(out.n, out.n));
  for (int p = 0; p < y->size(); ++p)
    for (int i = 0; i < n; ++i)
      out.values[p].block(i * m, i * m, m, m) = f.values[phi.pattern().map(i)(p)];
  return out;
}

ComposedHom compose(const DiagonalHom& later, const DiagonalHom& earlier) {
  if (later.source_space() != earlier.target_space())
    throw Error(Errc::ChainMismatch, "homomorphisms do not chain (spaces)");
  if (later.source_size() != earlier.target_size())
    throw Error(Errc::ChainMismatch, "homomorphisms do not chain (sizes)");
  std::vector<PointMap> maps;
  maps.reserve(static_cast<size_t>(later.multiplicity()) * earlier.multiplicity());
  for (const auto& mu : later.pattern().maps())
    for (const auto& lambda : earlier.pattern().maps())
      maps.push_back(lambda.after(mu));
  ComposedHom out{DiagonalHom(earlier.source_size(), EigenvaluePattern(std::move(maps))),
                  Permutation::identity(later.multiplicity() * earlier.multiplicity())};
  return out;
}

Permutation tensor_intertwiner(int n, int m) {
  if (n < 1 || m < 1) throw Error(Errc::BadIndices, "tensor_intertwiner needs n, m >= 1");
  std::vector<int> images(static_cast<size_t>(n) * m);
  for (int a = 0; a < n * m; ++a) images[a] = (a % n) * m + a / n;
  return Permutation(std::move(images));
}

MatrixFunction tensor_form(const DiagonalHom& phi, const MatrixFunction& f) {
  if (f.space != phi.source_space())
    throw Error(Errc::SpaceMismatch, "function does not live on the source space");
  if (f.n != phi.source_size())
    throw Error(Errc::SizeMismatch, "function size does not match the source size");
  const auto& y = phi.target_space();
  const int m = phi.source_size();
  const int n = phi.multiplicity();
  MatrixFunction out;
  out.space = y;
  out.n = n * m;
  out.values.assign(y->size(), CMatrix::Zero(out.n, out.n));
  for (int p = 0; p < y->size(); ++p)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int i = 0; i < n; ++i)
          out.values[p](a * n + i, b * n + i) = f.values[phi.pattern().map(i)(p)](a, b);
  return out;
}

// ---------------------------------------------------------------------------

BondingMap::BondingMap(int from_stage, int num_source, int num_target)
    : from_stage_(from_stage), num_source_(num_source), num_target_(num_target) {
  partial_.assign(num_source_, std::vector<std::optional<DiagonalHom>>(num_target_));
}

StageElement stage_identity(const AHSystem& sys, int i) {
  StageElement x;
  for (const auto& s : sys.stages[i]) x.push_back(MatrixFunction::identity(s.space, s.size));
  return x;
}

StageElement bond_apply(const AHSystem& sys, int i, const StageElement& x) {
  if (i < 0 || i + 1 >= sys.num_stages())
    throw Error(Errc::BadIndices, "bond index out of range");
  if (static_cast<int>(x.size()) != sys.num_summands(i))
    throw Error(Errc::SizeMismatch, "stage element has the wrong number of summands");
  const BondingMap& bond = sys.bonds[i];
  StageElement out;
  for (int l = 0; l < sys.num_summands(i + 1); ++l) {
    std::vector<MatrixFunction> blocks;
    for (int t = 0; t < sys.num_summands(i); ++t)
      if (bond.partial(t, l)) blocks.push_back(apply(*bond.partial(t, l), x[t]));
    MatrixFunction assembled = assemble_block_diag(blocks);
    if (assembled.n != sys.summand(i + 1, l).size)
      throw Error(Errc::SizeMismatch, "bond is not unital into summand " + std::to_string(l + 1));
    out.push_back(std::move(assembled));
  }
  return out;
}

StageElement push_forward(const AHSystem& sys, int i, int j, const StageElement& x) {
  if (i > j) throw Error(Errc::BadIndices, "cannot push backwards");
  StageElement cur = x;
  for (int p = i; p < j; ++p) cur = bond_apply(sys, p, cur);
  return cur;
}

std::optional<DiagonalHom> system_compose(const AHSystem& sys, int i, int j, int t, int l) {
  if (i < 0 || j >= sys.num_stages() || i >= j || t < 0 || t >= sys.num_summands(i) ||
      l < 0 || l >= sys.num_summands(j))
    throw Error(Errc::BadIndices, "system_compose indices out of range");

  // cur[s]: for stage p, the eigenvalue pattern of the composite from (i,t)
  // into summand s, enumerated in stepwise block order.
  std::vector<std::optional<std::vector<PointMap>>> cur(sys.num_summands(i));
  const auto& xit = sys.summand(i, t).space;
  cur[t] = std::vector<PointMap>{PointMap::identity(xit, xit)};

  for (int p = i + 1; p <= j; ++p) {
    const BondingMap& bond = sys.bonds[p - 1];
    std::vector<std::optional<std::vector<PointMap>>> next(sys.num_summands(p));
    for (int lp = 0; lp < sys.num_summands(p); ++lp) {
      std::vector<PointMap> acc;
      for (int s = 0; s < sys.num_summands(p - 1); ++s) {
        if (!cur[s] || !bond.partial(s, lp)) continue;
        for (const auto& mu : bond.partial(s, lp)->pattern().maps())
          for (const auto& lambda : *cur[s]) acc.push_back(lambda.after(mu));
      }
      if (!acc.empty()) next[lp] = std::move(acc);
    }
    cur = std::move(next);
  }

  if (!cur[l]) return std::nullopt;
  return DiagonalHom(sys.summand(i, t).size, EigenvaluePattern(std::move(*cur[l])));
}

std::vector<int> cutdown_indices(const AHSystem& sys, int i, int j, int t, int l) {
  if (i < 0 || j >= sys.num_stages() || i > j || t < 0 || t >= sys.num_summands(i) ||
      l < 0 || l >= sys.num_summands(j))
    throw Error(Errc::BadIndices, "cutdown indices out of range");

  // Per summand: the list of (origin summand at stage i, block size) in
  // stepwise block order.
  using BlockList = std::vector<std::pair<int, int>>;
  std::vector<BlockList> cur(sys.num_summands(i));
  for (int s = 0; s < sys.num_summands(i); ++s)
    cur[s] = BlockList{{s, sys.summand(i, s).size}};

  for (int p = i + 1; p <= j; ++p) {
    const BondingMap& bond = sys.bonds[p - 1];
    std::vector<BlockList> next(sys.num_summands(p));
    for (int lp = 0; lp < sys.num_summands(p); ++lp)
      for (int s = 0; s < sys.num_summands(p - 1); ++s)
        if (bond.partial(s, lp))
          for (int c = 0; c < bond.partial(s, lp)->multiplicity(); ++c)
            next[lp].insert(next[lp].end(), cur[s].begin(), cur[s].end());
    cur = std::move(next);
  }

  std::vector<int> out;
  int off = 0;
  for (const auto& [origin, size] : cur[l]) {
    if (origin == t)
      for (int r = 0; r < size; ++r) out.push_back(off + r);
    off += size;
  }
  return out;
}

namespace {

SpacePtr subspace(const SpacePtr& space, const std::vector<int>& keep) {
  std::vector<std::string> labels;
  std::vector<double> coords;
  for (int p : keep) {
    labels.push_back(space->label(p));
    if (space->has_coords()) coords.push_back(space->coord(p));
  }
  Eigen::MatrixXd dist(keep.size(), keep.size());
  for (size_t a = 0; a < keep.size(); ++a)
    for (size_t b = 0; b < keep.size(); ++b) dist(a, b) = space->dist(keep[a], keep[b]);
  return FiniteMetricSpace::make(space->name() + "~", std::move(labels), std::move(dist),
                                 std::move(coords));
}

}  // namespace

AHSystem injectivize(const AHSystem& sys, int horizon) {
  if (horizon < 0 || horizon >= sys.num_stages())
    throw Error(Errc::BadIndices, "horizon outside the system");

  // Retained (old) point indices per (stage, summand).
  std::vector<std::vector<std::vector<int>>> keep(sys.num_stages());
  for (int i = 0; i < sys.num_stages(); ++i) {
    keep[i].resize(sys.num_summands(i));
    for (int t = 0; t < sys.num_summands(i); ++t) {
      const auto& space = sys.summand(i, t).space;
      if (i >= horizon) {
        keep[i][t] = Subset::whole(space).members();
        continue;
      }
      Subset inter = Subset::whole(space);
      for (int j = i + 1; j <= horizon; ++j) {
        Subset un = Subset::empty(space);
        for (int l = 0; l < sys.num_summands(j); ++l) {
          auto comp = system_compose(sys, i, j, t, l);
          if (!comp) continue;
          for (const auto& lambda : comp->pattern().maps()) un = un.unite(lambda.image());
        }
        inter = inter.intersect(un);
      }
      if (inter.is_empty())
        throw Error(Errc::ValidationError,
                    "summand (" + std::to_string(i + 1) + "," + std::to_string(t + 1) +
                        ") has empty horizon image");
      keep[i][t] = inter.members();
    }
  }

  AHSystem out;
  out.name = sys.name.empty() ? "injectivized" : sys.name + "-injectivized";
  out.horizon_approximate = true;
  out.horizon_tag = horizon;

  std::vector<std::vector<SpacePtr>> new_space(sys.num_stages());
  std::vector<std::vector<std::vector<int>>> remap(sys.num_stages());  // old index -> new
  out.stages.resize(sys.num_stages());
  for (int i = 0; i < sys.num_stages(); ++i) {
    new_space[i].resize(sys.num_summands(i));
    remap[i].resize(sys.num_summands(i));
    for (int t = 0; t < sys.num_summands(i); ++t) {
      const auto& space = sys.summand(i, t).space;
      new_space[i][t] = (static_cast<int>(keep[i][t].size()) == space->size())
                            ? space
                            : subspace(space, keep[i][t]);
      remap[i][t].assign(space->size(), -1);
      for (size_t k = 0; k < keep[i][t].size(); ++k) remap[i][t][keep[i][t][k]] = static_cast<int>(k);
      out.stages[i].push_back({sys.summand(i, t).size, new_space[i][t]});
    }
  }

  for (int i = 0; i + 1 < sys.num_stages(); ++i) {
    BondingMap bond(i, sys.num_summands(i), sys.num_summands(i + 1));
    for (int t = 0; t < sys.num_summands(i); ++t)
      for (int l = 0; l < sys.num_summands(i + 1); ++l) {
        const auto& old = sys.bonds[i].partial(t, l);
        if (!old) continue;
        std::vector<PointMap> maps;
        for (const auto& lambda : old->pattern().maps()) {
          std::vector<int> table(keep[i + 1][l].size());
          for (size_t y = 0; y < keep[i + 1][l].size(); ++y) {
            int image = remap[i][t][lambda(keep[i + 1][l][y])];
            if (image < 0)
              throw Error(Errc::ValidationError, "restricted eigenvalue map leaves the horizon image");
            table[y] = image;
          }
          maps.emplace_back(new_space[i + 1][l], new_space[i][t], std::move(table));
        }
        bond.set_partial(t, l, DiagonalHom(old->source_size(), EigenvaluePattern(std::move(maps))));
      }
    out.bonds.push_back(std::move(bond));
  }
  return out;
}

std::vector<std::string> validate(const AHSystem& sys) {
  std::vector<std::string> out;
  auto fail = [&](const std::string& s) { out.push_back(s); };

  if (sys.num_stages() == 0) {
    fail("system has no stages");
    return out;
  }
  if (static_cast<int>(sys.bonds.size()) != sys.num_stages() - 1)
    fail("expected one bond per consecutive stage pair");

  std::vector<SpacePtr> seen;
  for (int i = 0; i < sys.num_stages(); ++i) {
    if (sys.num_summands(i) == 0) fail("stage " + std::to_string(i + 1) + " has no summands");
    for (int t = 0; t < sys.num_summands(i); ++t) {
      const auto& s = sys.summand(i, t);
      if (s.size < 1)
        fail("summand (" + std::to_string(i + 1) + "," + std::to_string(t + 1) + ") has size < 1");
      if (std::find(seen.begin(), seen.end(), s.space) == seen.end()) {
        seen.push_back(s.space);
        for (auto& v : s.space->check_axioms()) fail(v);
      }
    }
  }

  for (size_t b = 0; b < sys.bonds.size(); ++b) {
    const int i = static_cast<int>(b);
    if (i + 1 >= sys.num_stages()) break;
    const BondingMap& bond = sys.bonds[b];
    if (bond.sources() != sys.num_summands(i) || bond.targets() != sys.num_summands(i + 1)) {
      fail("bond " + std::to_string(i + 1) + " has the wrong summand counts");
      continue;
    }
    for (int l = 0; l < sys.num_summands(i + 1); ++l) {
      int total = 0;
      for (int t = 0; t < sys.num_summands(i); ++t) {
        const auto& part = bond.partial(t, l);
        if (!part) continue;
        if (part->source_size() != sys.summand(i, t).size)
          fail("bond " + std::to_string(i + 1) + " partial (" + std::to_string(t + 1) + "," +
               std::to_string(l + 1) + ") has the wrong source size");
        if (part->source_space() != sys.summand(i, t).space)
          fail("bond " + std::to_string(i + 1) + " partial (" + std::to_string(t + 1) + "," +
               std::to_string(l + 1) + ") has the wrong source space");
        if (part->target_space() != sys.summand(i + 1, l).space)
          fail("bond " + std::to_string(i + 1) + " partial (" + std::to_string(t + 1) + "," +
               std::to_string(l + 1) + ") has the wrong target space");
        total += part->source_size() * part->multiplicity();
      }
      if (total != sys.summand(i + 1, l).size)
        fail("bond " + std::to_string(i + 1) + " is not unital into summand " +
             std::to_string(l + 1) + ": blocks sum to " + std::to_string(total) + ", size is " +
             std::to_string(sys.summand(i + 1, l).size));
    }
  }
  return out;
}

}  // namespace ahcert
