#include "gx/cellmap.hpp"
#include <algorithm>

namespace gx {

CellularMap CellularMap::of(ComplexPtr src, ComplexPtr tgt, std::vector<int> image) {
  if ((int)image.size() != src->size())
    throw std::invalid_argument("cellular map: image list must cover every cell");
  for (int i = 0; i < src->size(); ++i) {
    int fi = image[(size_t)i];
    if (fi < 0 || fi >= tgt->size())
      throw std::invalid_argument("cellular map: image out of range at " + src->cell(i).name);
    if (tgt->dim_of(fi) > src->dim_of(i))
      throw std::invalid_argument("cellular map: dimension increases at " + src->cell(i).name);
    for (auto& [f, s] : src->facets(i))
      if (!tgt->leq(image[(size_t)f], fi))
        throw std::invalid_argument("cellular map: not order-preserving at " +
                                    src->cell(f).name + " < " + src->cell(i).name);
  }
  CellularMap m;
  m.source = std::move(src);
  m.target = std::move(tgt);
  m.image = std::move(image);
  return m;
}

CellularMap CellularMap::from_vertex_map(ComplexPtr src, ComplexPtr tgt,
                                         const std::vector<int>& vmap) {
  if (!src->simplicial() || !tgt->simplicial())
    throw std::invalid_argument("vertex map: both complexes must be simplicial");
  std::vector<int> image((size_t)src->size(), -1);
  for (int i = 0; i < src->size(); ++i) {
    std::vector<int> iv;
    for (int v : src->cell(i).verts) {
      int vi = vmap[(size_t)v];
      iv.push_back(vi);
    }
    std::sort(iv.begin(), iv.end());
    iv.erase(std::unique(iv.begin(), iv.end()), iv.end());
    int t = tgt->simplex_index(iv);
    if (t < 0)
      throw std::invalid_argument("vertex map: image of " + src->cell(i).name +
                                  " is not a simplex of the target");
    image[(size_t)i] = t;
  }
  CellularMap m = of(std::move(src), std::move(tgt), std::move(image));
  m.vertex_map = vmap;
  return m;
}

CellularMap CellularMap::identity(ComplexPtr K) {
  std::vector<int> image((size_t)K->size());
  for (int i = 0; i < K->size(); ++i) image[(size_t)i] = i;
  CellularMap m;
  m.source = K;
  m.target = K;
  m.image = std::move(image);
  if (K->simplicial()) {
    int maxv = -1;
    for (int i = 0; i < K->size(); ++i)
      for (int v : K->cell(i).verts) maxv = std::max(maxv, v);
    m.vertex_map.resize((size_t)maxv + 1);
    for (int v = 0; v <= maxv; ++v) m.vertex_map[(size_t)v] = v;
  }
  return m;
}

CellularMap compose(const CellularMap& g, const CellularMap& f) {
  if (g.source.get() != f.target.get())
    throw std::invalid_argument("compose: middle complexes differ");
  std::vector<int> image((size_t)f.source->size());
  for (int i = 0; i < f.source->size(); ++i) image[(size_t)i] = g.image[(size_t)f.image[(size_t)i]];
  CellularMap m = CellularMap::of(f.source, g.target, std::move(image));
  if (f.is_simplicial() && g.is_simplicial()) {
    m.vertex_map.resize(f.vertex_map.size());
    for (size_t v = 0; v < f.vertex_map.size(); ++v)
      m.vertex_map[v] = g.vertex_map[(size_t)f.vertex_map[v]];
  }
  return m;
}

Refinement Refinement::of(ComplexPtr fine, ComplexPtr coarse, std::vector<int> carrier) {
  if ((int)carrier.size() != fine->size())
    throw std::invalid_argument("refinement: carrier must cover every cell");
  for (int i = 0; i < fine->size(); ++i) {
    int t = carrier[(size_t)i];
    if (t < 0 || t >= coarse->size())
      throw std::invalid_argument("refinement: carrier out of range at " + fine->cell(i).name);
    if (coarse->dim_of(t) < fine->dim_of(i))
      throw std::invalid_argument("refinement: carrier drops dimension at " +
                                  fine->cell(i).name);
    for (auto& [f, s] : fine->facets(i)) {
      (void)s;
      if (!coarse->leq(carrier[(size_t)f], t))
        throw std::invalid_argument("refinement: carrier not order-preserving at " +
                                    fine->cell(f).name + " < " + fine->cell(i).name);
    }
  }
  Refinement r;
  r.fine = std::move(fine);
  r.coarse = std::move(coarse);
  r.carrier = std::move(carrier);
  return r;
}

Refinement Refinement::identity(ComplexPtr K) {
  std::vector<int> carrier((size_t)K->size());
  for (int i = 0; i < K->size(); ++i) carrier[(size_t)i] = i;
  Refinement r;
  r.fine = K;
  r.coarse = K;
  r.carrier = std::move(carrier);
  return r;
}

Refinement compose(const Refinement& outer, const Refinement& inner) {
  if (inner.coarse.get() != outer.fine.get())
    throw std::invalid_argument("refinement composition: middle complexes differ");
  std::vector<int> carrier((size_t)inner.fine->size());
  for (int i = 0; i < inner.fine->size(); ++i)
    carrier[(size_t)i] = outer.carrier[(size_t)inner.carrier[(size_t)i]];
  Refinement r;
  r.fine = inner.fine;
  r.coarse = outer.coarse;
  r.carrier = std::move(carrier);
  return r;
}

Bitset preimage(const CellularMap& f, const Bitset& target_set) {
  Bitset b((size_t)f.source->size());
  for (int i = 0; i < f.source->size(); ++i)
    if (target_set.get((size_t)f.image[(size_t)i])) b.set((size_t)i);
  return b;
}

CellularMap through_refinement(const CellularMap& f, const Refinement& r) {
  if (r.coarse != f.source)
    throw std::invalid_argument("through_refinement: refinement must subdivide the map's source");
  std::vector<int> img((size_t)r.fine->size());
  for (int c = 0; c < r.fine->size(); ++c)
    img[(size_t)c] = f.image[(size_t)r.carrier[(size_t)c]];
  return CellularMap::of(r.fine, f.target, std::move(img));
}

bool is_iso_over(const CellularMap& f, const Bitset& U) {
  if (!f.target->is_up_closed(U)) throw std::invalid_argument("is_iso_over: U must be open");
  Bitset pre = preimage(f, U);
  std::vector<int> inv((size_t)f.target->size(), -1);
  for (int i : pre.to_list()) {
    int t = f.image[(size_t)i];
    if (f.source->dim_of(i) != f.target->dim_of(t)) return false;
    if (inv[(size_t)t] != -1) return false; // two cells over one
    inv[(size_t)t] = i;
  }
  for (int t : U.to_list())
    if (inv[(size_t)t] < 0) return false;
  // the inverse bijection must also be order-preserving: covering pairs inside
  // U lift to comparable cells
  for (int t : U.to_list())
    for (auto& [face, sg] : f.target->facets(t))
      if (U.get((size_t)face) && !f.source->leq(inv[(size_t)face], inv[(size_t)t])) return false;
  return true;
}

std::vector<Matrix> chain_maps(const CellularMap& f, const Coeffs& R) {
  const CellComplex& X = *f.source;
  const CellComplex& Y = *f.target;
  int top = X.dim();
  std::vector<Matrix> M;
  std::vector<std::map<int, int>> ypos((size_t)std::max(top, Y.dim()) + 1);
  for (int d = 0; d < (int)ypos.size(); ++d) {
    const auto& yc = Y.cells_of_dim(d);
    for (size_t j = 0; j < yc.size(); ++j) ypos[(size_t)d][yc[(size_t)j]] = (int)j;
  }
  for (int d = 0; d <= top; ++d) {
    const auto& xc = X.cells_of_dim(d);
    const auto& yc = Y.cells_of_dim(d);
    Matrix Md(R, (int)yc.size(), (int)xc.size());
    for (size_t j = 0; j < xc.size(); ++j) {
      int sigma = xc[j];
      int tau = f.image[(size_t)sigma];
      if (Y.dim_of(tau) < d) continue; // collapsed cell, coefficient zero
      if (d == 0) {
        Md.at(ypos[0].at(tau), (int)j) = R.one();
        continue;
      }
      // coefficient on tau forced by commutation with the boundary:
      // d(c*tau) = f_#(d sigma)
      std::map<int, Scalar> rhs; // on (d-1)-cells of Y
      for (auto& [face, s] : X.facets(sigma)) {
        int yface = f.image[(size_t)face];
        if (Y.dim_of(yface) < d - 1) continue;
        int col = 0;
        // find the column of `face` in M[d-1]
        const auto& xprev = X.cells_of_dim(d - 1);
        auto it = std::lower_bound(xprev.begin(), xprev.end(), face);
        col = (int)(it - xprev.begin());
        const Scalar& c = M[(size_t)d - 1].at(ypos[(size_t)d - 1].at(yface), col);
        if (R.is_zero(c)) continue;
        Scalar add = R.mul(R.from_int(s), c);
        auto [pos, fresh] = rhs.emplace(yface, add);
        if (!fresh) pos->second = R.add(pos->second, add);
      }
      // drop cancelled entries
      for (auto it = rhs.begin(); it != rhs.end();) {
        if (R.is_zero(it->second))
          it = rhs.erase(it);
        else
          ++it;
      }
      std::optional<Scalar> coeff;
      if (rhs.empty()) {
        coeff = R.zero();
      } else {
        // read c off one boundary entry of tau, then verify all of them
        std::map<int, Scalar> dtau;
        for (auto& [face, s] : Y.facets(tau)) dtau[face] = R.from_int(s);
        auto pick = rhs.begin();
        auto dt = dtau.find(pick->first);
        if (dt == dtau.end())
          throw std::invalid_argument("chain map does not exist: boundary image of " +
                                      X.cell(sigma).name + " leaves the image cell");
        coeff = R.div(pick->second, dt->second);
        for (auto& [face, s] : dtau) {
          Scalar want = R.mul(*coeff, s);
          auto rit = rhs.find(face);
          Scalar have = rit == rhs.end() ? R.zero() : rit->second;
          if (!R.eq(want, have))
            throw std::invalid_argument("chain map does not exist at " + X.cell(sigma).name);
        }
        for (auto& [face, v] : rhs)
          if (!dtau.count(face))
            throw std::invalid_argument("chain map does not exist at " + X.cell(sigma).name);
      }
      Md.at(ypos[(size_t)d].at(tau), (int)j) = *coeff;
    }
    M.push_back(std::move(Md));
  }
  return M;
}

} // namespace gx
