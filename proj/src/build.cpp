#include "gx/build.hpp"
#include <algorithm>

namespace gx {

namespace {

int max_vertex(const CellComplex& K) {
  int m = -1;
  for (int i = 0; i < K.size(); ++i)
    for (int v : K.cell(i).verts) m = std::max(m, v);
  return m;
}

std::vector<std::vector<int>> all_vert_lists(const CellComplex& K) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < K.size(); ++i) out.push_back(K.cell(i).verts);
  return out;
}

void require_simplicial(const CellComplex& K, const char* what) {
  if (K.size() > 0 && !K.simplicial())
    throw std::invalid_argument(std::string(what) + ": complex must be simplicial");
}

void check_face_consistent(const CellComplex& K, const char* what) {
  for (int i = 0; i < K.size(); ++i) {
    const auto& verts = K.cell(i).verts;
    if (verts.size() < 2) continue;
    for (size_t drop = 0; drop < verts.size(); ++drop) {
      std::vector<int> induced;
      for (size_t j = 0; j < verts.size(); ++j)
        if (j != drop) induced.push_back(verts[j]);
      int f = K.simplex_index(induced);
      if (f < 0 || K.cell(f).verts != induced)
        throw std::invalid_argument(std::string(what) +
                                    ": vertex orders are not face-consistent at " +
                                    K.cell(i).name);
    }
  }
}

// Extract dimension-gap-one covering pairs from explicit down-sets.
std::vector<std::pair<int, int>> covering_from_downsets(const std::vector<int>& dims,
                                                        const std::vector<Bitset>& down) {
  std::vector<std::pair<int, int>> cov;
  for (size_t y = 0; y < down.size(); ++y)
    for (int x : down[y].to_list())
      if (dims[(size_t)x] == dims[y] - 1) cov.push_back({x, (int)y});
  return cov;
}

} // namespace

ComplexPtr point_complex() {
  return std::make_shared<CellComplex>(CellComplex::from_simplices({{0}}));
}

ComplexPtr simplex_complex(int n) {
  if (n < 0) throw std::invalid_argument("simplex: dimension must be nonnegative");
  std::vector<int> v((size_t)n + 1);
  for (int i = 0; i <= n; ++i) v[(size_t)i] = i;
  return std::make_shared<CellComplex>(CellComplex::from_simplices({v}));
}

ComplexPtr sphere_complex(int n) {
  if (n < 0) throw std::invalid_argument("sphere: dimension must be nonnegative");
  std::vector<std::vector<int>> tops;
  for (unsigned mask = 0; mask < (1u << (n + 1)); ++mask) {
    std::vector<int> v;
    for (int i = 0; i <= n; ++i) v.push_back(2 * i + (int)((mask >> i) & 1));
    tops.push_back(std::move(v));
  }
  return std::make_shared<CellComplex>(CellComplex::from_simplices(tops));
}

ComplexPtr circle_complex(int m) {
  if (m < 3) throw std::invalid_argument("circle: need at least 3 vertices");
  std::vector<std::vector<int>> edges;
  for (int j = 0; j < m; ++j) edges.push_back({j, (j + 1) % m});
  return std::make_shared<CellComplex>(CellComplex::from_simplices(edges));
}

ConeResult cone(ComplexPtr K) {
  require_simplicial(*K, "cone");
  ConeResult res;
  int apex = max_vertex(*K) + 1;
  std::vector<std::vector<int>> simp = all_vert_lists(*K);
  for (int i = 0; i < K->size(); ++i) {
    std::vector<int> v = K->cell(i).verts;
    v.push_back(apex);
    simp.push_back(std::move(v));
  }
  simp.push_back({apex});
  res.complex = std::make_shared<CellComplex>(CellComplex::from_simplices(simp));
  res.interval = std::make_shared<CellComplex>(CellComplex::from_simplices({{0, 1}}));
  res.apex_vertex = apex;
  res.apex_cell = res.complex->cell_by_name(std::to_string(apex));
  std::vector<int> collapse_vmap((size_t)apex + 1, 0);
  collapse_vmap[(size_t)apex] = 1;
  res.collapse = CellularMap::from_vertex_map(res.complex, res.interval, collapse_vmap);
  if (K->size() > 0) {
    std::vector<int> idmap((size_t)apex, 0);
    for (int v = 0; v < apex; ++v) idmap[(size_t)v] = v;
    res.incl_base = CellularMap::from_vertex_map(K, res.complex, idmap);
  } else {
    res.incl_base = CellularMap::of(K, res.complex, {});
  }
  return res;
}

SuspensionResult suspension(ComplexPtr K) {
  require_simplicial(*K, "suspension");
  if (K->size() == 0) throw std::invalid_argument("suspension: empty complex");
  SuspensionResult res;
  int north = max_vertex(*K) + 1, south = north + 1;
  std::vector<std::vector<int>> simp = all_vert_lists(*K);
  for (int pole : {north, south}) {
    for (int i = 0; i < K->size(); ++i) {
      std::vector<int> v = K->cell(i).verts;
      v.push_back(pole);
      simp.push_back(std::move(v));
    }
    simp.push_back({pole});
  }
  res.complex = std::make_shared<CellComplex>(CellComplex::from_simplices(simp));
  res.north_vertex = north;
  res.south_vertex = south;
  res.north_cell = res.complex->cell_by_name(std::to_string(north));
  res.south_cell = res.complex->cell_by_name(std::to_string(south));
  std::vector<int> idmap((size_t)north, 0);
  for (int v = 0; v < north; ++v) idmap[(size_t)v] = v;
  res.incl_base = CellularMap::from_vertex_map(K, res.complex, idmap);
  return res;
}

ProductResult product(ComplexPtr K, ComplexPtr L) {
  require_simplicial(*K, "product");
  require_simplicial(*L, "product");
  check_face_consistent(*K, "product");
  check_face_consistent(*L, "product");
  ProductResult res;
  int stride = max_vertex(*L) + 1;
  res.stride = stride;
  std::vector<std::vector<int>> tops;
  std::vector<int> kmax, lmax;
  for (int i = 0; i < K->size(); ++i)
    if (K->cofacets(i).empty()) kmax.push_back(i);
  for (int i = 0; i < L->size(); ++i)
    if (L->cofacets(i).empty()) lmax.push_back(i);
  for (int a : kmax)
    for (int b : lmax) {
      const auto& u = K->cell(a).verts;
      const auto& v = L->cell(b).verts;
      int p = (int)u.size() - 1, q = (int)v.size() - 1;
      // staircase paths through the (p+1) x (q+1) grid
      std::vector<int> path;
      auto walk = [&](auto&& self, int i, int j) -> void {
        path.push_back(u[(size_t)i] * stride + v[(size_t)j]);
        if (i == p && j == q)
          tops.push_back(path);
        else {
          if (i < p) self(self, i + 1, j);
          if (j < q) self(self, i, j + 1);
        }
        path.pop_back();
      };
      walk(walk, 0, 0);
    }
  res.complex = std::make_shared<CellComplex>(CellComplex::from_simplices(tops));
  int kv = max_vertex(*K) + 1;
  std::vector<int> vm1((size_t)kv * stride, 0), vm2((size_t)kv * stride, 0);
  for (int a = 0; a < kv; ++a)
    for (int b = 0; b < stride; ++b) {
      vm1[(size_t)(a * stride + b)] = a;
      vm2[(size_t)(a * stride + b)] = b;
    }
  res.proj1 = CellularMap::from_vertex_map(res.complex, K, vm1);
  res.proj2 = CellularMap::from_vertex_map(res.complex, L, vm2);
  return res;
}

SubdivisionResult barycentric(ComplexPtr K) {
  require_simplicial(*K, "barycentric");
  OrderComplexResult oc = order_complex(*K, K->all_cells());
  SubdivisionResult res;
  res.complex = std::make_shared<CellComplex>(std::move(oc.complex));
  res.vertex_cell = oc.vertex_cell;
  res.carrier = Refinement::of(res.complex, K, oc.carrier);
  return res;
}

SubdivisionResult relative_subdivision(ComplexPtr K, const Bitset& S) {
  if (!K->is_down_closed(S))
    throw std::invalid_argument("relative subdivision: S must be down-closed");
  // New cells: cells outside S unchanged, then chains inside S.
  std::vector<int> outside;
  for (int i = 0; i < K->size(); ++i)
    if (!S.get((size_t)i)) outside.push_back(i);
  std::vector<std::vector<int>> chains;
  {
    std::vector<int> elems = S.to_list();
    std::vector<int> cur;
    auto extend = [&](auto&& self, int last) -> void {
      chains.push_back(cur);
      for (int e : elems) {
        if (e == last || !K->leq(last, e)) continue;
        cur.push_back(e);
        self(self, e);
        cur.pop_back();
      }
    };
    for (int e : elems) {
      cur = {e};
      extend(extend, e);
    }
  }
  int n_out = (int)outside.size(), n_ch = (int)chains.size();
  int n = n_out + n_ch;
  std::vector<Cell> cells((size_t)n);
  std::vector<int> dims((size_t)n);
  std::vector<int> carrier((size_t)n);
  for (int i = 0; i < n_out; ++i) {
    const Cell& c = K->cell(outside[(size_t)i]);
    cells[(size_t)i] = Cell{c.name, c.dim, {}};
    dims[(size_t)i] = c.dim;
    carrier[(size_t)i] = outside[(size_t)i];
  }
  for (int i = 0; i < n_ch; ++i) {
    const auto& ch = chains[(size_t)i];
    // name by cell indices; original names may contain any separator
    std::string nm = "c";
    for (int e : ch) nm += (e == ch.front() ? "" : ".") + std::to_string(e);
    cells[(size_t)(n_out + i)] = Cell{nm, (int)ch.size() - 1, {}};
    dims[(size_t)(n_out + i)] = (int)ch.size() - 1;
    carrier[(size_t)(n_out + i)] = ch.back();
  }
  // intended face order, as down-sets over the new cells
  std::vector<Bitset> down((size_t)n, Bitset((size_t)n));
  for (int i = 0; i < n_out; ++i) {
    Bitset b((size_t)n);
    int old = outside[(size_t)i];
    for (int j = 0; j < n_out; ++j)
      if (K->leq(outside[(size_t)j], old)) b.set((size_t)j);
    for (int j = 0; j < n_ch; ++j) {
      bool under = true;
      for (int e : chains[(size_t)j])
        if (!K->leq(e, old)) { under = false; break; }
      if (under) b.set((size_t)(n_out + j));
    }
    down[(size_t)i] = b;
  }
  for (int i = 0; i < n_ch; ++i) {
    Bitset b((size_t)n);
    for (int j = 0; j < n_ch; ++j)
      if (std::includes(chains[(size_t)i].begin(), chains[(size_t)i].end(),
                        chains[(size_t)j].begin(), chains[(size_t)j].end()))
        b.set((size_t)(n_out + j));
    down[(size_t)(n_out + i)] = b;
  }
  auto cov = covering_from_downsets(dims, down);
  SubdivisionResult res;
  res.complex = std::make_shared<CellComplex>(CellComplex::regular_cw(std::move(cells), cov));
  res.vertex_cell.assign((size_t)res.complex->size(), -1);
  for (int i = 0; i < res.complex->size(); ++i)
    if (res.complex->dim_of(i) == 0) res.vertex_cell[(size_t)i] = carrier[(size_t)i];
  res.carrier = Refinement::of(res.complex, K, std::move(carrier));
  return res;
}

CylinderResult mapping_cylinder(const CellularMap& phi) {
  if (!phi.is_simplicial())
    throw std::invalid_argument("mapping cylinder: the map must be simplicial");
  const CellComplex& A = *phi.source;
  const CellComplex& B = *phi.target;
  if (A.size() == 0) throw std::invalid_argument("mapping cylinder: empty source");
  int nb = B.size(), na = A.size();
  int n = nb + 2 * na;
  auto bid = [&](int beta) { return beta; };
  auto aid = [&](int sigma) { return nb + sigma; };
  auto rid = [&](int sigma) { return nb + na + sigma; };
  std::vector<Cell> cells((size_t)n);
  std::vector<int> dims((size_t)n);
  for (int b = 0; b < nb; ++b) {
    cells[(size_t)bid(b)] = Cell{"B:" + B.cell(b).name, B.dim_of(b), {}};
    dims[(size_t)bid(b)] = B.dim_of(b);
  }
  for (int a = 0; a < na; ++a) {
    cells[(size_t)aid(a)] = Cell{"A:" + A.cell(a).name, A.dim_of(a), {}};
    dims[(size_t)aid(a)] = A.dim_of(a);
    cells[(size_t)rid(a)] = Cell{"R:" + A.cell(a).name, A.dim_of(a) + 1, {}};
    dims[(size_t)rid(a)] = A.dim_of(a) + 1;
  }
  std::vector<Bitset> down((size_t)n, Bitset((size_t)n));
  for (int b = 0; b < nb; ++b) {
    Bitset s((size_t)n);
    for (int x : B.down_set(b).to_list()) s.set((size_t)bid(x));
    down[(size_t)bid(b)] = s;
  }
  for (int a = 0; a < na; ++a) {
    Bitset s((size_t)n);
    for (int x : A.down_set(a).to_list()) s.set((size_t)aid(x));
    down[(size_t)aid(a)] = s;
    Bitset r((size_t)n);
    for (int x : A.down_set(a).to_list()) {
      r.set((size_t)aid(x));
      r.set((size_t)rid(x));
    }
    for (int x : B.down_set(phi.image[(size_t)a]).to_list()) r.set((size_t)bid(x));
    down[(size_t)rid(a)] = r;
  }
  auto cov = covering_from_downsets(dims, down);
  CylinderResult res;
  res.complex = std::make_shared<CellComplex>(CellComplex::regular_cw(std::move(cells), cov));
  {
    std::vector<int> img((size_t)na);
    for (int a = 0; a < na; ++a) img[(size_t)a] = aid(a);
    res.incl_source = CellularMap::of(phi.source, res.complex, img);
  }
  {
    std::vector<int> img((size_t)nb);
    for (int b = 0; b < nb; ++b) img[(size_t)b] = bid(b);
    res.incl_target = CellularMap::of(phi.target, res.complex, img);
  }
  {
    std::vector<int> img((size_t)n);
    for (int b = 0; b < nb; ++b) img[(size_t)bid(b)] = b;
    for (int a = 0; a < na; ++a) {
      img[(size_t)aid(a)] = phi.image[(size_t)a];
      img[(size_t)rid(a)] = phi.image[(size_t)a];
    }
    res.retraction = CellularMap::of(res.complex, phi.target, img);
  }
  res.cone_source = cone(phi.source);
  {
    const CellComplex& C = *res.cone_source.complex;
    int apex = res.cone_source.apex_vertex;
    std::vector<int> img((size_t)n);
    for (int b = 0; b < nb; ++b) img[(size_t)bid(b)] = res.cone_source.apex_cell;
    for (int a = 0; a < na; ++a) {
      img[(size_t)aid(a)] = C.simplex_index(A.cell(a).verts);
      std::vector<int> joined = A.cell(a).verts;
      joined.push_back(apex);
      img[(size_t)rid(a)] = C.simplex_index(joined);
    }
    res.to_cone = CellularMap::of(res.complex, res.cone_source.complex, img);
  }
  return res;
}

QuotientResult quotient_by_involution(ComplexPtr K, const std::vector<int>& tau) {
  require_simplicial(*K, "quotient");
  int nv = max_vertex(*K) + 1;
  if ((int)tau.size() < nv)
    throw std::invalid_argument("quotient: involution does not cover all vertices");
  for (int i = 0; i < K->size(); ++i) {
    if (K->dim_of(i) != 0) continue;
    int v = K->cell(i).verts[0];
    if (tau[(size_t)v] == v)
      throw std::invalid_argument("quotient: fixed vertex " + std::to_string(v));
    if (tau[(size_t)tau[(size_t)v]] != v)
      throw std::invalid_argument("quotient: not an involution at vertex " + std::to_string(v));
  }
  // the involution must be a simplicial automorphism that is free on cells and
  // never identifies two vertices of one simplex
  for (int i = 0; i < K->size(); ++i) {
    std::vector<int> img;
    for (int v : K->cell(i).verts) img.push_back(tau[(size_t)v]);
    std::vector<int> sorted_img = img;
    std::sort(sorted_img.begin(), sorted_img.end());
    if (std::adjacent_find(sorted_img.begin(), sorted_img.end()) != sorted_img.end())
      throw std::invalid_argument("quotient: involution collapses simplex " + K->cell(i).name);
    if (K->simplex_index(sorted_img) < 0)
      throw std::invalid_argument("quotient: involution is not simplicial on " + K->cell(i).name);
    std::vector<int> self_sorted = K->cell(i).verts;
    std::sort(self_sorted.begin(), self_sorted.end());
    if (self_sorted == sorted_img)
      throw std::invalid_argument("quotient: involution fixes cell " + K->cell(i).name);
    for (int v : K->cell(i).verts)
      for (int w : K->cell(i).verts)
        if (w == tau[(size_t)v])
          throw std::invalid_argument("quotient: simplex " + K->cell(i).name +
                                      " meets an orbit twice");
  }
  // orbit numbering by smallest member
  std::vector<int> orbit((size_t)nv, -1);
  int next = 0;
  for (int i = 0; i < K->size(); ++i) {
    if (K->dim_of(i) != 0) continue;
    int v = K->cell(i).verts[0];
    int rep = std::min(v, tau[(size_t)v]);
    if (rep == v && orbit[(size_t)v] == -1) {
      orbit[(size_t)v] = next;
      orbit[(size_t)tau[(size_t)v]] = next;
      ++next;
    }
  }
  std::vector<std::vector<int>> images;
  for (int i = 0; i < K->size(); ++i) {
    std::vector<int> img;
    for (int v : K->cell(i).verts) img.push_back(orbit[(size_t)v]);
    images.push_back(std::move(img));
  }
  QuotientResult res;
  res.complex = std::make_shared<CellComplex>(CellComplex::from_simplices(images));
  res.vertex_orbit = orbit;
  res.projection = CellularMap::from_vertex_map(K, res.complex, orbit);
  // fibres must be exactly the two cells of one orbit
  std::vector<int> count((size_t)res.complex->size(), 0);
  for (int i = 0; i < K->size(); ++i) count[(size_t)res.projection.image[(size_t)i]] += 1;
  for (int q = 0; q < res.complex->size(); ++q)
    if (count[(size_t)q] != 2)
      throw std::invalid_argument("quotient: fibre over " + res.complex->cell(q).name +
                                  " has " + std::to_string(count[(size_t)q]) +
                                  " cells (expected 2)");
  return res;
}

ComplexPtr simplicial_image(ComplexPtr K, const std::vector<int>& vmap) {
  require_simplicial(*K, "simplicial image");
  std::vector<std::vector<int>> images;
  for (int i = 0; i < K->size(); ++i) {
    std::vector<int> img;
    for (int v : K->cell(i).verts) {
      int w = vmap[(size_t)v];
      if (std::find(img.begin(), img.end(), w) == img.end()) img.push_back(w);
    }
    images.push_back(std::move(img));
  }
  return std::make_shared<CellComplex>(CellComplex::from_simplices(images));
}

SubcomplexResult subcomplex(ComplexPtr K, const Bitset& keep) {
  if (!K->is_down_closed(keep))
    throw std::invalid_argument("subcomplex: cell set must be down-closed");
  SubcomplexResult res;
  res.old_of_new = keep.to_list();
  res.new_of_old.assign((size_t)K->size(), -1);
  for (size_t i = 0; i < res.old_of_new.size(); ++i)
    res.new_of_old[(size_t)res.old_of_new[i]] = (int)i;
  std::vector<Cell> cells;
  std::vector<std::tuple<int, int, int>> cov;
  for (int old : res.old_of_new) {
    cells.push_back(K->cell(old));
    for (auto& [f, s] : K->facets(old))
      cov.push_back({res.new_of_old[(size_t)f], res.new_of_old[(size_t)old], s});
  }
  res.complex =
      std::make_shared<CellComplex>(CellComplex::regular_cw_signed(std::move(cells), cov));
  res.inclusion = CellularMap::of(res.complex, K, res.old_of_new);
  if (res.complex->simplicial()) {
    int nv = max_vertex(*res.complex) + 1;
    std::vector<int> vm((size_t)nv, 0);
    for (int v = 0; v < nv; ++v) vm[(size_t)v] = v;
    res.inclusion.vertex_map = vm;
  }
  return res;
}

static GlueResult glue_impl(const std::vector<GluePiece>& pieces, bool keep_signs) {
  GlueResult res;
  std::map<std::string, int> index;
  std::vector<Cell> cells;
  std::map<std::pair<int, int>, int> cov; // (face, cell) -> sign
  std::vector<std::vector<std::string>> facet_names; // per glued cell, sorted names
  for (const auto& piece : pieces) {
    const CellComplex& K = *piece.K;
    if ((int)piece.names.size() != K.size())
      throw std::invalid_argument("glue: name list must cover the piece");
    std::vector<int> pm((size_t)K.size());
    for (int i = 0; i < K.size(); ++i) {
      const std::string& nm = piece.names[(size_t)i];
      auto it = index.find(nm);
      if (it == index.end()) {
        index[nm] = (int)cells.size();
        pm[(size_t)i] = (int)cells.size();
        cells.push_back(Cell{nm, K.dim_of(i), {}});
        facet_names.push_back({});
      } else {
        pm[(size_t)i] = it->second;
        if (cells[(size_t)it->second].dim != K.dim_of(i))
          throw std::invalid_argument("glue: dimension clash at " + nm);
      }
    }
    for (int i = 0; i < K.size(); ++i) {
      std::vector<std::string> fn;
      for (auto& [f, s] : K.facets(i)) {
        auto key = std::make_pair(pm[(size_t)f], pm[(size_t)i]);
        auto [pos, fresh] = cov.emplace(key, s);
        if (keep_signs && !fresh && pos->second != s)
          throw std::invalid_argument("glue: incidence sign clash under " +
                                      piece.names[(size_t)i]);
        fn.push_back(piece.names[(size_t)f]);
      }
      std::sort(fn.begin(), fn.end());
      auto& known = facet_names[(size_t)pm[(size_t)i]];
      if (known.empty())
        known = fn;
      else if (known != fn)
        throw std::invalid_argument("glue: shared cell " + piece.names[(size_t)i] +
                                    " has different boundaries in two pieces");
    }
    res.piece_maps.push_back(std::move(pm));
  }
  if (keep_signs) {
    std::vector<std::tuple<int, int, int>> cv;
    for (auto& [k, s] : cov) cv.push_back({k.first, k.second, s});
    res.complex = std::make_shared<CellComplex>(CellComplex::regular_cw_signed(std::move(cells), cv));
  } else {
    std::vector<std::pair<int, int>> cv;
    for (auto& [k, s] : cov) { (void)s; cv.push_back(k); }
    res.complex = std::make_shared<CellComplex>(CellComplex::regular_cw(std::move(cells), cv));
  }
  return res;
}

GlueResult glue(const std::vector<GluePiece>& pieces) { return glue_impl(pieces, true); }

GlueResult glue_resign(const std::vector<GluePiece>& pieces) { return glue_impl(pieces, false); }

ApproxResult subdivide_map(ComplexPtr A, ComplexPtr B, const std::vector<int>& vmap, int bound) {
  require_simplicial(*A, "subdivide_map");
  require_simplicial(*B, "subdivide_map");
  if ((int)vmap.size() < max_vertex(*A) + 1)
    throw std::invalid_argument("subdivide_map: vertex map must cover every vertex");
  ComplexPtr current = A;
  Refinement carrier = Refinement::identity(A);
  // per-vertex image constraints: fixed values for (descendants of) original
  // vertices, -1 for barycenters to be chosen greedily
  std::vector<int> fixed((size_t)max_vertex(*A) + 1, -1);
  for (int i = 0; i < A->size(); ++i)
    if (A->dim_of(i) == 0) {
      int v = A->cell(i).verts[0];
      fixed[(size_t)v] = vmap[(size_t)v];
    }
  int nbv = max_vertex(*B) + 1;
  for (int round = 0;; ++round) {
    // greedy assignment pass
    std::vector<int> img = fixed;
    int nv = max_vertex(*current) + 1;
    img.resize((size_t)nv, -1);
    // cells listing each vertex, for the local simplex checks
    std::vector<std::vector<int>> cells_with((size_t)nv);
    for (int i = 0; i < current->size(); ++i)
      for (int v : current->cell(i).verts) cells_with[(size_t)v].push_back(i);
    bool ok = true;
    for (int v = 0; v < nv && ok; ++v) {
      if (img[(size_t)v] >= 0) continue;
      bool found = false;
      for (int cand = 0; cand < nbv && !found; ++cand) {
        bool good = true;
        for (int c : cells_with[(size_t)v]) {
          std::vector<int> iv;
          bool complete = true;
          for (int w : current->cell(c).verts) {
            int t = (w == v) ? cand : img[(size_t)w];
            if (t < 0) { complete = false; break; }
            if (std::find(iv.begin(), iv.end(), t) == iv.end()) iv.push_back(t);
          }
          if (!complete) continue;
          if (B->simplex_index(iv) < 0) { good = false; break; }
        }
        if (good) {
          img[(size_t)v] = cand;
          found = true;
        }
      }
      ok = found;
    }
    // the greedy checks fire when a vertex gets chosen, so cells whose
    // vertices were all pinned in advance still need a look
    for (int c = 0; ok && c < current->size(); ++c) {
      std::vector<int> iv;
      for (int w : current->cell(c).verts)
        if (std::find(iv.begin(), iv.end(), img[(size_t)w]) == iv.end())
          iv.push_back(img[(size_t)w]);
      ok = B->simplex_index(iv) >= 0;
    }
    if (ok) {
      ApproxResult res;
      res.map = CellularMap::from_vertex_map(current, B, img);
      res.carrier = carrier;
      res.subdivisions = round;
      return res;
    }
    if (round == bound)
      throw std::runtime_error("subdivide_map: no simplicial approximation within " +
                               std::to_string(bound) + " subdivisions");
    SubdivisionResult sd = barycentric(current);
    carrier = compose(carrier, sd.carrier);
    // vertices of the subdivision are cells of `current`; singletons over old
    // vertices keep their image constraint
    std::vector<int> nfixed((size_t)current->size(), -1);
    for (int i = 0; i < current->size(); ++i)
      if (current->dim_of(i) == 0) {
        int v = current->cell(i).verts[0];
        if (fixed[(size_t)v] >= 0) nfixed[(size_t)i] = fixed[(size_t)v];
      }
    fixed = std::move(nfixed);
    current = sd.complex;
  }
}

} // namespace gx
