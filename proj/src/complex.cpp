#include "gx/complex.hpp"
#include <algorithm>
#include <sstream>

namespace gx {

namespace {

// Sign of the permutation taking `from` to `to` (same distinct elements).
int perm_sign(const std::vector<int>& from, const std::vector<int>& to) {
  std::vector<int> pos((size_t)from.size());
  for (size_t i = 0; i < from.size(); ++i) {
    auto it = std::find(to.begin(), to.end(), from[i]);
    pos[i] = (int)(it - to.begin());
  }
  int sign = 1;
  for (size_t i = 0; i < pos.size(); ++i)
    for (size_t j = i + 1; j < pos.size(); ++j)
      if (pos[i] > pos[j]) sign = -sign;
  return sign;
}

std::string simplex_name(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(v[i]);
  }
  return s;
}

} // namespace

CellComplex CellComplex::from_simplices(const std::vector<std::vector<int>>& simplices) {
  // Collect every face with the orientation order it is first seen with.
  std::map<std::vector<int>, std::vector<int>> order_of; // sorted verts -> stored order
  for (const auto& s : simplices) {
    if (s.empty()) throw std::invalid_argument("from_simplices: empty simplex");
    std::vector<int> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("from_simplices: repeated vertex in simplex " + simplex_name(s));
    for (int v : s)
      if (v < 0) throw std::invalid_argument("from_simplices: negative vertex id");
    size_t n = s.size();
    for (unsigned m = 1; m < (1u << n); ++m) {
      std::vector<int> face;
      for (size_t i = 0; i < n; ++i)
        if (m & (1u << i)) face.push_back(s[i]);
      std::vector<int> key = face;
      std::sort(key.begin(), key.end());
      order_of.emplace(std::move(key), std::move(face));
    }
  }

  CellComplex K;
  K.simplicial_ = true;
  // Canonical cell order: by (dimension, sorted vertex list); the map is
  // already sorted lexicographically, so a stable sort by size does it.
  std::vector<const std::pair<const std::vector<int>, std::vector<int>>*> items;
  for (const auto& kv : order_of) items.push_back(&kv);
  std::stable_sort(items.begin(), items.end(),
                   [](auto* a, auto* b) { return a->first.size() < b->first.size(); });
  for (auto* kv : items) {
    int idx = (int)K.cells_.size();
    Cell c;
    c.dim = (int)kv->first.size() - 1;
    c.verts = kv->second;
    c.name = simplex_name(kv->first);
    K.simplex_index_[kv->first] = idx;
    K.cells_.push_back(std::move(c));
  }
  // Covering relations with orientation signs: dropping position i of the
  // stored order carries (-1)^i, corrected by the permutation between the
  // induced order and the face's own stored order.
  K.facets_.resize(K.cells_.size());
  for (size_t idx = 0; idx < K.cells_.size(); ++idx) {
    const Cell& c = K.cells_[idx];
    if (c.dim == 0) continue;
    for (size_t i = 0; i < c.verts.size(); ++i) {
      std::vector<int> induced;
      for (size_t j = 0; j < c.verts.size(); ++j)
        if (j != i) induced.push_back(c.verts[j]);
      std::vector<int> key = induced;
      std::sort(key.begin(), key.end());
      int f = K.simplex_index_.at(key);
      int sign = (i % 2 == 0 ? 1 : -1) * perm_sign(induced, K.cells_[(size_t)f].verts);
      K.facets_[idx].push_back({f, sign});
    }
    std::sort(K.facets_[idx].begin(), K.facets_[idx].end());
  }
  K.finalize();
  return K;
}

CellComplex CellComplex::regular_cw(std::vector<Cell> cells,
                                    const std::vector<std::pair<int, int>>& covering) {
  CellComplex K;
  K.cells_ = std::move(cells);
  K.facets_.resize(K.cells_.size());
  for (auto [face, cell] : covering) {
    if (face < 0 || cell < 0 || face >= K.size() || cell >= K.size())
      throw std::invalid_argument("regular_cw: covering index out of range");
    K.facets_[(size_t)cell].push_back({face, 0});
  }
  for (auto& fl : K.facets_) {
    std::sort(fl.begin(), fl.end());
    for (size_t i = 1; i < fl.size(); ++i)
      if (fl[i].first == fl[i - 1].first)
        throw std::invalid_argument("regular_cw: cell attaches twice to one face");
  }
  K.assign_signs();
  K.finalize();
  return K;
}

CellComplex CellComplex::regular_cw_signed(
    std::vector<Cell> cells, const std::vector<std::tuple<int, int, int>>& covering) {
  CellComplex K;
  K.cells_ = std::move(cells);
  K.facets_.resize(K.cells_.size());
  for (auto [face, cell, sign] : covering) {
    if (face < 0 || cell < 0 || face >= K.size() || cell >= K.size())
      throw std::invalid_argument("regular_cw_signed: covering index out of range");
    if (sign != 1 && sign != -1)
      throw std::invalid_argument("regular_cw_signed: sign must be +1 or -1");
    K.facets_[(size_t)cell].push_back({face, sign});
  }
  for (auto& fl : K.facets_) std::sort(fl.begin(), fl.end());
  K.finalize();
  return K;
}

void CellComplex::assign_signs() {
  // Process cells by dimension. A d-cell's facet signs are the coefficients of
  // a generating (d-1)-cycle on its boundary subcomplex; regularity forces the
  // generator to be unique up to scale with every coefficient a unit.
  std::vector<int> order((size_t)size());
  for (int i = 0; i < size(); ++i) order[(size_t)i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cells_[(size_t)a].dim < cells_[(size_t)b].dim; });
  // Downward closure on the unsigned structure, for boundary subcomplexes.
  std::vector<Bitset> down((size_t)size());
  for (int idx : order) {
    Bitset b((size_t)size());
    b.set((size_t)idx);
    for (auto& [f, s] : facets_[(size_t)idx]) b |= down[(size_t)f];
    down[(size_t)idx] = b;
  }
  Coeffs Q = Coeffs::rationals();
  for (int idx : order) {
    Cell& c = cells_[(size_t)idx];
    auto& fl = facets_[(size_t)idx];
    if (c.dim == 0) {
      if (!fl.empty()) throw std::invalid_argument("regular_cw: vertex " + c.name + " has a facet");
      continue;
    }
    if (fl.empty())
      throw std::invalid_argument("regular_cw: cell " + c.name + " has empty boundary");
    if (c.dim == 1) {
      if (fl.size() != 2)
        throw std::invalid_argument("regular_cw: edge " + c.name + " needs exactly 2 endpoints");
      fl[0].second = -1;
      fl[1].second = 1;
      continue;
    }
    // faces of the boundary in dimensions d-1 and d-2
    std::vector<int> F, G;
    for (int j = 0; j < size(); ++j) {
      if (!down[(size_t)idx].get((size_t)j) || j == idx) continue;
      if (cells_[(size_t)j].dim == c.dim - 1) F.push_back(j);
      if (cells_[(size_t)j].dim == c.dim - 2) G.push_back(j);
    }
    if ((int)F.size() != (int)fl.size())
      throw std::invalid_argument("regular_cw: boundary of " + c.name +
                                  " contains non-facet top cells");
    Matrix M(Q, (int)G.size(), (int)F.size());
    for (size_t col = 0; col < F.size(); ++col)
      for (auto& [g, s] : facets_[(size_t)F[col]]) {
        auto it = std::lower_bound(G.begin(), G.end(), g);
        if (it != G.end() && *it == g) M.at((int)(it - G.begin()), (int)col) = Q.from_int(s);
      }
    Matrix ker = kernel_basis(M);
    if (ker.cols() != 1)
      throw std::runtime_error("regular_cw: boundary of " + c.name +
                               " does not carry a unique fundamental cycle");
    std::vector<int> signs((size_t)F.size());
    bool flip = false;
    for (int i = 0; i < (int)F.size(); ++i) {
      mpq_class v = std::get<mpq_class>(ker.at(i, 0));
      if (i == 0) {
        if (v == 0)
          throw std::runtime_error("regular_cw: degenerate fundamental cycle at " + c.name);
        flip = v < 0;
      }
      if (flip) v = -v;
      if (v == 1)
        signs[(size_t)i] = 1;
      else if (v == -1)
        signs[(size_t)i] = -1;
      else
        throw std::runtime_error("regular_cw: boundary of " + c.name +
                                 " is not reduced (non-unit cycle coefficient)");
    }
    for (size_t i = 0; i < fl.size(); ++i) {
      // F and fl are both sorted by cell index and coincide as sets
      if (F[i] != fl[i].first)
        throw std::runtime_error("regular_cw: facet bookkeeping mismatch at " + c.name);
      fl[i].second = signs[i];
    }
  }
}

void CellComplex::finalize() {
  size_t n = cells_.size();
  cofacets_.assign(n, {});
  top_dim_ = -1;
  simplicial_ = true;
  simplex_index_.clear();
  for (size_t i = 0; i < n; ++i) {
    const Cell& c = cells_[i];
    top_dim_ = std::max(top_dim_, c.dim);
    if (c.verts.empty()) {
      simplicial_ = false;
    } else {
      if ((int)c.verts.size() != c.dim + 1)
        throw std::invalid_argument("cell " + c.name + ": vertex count does not match dimension");
      std::vector<int> key = c.verts;
      std::sort(key.begin(), key.end());
      auto [it, fresh] = simplex_index_.emplace(std::move(key), (int)i);
      if (!fresh)
        throw std::invalid_argument("two cells share the vertex set of " + c.name);
    }
    if (name_index_.count(c.name))
      throw std::invalid_argument("duplicate cell name " + c.name);
    name_index_[c.name] = (int)i;
  }
  by_dim_.assign((size_t)top_dim_ + 1, {});
  for (size_t i = 0; i < n; ++i) by_dim_[(size_t)cells_[i].dim].push_back((int)i);
  for (size_t i = 0; i < n; ++i)
    for (auto& [f, s] : facets_[i]) {
      if (cells_[(size_t)f].dim != cells_[i].dim - 1)
        throw std::invalid_argument("covering relation must drop dimension by one (" +
                                    cells_[(size_t)f].name + " < " + cells_[i].name + ")");
      cofacets_[(size_t)f].push_back((int)i);
    }
  // face-order closure, cells in dimension order
  downsets_.assign(n, Bitset(n));
  for (int d = 0; d <= top_dim_; ++d)
    for (int i : by_dim_[(size_t)d]) {
      Bitset b(n);
      b.set((size_t)i);
      for (auto& [f, s] : facets_[(size_t)i]) b |= downsets_[(size_t)f];
      downsets_[(size_t)i] = b;
    }
  // d^2 = 0 over the integers
  for (size_t i = 0; i < n; ++i) {
    std::map<int, long> acc;
    for (auto& [f, s] : facets_[i])
      for (auto& [g, t] : facets_[(size_t)f]) acc[g] += (long)s * t;
    for (auto& [g, v] : acc)
      if (v != 0)
        throw std::invalid_argument("signed incidence does not square to zero at " +
                                    cells_[i].name + " over " + cells_[(size_t)g].name);
  }
}

int CellComplex::cell_by_name(const std::string& n) const {
  auto it = name_index_.find(n);
  return it == name_index_.end() ? -1 : it->second;
}

int CellComplex::simplex_index(std::vector<int> verts) const {
  std::sort(verts.begin(), verts.end());
  auto it = simplex_index_.find(verts);
  return it == simplex_index_.end() ? -1 : it->second;
}

const std::vector<int>& CellComplex::cells_of_dim(int d) const {
  static const std::vector<int> empty;
  if (d < 0 || d > top_dim_) return empty;
  return by_dim_[(size_t)d];
}

Bitset CellComplex::up_set(int i) const {
  Bitset b((size_t)size());
  for (int j = 0; j < size(); ++j)
    if (leq(i, j)) b.set((size_t)j);
  return b;
}

Bitset CellComplex::down_closure(const Bitset& s) const {
  Bitset b((size_t)size());
  for (int i = 0; i < size(); ++i)
    if (s.get((size_t)i)) b |= downsets_[(size_t)i];
  return b;
}

Bitset CellComplex::up_closure(const Bitset& s) const {
  Bitset b((size_t)size());
  for (int j = 0; j < size(); ++j)
    if (downsets_[(size_t)j].intersects(s)) b.set((size_t)j);
  return b;
}

bool CellComplex::is_up_closed(const Bitset& s) const {
  for (int i = 0; i < size(); ++i)
    if (s.get((size_t)i))
      for (int j : cofacets_[(size_t)i])
        if (!s.get((size_t)j)) return false;
  return true;
}

bool CellComplex::is_down_closed(const Bitset& s) const {
  for (int i = 0; i < size(); ++i)
    if (s.get((size_t)i))
      for (auto& [f, sg] : facets_[(size_t)i])
        if (!s.get((size_t)f)) return false;
  return true;
}

Matrix CellComplex::boundary_matrix(int d, const Coeffs& R) const {
  return boundary_matrix(d, R, all_cells());
}

Matrix CellComplex::boundary_matrix(int d, const Coeffs& R, const Bitset& subset) const {
  std::vector<int> rows, cols;
  for (int i : cells_of_dim(d - 1))
    if (subset.get((size_t)i)) rows.push_back(i);
  for (int i : cells_of_dim(d))
    if (subset.get((size_t)i)) cols.push_back(i);
  std::map<int, int> row_of;
  for (size_t i = 0; i < rows.size(); ++i) row_of[rows[i]] = (int)i;
  Matrix M(R, (int)rows.size(), (int)cols.size());
  for (size_t j = 0; j < cols.size(); ++j)
    for (auto& [f, s] : facets_[(size_t)cols[j]]) {
      auto it = row_of.find(f);
      if (it != row_of.end()) M.at(it->second, (int)j) = R.from_int(s);
    }
  return M;
}

long CellComplex::euler_characteristic() const {
  long chi = 0;
  for (int d = 0; d <= top_dim_; ++d)
    chi += (d % 2 == 0 ? 1 : -1) * (long)cells_of_dim(d).size();
  return chi;
}

std::vector<int> FacePoset::elements_per_dim() const {
  std::vector<int> v;
  for (int d = 0; d <= K->dim(); ++d) v.push_back((int)K->cells_of_dim(d).size());
  return v;
}

OpenSet OpenSet::of(const CellComplex& K, const Bitset& s) {
  if (!K.is_up_closed(s)) throw std::invalid_argument("OpenSet: set is not up-closed");
  return OpenSet{s};
}

Bitset OpenSet::complement_closed(const CellComplex& K) const {
  Bitset b = K.all_cells();
  b.subtract(cells);
  return b;
}

static std::vector<int> betti_impl(const CellComplex& K, const Coeffs& R, const Bitset& subset,
                                   bool reduced) {
  if (!R.is_field()) throw std::domain_error("betti numbers: field coefficients required");
  int top = K.dim();
  std::vector<int> counts, ranks;
  for (int d = 0; d <= top + 1; ++d) {
    Matrix B = K.boundary_matrix(d, R, subset);
    if (d <= top) counts.push_back(B.cols());
    ranks.push_back(rank_of(B)); // rank of boundary out of degree d
  }
  std::vector<int> b((size_t)top + 1, 0);
  for (int d = 0; d <= top; ++d) {
    int incoming = (d + 1 <= top) ? ranks[(size_t)d + 1] : 0;
    b[(size_t)d] = counts[(size_t)d] - ranks[(size_t)d] - incoming;
  }
  if (reduced) {
    size_t total = 0;
    for (int c : counts) total += (size_t)c;
    if (total > 0) b[0] -= 1;
  }
  return b;
}

std::vector<int> betti_numbers(const CellComplex& K, const Coeffs& R) {
  if (K.size() == 0) return {};
  return betti_impl(K, R, K.all_cells(), false);
}

std::vector<int> reduced_betti(const CellComplex& K, const Coeffs& R) {
  if (K.size() == 0) return {};
  return betti_impl(K, R, K.all_cells(), true);
}

std::vector<int> betti_rel(const CellComplex& K, const Bitset& A, const Coeffs& R) {
  if (!K.is_down_closed(A)) throw std::invalid_argument("betti_rel: A must be a subcomplex");
  Bitset rest = K.all_cells();
  rest.subtract(A);
  return betti_impl(K, R, rest, false);
}

OrderComplexResult order_complex(const CellComplex& K, const Bitset& subset) {
  std::vector<int> elems = subset.to_list();
  std::map<int, int> vertex_of;
  for (size_t i = 0; i < elems.size(); ++i) vertex_of[elems[i]] = (int)i;
  // chains enumerated as strictly increasing sequences in the face order
  std::vector<std::vector<int>> chains;
  std::vector<int> cur;
  auto extend = [&](auto&& self, int last) -> void {
    chains.push_back(cur);
    for (int e : elems) {
      if (e == last || !K.leq(last, e)) continue;
      cur.push_back(vertex_of[e]);
      self(self, e);
      cur.pop_back();
    }
  };
  for (int e : elems) {
    cur = {vertex_of[e]};
    extend(extend, e);
  }
  OrderComplexResult res;
  if (chains.empty()) {
    res.complex = CellComplex();
    return res;
  }
  res.complex = CellComplex::from_simplices(chains);
  res.vertex_cell = elems;
  res.carrier.resize((size_t)res.complex.size());
  for (int i = 0; i < res.complex.size(); ++i) {
    int best = -1;
    for (int v : res.complex.cell(i).verts) {
      int cell = elems[(size_t)v];
      if (best < 0 || K.dim_of(cell) > K.dim_of(best)) best = cell;
    }
    res.carrier[(size_t)i] = best;
  }
  return res;
}

void CellComplex::verify_boundary_spheres() const {
  Coeffs Q = Coeffs::rationals();
  Coeffs F2 = Coeffs::prime_field(2);
  for (int i = 0; i < size(); ++i) {
    int d = dim_of(i);
    if (d == 0) continue;
    Bitset bd = downsets_[(size_t)i];
    bd.set((size_t)i, false);
    OrderComplexResult oc = order_complex(*this, bd);
    for (const Coeffs& R : {Q, F2}) {
      std::vector<int> rb = reduced_betti(oc.complex, R);
      bool ok = (int)rb.size() >= d; // top degree d-1 must be present
      for (int t = 0; ok && t < (int)rb.size(); ++t)
        ok = (rb[(size_t)t] == (t == d - 1 ? 1 : 0));
      if (!ok)
        throw std::runtime_error("cell " + cell(i).name +
                                 ": boundary interval is not a homology sphere of dimension " +
                                 std::to_string(d - 1));
    }
  }
}

std::string CellComplex::describe() const {
  std::ostringstream os;
  os << "cells per dimension:";
  for (int d = 0; d <= top_dim_; ++d) os << " " << cells_of_dim(d).size();
  os << "; euler " << euler_characteristic();
  return os.str();
}

Stratification Stratification::make(const CellComplex& K, std::vector<Bitset> strata,
                                    std::vector<int> complex_dim) {
  if (strata.size() != complex_dim.size())
    throw std::invalid_argument("stratification: dimension list mismatch");
  Bitset seen((size_t)K.size());
  Bitset prefix((size_t)K.size());
  for (size_t s = 0; s < strata.size(); ++s) {
    if (strata[s].intersects(seen))
      throw std::invalid_argument("stratification: strata overlap");
    seen |= strata[s];
    prefix |= strata[s];
    if (!K.is_up_closed(prefix))
      throw std::invalid_argument("stratification: prefix union " + std::to_string(s) +
                                  " is not open");
    int maxdim = -1;
    for (int c : strata[s].to_list()) maxdim = std::max(maxdim, K.dim_of(c));
    if (maxdim < 0) throw std::invalid_argument("stratification: empty stratum");
    if (2 * complex_dim[s] != maxdim)
      throw std::invalid_argument("stratification: declared complex dimension of stratum " +
                                  std::to_string(s) + " does not match cell dimensions");
  }
  if (!(seen == K.all_cells()))
    throw std::invalid_argument("stratification: strata do not cover the complex");
  return Stratification{std::move(strata), std::move(complex_dim)};
}

Stratification Stratification::by_dimension(const CellComplex& K) {
  Stratification st;
  for (int d = K.dim(); d >= 0; --d) {
    if (K.cells_of_dim(d).empty()) continue;
    Bitset b((size_t)K.size());
    for (int c : K.cells_of_dim(d)) b.set((size_t)c);
    st.strata.push_back(b);
    st.complex_dim.push_back((d + 1) / 2);
  }
  return st;
}

int Stratification::stratum_of(int cell) const {
  for (size_t s = 0; s < strata.size(); ++s)
    if (strata[s].get((size_t)cell)) return (int)s;
  return -1;
}

} // namespace gx
