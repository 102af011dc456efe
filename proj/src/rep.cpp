#include "gx/rep.hpp"
#include <algorithm>
#include <map>
#include <stdexcept>

namespace gx {

namespace {

void paste(Matrix& M, int r0, int c0, const Matrix& B) {
  for (int r = 0; r < B.rows(); ++r)
    for (int c = 0; c < B.cols(); ++c) M.at(r0 + r, c0 + c) = B.at(r, c);
}

void paste_signed(Matrix& M, int r0, int c0, const Matrix& B, int sign, const Coeffs& R) {
  for (int r = 0; r < B.rows(); ++r)
    for (int c = 0; c < B.cols(); ++c)
      M.at(r0 + r, c0 + c) = sign < 0 ? R.neg(B.at(r, c)) : B.at(r, c);
}

int facet_slot(const CellComplex& K, int cell, int face) {
  const auto& fs = K.facets(cell);
  for (size_t i = 0; i < fs.size(); ++i)
    if (fs[i].first == face) return (int)i;
  return -1;
}

} // namespace

int RepComplex::dim_at(int n, int cell) const {
  int i = n - lo;
  if (i < 0 || i >= (int)dims.size()) return 0;
  return dims[(size_t)i][(size_t)cell];
}

const Matrix& RepComplex::diff_at(int n, int cell) const {
  return diff[(size_t)(n - lo)][(size_t)cell];
}

const Matrix& RepComplex::gen_mat(int n, int cell, int slot) const {
  return gen[(size_t)(n - lo)][(size_t)cell][(size_t)slot];
}

Matrix RepComplex::gen_path(int n, int face, int cell) const {
  if (n < lo || n > hi()) return Matrix(R, dim_at(n, cell), dim_at(n, face));
  if (face == cell) return Matrix::identity(R, dim_at(n, cell));
  const auto& fs = K->facets(cell);
  for (size_t s = 0; s < fs.size(); ++s)
    if (K->leq(face, fs[s].first))
      return gen_mat(n, cell, (int)s) * gen_path(n, face, fs[s].first);
  throw std::invalid_argument("gen_path: first cell is not a face of the second");
}

std::vector<int> RepComplex::total_dims() const {
  std::vector<int> t;
  for (const auto& row : dims) {
    int s = 0;
    for (int v : row) s += v;
    t.push_back(s);
  }
  return t;
}

void RepComplex::validate() const {
  if (!K) throw std::logic_error("rep: missing complex");
  size_t N = (size_t)K->size();
  if (domain.size() != N) throw std::logic_error("rep: domain size mismatch");
  if (!K->is_up_closed(domain)) throw std::logic_error("rep: domain must be up-closed");
  if (gen.size() != dims.size()) throw std::logic_error("rep: generization layer count");
  if (!dims.empty() && diff.size() + 1 != dims.size())
    throw std::logic_error("rep: differential layer count");
  if (dims.empty() && !diff.empty()) throw std::logic_error("rep: stray differentials");
  for (size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].size() != N || gen[i].size() != N)
      throw std::logic_error("rep: per-cell table size");
    for (size_t c = 0; c < N; ++c) {
      if (dims[i][c] < 0) throw std::logic_error("rep: negative rank");
      if (!domain.get(c) && dims[i][c] != 0)
        throw std::logic_error("rep: nonzero rank outside the domain");
      const auto& fs = K->facets((int)c);
      if (gen[i][c].size() != fs.size()) throw std::logic_error("rep: facet slot count");
      for (size_t s = 0; s < fs.size(); ++s) {
        const Matrix& g = gen[i][c][s];
        if (g.rows() != dims[i][c] || g.cols() != dims[i][(size_t)fs[s].first])
          throw std::logic_error("rep: generization shape");
      }
    }
  }
  for (size_t i = 0; i < diff.size(); ++i) {
    if (diff[i].size() != N) throw std::logic_error("rep: differential table size");
    for (size_t c = 0; c < N; ++c) {
      const Matrix& dm = diff[i][c];
      if (dm.rows() != dims[i + 1][c] || dm.cols() != dims[i][c])
        throw std::logic_error("rep: differential shape");
      if (i + 1 < diff.size() && !(diff[i + 1][c] * dm).is_zero())
        throw std::logic_error("rep: d*d != 0");
      const auto& fs = K->facets((int)c);
      for (size_t s = 0; s < fs.size(); ++s) {
        int f = fs[s].first;
        if (!(dm * gen[i][c][s] == gen[i + 1][c][s] * diff[i][(size_t)f]))
          throw std::logic_error("rep: differential does not commute with generization");
      }
    }
  }
  // commuting squares on every length-two interval of the face order
  for (size_t i = 0; i < dims.size(); ++i) {
    for (size_t c = 0; c < N; ++c) {
      std::map<int, Matrix> first_path;
      const auto& fs = K->facets((int)c);
      for (size_t s = 0; s < fs.size(); ++s) {
        int f = fs[s].first;
        const auto& gs = K->facets(f);
        for (size_t t = 0; t < gs.size(); ++t) {
          Matrix comp = gen[i][c][s] * gen[i][(size_t)f][t];
          auto [it, fresh] = first_path.emplace(gs[t].first, comp);
          if (!fresh && !(it->second == comp))
            throw std::logic_error("rep: generization squares do not commute");
        }
      }
    }
  }
}

RepComplex zero_rep(ComplexPtr K, const Coeffs& R) {
  RepComplex F;
  F.K = std::move(K);
  F.R = R;
  F.domain = Bitset((size_t)F.K->size());
  return F;
}

RepComplex constant_sheaf(ComplexPtr K, const Coeffs& R) {
  RepComplex F;
  F.K = std::move(K);
  F.R = R;
  size_t N = (size_t)F.K->size();
  F.domain = Bitset::full(N);
  F.lo = 0;
  F.dims = {std::vector<int>(N, 1)};
  F.gen.resize(1);
  F.gen[0].resize(N);
  for (size_t c = 0; c < N; ++c)
    F.gen[0][c].assign(F.K->facets((int)c).size(), Matrix::identity(R, 1));
  return F;
}

RepComplex restrict_rep(const RepComplex& F, const Bitset& U) {
  if (!F.K->is_up_closed(U))
    throw std::invalid_argument("restrict_rep: subset must be open");
  RepComplex G = F;
  G.domain = F.domain;
  G.domain &= U;
  size_t N = (size_t)F.K->size();
  for (size_t i = 0; i < G.dims.size(); ++i)
    for (size_t c = 0; c < N; ++c)
      if (!G.domain.get(c)) G.dims[i][c] = 0;
  for (size_t i = 0; i < G.dims.size(); ++i)
    for (size_t c = 0; c < N; ++c) {
      const auto& fs = F.K->facets((int)c);
      for (size_t s = 0; s < fs.size(); ++s) {
        Matrix& g = G.gen[i][c][s];
        if (g.rows() != G.dims[i][c] || g.cols() != G.dims[i][(size_t)fs[s].first])
          g = Matrix(F.R, G.dims[i][c], G.dims[i][(size_t)fs[s].first]);
      }
      if (i + 1 < G.dims.size()) {
        Matrix& dm = G.diff[i][c];
        if (dm.rows() != G.dims[i + 1][c] || dm.cols() != G.dims[i][c])
          dm = Matrix(F.R, G.dims[i + 1][c], G.dims[i][c]);
      }
    }
  return G;
}

RepComplex shift_rep(const RepComplex& F, int s) {
  RepComplex G = F;
  G.lo = F.lo - s;
  if (s % 2 != 0)
    for (auto& layer : G.diff)
      for (Matrix& m : layer) m = m.scale(F.R.neg(F.R.one()));
  return G;
}

RepComplex rep_direct_sum(const RepComplex& a, const RepComplex& b) {
  if (a.K != b.K) throw std::invalid_argument("rep_direct_sum: different complexes");
  if (a.degree_count() == 0) return b;
  if (b.degree_count() == 0) return a;
  size_t N = (size_t)a.K->size();
  RepComplex c;
  c.K = a.K;
  c.R = a.R;
  c.domain = a.domain;
  c.domain |= b.domain;
  c.lo = std::min(a.lo, b.lo);
  int top = std::max(a.hi(), b.hi());
  int cnt = top - c.lo + 1;
  c.dims.assign((size_t)cnt, std::vector<int>(N, 0));
  c.diff.assign((size_t)cnt - 1, std::vector<Matrix>(N));
  c.gen.resize((size_t)cnt);
  for (int i = 0; i < cnt; ++i) {
    int n = c.lo + i;
    for (size_t cc = 0; cc < N; ++cc)
      c.dims[(size_t)i][cc] = a.dim_at(n, (int)cc) + b.dim_at(n, (int)cc);
    c.gen[(size_t)i].resize(N);
    for (size_t cc = 0; cc < N; ++cc) {
      const auto& fs = a.K->facets((int)cc);
      c.gen[(size_t)i][cc].reserve(fs.size());
      for (size_t s = 0; s < fs.size(); ++s) {
        int f = fs[s].first;
        Matrix g(c.R, c.dims[(size_t)i][cc], a.dim_at(n, f) + b.dim_at(n, f));
        if (n >= a.lo && n <= a.hi()) paste(g, 0, 0, a.gen_mat(n, (int)cc, (int)s));
        if (n >= b.lo && n <= b.hi())
          paste(g, a.dim_at(n, (int)cc), a.dim_at(n, f), b.gen_mat(n, (int)cc, (int)s));
        c.gen[(size_t)i][cc].push_back(std::move(g));
      }
    }
    if (i + 1 < cnt) {
      for (size_t cc = 0; cc < N; ++cc) {
        Matrix dm(c.R, a.dim_at(n + 1, (int)cc) + b.dim_at(n + 1, (int)cc),
                  c.dims[(size_t)i][cc]);
        if (n >= a.lo && n + 1 <= a.hi()) paste(dm, 0, 0, a.diff_at(n, (int)cc));
        if (n >= b.lo && n + 1 <= b.hi())
          paste(dm, a.dim_at(n + 1, (int)cc), a.dim_at(n, (int)cc), b.diff_at(n, (int)cc));
        c.diff[(size_t)i][cc] = std::move(dm);
      }
    }
  }
  return c;
}

RepComplex pullback_rep(const CellularMap& f, const RepComplex& F) {
  if (f.target != F.K && f.target.get() != F.K.get())
    throw std::invalid_argument("pullback_rep: map target mismatch");
  RepComplex G;
  G.K = f.source;
  G.R = F.R;
  G.domain = preimage(f, F.domain);
  G.lo = F.lo;
  size_t N = (size_t)f.source->size();
  int cnt = F.degree_count();
  G.dims.assign((size_t)cnt, std::vector<int>(N, 0));
  if (cnt > 0) G.diff.assign((size_t)cnt - 1, std::vector<Matrix>(N));
  G.gen.resize((size_t)cnt);
  for (int i = 0; i < cnt; ++i) {
    int n = F.lo + i;
    for (size_t c = 0; c < N; ++c) G.dims[(size_t)i][c] = F.dim_at(n, f.image[c]);
    G.gen[(size_t)i].resize(N);
    for (size_t c = 0; c < N; ++c) {
      const auto& fs = f.source->facets((int)c);
      G.gen[(size_t)i][c].reserve(fs.size());
      for (const auto& [face, sign] : fs)
        G.gen[(size_t)i][c].push_back(F.gen_path(n, f.image[(size_t)face], f.image[c]));
    }
    if (i + 1 < cnt)
      for (size_t c = 0; c < N; ++c) G.diff[(size_t)i][c] = F.diff_at(n, f.image[c]);
  }
  return G;
}

ChainComplex stalk_complex(const RepComplex& F, int cell) {
  ChainComplex c;
  c.R = F.R;
  c.lo = F.lo;
  for (int i = 0; i < F.degree_count(); ++i) {
    c.dims.push_back(F.dims[(size_t)i][(size_t)cell]);
    if (i + 1 < F.degree_count()) c.d.push_back(F.diff[(size_t)i][(size_t)cell]);
  }
  return c;
}

namespace {

// The compactly supported section complex over an open set, indexed: one slot
// per (cell, internal degree) in cell-index order, graded by total degree.
struct GcSlot {
  int cell;
  int n; // absolute internal degree
  int offset;
  int width;
};

struct GcIndex {
  int tlo = 0;
  std::vector<std::vector<GcSlot>> slots;
  std::vector<int> dims;
  std::vector<Matrix> d;
};

GcIndex build_gc(const RepComplex& F, const Bitset& V, int tlo, int thi) {
  const CellComplex& K = *F.K;
  GcIndex gc;
  gc.tlo = tlo;
  std::vector<int> cells = V.to_list();
  int cnt = thi - tlo + 1;
  gc.slots.resize((size_t)cnt);
  gc.dims.assign((size_t)cnt, 0);
  for (int ti = 0; ti < cnt; ++ti) {
    int t = tlo + ti;
    for (int c : cells) {
      int n = t - K.dim_of(c);
      int w = F.dim_at(n, c);
      if (w > 0) {
        gc.slots[(size_t)ti].push_back({c, n, gc.dims[(size_t)ti], w});
        gc.dims[(size_t)ti] += w;
      }
    }
  }
  // per-degree locator
  auto locate = [&](int ti, int cell, int n) -> const GcSlot* {
    for (const GcSlot& s : gc.slots[(size_t)ti])
      if (s.cell == cell && s.n == n) return &s;
    return nullptr;
  };
  for (int ti = 0; ti + 1 < cnt; ++ti) {
    Matrix m(F.R, gc.dims[(size_t)ti + 1], gc.dims[(size_t)ti]);
    for (const GcSlot& src : gc.slots[(size_t)ti]) {
      // internal differential, with the sign of the cellular degree
      if (src.n < F.hi()) {
        if (const GcSlot* dst = locate(ti + 1, src.cell, src.n + 1)) {
          int sgn = K.dim_of(src.cell) % 2 == 0 ? 1 : -1;
          paste_signed(m, dst->offset, src.offset, F.diff_at(src.n, src.cell), sgn, F.R);
        }
      }
      // signed generization into cofacets
      for (int cof : K.cofacets(src.cell)) {
        if (!V.get((size_t)cof)) continue;
        const GcSlot* dst = locate(ti + 1, cof, src.n);
        if (!dst) continue;
        int s = facet_slot(K, cof, src.cell);
        int sign = K.facets(cof)[(size_t)s].second;
        paste_signed(m, dst->offset, src.offset, F.gen_mat(src.n, cof, s), sign, F.R);
      }
    }
    gc.d.push_back(std::move(m));
  }
  return gc;
}

} // namespace

ChainComplex compact_sections(const RepComplex& F, const Bitset& U) {
  if (!F.K->is_up_closed(U))
    throw std::invalid_argument("compact_sections: subset must be open");
  ChainComplex c;
  c.R = F.R;
  if (F.degree_count() == 0) return c;
  Bitset V = U;
  V &= F.domain;
  GcIndex gc = build_gc(F, V, F.lo, F.hi() + F.K->dim());
  c.lo = gc.tlo;
  c.dims = std::move(gc.dims);
  c.d = std::move(gc.d);
  return c.trimmed();
}

RepComplex verdier_dual(const RepComplex& F) {
  const CellComplex& K = *F.K;
  size_t N = (size_t)K.size();
  if (F.degree_count() == 0) return F;
  int tlo = F.lo, thi = F.hi() + K.dim();
  int cnt = thi - tlo + 1;
  RepComplex D;
  D.K = F.K;
  D.R = F.R;
  D.domain = F.domain;
  D.lo = -thi;
  D.dims.assign((size_t)cnt, std::vector<int>(N, 0));
  D.diff.assign((size_t)cnt - 1, std::vector<Matrix>(N, Matrix(F.R, 0, 0)));
  D.gen.resize((size_t)cnt);
  for (auto& layer : D.gen) layer.resize(N);

  // star section complexes, kept for the slot layouts
  std::vector<GcIndex> star(N);
  for (size_t c = 0; c < N; ++c) {
    if (!F.domain.get(c)) continue;
    star[c] = build_gc(F, K.up_set((int)c), tlo, thi);
    for (int ti = 0; ti < cnt; ++ti) {
      // total degree t lands in dual degree -t
      int mi = thi - (tlo + ti);
      D.dims[(size_t)mi][c] = star[c].dims[(size_t)ti];
    }
    for (int ti = 0; ti + 1 < cnt; ++ti) {
      int mi = thi - (tlo + ti + 1); // the dual of d^t starts at degree -(t+1)
      D.diff[(size_t)mi][c] = star[c].d[(size_t)ti].transpose();
    }
  }
  // generization: dualized extension by zero between star inclusions
  for (int mi = 0; mi < cnt; ++mi) {
    int ti = -(D.lo + mi) - tlo;
    for (size_t c = 0; c < N; ++c) {
      const auto& fs = K.facets((int)c);
      D.gen[(size_t)mi][c].reserve(fs.size());
      for (const auto& [f, sgn] : fs) {
        (void)sgn;
        Matrix g(D.R, D.dims[(size_t)mi][c], D.dims[(size_t)mi][(size_t)f]);
        if (F.domain.get(c) && F.domain.get((size_t)f)) {
          for (const GcSlot& a : star[c].slots[(size_t)ti]) {
            for (const GcSlot& b : star[(size_t)f].slots[(size_t)ti])
              if (b.cell == a.cell && b.n == a.n) {
                for (int w = 0; w < a.width; ++w)
                  g.at(a.offset + w, b.offset + w) = D.R.one();
                break;
              }
          }
        }
        D.gen[(size_t)mi][c].push_back(std::move(g));
      }
    }
  }
  return D;
}

namespace {

// ascending chains of the face order inside a cell subset; when anchored, all
// chains start at the anchor cell
void grow_chains(const CellComplex& K, const std::vector<int>& cells, std::vector<int>& cur,
                 std::vector<std::vector<int>>& out) {
  out.push_back(cur);
  for (int c : cells) {
    if (c == cur.back() || !K.leq(cur.back(), c)) continue;
    cur.push_back(c);
    grow_chains(K, cells, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> chains_in(const CellComplex& K, const Bitset& V, int anchor) {
  std::vector<int> cells = V.to_list();
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  if (anchor >= 0) {
    cur = {anchor};
    grow_chains(K, cells, cur, out);
  } else {
    for (int c : cells) {
      cur = {c};
      grow_chains(K, cells, cur, out);
    }
  }
  return out;
}

// limit complex over the given chains: a slot per (chain, internal degree)
// valued in the top cell, alternating-drop differential with generization on
// the top-drop term. When anchored, drops of the first element are omitted.
ChainComplex roos_of_chains(const RepComplex& F, const std::vector<std::vector<int>>& chains,
                            bool anchored) {
  ChainComplex c;
  c.R = F.R;
  if (F.degree_count() == 0 || chains.empty()) return c;
  std::map<std::vector<int>, int> cidx;
  size_t maxlen = 1;
  for (size_t i = 0; i < chains.size(); ++i) {
    cidx[chains[i]] = (int)i;
    maxlen = std::max(maxlen, chains[i].size());
  }
  int tlo = F.lo, thi = F.hi() + (int)maxlen - 1;
  int cnt = thi - tlo + 1;
  struct Slot {
    int chain;
    int n;
    int offset;
    int width;
  };
  std::vector<std::vector<Slot>> slots((size_t)cnt);
  std::vector<int> dims((size_t)cnt, 0);
  for (int ti = 0; ti < cnt; ++ti) {
    int t = tlo + ti;
    for (size_t i = 0; i < chains.size(); ++i) {
      int n = t - ((int)chains[i].size() - 1);
      int w = F.dim_at(n, chains[i].back());
      if (w > 0) {
        slots[(size_t)ti].push_back({(int)i, n, dims[(size_t)ti], w});
        dims[(size_t)ti] += w;
      }
    }
  }
  auto locate = [&](int ti, int chain, int n) -> const Slot* {
    for (const Slot& s : slots[(size_t)ti])
      if (s.chain == chain && s.n == n) return &s;
    return nullptr;
  };
  for (int ti = 0; ti + 1 < cnt; ++ti) {
    Matrix m(F.R, dims[(size_t)ti + 1], dims[(size_t)ti]);
    // chain-extension terms, gathered from the target side by dropping one
    // element of the longer chain
    for (const Slot& dst : slots[(size_t)ti + 1]) {
      const std::vector<int>& ch = chains[(size_t)dst.chain];
      int L = (int)ch.size();
      if (L < 2) continue;
      for (int i = anchored ? 1 : 0; i < L; ++i) {
        std::vector<int> sub;
        sub.reserve((size_t)L - 1);
        for (int j = 0; j < L; ++j)
          if (j != i) sub.push_back(ch[(size_t)j]);
        auto it = cidx.find(sub);
        if (it == cidx.end()) continue;
        const Slot* src = locate(ti, it->second, dst.n);
        if (!src) continue;
        int sign = i % 2 == 0 ? 1 : -1;
        if (i == L - 1) {
          Matrix g = F.gen_path(dst.n, sub.back(), ch.back());
          paste_signed(m, dst.offset, src->offset, g, sign, F.R);
        } else {
          for (int w = 0; w < src->width; ++w)
            m.at(dst.offset + w, src->offset + w) =
                sign < 0 ? F.R.neg(F.R.one()) : F.R.one();
        }
      }
    }
    // internal differential with the sign of the chain length
    for (const Slot& src : slots[(size_t)ti]) {
      if (src.n >= F.hi()) continue;
      const Slot* dst = locate(ti + 1, src.chain, src.n + 1);
      if (!dst) continue;
      int k = (int)chains[(size_t)src.chain].size() - 1;
      paste_signed(m, dst->offset, src.offset,
                   F.diff_at(src.n, chains[(size_t)src.chain].back()), k % 2 == 0 ? 1 : -1,
                   F.R);
    }
    c.d.push_back(std::move(m));
  }
  c.lo = tlo;
  c.dims = std::move(dims);
  return c.trimmed();
}

} // namespace

ChainComplex sections_roos(const RepComplex& F, const Bitset& U) {
  if (!F.K->is_up_closed(U))
    throw std::invalid_argument("sections_roos: subset must be open");
  Bitset V = U;
  V &= F.domain;
  return roos_of_chains(F, chains_in(*F.K, V, -1), false);
}

ChainComplex costalk_roos(const RepComplex& F, int cell) {
  if (!F.domain.get((size_t)cell)) return ChainComplex{F.R, 0, {}, {}};
  Bitset V = F.K->up_set(cell);
  V &= F.domain;
  return roos_of_chains(F, chains_in(*F.K, V, cell), true);
}

RepComplex truncate_le(const RepComplex& F, int m) {
  if (!F.R.is_field()) throw std::domain_error("truncate_le: field coefficients only");
  if (m >= F.hi()) return F;
  size_t N = (size_t)F.K->size();
  RepComplex G;
  G.K = F.K;
  G.R = F.R;
  G.domain = F.domain;
  G.lo = F.lo;
  if (m < F.lo) {
    G.domain = F.domain;
    return G;
  }
  int cnt = m - F.lo + 1;
  G.dims.assign((size_t)cnt, std::vector<int>(N, 0));
  if (cnt > 1) G.diff.assign((size_t)cnt - 1, std::vector<Matrix>(N));
  G.gen.resize((size_t)cnt);
  for (int i = 0; i + 1 < cnt; ++i) {
    G.dims[(size_t)i] = F.dims[(size_t)i];
    G.gen[(size_t)i] = F.gen[(size_t)i];
    if (i + 2 < cnt) G.diff[(size_t)i] = F.diff[(size_t)i];
  }
  // top degree: kernels of the outgoing differential, with induced structure
  std::vector<Matrix> ker(N);
  for (size_t c = 0; c < N; ++c) {
    ker[c] = kernel_basis(F.diff_at(m, (int)c));
    G.dims[(size_t)cnt - 1][c] = ker[c].cols();
  }
  G.gen[(size_t)cnt - 1].resize(N);
  for (size_t c = 0; c < N; ++c) {
    const auto& fs = F.K->facets((int)c);
    G.gen[(size_t)cnt - 1][c].reserve(fs.size());
    for (size_t s = 0; s < fs.size(); ++s) {
      int f = fs[s].first;
      auto g = solve_matrix(ker[c], F.gen_mat(m, (int)c, (int)s) * ker[(size_t)f]);
      if (!g) throw std::logic_error("truncate_le: generization left the kernel");
      G.gen[(size_t)cnt - 1][c].push_back(std::move(*g));
    }
  }
  if (cnt > 1)
    for (size_t c = 0; c < N; ++c) {
      auto dm = solve_matrix(ker[c], F.diff_at(m - 1, (int)c));
      if (!dm) throw std::logic_error("truncate_le: differential left the kernel");
      G.diff[(size_t)cnt - 2][c] = std::move(*dm);
    }
  return G;
}

RepComplex cohomology_sheaf(const RepComplex& F, int n) {
  if (!F.R.is_field()) throw std::domain_error("cohomology_sheaf: field coefficients only");
  const Coeffs& R = F.R;
  size_t N = (size_t)F.K->size();
  RepComplex H;
  H.K = F.K;
  H.R = R;
  H.domain = F.domain;
  H.lo = n;
  H.dims.assign(1, std::vector<int>(N, 0));
  H.gen.resize(1);
  H.gen[0].resize(N);
  if (n < F.lo || n > F.hi()) {
    for (size_t c = 0; c < N; ++c)
      H.gen[0][c].assign(F.K->facets((int)c).size(), Matrix(R, 0, 0));
    return H;
  }
  std::vector<Matrix> into(N), basis(N), against(N);
  for (size_t c = 0; c < N; ++c) {
    int dcur = F.dim_at(n, (int)c);
    Matrix din = n > F.lo ? F.diff_at(n - 1, (int)c) : Matrix(R, dcur, 0);
    Matrix dout = n < F.hi() ? F.diff_at(n, (int)c) : Matrix(R, F.dim_at(n + 1, (int)c), dcur);
    Matrix kerb = kernel_basis(dout);
    // pick kernel columns independent of the image of the incoming differential
    Matrix aug(R, dcur, din.cols() + kerb.cols());
    paste(aug, 0, 0, din);
    paste(aug, 0, din.cols(), kerb);
    RowReduceResult rr = row_reduce(aug);
    std::vector<int> keep;
    for (int p : rr.pivot_cols)
      if (p >= din.cols()) keep.push_back(p - din.cols());
    Matrix hb(R, dcur, (int)keep.size());
    for (size_t j = 0; j < keep.size(); ++j)
      for (int r = 0; r < dcur; ++r) hb.at(r, (int)j) = kerb.at(r, keep[j]);
    H.dims[0][c] = (int)keep.size();
    into[c] = din;
    basis[c] = hb;
    // the class map: coordinates in [image | basis], basis part kept
    Matrix cls(R, dcur, din.cols() + hb.cols());
    paste(cls, 0, 0, din);
    paste(cls, 0, din.cols(), hb);
    against[c] = cls;
  }
  for (size_t c = 0; c < N; ++c) {
    const auto& fs = F.K->facets((int)c);
    H.gen[0][c].reserve(fs.size());
    for (size_t s = 0; s < fs.size(); ++s) {
      int f = fs[s].first;
      auto sol = solve_matrix(against[c], F.gen_mat(n, (int)c, (int)s) * basis[(size_t)f]);
      if (!sol) throw std::logic_error("cohomology_sheaf: class map not solvable");
      Matrix g(R, H.dims[0][c], H.dims[0][(size_t)f]);
      for (int r = 0; r < g.rows(); ++r)
        for (int cc = 0; cc < g.cols(); ++cc) g.at(r, cc) = sol->at(into[c].cols() + r, cc);
      H.gen[0][c].push_back(std::move(g));
    }
  }
  return H;
}

} // namespace gx
