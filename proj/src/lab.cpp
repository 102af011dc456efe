#include "gx/lab.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace gx {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::logic_error(msg); }

Scalar sign_scalar(const Coeffs& R, int s) {
  return s >= 0 ? R.one() : R.neg(R.one());
}

} // namespace

SparseMat::SparseMat(const Coeffs& ring, int r, int c)
    : R(ring), rows(r), cols(c), columns((size_t)c) {}

SparseMat SparseMat::identity(const Coeffs& ring, int n) {
  SparseMat m(ring, n, n);
  for (int i = 0; i < n; ++i) m.columns[(size_t)i].push_back({i, ring.one()});
  return m;
}

SparseMat SparseMat::from_dense(const Matrix& m) {
  SparseMat s(m.ring(), m.rows(), m.cols());
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r)
      if (!m.ring().is_zero(m.at(r, c)))
        s.columns[(size_t)c].push_back({r, m.at(r, c)});
  return s;
}

Matrix SparseMat::to_dense() const {
  Matrix m(R, rows, cols);
  for (int c = 0; c < cols; ++c)
    for (const auto& [r, v] : columns[(size_t)c]) m.at(r, c) = v;
  return m;
}

void SparseMat::add_at(int r, int c, const Scalar& v) {
  if (R.is_zero(v)) return;
  auto& col = columns[(size_t)c];
  auto it = std::lower_bound(
      col.begin(), col.end(), r,
      [](const std::pair<int, Scalar>& e, int row) { return e.first < row; });
  if (it != col.end() && it->first == r) {
    it->second = R.add(it->second, v);
    if (R.is_zero(it->second)) col.erase(it);
  } else {
    col.insert(it, {r, v});
  }
}

Scalar SparseMat::get(int r, int c) const {
  const auto& col = columns[(size_t)c];
  auto it = std::lower_bound(
      col.begin(), col.end(), r,
      [](const std::pair<int, Scalar>& e, int row) { return e.first < row; });
  if (it != col.end() && it->first == r) return it->second;
  return R.zero();
}

SparseMat SparseMat::transpose() const {
  SparseMat t(R, cols, rows);
  for (int c = 0; c < cols; ++c)
    for (const auto& [r, v] : columns[(size_t)c])
      t.columns[(size_t)r].push_back({c, v});
  return t;
}

SparseMat SparseMat::times(const SparseMat& o) const {
  if (cols != o.rows) fail("sparse product: shape mismatch");
  SparseMat out(R, rows, o.cols);
  for (int c = 0; c < o.cols; ++c) {
    std::map<int, Scalar> acc;
    for (const auto& [k, v] : o.columns[(size_t)c])
      for (const auto& [r, w] : columns[(size_t)k]) {
        auto [it, fresh] = acc.emplace(r, R.zero());
        it->second = R.add(it->second, R.mul(w, v));
      }
    for (const auto& [r, v] : acc)
      if (!R.is_zero(v)) out.columns[(size_t)c].push_back({r, v});
  }
  return out;
}

SparseMat SparseMat::plus(const SparseMat& o) const {
  if (rows != o.rows || cols != o.cols) fail("sparse sum: shape mismatch");
  SparseMat out(R, rows, cols);
  for (int c = 0; c < cols; ++c) {
    out.columns[(size_t)c] = columns[(size_t)c];
    for (const auto& [r, v] : o.columns[(size_t)c]) out.add_at(r, c, v);
  }
  return out;
}

SparseMat SparseMat::minus(const SparseMat& o) const {
  return plus(o.scaled(R.neg(R.one())));
}

SparseMat SparseMat::scaled(const Scalar& s) const {
  SparseMat out(R, rows, cols);
  if (R.is_zero(s)) return out;
  for (int c = 0; c < cols; ++c)
    for (const auto& [r, v] : columns[(size_t)c]) {
      Scalar w = R.mul(v, s);
      if (!R.is_zero(w)) out.columns[(size_t)c].push_back({r, w});
    }
  return out;
}

bool SparseMat::is_zero() const {
  for (const auto& col : columns)
    if (!col.empty()) return false;
  return true;
}

long SparseMat::nnz() const {
  long n = 0;
  for (const auto& col : columns) n += (long)col.size();
  return n;
}

bool SparseMat::equals(const SparseMat& o) const {
  if (rows != o.rows || cols != o.cols) return false;
  for (int c = 0; c < cols; ++c) {
    const auto& a = columns[(size_t)c];
    const auto& b = o.columns[(size_t)c];
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i].first != b[i].first || !R.eq(a[i].second, b[i].second))
        return false;
  }
  return true;
}

int SparseMat::rank() const {
  if (!R.is_field()) fail("sparse rank needs field coefficients");
  // Working copy with row occupancy, eliminated with a cheapest-column,
  // then cheapest-row pivot rule to limit fill.
  std::vector<std::map<int, Scalar>> col((size_t)cols);
  std::vector<std::set<int>> row((size_t)rows);
  for (int c = 0; c < cols; ++c)
    for (const auto& [r, v] : columns[(size_t)c]) {
      col[(size_t)c].emplace(r, v);
      row[(size_t)r].insert(c);
    }
  std::set<int> active;
  for (int c = 0; c < cols; ++c)
    if (!col[(size_t)c].empty()) active.insert(c);
  int rank = 0;
  while (!active.empty()) {
    int g = -1;
    size_t best = 0;
    for (int c : active) {
      size_t n = col[(size_t)c].size();
      if (g < 0 || n < best) {
        g = c;
        best = n;
      }
    }
    int piv = -1;
    size_t rbest = 0;
    for (const auto& [r, v] : col[(size_t)g]) {
      size_t n = row[(size_t)r].size();
      if (piv < 0 || n < rbest) {
        piv = r;
        rbest = n;
      }
    }
    ++rank;
    Scalar uinv = R.inv(col[(size_t)g].at(piv));
    std::map<int, Scalar> colg = col[(size_t)g];
    std::set<int> hit = row[(size_t)piv];
    for (int x : hit) {
      if (x == g) continue;
      Scalar f = R.mul(col[(size_t)x].at(piv), uinv);
      for (const auto& [y, v] : colg) {
        auto it = col[(size_t)x].find(y);
        Scalar delta = R.mul(f, v);
        if (it == col[(size_t)x].end()) {
          col[(size_t)x].emplace(y, R.neg(delta));
          row[(size_t)y].insert(x);
        } else {
          it->second = R.sub(it->second, delta);
          if (R.is_zero(it->second)) {
            col[(size_t)x].erase(it);
            row[(size_t)y].erase(x);
          }
        }
      }
      if (col[(size_t)x].empty()) active.erase(x);
    }
    for (const auto& [y, v] : colg) row[(size_t)y].erase(g);
    col[(size_t)g].clear();
    active.erase(g);
  }
  return rank;
}

SparseMat sparse_boundary(const ComplexPtr& K, int d, const Coeffs& R) {
  auto rows_list = K->cells_of_dim(d - 1);
  auto cols_list = K->cells_of_dim(d);
  std::vector<int> pos((size_t)K->size(), -1);
  for (size_t i = 0; i < rows_list.size(); ++i) pos[(size_t)rows_list[i]] = (int)i;
  SparseMat m(R, (int)rows_list.size(), (int)cols_list.size());
  for (size_t c = 0; c < cols_list.size(); ++c)
    for (const auto& [face, sgn] : K->facets(cols_list[c]))
      m.add_at(pos[(size_t)face], (int)c, R.from_int(sgn));
  return m;
}

int LabComplex::dim_at(int n) const {
  int i = n - lo;
  if (i < 0 || i >= degree_count()) return 0;
  return (int)labels[(size_t)i].size();
}

int LabComplex::total() const {
  int t = 0;
  for (const auto& l : labels) t += (int)l.size();
  return t;
}

long LabComplex::nnz() const {
  long n = 0;
  for (const auto& m : d) n += m.nnz();
  return n;
}

std::map<int, std::map<int, int>> LabComplex::label_census() const {
  std::map<int, std::map<int, int>> out;
  for (int i = 0; i < degree_count(); ++i)
    for (int c : labels[(size_t)i]) out[lo + i][c]++;
  return out;
}

void LabComplex::validate() const {
  if (!K) fail("labeled complex: no underlying space");
  if (d.size() + 1 != labels.size() && !(labels.empty() && d.empty()))
    fail("labeled complex: differential count mismatch");
  for (int i = 0; i < degree_count(); ++i)
    for (int c : labels[(size_t)i])
      if (c < 0 || c >= K->size()) fail("labeled complex: label out of range");
  for (size_t i = 0; i < d.size(); ++i) {
    if (d[i].rows != (int)labels[i + 1].size() ||
        d[i].cols != (int)labels[i].size())
      fail("labeled complex: differential shape mismatch");
    for (int g = 0; g < d[i].cols; ++g)
      for (const auto& [h, v] : d[i].columns[(size_t)g]) {
        if (R.is_zero(v)) fail("labeled complex: stored zero entry");
        if (!K->leq(labels[i + 1][(size_t)h], labels[i][(size_t)g]))
          fail("labeled complex: entry violates the label condition");
      }
  }
  for (size_t i = 0; i + 1 < d.size(); ++i)
    if (!d[i + 1].times(d[i]).is_zero())
      fail("labeled complex: differential does not square to zero");
}

LabComplex LabComplex::shifted(int s) const {
  LabComplex out = *this;
  out.lo = lo - s;
  if (s % 2 != 0)
    for (auto& m : out.d) m = m.scaled(R.neg(R.one()));
  return out;
}

LabComplex LabComplex::trimmed() const {
  int a = 0, b = degree_count();
  while (a < b && labels[(size_t)a].empty()) ++a;
  while (b > a && labels[(size_t)b - 1].empty()) --b;
  LabComplex out;
  out.K = K;
  out.R = R;
  out.lo = lo + a;
  out.labels.assign(labels.begin() + a, labels.begin() + b);
  if (b - a > 1) out.d.assign(d.begin() + a, d.begin() + (b - 1));
  return out;
}

LabComplex LabComplex::direct_sum(const LabComplex& a, const LabComplex& b) {
  if (a.K != b.K) fail("labeled sum: different spaces");
  LabComplex out;
  out.K = a.K;
  out.R = a.R;
  out.lo = std::min(a.lo, b.lo);
  int hi = std::max(a.hi(), b.hi());
  int cnt = hi - out.lo + 1;
  out.labels.resize((size_t)cnt);
  for (int i = 0; i < cnt; ++i) {
    int n = out.lo + i;
    auto& l = out.labels[(size_t)i];
    if (n >= a.lo && n <= a.hi())
      l.insert(l.end(), a.labels[(size_t)(n - a.lo)].begin(),
               a.labels[(size_t)(n - a.lo)].end());
    if (n >= b.lo && n <= b.hi())
      l.insert(l.end(), b.labels[(size_t)(n - b.lo)].begin(),
               b.labels[(size_t)(n - b.lo)].end());
  }
  for (int i = 0; i + 1 < cnt; ++i) {
    int n = out.lo + i;
    SparseMat m(out.R, (int)out.labels[(size_t)i + 1].size(),
                (int)out.labels[(size_t)i].size());
    int acols = (n >= a.lo && n <= a.hi()) ? a.dim_at(n) : 0;
    int arows = (n + 1 >= a.lo && n + 1 <= a.hi()) ? a.dim_at(n + 1) : 0;
    if (acols > 0 && arows > 0 && n - a.lo < (int)a.d.size()) {
      const SparseMat& src = a.d[(size_t)(n - a.lo)];
      for (int c = 0; c < src.cols; ++c)
        for (const auto& [r, v] : src.columns[(size_t)c]) m.add_at(r, c, v);
    }
    int bcols = (n >= b.lo && n <= b.hi()) ? b.dim_at(n) : 0;
    int brows = (n + 1 >= b.lo && n + 1 <= b.hi()) ? b.dim_at(n + 1) : 0;
    if (bcols > 0 && brows > 0 && n - b.lo < (int)b.d.size()) {
      const SparseMat& src = b.d[(size_t)(n - b.lo)];
      for (int c = 0; c < src.cols; ++c)
        for (const auto& [r, v] : src.columns[(size_t)c])
          m.add_at(arows + r, acols + c, v);
    }
    out.d.push_back(std::move(m));
  }
  return out;
}

const SparseMat& LabMap::at(int n) const {
  int i = n - lo;
  if (i < 0 || i >= (int)comp.size()) fail("labeled map: degree out of range");
  return comp[(size_t)i];
}

void LabMap::validate(const LabComplex& A, const LabComplex& B) const {
  for (size_t i = 0; i < comp.size(); ++i) {
    int n = lo + (int)i;
    if (comp[i].rows != B.dim_at(n) || comp[i].cols != A.dim_at(n))
      fail("labeled map: component shape mismatch");
    for (int g = 0; g < comp[i].cols; ++g)
      for (const auto& [h, v] : comp[i].columns[(size_t)g])
        if (!A.K->leq(B.labels[(size_t)(n - B.lo)][(size_t)h],
                      A.labels[(size_t)(n - A.lo)][(size_t)g]))
          fail("labeled map: entry violates the label condition");
    if (i + 1 < comp.size()) {
      SparseMat lhs = (n - B.lo >= 0 && n - B.lo < (int)B.d.size())
                          ? B.d[(size_t)(n - B.lo)].times(comp[i])
                          : SparseMat(B.R, B.dim_at(n + 1), comp[i].cols);
      SparseMat rhs = (n - A.lo >= 0 && n - A.lo < (int)A.d.size())
                          ? comp[i + 1].times(A.d[(size_t)(n - A.lo)])
                          : SparseMat(B.R, comp[i + 1].rows, A.dim_at(n));
      if (!lhs.equals(rhs)) fail("labeled map: does not commute with d");
    }
  }
}

LabMap compose_lab(const LabMap& g, const LabMap& f) {
  LabMap out;
  out.lo = std::max(f.lo, g.lo);
  int hi = std::min(f.lo + (int)f.comp.size(), g.lo + (int)g.comp.size());
  for (int n = out.lo; n < hi; ++n)
    out.comp.push_back(g.at(n).times(f.at(n)));
  return out;
}

// ---------------------------------------------------------------------------
// chain enumeration

namespace {

struct ChainSet {
  // by_len[k]: the ascending chains of k+1 cells, in discovery order
  std::vector<std::vector<std::vector<int>>> by_len;
  std::vector<std::map<std::vector<int>, int>> index;

  void insert(const std::vector<int>& c) {
    size_t k = c.size() - 1;
    if (by_len.size() <= k) {
      by_len.resize(k + 1);
      index.resize(k + 1);
    }
    index[k].emplace(c, (int)by_len[k].size());
    by_len[k].push_back(c);
  }
  int lookup(const std::vector<int>& c) const {
    return index[c.size() - 1].at(c);
  }
  int max_k() const { return (int)by_len.size() - 1; }
};

// Strictly ascending chains with every member inside V, found depth first
// from each starting cell in index order.
ChainSet chains_within(const CellComplex& K, const Bitset& V) {
  std::vector<std::vector<int>> ups((size_t)K.size());
  std::vector<int> members;
  for (int c = 0; c < K.size(); ++c)
    if (V.get((size_t)c)) members.push_back(c);
  for (int c : members)
    for (int x : members)
      if (x != c && K.leq(c, x)) ups[(size_t)c].push_back(x);
  ChainSet out;
  std::vector<int> cur;
  std::vector<std::pair<int, size_t>> stack;
  for (int c : members) {
    cur.assign(1, c);
    out.insert(cur);
    stack.clear();
    stack.push_back({c, 0});
    while (!stack.empty()) {
      auto& [top, next] = stack.back();
      if (next >= ups[(size_t)top].size()) {
        stack.pop_back();
        cur.pop_back();
        continue;
      }
      int x = ups[(size_t)top][next++];
      cur.push_back(x);
      out.insert(cur);
      stack.push_back({x, 0});
    }
    // the outer loop re-seeds cur; after the walk it is empty except that
    // popping the seed itself is skipped above
  }
  return out;
}

} // namespace

LabComplex resolve_constant_on(const ComplexPtr& K, const Coeffs& R,
                               const Bitset& U) {
  if (!K->is_up_closed(U)) fail("constant-sheaf model: subset must be open");
  ChainSet cs = chains_within(*K, U);
  LabComplex L;
  L.K = K;
  L.R = R;
  L.lo = 0;
  int deg = cs.max_k() + 1;
  if (deg <= 0) {
    L.labels.push_back({});
    return L;
  }
  L.labels.resize((size_t)deg);
  for (int k = 0; k < deg; ++k) {
    L.labels[(size_t)k].reserve(cs.by_len[(size_t)k].size());
    for (const auto& c : cs.by_len[(size_t)k])
      L.labels[(size_t)k].push_back(c[0]);
  }
  for (int k = 0; k + 1 < deg; ++k) {
    SparseMat m(R, (int)cs.by_len[(size_t)k + 1].size(),
                (int)cs.by_len[(size_t)k].size());
    std::vector<int> sub;
    for (size_t jh = 0; jh < cs.by_len[(size_t)k + 1].size(); ++jh) {
      const auto& h = cs.by_len[(size_t)k + 1][jh];
      for (size_t i = 0; i < h.size(); ++i) {
        sub.clear();
        for (size_t q = 0; q < h.size(); ++q)
          if (q != i) sub.push_back(h[q]);
        int jg = cs.lookup(sub);
        m.columns[(size_t)jg].push_back(
            {(int)jh, sign_scalar(R, i % 2 == 0 ? 1 : -1)});
      }
    }
    L.d.push_back(std::move(m));
  }
  return L;
}

LabComplex resolve_constant(const ComplexPtr& K, const Coeffs& R) {
  return resolve_constant_on(K, R, K->all_cells());
}

LabComplex dualizing_labeled(const ComplexPtr& K, const Coeffs& R) {
  LabComplex L;
  L.K = K;
  L.R = R;
  L.lo = -K->dim();
  L.labels.resize((size_t)K->dim() + 1);
  for (int dd = 0; dd <= K->dim(); ++dd) {
    auto cells = K->cells_of_dim(dd);
    L.labels[(size_t)(K->dim() - dd)] = cells;
  }
  for (int dd = K->dim(); dd >= 1; --dd) {
    // degree -dd -> -dd+1: the boundary matrix between those cell layers
    L.d.push_back(sparse_boundary(K, dd, R));
  }
  return L;
}

LabComplex pushforward_labeled(const CellularMap& f, const LabComplex& L) {
  if (f.source != L.K) fail("direct image: complex lives on a different space");
  LabComplex out = L;
  out.K = f.target;
  for (auto& layer : out.labels)
    for (int& c : layer) c = f(c);
  return out;
}

LabComplex restrict_labeled(const LabComplex& L, const Bitset& U) {
  if (!L.K->is_up_closed(U)) fail("restriction: subset must be open");
  LabComplex out;
  out.K = L.K;
  out.R = L.R;
  out.lo = L.lo;
  std::vector<std::vector<int>> keep((size_t)L.degree_count());
  out.labels.resize((size_t)L.degree_count());
  for (int i = 0; i < L.degree_count(); ++i) {
    keep[(size_t)i].assign(L.labels[(size_t)i].size(), -1);
    for (size_t j = 0; j < L.labels[(size_t)i].size(); ++j)
      if (U.get((size_t)L.labels[(size_t)i][j])) {
        keep[(size_t)i][j] = (int)out.labels[(size_t)i].size();
        out.labels[(size_t)i].push_back(L.labels[(size_t)i][j]);
      }
  }
  for (size_t i = 0; i < L.d.size(); ++i) {
    SparseMat m(L.R, (int)out.labels[i + 1].size(),
                (int)out.labels[i].size());
    for (int g = 0; g < L.d[i].cols; ++g) {
      if (keep[i][(size_t)g] < 0) continue;
      for (const auto& [h, v] : L.d[i].columns[(size_t)g])
        if (keep[i + 1][(size_t)h] >= 0)
          m.columns[(size_t)keep[i][(size_t)g]].push_back(
              {keep[i + 1][(size_t)h], v});
    }
    out.d.push_back(std::move(m));
  }
  return out.trimmed();
}

LabComplex rep_to_labeled(const RepComplex& F) {
  const CellComplex& K = *F.K;
  ChainSet cs = chains_within(K, K.all_cells());
  int maxk = cs.max_k();
  int degs = F.degree_count();
  int tlo = F.lo, thi = F.hi() + maxk;
  int tcount = thi - tlo + 1;

  LabComplex L;
  L.K = F.K;
  L.R = F.R;
  L.lo = tlo;
  L.labels.resize((size_t)tcount);

  // off[k][chain][n - F.lo] = offset of the slot block inside its degree
  std::vector<std::vector<std::vector<int>>> off((size_t)maxk + 1);
  for (int k = 0; k <= maxk; ++k)
    off[(size_t)k].assign(cs.by_len[(size_t)k].size(),
                          std::vector<int>((size_t)degs, -1));
  for (int t = tlo; t <= thi; ++t) {
    auto& layer = L.labels[(size_t)(t - tlo)];
    for (int k = 0; k <= maxk; ++k) {
      int nidx = t - k - tlo;
      if (nidx < 0 || nidx >= degs) continue;
      for (size_t ci = 0; ci < cs.by_len[(size_t)k].size(); ++ci) {
        const auto& c = cs.by_len[(size_t)k][ci];
        int w = F.dims[(size_t)nidx][(size_t)c.back()];
        if (w == 0) continue;
        off[(size_t)k][ci][(size_t)nidx] = (int)layer.size();
        for (int j = 0; j < w; ++j) layer.push_back(c[0]);
      }
    }
  }

  std::map<std::tuple<int, int, int>, Matrix> path_cache;
  auto gen_between = [&](int n, int a, int b) -> const Matrix& {
    auto key = std::make_tuple(n, a, b);
    auto it = path_cache.find(key);
    if (it == path_cache.end())
      it = path_cache.emplace(key, F.gen_path(n, a, b)).first;
    return it->second;
  };

  std::vector<int> sub;
  for (int t = tlo; t < thi; ++t) {
    SparseMat m(F.R, (int)L.labels[(size_t)(t + 1 - tlo)].size(),
                (int)L.labels[(size_t)(t - tlo)].size());
    // insertion terms, gathered per target chain
    for (int k = 1; k <= maxk; ++k) {
      int nidx = t + 1 - k - tlo;
      if (nidx < 0 || nidx >= degs) continue;
      int n = nidx + tlo;
      for (size_t hi_c = 0; hi_c < cs.by_len[(size_t)k].size(); ++hi_c) {
        int hoff = off[(size_t)k][hi_c][(size_t)nidx];
        if (hoff < 0) continue;
        const auto& h = cs.by_len[(size_t)k][hi_c];
        int w = F.dims[(size_t)nidx][(size_t)h.back()];
        for (size_t i = 0; i + 1 < h.size(); ++i) {
          sub.clear();
          for (size_t q = 0; q < h.size(); ++q)
            if (q != i) sub.push_back(h[q]);
          int goff = off[(size_t)k - 1][(size_t)cs.lookup(sub)][(size_t)nidx];
          Scalar s = sign_scalar(F.R, i % 2 == 0 ? 1 : -1);
          for (int j = 0; j < w; ++j) m.add_at(hoff + j, goff + j, s);
        }
        sub.assign(h.begin(), h.end() - 1);
        int goff = off[(size_t)k - 1][(size_t)cs.lookup(sub)][(size_t)nidx];
        if (goff >= 0) {
          const Matrix& G = gen_between(n, sub.back(), h.back());
          Scalar sg = sign_scalar(F.R, k % 2 == 0 ? 1 : -1);
          for (int jc = 0; jc < G.cols(); ++jc)
            for (int jr = 0; jr < G.rows(); ++jr)
              if (!F.R.is_zero(G.at(jr, jc)))
                m.add_at(hoff + jr, goff + jc, F.R.mul(sg, G.at(jr, jc)));
        }
      }
    }
    // internal differential of the representation
    for (int k = 0; k <= maxk; ++k) {
      int nidx = t - k - tlo;
      if (nidx < 0 || nidx + 1 >= degs) continue;
      int n = nidx + tlo;
      for (size_t ci = 0; ci < cs.by_len[(size_t)k].size(); ++ci) {
        int soff = off[(size_t)k][ci][(size_t)nidx];
        int toff = off[(size_t)k][ci][(size_t)nidx + 1];
        if (soff < 0 || toff < 0) continue;
        const Matrix& D = F.diff_at(n, cs.by_len[(size_t)k][ci].back());
        Scalar sg = sign_scalar(F.R, k % 2 == 0 ? 1 : -1);
        for (int jc = 0; jc < D.cols(); ++jc)
          for (int jr = 0; jr < D.rows(); ++jr)
            if (!F.R.is_zero(D.at(jr, jc)))
              m.add_at(toff + jr, soff + jc, F.R.mul(sg, D.at(jr, jc)));
      }
    }
    L.d.push_back(std::move(m));
  }
  return L.trimmed();
}

namespace {

// generators at or above a cell, per degree, with their positions
std::vector<std::vector<int>> members_above(const LabComplex& L, int cell) {
  std::vector<std::vector<int>> memb((size_t)L.degree_count());
  for (int i = 0; i < L.degree_count(); ++i)
    for (size_t j = 0; j < L.labels[(size_t)i].size(); ++j)
      if (L.K->leq(cell, L.labels[(size_t)i][j]))
        memb[(size_t)i].push_back((int)j);
  return memb;
}

ChainComplex submatrix_complex(const LabComplex& L,
                               const std::vector<std::vector<int>>& memb) {
  ChainComplex c;
  c.R = L.R;
  c.lo = L.lo;
  for (const auto& m : memb) c.dims.push_back((int)m.size());
  for (size_t i = 0; i + 1 < memb.size(); ++i) {
    Matrix m(L.R, (int)memb[i + 1].size(), (int)memb[i].size());
    std::vector<int> pos((size_t)L.d[i].rows, -1);
    for (size_t r = 0; r < memb[i + 1].size(); ++r)
      pos[(size_t)memb[i + 1][r]] = (int)r;
    for (size_t cidx = 0; cidx < memb[i].size(); ++cidx)
      for (const auto& [h, v] : L.d[i].columns[(size_t)memb[i][cidx]])
        if (pos[(size_t)h] >= 0) m.at(pos[(size_t)h], (int)cidx) = v;
    c.d.push_back(std::move(m));
  }
  return c.trimmed();
}

} // namespace

RepComplex labeled_to_rep(const LabComplex& L) {
  const CellComplex& K = *L.K;
  RepComplex F;
  F.K = L.K;
  F.R = L.R;
  F.domain = K.all_cells();
  F.lo = L.lo;
  int degs = L.degree_count();
  std::vector<std::vector<std::vector<int>>> memb((size_t)degs);
  F.dims.assign((size_t)degs, std::vector<int>((size_t)K.size(), 0));
  for (int i = 0; i < degs; ++i) {
    memb[(size_t)i].resize((size_t)K.size());
    for (size_t j = 0; j < L.labels[(size_t)i].size(); ++j) {
      int lab = L.labels[(size_t)i][j];
      for (int c : K.down_set(lab).to_list())
        memb[(size_t)i][(size_t)c].push_back((int)j);
    }
    for (int c = 0; c < K.size(); ++c)
      F.dims[(size_t)i][(size_t)c] = (int)memb[(size_t)i][(size_t)c].size();
  }
  F.diff.assign((size_t)std::max(0, degs - 1), {});
  for (int i = 0; i + 1 < degs; ++i) {
    F.diff[(size_t)i].reserve((size_t)K.size());
    for (int c = 0; c < K.size(); ++c) {
      const auto& rowsl = memb[(size_t)i + 1][(size_t)c];
      const auto& colsl = memb[(size_t)i][(size_t)c];
      Matrix m(L.R, (int)rowsl.size(), (int)colsl.size());
      std::vector<int> pos((size_t)L.d[(size_t)i].rows, -1);
      for (size_t r = 0; r < rowsl.size(); ++r) pos[(size_t)rowsl[r]] = (int)r;
      for (size_t cc = 0; cc < colsl.size(); ++cc)
        for (const auto& [h, v] : L.d[(size_t)i].columns[(size_t)colsl[cc]])
          if (pos[(size_t)h] >= 0) m.at(pos[(size_t)h], (int)cc) = v;
      F.diff[(size_t)i].push_back(std::move(m));
    }
  }
  F.gen.assign((size_t)degs, {});
  for (int i = 0; i < degs; ++i) {
    F.gen[(size_t)i].resize((size_t)K.size());
    for (int c = 0; c < K.size(); ++c) {
      const auto& facets = K.facets(c);
      auto& slots = F.gen[(size_t)i][(size_t)c];
      slots.reserve(facets.size());
      const auto& cl = memb[(size_t)i][(size_t)c];
      for (const auto& [face, sgn] : facets) {
        const auto& fl = memb[(size_t)i][(size_t)face];
        Matrix m(L.R, (int)cl.size(), (int)fl.size());
        std::map<int, int> fpos;
        for (size_t q = 0; q < fl.size(); ++q) fpos.emplace(fl[q], (int)q);
        for (size_t r = 0; r < cl.size(); ++r) {
          auto it = fpos.find(cl[r]);
          if (it != fpos.end()) m.at((int)r, it->second) = L.R.one();
        }
        slots.push_back(std::move(m));
      }
    }
  }
  return F;
}

ChainComplex stalk_labeled(const LabComplex& L, int cell) {
  return submatrix_complex(L, members_above(L, cell));
}

ChainComplex costalk_labeled(const LabComplex& L, int cell) {
  std::vector<std::vector<int>> memb((size_t)L.degree_count());
  for (int i = 0; i < L.degree_count(); ++i)
    for (size_t j = 0; j < L.labels[(size_t)i].size(); ++j)
      if (L.labels[(size_t)i][j] == cell) memb[(size_t)i].push_back((int)j);
  return submatrix_complex(L, memb);
}

ChainComplex sections_labeled(const LabComplex& L) {
  ChainComplex c;
  c.R = L.R;
  c.lo = L.lo;
  for (const auto& l : L.labels) c.dims.push_back((int)l.size());
  for (const auto& m : L.d) c.d.push_back(m.to_dense());
  return c.trimmed();
}

LabComplex verdier_labeled(const LabComplex& L) {
  const CellComplex& K = *L.K;
  // downs[c][dd]: the faces of c of dimension dd, in index order
  std::vector<std::vector<std::vector<int>>> downs((size_t)K.size());
  for (int c = 0; c < K.size(); ++c) {
    downs[(size_t)c].assign((size_t)K.dim() + 1, {});
    for (int f : K.down_set(c).to_list())
      downs[(size_t)c][(size_t)K.dim_of(f)].push_back(f);
  }
  int mlo = -K.dim() - L.hi(), mhi = -L.lo;
  int cnt = mhi - mlo + 1;
  LabComplex D;
  D.K = L.K;
  D.R = L.R;
  D.lo = mlo;
  D.labels.resize((size_t)cnt);
  // offsets[(L-degree index, generator)]: per face dimension, the block start
  std::vector<std::vector<std::vector<int>>> off((size_t)L.degree_count());
  for (int i = 0; i < L.degree_count(); ++i)
    off[(size_t)i].assign(L.labels[(size_t)i].size(),
                          std::vector<int>((size_t)K.dim() + 1, -1));
  for (int m = mlo; m <= mhi; ++m) {
    auto& layer = D.labels[(size_t)(m - mlo)];
    for (int i = 0; i < L.degree_count(); ++i) {
      int n = L.lo + i;
      int dg = -m - n;
      if (dg < 0 || dg > K.dim()) continue;
      for (size_t j = 0; j < L.labels[(size_t)i].size(); ++j) {
        const auto& faces = downs[(size_t)L.labels[(size_t)i][j]][(size_t)dg];
        if (faces.empty()) continue;
        off[(size_t)i][j][(size_t)dg] = (int)layer.size();
        for (int f : faces) layer.push_back(f);
      }
    }
  }
  for (int m = mlo; m < mhi; ++m) {
    SparseMat mat(L.R, (int)D.labels[(size_t)(m + 1 - mlo)].size(),
                  (int)D.labels[(size_t)(m - mlo)].size());
    for (int i = 0; i < L.degree_count(); ++i) {
      int n = L.lo + i;
      int dg = -m - n;
      if (dg < 0 || dg > K.dim()) continue;
      for (size_t j = 0; j < L.labels[(size_t)i].size(); ++j) {
        int soff = off[(size_t)i][j][(size_t)dg];
        if (soff < 0) continue;
        const auto& faces = downs[(size_t)L.labels[(size_t)i][j]][(size_t)dg];
        // boundary steps inside the closure of the label
        if (dg >= 1) {
          int toff = off[(size_t)i][j][(size_t)dg - 1];
          const auto& tfaces =
              downs[(size_t)L.labels[(size_t)i][j]][(size_t)dg - 1];
          std::vector<int> pos((size_t)K.size(), -1);
          for (size_t q = 0; q < tfaces.size(); ++q)
            pos[(size_t)tfaces[q]] = (int)q;
          for (size_t q = 0; q < faces.size(); ++q)
            for (const auto& [face, sgn] : K.facets(faces[q]))
              mat.add_at(toff + pos[(size_t)face], soff + (int)q,
                         sign_scalar(L.R, sgn));
        }
      }
    }
    // transposed part: an entry (h, g) of d at L-degrees n -> n+1 gives, for
    // every face of h's label, a dual entry from (h, face) to (g, face)
    for (size_t di = 0; di < L.d.size(); ++di) {
      int n = L.lo + (int)di;
      const SparseMat& dl = L.d[di];
      for (int g = 0; g < dl.cols; ++g)
        for (const auto& [h, v] : dl.columns[(size_t)g]) {
          int dg = -m - (n + 1);
          if (dg < 0 || dg > K.dim()) continue;
          int soff = off[(size_t)di + 1][(size_t)h][(size_t)dg];
          int toff = off[(size_t)di][(size_t)g][(size_t)dg];
          if (soff < 0) continue;
          const auto& faces =
              downs[(size_t)L.labels[(size_t)di + 1][(size_t)h]][(size_t)dg];
          const auto& tfaces =
              downs[(size_t)L.labels[(size_t)di][(size_t)g]][(size_t)dg];
          std::vector<int> pos((size_t)K.size(), -1);
          for (size_t q = 0; q < tfaces.size(); ++q)
            pos[(size_t)tfaces[q]] = (int)q;
          Scalar w = dg % 2 == 0 ? v : L.R.neg(v);
          for (size_t q = 0; q < faces.size(); ++q)
            mat.add_at(toff + pos[(size_t)faces[q]], soff + (int)q, w);
        }
    }
    D.d.push_back(std::move(mat));
  }
  return D.trimmed();
}

ChainComplex hom_chain(const LabComplex& A, const LabComplex& B) {
  if (A.K != B.K) fail("mapping complex: different spaces");
  const CellComplex& K = *A.K;
  int nlo = B.lo - A.hi(), nhi = B.hi() - A.lo;
  if (A.total() == 0 || B.total() == 0) return ChainComplex{A.R, 0, {}, {}};
  // slots[n - nlo]: (A-degree index, A-generator, B-generator)
  std::vector<std::vector<std::tuple<int, int, int>>> slots(
      (size_t)(nhi - nlo + 1));
  std::vector<std::map<std::tuple<int, int, int>, int>> pos(
      (size_t)(nhi - nlo + 1));
  for (int n = nlo; n <= nhi; ++n)
    for (int ia = 0; ia < A.degree_count(); ++ia) {
      int ib = (A.lo + ia + n) - B.lo;
      if (ib < 0 || ib >= B.degree_count()) continue;
      for (size_t ja = 0; ja < A.labels[(size_t)ia].size(); ++ja)
        for (size_t jb = 0; jb < B.labels[(size_t)ib].size(); ++jb)
          if (K.leq(B.labels[(size_t)ib][jb], A.labels[(size_t)ia][ja])) {
            pos[(size_t)(n - nlo)].emplace(
                std::make_tuple(ia, (int)ja, (int)jb),
                (int)slots[(size_t)(n - nlo)].size());
            slots[(size_t)(n - nlo)].push_back({ia, (int)ja, (int)jb});
          }
    }
  ChainComplex c;
  c.R = A.R;
  c.lo = nlo;
  for (const auto& s : slots) c.dims.push_back((int)s.size());
  for (int n = nlo; n < nhi; ++n) {
    Matrix m(A.R, (int)slots[(size_t)(n + 1 - nlo)].size(),
             (int)slots[(size_t)(n - nlo)].size());
    const auto& tgt = pos[(size_t)(n + 1 - nlo)];
    for (size_t s = 0; s < slots[(size_t)(n - nlo)].size(); ++s) {
      auto [ia, ja, jb] = slots[(size_t)(n - nlo)][s];
      int ib = (A.lo + ia + n) - B.lo;
      // postcompose with B's differential
      if (ib >= 0 && ib < (int)B.d.size())
        for (const auto& [hb, v] : B.d[(size_t)ib].columns[(size_t)jb]) {
          auto it = tgt.find(std::make_tuple(ia, ja, hb));
          if (it != tgt.end()) m.at(it->second, (int)s) = A.R.add(
              m.at(it->second, (int)s), v);
        }
      // precompose with A's differential, with the Koszul sign
      if (ia >= 1) {
        const SparseMat& da = A.d[(size_t)ia - 1];
        for (int gsrc = 0; gsrc < da.cols; ++gsrc) {
          Scalar v = da.get(ja, gsrc);
          if (A.R.is_zero(v)) continue;
          auto it = tgt.find(std::make_tuple(ia - 1, gsrc, jb));
          if (it != tgt.end()) {
            Scalar w = (n % 2 == 0) ? A.R.neg(v) : v;
            m.at(it->second, (int)s) = A.R.add(m.at(it->second, (int)s), w);
          }
        }
      }
    }
    c.d.push_back(std::move(m));
  }
  return c.trimmed();
}

// ---------------------------------------------------------------------------
// minimization

LabReduction minimize_labeled(const LabComplex& L, bool track) {
  const Coeffs& R = L.R;
  int degs = L.degree_count();
  int pairs = std::max(0, degs - 1);
  std::vector<std::vector<std::map<int, Scalar>>> col((size_t)pairs);
  std::vector<std::vector<std::set<int>>> row((size_t)pairs);
  for (int i = 0; i < pairs; ++i) {
    col[(size_t)i].resize(L.labels[(size_t)i].size());
    row[(size_t)i].resize(L.labels[(size_t)i + 1].size());
    for (int g = 0; g < L.d[(size_t)i].cols; ++g)
      for (const auto& [h, v] : L.d[(size_t)i].columns[(size_t)g]) {
        col[(size_t)i][(size_t)g].emplace(h, v);
        row[(size_t)i][(size_t)h].insert(g);
      }
  }
  std::vector<std::vector<char>> alive((size_t)degs);
  for (int i = 0; i < degs; ++i)
    alive[(size_t)i].assign(L.labels[(size_t)i].size(), 1);

  // equivalence tracking: iota columns (per surviving generator, its image
  // in the original complex) and pi columns (per original generator, its
  // image among the survivors), with row occupancy for pi
  std::vector<std::vector<std::map<int, Scalar>>> icol;
  std::vector<std::vector<std::map<int, Scalar>>> pcol;
  std::vector<std::vector<std::set<int>>> prow;
  if (track) {
    icol.resize((size_t)degs);
    pcol.resize((size_t)degs);
    prow.resize((size_t)degs);
    for (int i = 0; i < degs; ++i) {
      size_t n = L.labels[(size_t)i].size();
      icol[(size_t)i].resize(n);
      pcol[(size_t)i].resize(n);
      prow[(size_t)i].resize(n);
      for (size_t j = 0; j < n; ++j) {
        icol[(size_t)i][j].emplace((int)j, R.one());
        pcol[(size_t)i][j].emplace((int)j, R.one());
        prow[(size_t)i][j].insert((int)j);
      }
    }
  }

  using Key = std::tuple<long, int, int, int>; // fill, pair, row, col
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap;
  auto cancellable = [&](int i, int h, int g) {
    return L.labels[(size_t)i][(size_t)g] == L.labels[(size_t)i + 1][(size_t)h];
  };
  auto fill_of = [&](int i, int h, int g) {
    return (long)(row[(size_t)i][(size_t)h].size() - 1) *
           (long)(col[(size_t)i][(size_t)g].size() - 1);
  };
  for (int i = 0; i < pairs; ++i)
    for (size_t g = 0; g < col[(size_t)i].size(); ++g)
      for (const auto& [h, v] : col[(size_t)i][(size_t)g])
        if (cancellable(i, h, (int)g) && R.is_unit(v))
          heap.push({fill_of(i, h, (int)g), i, h, (int)g});

  while (!heap.empty()) {
    auto [fill, i, h, g] = heap.top();
    heap.pop();
    if (!alive[(size_t)i][(size_t)g] || !alive[(size_t)i + 1][(size_t)h])
      continue;
    auto eit = col[(size_t)i][(size_t)g].find(h);
    if (eit == col[(size_t)i][(size_t)g].end() || !R.is_unit(eit->second))
      continue;
    long cur = fill_of(i, h, g);
    if (cur > fill) {
      heap.push({cur, i, h, g});
      continue;
    }
    Scalar uinv = R.inv(eit->second);
    std::map<int, Scalar> colg = col[(size_t)i][(size_t)g];
    colg.erase(h);
    std::set<int> rowh = row[(size_t)i][(size_t)h];
    rowh.erase(g);
    // the Gaussian update on the matrix between these two degrees
    for (int x : rowh) {
      Scalar f = R.mul(col[(size_t)i][(size_t)x].at(h), uinv);
      for (const auto& [y, vyg] : colg) {
        Scalar delta = R.mul(f, vyg);
        auto it = col[(size_t)i][(size_t)x].find(y);
        if (it == col[(size_t)i][(size_t)x].end()) {
          col[(size_t)i][(size_t)x].emplace(y, R.neg(delta));
          row[(size_t)i][(size_t)y].insert(x);
          if (cancellable(i, y, x) && R.is_unit(delta))
            heap.push({fill_of(i, y, x), i, y, x});
        } else {
          it->second = R.sub(it->second, delta);
          if (R.is_zero(it->second)) {
            col[(size_t)i][(size_t)x].erase(it);
            row[(size_t)i][(size_t)y].erase(x);
          } else if (cancellable(i, y, x) && R.is_unit(it->second)) {
            heap.push({fill_of(i, y, x), i, y, x});
          }
        }
      }
      col[(size_t)i][(size_t)x].erase(h);
      if (track) {
        // iota(x) loses f times iota(g)
        for (const auto& [r, w] : icol[(size_t)i][(size_t)g]) {
          auto it = icol[(size_t)i][(size_t)x].find(r);
          Scalar delta = R.mul(f, w);
          if (it == icol[(size_t)i][(size_t)x].end())
            icol[(size_t)i][(size_t)x].emplace(r, R.neg(delta));
          else {
            it->second = R.sub(it->second, delta);
            if (R.is_zero(it->second)) icol[(size_t)i][(size_t)x].erase(it);
          }
        }
      }
    }
    if (track) {
      // pi routes the h-row through what the cancelled pair absorbed
      std::vector<int> zs(prow[(size_t)i + 1][(size_t)h].begin(),
                          prow[(size_t)i + 1][(size_t)h].end());
      for (int z : zs) {
        Scalar b = pcol[(size_t)i + 1][(size_t)z].at(h);
        Scalar bf = R.mul(b, uinv);
        for (const auto& [y, vyg] : colg) {
          Scalar delta = R.mul(bf, vyg);
          auto it = pcol[(size_t)i + 1][(size_t)z].find(y);
          if (it == pcol[(size_t)i + 1][(size_t)z].end()) {
            pcol[(size_t)i + 1][(size_t)z].emplace(y, R.neg(delta));
            prow[(size_t)i + 1][(size_t)y].insert(z);
          } else {
            it->second = R.sub(it->second, delta);
            if (R.is_zero(it->second)) {
              pcol[(size_t)i + 1][(size_t)z].erase(it);
              prow[(size_t)i + 1][(size_t)y].erase(z);
            }
          }
        }
        pcol[(size_t)i + 1][(size_t)z].erase(h);
      }
      prow[(size_t)i + 1][(size_t)h].clear();
      for (int z : prow[(size_t)i][(size_t)g])
        pcol[(size_t)i][(size_t)z].erase(g);
      prow[(size_t)i][(size_t)g].clear();
      icol[(size_t)i][(size_t)g].clear();
      icol[(size_t)i + 1][(size_t)h].clear();
    }
    // detach the cancelled pair
    for (const auto& [y, v] : colg) row[(size_t)i][(size_t)y].erase(g);
    col[(size_t)i][(size_t)g].clear();
    for (int x : rowh) col[(size_t)i][(size_t)x].erase(h);
    row[(size_t)i][(size_t)h].clear();
    alive[(size_t)i][(size_t)g] = 0;
    alive[(size_t)i + 1][(size_t)h] = 0;
    // g's row below and h's column above fall away with them
    if (i > 0) {
      for (int x : row[(size_t)i - 1][(size_t)g])
        col[(size_t)i - 1][(size_t)x].erase(g);
      row[(size_t)i - 1][(size_t)g].clear();
    }
    if (i + 1 < pairs) {
      for (const auto& [y, v] : col[(size_t)i + 1][(size_t)h])
        row[(size_t)i + 1][(size_t)y].erase(h);
      col[(size_t)i + 1][(size_t)h].clear();
    }
  }

  // safety: nothing cancellable may be left
  for (int i = 0; i < pairs; ++i)
    for (size_t g = 0; g < col[(size_t)i].size(); ++g)
      for (const auto& [h, v] : col[(size_t)i][(size_t)g])
        if (cancellable(i, h, (int)g) && R.is_unit(v))
          fail("minimization left a removable pair");

  // assemble the surviving complex
  std::vector<std::vector<int>> renum((size_t)degs);
  LabReduction out;
  out.M.K = L.K;
  out.M.R = R;
  out.M.lo = L.lo;
  out.M.labels.resize((size_t)degs);
  for (int i = 0; i < degs; ++i) {
    renum[(size_t)i].assign(L.labels[(size_t)i].size(), -1);
    for (size_t j = 0; j < L.labels[(size_t)i].size(); ++j)
      if (alive[(size_t)i][j]) {
        renum[(size_t)i][j] = (int)out.M.labels[(size_t)i].size();
        out.M.labels[(size_t)i].push_back(L.labels[(size_t)i][j]);
      }
  }
  for (int i = 0; i < pairs; ++i) {
    SparseMat m(R, (int)out.M.labels[(size_t)i + 1].size(),
                (int)out.M.labels[(size_t)i].size());
    for (size_t g = 0; g < col[(size_t)i].size(); ++g) {
      if (renum[(size_t)i][g] < 0) continue;
      for (const auto& [h, v] : col[(size_t)i][(size_t)g])
        m.columns[(size_t)renum[(size_t)i][g]].push_back(
            {renum[(size_t)i + 1][(size_t)h], v});
    }
    out.M.d.push_back(std::move(m));
  }
  int a = 0, b = degs;
  while (a < b && out.M.labels[(size_t)a].empty()) ++a;
  while (b > a && out.M.labels[(size_t)b - 1].empty()) --b;
  if (track) {
    out.tracked = true;
    out.iota.lo = L.lo + a;
    out.pi.lo = L.lo + a;
    for (int i = a; i < b; ++i) {
      SparseMat im(R, (int)L.labels[(size_t)i].size(),
                   (int)out.M.labels[(size_t)i].size());
      for (size_t j = 0; j < L.labels[(size_t)i].size(); ++j) {
        if (renum[(size_t)i][j] < 0) continue;
        for (const auto& [r, v] : icol[(size_t)i][j])
          im.columns[(size_t)renum[(size_t)i][j]].push_back({r, v});
      }
      out.iota.comp.push_back(std::move(im));
      SparseMat pm(R, (int)out.M.labels[(size_t)i].size(),
                   (int)L.labels[(size_t)i].size());
      for (size_t z = 0; z < L.labels[(size_t)i].size(); ++z)
        for (const auto& [y, v] : pcol[(size_t)i][z])
          pm.columns[z].push_back({renum[(size_t)i][(size_t)y], v});
      out.pi.comp.push_back(std::move(pm));
    }
  }
  out.M = out.M.trimmed();
  return out;
}

} // namespace gx
