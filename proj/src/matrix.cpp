#include "gx/matrix.hpp"
#include <sstream>

namespace gx {

Matrix Matrix::identity(const Coeffs& R, int n) {
  Matrix m(R, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = R.one();
  return m;
}

Matrix Matrix::from_ints(const Coeffs& R, const std::vector<std::vector<long>>& v) {
  int rows = (int)v.size();
  int cols = rows ? (int)v[0].size() : 0;
  Matrix m(R, rows, cols);
  for (int i = 0; i < rows; ++i) {
    if ((int)v[i].size() != cols) throw std::invalid_argument("from_ints: ragged rows");
    for (int j = 0; j < cols; ++j) m.at(i, j) = R.from_int(v[i][j]);
  }
  return m;
}

bool Matrix::is_zero() const {
  for (const auto& x : a_)
    if (!R_.is_zero(x)) return false;
  return true;
}

Matrix Matrix::transpose() const {
  Matrix t(R_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

std::string Matrix::str() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    os << (i ? "\n[" : "[");
    for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << R_.to_string(at(i, j));
    os << "]";
  }
  return os.str();
}

bool Matrix::operator==(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return false;
  for (size_t i = 0; i < a_.size(); ++i)
    if (!R_.eq(a_[i], o.a_[i])) return false;
  return true;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix add: shape");
  Matrix c(a.R_, a.rows_, a.cols_);
  for (size_t i = 0; i < a.a_.size(); ++i) c.a_[i] = a.R_.add(a.a_[i], b.a_[i]);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix sub: shape");
  Matrix c(a.R_, a.rows_, a.cols_);
  for (size_t i = 0; i < a.a_.size(); ++i) c.a_[i] = a.R_.sub(a.a_[i], b.a_[i]);
  return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix mul: shape");
  const Coeffs& R = a.R_;
  Matrix c(R, a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const Scalar& aik = a.at(i, k);
      if (R.is_zero(aik)) continue;
      for (int j = 0; j < b.cols_; ++j) {
        const Scalar& bkj = b.at(k, j);
        if (R.is_zero(bkj)) continue;
        c.at(i, j) = R.add(c.at(i, j), R.mul(aik, bkj));
      }
    }
  return c;
}

Matrix Matrix::scale(const Scalar& s) const {
  Matrix c(R_, rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) c.a_[i] = R_.mul(a_[i], s);
  return c;
}

std::vector<Scalar> Matrix::apply(const std::vector<Scalar>& v) const {
  if ((int)v.size() != cols_) throw std::invalid_argument("apply: shape");
  std::vector<Scalar> r(rows_, R_.zero());
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (!R_.is_zero(at(i, j)) && !R_.is_zero(v[j]))
        r[i] = R_.add(r[i], R_.mul(at(i, j), v[j]));
  return r;
}

RowReduceResult row_reduce(const Matrix& A) {
  const Coeffs& R = A.ring();
  if (!R.is_field())
    throw std::domain_error("row_reduce: not defined over " + R.name() + "; use diagonalize_over_local");
  RowReduceResult res{0, {}, A, Matrix::identity(R, A.rows())};
  Matrix& M = res.rref;
  Matrix& T = res.transform;
  int r = 0;
  for (int c = 0; c < A.cols() && r < A.rows(); ++c) {
    int piv = -1;
    for (int i = r; i < A.rows(); ++i)
      if (!R.is_zero(M.at(i, c))) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r) {
      for (int j = 0; j < A.cols(); ++j) std::swap(M.at(piv, j), M.at(r, j));
      for (int j = 0; j < A.rows(); ++j) std::swap(T.at(piv, j), T.at(r, j));
    }
    Scalar inv = R.inv(M.at(r, c));
    for (int j = 0; j < A.cols(); ++j) M.at(r, j) = R.mul(M.at(r, j), inv);
    for (int j = 0; j < A.rows(); ++j) T.at(r, j) = R.mul(T.at(r, j), inv);
    for (int i = 0; i < A.rows(); ++i) {
      if (i == r || R.is_zero(M.at(i, c))) continue;
      Scalar f = M.at(i, c);
      for (int j = 0; j < A.cols(); ++j) M.at(i, j) = R.sub(M.at(i, j), R.mul(f, M.at(r, j)));
      for (int j = 0; j < A.rows(); ++j) T.at(i, j) = R.sub(T.at(i, j), R.mul(f, T.at(r, j)));
    }
    res.pivot_cols.push_back(c);
    ++r;
  }
  res.rank = r;
  return res;
}

int rank_of(const Matrix& A) { return row_reduce(A).rank; }

Matrix reduce_mod_p(const Matrix& A) {
  const Coeffs& R = A.ring();
  if (R.is_rational()) throw std::domain_error("reduce_mod_p: rational matrix");
  Coeffs F = Coeffs::prime_field(R.p());
  Matrix B(F, A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      B.at(i, j) = uint64_t(std::get<uint64_t>(A.at(i, j)) % R.p());
  return B;
}

LocalDiagResult diagonalize_over_local(const Matrix& A) {
  const Coeffs& R = A.ring();
  if (R.is_rational())
    throw std::domain_error("diagonalize_over_local: expects modular coefficients");
  int m = A.rows(), n = A.cols();
  LocalDiagResult res{Matrix::identity(R, m), A, Matrix::identity(R, n)};
  Matrix& U = res.U;
  Matrix& D = res.D;
  Matrix& V = res.V;
  auto val = [&](const Scalar& s) { return R.val_p(s); };
  int t = 0;
  while (t < m && t < n) {
    // find entry of minimal p-valuation in the remaining block
    int bi = -1, bj = -1;
    unsigned best = R.k() + 1;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j) {
        if (R.is_zero(D.at(i, j))) continue;
        unsigned v = val(D.at(i, j));
        if (v < best) { best = v; bi = i; bj = j; }
      }
    if (bi < 0) break; // remaining block zero
    if (bi != t)
      for (int j = 0; j < n; ++j) std::swap(D.at(bi, j), D.at(t, j));
    if (bi != t)
      for (int j = 0; j < m; ++j) std::swap(U.at(bi, j), U.at(t, j));
    if (bj != t) {
      for (int i = 0; i < m; ++i) std::swap(D.at(i, bj), D.at(i, t));
      for (int i = 0; i < n; ++i) std::swap(V.at(i, bj), V.at(i, t));
    }
    // normalize the pivot to exactly p^v by scaling its row (mirrored in U)
    unsigned v = val(D.at(t, t));
    Scalar unit = R.divide_p_power(D.at(t, t), v);
    Scalar ui = R.inv(unit);
    for (int j = 0; j < n; ++j) D.at(t, j) = R.mul(D.at(t, j), ui);
    for (int j = 0; j < m; ++j) U.at(t, j) = R.mul(U.at(t, j), ui);
    // clear column t below/above via row ops (entries divisible by p^v)
    for (int i = 0; i < m; ++i) {
      if (i == t || R.is_zero(D.at(i, t))) continue;
      Scalar f = R.divide_p_power(D.at(i, t), v); // exact: valuation >= v
      for (int j = 0; j < n; ++j) D.at(i, j) = R.sub(D.at(i, j), R.mul(f, D.at(t, j)));
      for (int j = 0; j < m; ++j) U.at(i, j) = R.sub(U.at(i, j), R.mul(f, U.at(t, j)));
    }
    // clear row t via column ops
    for (int j = 0; j < n; ++j) {
      if (j == t || R.is_zero(D.at(t, j))) continue;
      Scalar f = R.divide_p_power(D.at(t, j), v);
      for (int i = 0; i < m; ++i) D.at(i, j) = R.sub(D.at(i, j), R.mul(f, D.at(i, t)));
      for (int i = 0; i < n; ++i) V.at(i, j) = R.sub(V.at(i, j), R.mul(f, V.at(i, t)));
    }
    ++t;
  }
  return res;
}

bool is_invertible(const Matrix& A) {
  if (A.rows() != A.cols()) return false;
  const Coeffs& R = A.ring();
  if (R.is_field()) return rank_of(A) == A.rows();
  return rank_of(reduce_mod_p(A)) == A.rows();
}

Scalar det(const Matrix& A) {
  const Coeffs& R = A.ring();
  if (!R.is_field()) throw std::domain_error("det: field coefficients only");
  if (A.rows() != A.cols()) throw std::invalid_argument("det: square matrices only");
  Matrix M = A;
  int n = A.rows();
  Scalar d = R.one();
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (!R.is_zero(M.at(i, c))) { piv = i; break; }
    if (piv < 0) return R.zero();
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(M.at(piv, j), M.at(c, j));
      d = R.neg(d);
    }
    d = R.mul(d, M.at(c, c));
    Scalar inv = R.inv(M.at(c, c));
    for (int i = c + 1; i < n; ++i) {
      if (R.is_zero(M.at(i, c))) continue;
      Scalar f = R.mul(M.at(i, c), inv);
      for (int j = c; j < n; ++j) M.at(i, j) = R.sub(M.at(i, j), R.mul(f, M.at(c, j)));
    }
  }
  return d;
}

Matrix kernel_basis(const Matrix& A) {
  const Coeffs& R = A.ring();
  if (R.is_field()) {
    auto rr = row_reduce(A);
    int n = A.cols();
    std::vector<int> pivot_of_col(n, -1);
    for (int i = 0; i < (int)rr.pivot_cols.size(); ++i) pivot_of_col[rr.pivot_cols[i]] = i;
    std::vector<int> free_cols;
    for (int j = 0; j < n; ++j)
      if (pivot_of_col[j] < 0) free_cols.push_back(j);
    Matrix K(R, n, (int)free_cols.size());
    for (int t = 0; t < (int)free_cols.size(); ++t) {
      int f = free_cols[t];
      K.at(f, t) = R.one();
      for (int j = 0; j < n; ++j) {
        int pr = pivot_of_col[j];
        if (pr >= 0) K.at(j, t) = R.neg(rr.rref.at(pr, f));
      }
    }
    return K;
  }
  // Z/p^k: kernel of D pulled back through V
  auto ld = diagonalize_over_local(A);
  int n = A.cols();
  unsigned k = R.k();
  std::vector<std::vector<Scalar>> gens;
  int r = std::min(A.rows(), n);
  for (int j = 0; j < n; ++j) {
    unsigned v = (j < r && !R.is_zero(ld.D.at(j, j))) ? R.val_p(ld.D.at(j, j)) : k;
    if (v == 0) continue; // unit pivot: no kernel contribution
    // generator p^{k-v} e_j (full e_j when column is zero)
    Scalar coef = R.one();
    for (unsigned i = 0; i < k - v; ++i) coef = R.mul(coef, R.from_int((long)R.p()));
    std::vector<Scalar> col(n, R.zero());
    for (int i = 0; i < n; ++i) col[i] = R.mul(ld.V.at(i, j), coef);
    gens.push_back(std::move(col));
  }
  Matrix K(R, n, (int)gens.size());
  for (int t = 0; t < (int)gens.size(); ++t)
    for (int i = 0; i < n; ++i) K.at(i, t) = gens[t][i];
  return K;
}

std::optional<std::vector<Scalar>> solve(const Matrix& A, const std::vector<Scalar>& b) {
  const Coeffs& R = A.ring();
  if ((int)b.size() != A.rows()) throw std::invalid_argument("solve: shape");
  if (R.is_field()) {
    auto rr = row_reduce(A);
    std::vector<Scalar> tb = rr.transform.apply(b);
    // consistency: rows past rank must be zero
    for (int i = rr.rank; i < A.rows(); ++i)
      if (!R.is_zero(tb[i])) return std::nullopt;
    std::vector<Scalar> x(A.cols(), R.zero());
    for (int i = 0; i < rr.rank; ++i) x[rr.pivot_cols[i]] = tb[i];
    return x;
  }
  auto ld = diagonalize_over_local(A);
  std::vector<Scalar> c = ld.U.apply(b);
  int r = std::min(A.rows(), A.cols());
  std::vector<Scalar> y(A.cols(), R.zero());
  for (int i = 0; i < A.rows(); ++i) {
    Scalar ci = c[i];
    if (i < r && !R.is_zero(ld.D.at(i, i))) {
      unsigned v = R.val_p(ld.D.at(i, i)); // D entry is exactly p^v after normalization
      if (R.val_p(ci) < v) return std::nullopt;
      y[i] = R.divide_p_power(ci, v);
    } else if (!R.is_zero(ci)) {
      return std::nullopt;
    }
  }
  return ld.V.apply(y);
}

std::optional<Matrix> solve_matrix(const Matrix& A, const Matrix& B) {
  if (B.rows() != A.rows()) throw std::invalid_argument("solve_matrix: shape");
  Matrix X(A.ring(), A.cols(), B.cols());
  for (int j = 0; j < B.cols(); ++j) {
    std::vector<Scalar> b(A.rows());
    for (int i = 0; i < A.rows(); ++i) b[(size_t)i] = B.at(i, j);
    auto x = solve(A, b);
    if (!x) return std::nullopt;
    for (int i = 0; i < A.cols(); ++i) X.at(i, j) = (*x)[(size_t)i];
  }
  return X;
}

Poly minimal_polynomial(const Matrix& A) {
  const Coeffs& R = A.ring();
  if (!R.is_field()) throw std::domain_error("minimal_polynomial: field coefficients only");
  if (A.rows() != A.cols()) throw std::invalid_argument("minimal_polynomial: square matrices only");
  int n = A.rows();
  Poly m = Poly::constant(R, R.one());
  if (n == 0) return m;
  for (int s = 0; s < n && m.degree() < n; ++s) {
    // minimal annihilator of e_s under A via incremental elimination of the
    // Krylov vectors, tracking the expressing combination of powers
    std::vector<std::vector<Scalar>> basis;      // reduced vectors
    std::vector<std::vector<Scalar>> combo;      // their coords in terms of A^j e_s
    std::vector<int> lead_pos;
    std::vector<Scalar> v(n, R.zero());
    v[s] = R.one();
    std::vector<Scalar> cur = v;
    int power = 0;
    for (;;) {
      std::vector<Scalar> red = cur;
      std::vector<Scalar> cmb(power + 1, R.zero());
      cmb[power] = R.one();
      for (size_t bi = 0; bi < basis.size(); ++bi) {
        int lp = lead_pos[bi];
        if (R.is_zero(red[lp])) continue;
        Scalar f = red[lp];
        for (int j = 0; j < n; ++j) red[j] = R.sub(red[j], R.mul(f, basis[bi][j]));
        for (size_t j = 0; j < combo[bi].size() && j < cmb.size(); ++j)
          cmb[j] = R.sub(cmb[j], R.mul(f, combo[bi][j]));
      }
      int lp = -1;
      for (int j = 0; j < n; ++j)
        if (!R.is_zero(red[j])) { lp = j; break; }
      if (lp < 0) {
        // dependency found: cmb gives the annihilating polynomial of e_s
        Poly ann(R, cmb);
        m = Poly::lcm(m, ann.monic());
        break;
      }
      Scalar inv = R.inv(red[lp]);
      for (int j = 0; j < n; ++j) red[j] = R.mul(red[j], inv);
      for (auto& cc : cmb) cc = R.mul(cc, inv);
      basis.push_back(red);
      combo.push_back(cmb);
      lead_pos.push_back(lp);
      cur = A.apply(cur);
      ++power;
    }
  }
  return m;
}

} // namespace gx
