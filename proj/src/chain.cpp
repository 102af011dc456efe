#include "gx/chain.hpp"
#include <algorithm>
#include <stdexcept>

namespace gx {

int ChainComplex::dim_at(int n) const {
  int i = n - lo;
  if (i < 0 || i >= (int)dims.size()) return 0;
  return dims[(size_t)i];
}

void ChainComplex::validate() const {
  if (!dims.empty() && d.size() + 1 != dims.size())
    throw std::logic_error("chain complex: differential count mismatch");
  for (size_t i = 0; i < d.size(); ++i) {
    if (d[i].rows() != dims[i + 1] || d[i].cols() != dims[i])
      throw std::logic_error("chain complex: differential shape mismatch");
    if (i + 1 < d.size() && !(d[i + 1] * d[i]).is_zero())
      throw std::logic_error("chain complex: d*d != 0");
  }
}

ChainComplex ChainComplex::shifted(int s) const {
  ChainComplex c = *this;
  c.lo = lo - s;
  if (s % 2 != 0)
    for (Matrix& m : c.d) m = m.scale(R.neg(R.one()));
  return c;
}

ChainComplex ChainComplex::dualized() const {
  ChainComplex c;
  c.R = R;
  c.lo = -hi();
  c.dims.assign(dims.rbegin(), dims.rend());
  for (size_t i = 0; i + 1 < dims.size(); ++i)
    c.d.push_back(d[dims.size() - 2 - i].transpose());
  return c;
}

ChainComplex ChainComplex::trimmed() const {
  size_t a = 0, b = dims.size();
  while (a < b && dims[a] == 0) ++a;
  while (b > a && dims[b - 1] == 0) --b;
  ChainComplex c;
  c.R = R;
  c.lo = lo + (int)a;
  c.dims.assign(dims.begin() + (long)a, dims.begin() + (long)b);
  for (size_t i = a; i + 1 < b; ++i) c.d.push_back(d[i]);
  return c;
}

ChainComplex ChainComplex::direct_sum(const ChainComplex& a, const ChainComplex& b) {
  if (a.dims.empty()) return b;
  if (b.dims.empty()) return a;
  ChainComplex c;
  c.R = a.R;
  c.lo = std::min(a.lo, b.lo);
  int top = std::max(a.hi(), b.hi());
  for (int n = c.lo; n <= top; ++n) c.dims.push_back(a.dim_at(n) + b.dim_at(n));
  for (int n = c.lo; n < top; ++n) {
    Matrix m(c.R, a.dim_at(n + 1) + b.dim_at(n + 1), a.dim_at(n) + b.dim_at(n));
    auto paste = [&](const ChainComplex& src, int r0, int c0) {
      int i = n - src.lo;
      if (i < 0 || i >= (int)src.d.size()) return;
      const Matrix& blk = src.d[(size_t)i];
      for (int r = 0; r < blk.rows(); ++r)
        for (int cc = 0; cc < blk.cols(); ++cc) m.at(r0 + r, c0 + cc) = blk.at(r, cc);
    };
    paste(a, 0, 0);
    paste(b, a.dim_at(n + 1), a.dim_at(n));
    c.d.push_back(std::move(m));
  }
  return c;
}

std::map<int, int> ChainComplex::cohomology_dims() const {
  if (!R.is_field()) throw std::logic_error("cohomology_dims needs field coefficients");
  std::map<int, int> h;
  std::vector<int> ranks(d.size());
  for (size_t i = 0; i < d.size(); ++i) ranks[i] = rank_of(d[i]);
  for (size_t i = 0; i < dims.size(); ++i) {
    int out = i < d.size() ? ranks[i] : 0;
    int in = i > 0 ? ranks[i - 1] : 0;
    int v = dims[i] - out - in;
    if (v != 0) h[lo + (int)i] = v;
  }
  return h;
}

std::map<int, long> ChainComplex::cohomology_log_sizes() const {
  if (R.is_field()) throw std::logic_error("cohomology_log_sizes is for Z/p^k");
  long k = (long)R.val_p(R.zero());
  // log_p of kernel and image sizes of each differential, off the diagonal form
  std::vector<long> kers(d.size()), ims(d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    const Matrix& A = d[i];
    if (A.cols() == 0) {
      kers[i] = 0;
      ims[i] = 0;
      continue;
    }
    if (A.rows() == 0) {
      kers[i] = k * A.cols();
      ims[i] = 0;
      continue;
    }
    LocalDiagResult dg = diagonalize_over_local(A);
    int mn = std::min(A.rows(), A.cols());
    long ker = 0, im = 0;
    for (int j = 0; j < A.cols(); ++j) {
      long e = j < mn ? (long)R.val_p(dg.D.at(j, j)) : k;
      ker += e;
      if (j < mn) im += k - e;
    }
    kers[i] = ker;
    ims[i] = im;
  }
  std::map<int, long> h;
  for (size_t i = 0; i < dims.size(); ++i) {
    long ker = i < d.size() ? kers[i] : k * (long)dims[i];
    long im = i > 0 ? ims[i - 1] : 0;
    if (ker - im != 0) h[lo + (int)i] = ker - im;
  }
  return h;
}

} // namespace gx
