#pragma once
// Bounded cochain complexes of finite free modules. These are the value
// objects extracted from sheaf data: stalk complexes, section complexes,
// local cohomology at a cell. Degrees run lo .. lo + dims.size() - 1 and
// d[i] maps degree lo+i to degree lo+i+1.

#include "gx/matrix.hpp"
#include <map>

namespace gx {

struct ChainComplex {
  Coeffs R;
  int lo = 0;
  std::vector<int> dims;
  std::vector<Matrix> d; // one fewer than dims (empty when dims has at most one entry)

  int hi() const { return lo + (int)dims.size() - 1; }
  int dim_at(int n) const; // 0 outside the stored range
  void validate() const;   // shapes and d*d = 0

  ChainComplex shifted(int s) const; // degree n picks up the old degree n+s
  ChainComplex dualized() const;     // termwise dual, degrees negated
  ChainComplex trimmed() const;      // drop zero-rank degrees at both ends
  static ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b);

  // Nonzero cohomology only, keyed by degree. The first form needs field
  // coefficients; the second is for Z/p^k and reports log_p of |H^n|.
  std::map<int, int> cohomology_dims() const;
  std::map<int, long> cohomology_log_sizes() const;
};

} // namespace gx
