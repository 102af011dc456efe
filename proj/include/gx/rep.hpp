#pragma once
// Complexes of face-poset representations: the concrete model for
// constructible complexes on a finite regular cell complex. A representation
// assigns a free module to each cell of an open (up-closed) domain and a
// generization map to each covering pair, pointing from a face to its
// cofaces, subject to commuting squares on every length-two face interval.
// A complex of representations adds per-cell differentials commuting with
// generization.
//
// The cells outside the domain carry rank zero; an up-closed domain models a
// noncompact, open subspace of the compact ambient complex.

#include "gx/cellmap.hpp"
#include "gx/chain.hpp"
#include "gx/complex.hpp"

namespace gx {

struct RepComplex {
  ComplexPtr K;
  Coeffs R = Coeffs::rationals();
  Bitset domain; // up-closed
  int lo = 0;
  // outer index is degree - lo; cell index runs over all of K
  std::vector<std::vector<int>> dims;
  // diff[i][c] : degree lo+i at c -> degree lo+i+1 at c (one fewer than dims)
  std::vector<std::vector<Matrix>> diff;
  // gen[i][c][s] : value at facet s of c -> value at c, aligned with K->facets(c)
  std::vector<std::vector<std::vector<Matrix>>> gen;

  int degree_count() const { return (int)dims.size(); }
  int hi() const { return lo + degree_count() - 1; }
  int dim_at(int n, int cell) const; // absolute degree, 0 outside range
  const Matrix& diff_at(int n, int cell) const;
  const Matrix& gen_mat(int n, int cell, int slot) const;
  // composite generization along any face path from face up to cell
  Matrix gen_path(int n, int face, int cell) const;
  std::vector<int> total_dims() const; // per degree, summed over cells
  void validate() const;
};

RepComplex zero_rep(ComplexPtr K, const Coeffs& R);
RepComplex constant_sheaf(ComplexPtr K, const Coeffs& R);
// Same underlying data with the domain cut down to a smaller open set.
RepComplex restrict_rep(const RepComplex& F, const Bitset& U);
RepComplex shift_rep(const RepComplex& F, int s); // degree n picks up old n+s
RepComplex rep_direct_sum(const RepComplex& a, const RepComplex& b);
// Stalkwise inverse image along a cellular map (exact on representations).
RepComplex pullback_rep(const CellularMap& f, const RepComplex& F);

// The complex of values at one cell.
ChainComplex stalk_complex(const RepComplex& F, int cell);

// Compactly supported sections over an open subset of the domain: one slot
// per cell and degree, cellular differential by signed generization plus the
// internal differential.
ChainComplex compact_sections(const RepComplex& F, const Bitset& U);

// Derived sections over an open subset of the domain, via the chain-indexed
// limit complex. Size grows with the number of chains in the subset, so keep
// the subset small (stars, punctured stars, small complexes).
ChainComplex sections_roos(const RepComplex& F, const Bitset& U);

// Sections supported at one cell of its own star (the exceptional inverse
// image of the cell inclusion), via chains anchored at the cell.
ChainComplex costalk_roos(const RepComplex& F, int cell);

// Verdier dual on the domain: at each cell the dual of the compactly
// supported section complex of its star, with dualized inclusions as
// generization. Termwise dual is exact here because every term is free.
RepComplex verdier_dual(const RepComplex& F);

// Smart truncation: degrees above m dropped, degree m replaced by the kernel
// of its differential. Field coefficients (kernels stay free).
RepComplex truncate_le(const RepComplex& F, int m);

// The degree-n cohomology representation, concentrated in degree n.
// Field coefficients.
RepComplex cohomology_sheaf(const RepComplex& F, int n);

} // namespace gx
