#pragma once
// Complexes of elementary injective sheaves, presented by labels. The
// elementary injective attached to a cell is the constant sheaf on the cell's
// closure; maps between two of them form a free rank-one module when the
// target's cell is a face of the source's and vanish otherwise. A complex of
// such objects is therefore a matrix of ring elements subject to a label
// condition, which keeps every derived operation at the level of sparse
// scalar matrices:
//
//   - direct image along a cellular map relabels generators, nothing else;
//   - direct image from an open subset reads the same matrices on the
//     larger space;
//   - stalks, supported sections, and global sections are submatrices
//     (labels above the cell / equal to the cell / everything);
//   - the dual is assembled from closures of labels.
//
// The price is size: resolving an arbitrary sheaf needs one generator per
// ascending chain of cells. minimize_labeled cancels unit entries between
// same-labeled generators until none remain, which cuts resolutions down to
// their minimal form (on a closed manifold, one generator per cell for the
// constant sheaf), optionally tracking the homotopy equivalence.

#include "gx/cellmap.hpp"
#include "gx/chain.hpp"
#include "gx/rep.hpp"

namespace gx {

// Column-major sparse matrix over the shared scalar type. Zero entries are
// never stored; columns keep their entries sorted by row.
struct SparseMat {
  Coeffs R;
  int rows = 0, cols = 0;
  std::vector<std::vector<std::pair<int, Scalar>>> columns;

  SparseMat() = default;
  SparseMat(const Coeffs& ring, int r, int c);
  static SparseMat identity(const Coeffs& ring, int n);
  static SparseMat from_dense(const Matrix& m);
  Matrix to_dense() const;

  // Accumulates into the (r, c) slot, dropping the entry if it cancels.
  void add_at(int r, int c, const Scalar& v);
  Scalar get(int r, int c) const;
  SparseMat transpose() const;
  SparseMat times(const SparseMat& o) const;
  SparseMat plus(const SparseMat& o) const;
  SparseMat minus(const SparseMat& o) const;
  SparseMat scaled(const Scalar& s) const;
  bool is_zero() const;
  long nnz() const;
  bool equals(const SparseMat& o) const;
  // Elimination with sparsity-guided pivoting; fields only.
  int rank() const;
};

// The boundary matrix of the underlying cell complex without densifying:
// rows are (d-1)-cells, columns are d-cells, entries the incidence signs.
SparseMat sparse_boundary(const ComplexPtr& K, int d, const Coeffs& R);

struct LabComplex {
  ComplexPtr K;
  Coeffs R;
  int lo = 0;
  // labels[i][j]: the cell labeling generator j in degree lo+i
  std::vector<std::vector<int>> labels;
  // d[i]: degree lo+i -> lo+i+1; entry (h, g) needs label(h) <= label(g)
  std::vector<SparseMat> d;

  int degree_count() const { return (int)labels.size(); }
  int hi() const { return lo + degree_count() - 1; }
  int dim_at(int n) const;
  int total() const;
  long nnz() const;
  // degree -> (label cell -> generator count); the shape invariant most
  // tests pin
  std::map<int, std::map<int, int>> label_census() const;
  void validate() const;
  LabComplex shifted(int s) const; // degree n picks up old n+s
  LabComplex trimmed() const;
  static LabComplex direct_sum(const LabComplex& a, const LabComplex& b);
};

// A degreewise map of labeled complexes (same ambient complex); entry
// (h, g) of comp[i] again needs label_B(h) <= label_A(g).
struct LabMap {
  int lo = 0;
  std::vector<SparseMat> comp;
  const SparseMat& at(int n) const;
  // commutation with both differentials and the label condition
  void validate(const LabComplex& A, const LabComplex& B) const;
};
LabMap compose_lab(const LabMap& g, const LabMap& f);

struct LabReduction {
  LabComplex M;
  bool tracked = false;
  LabMap iota; // M -> original
  LabMap pi;   // original -> M
};

// Cancels same-label unit entries until none remain. With track set, the
// two homotopy equivalences are carried along (pi after iota is the
// identity of M on the nose).
LabReduction minimize_labeled(const LabComplex& L, bool track = false);

// Injective model of the constant sheaf: one generator per ascending chain
// of cells, labeled by the chain's bottom, with the insertion differential.
LabComplex resolve_constant(const ComplexPtr& K, const Coeffs& R);
// Same construction with every chain inside the up-closed subset: the
// derived direct image of the constant sheaf on that open subspace.
LabComplex resolve_constant_on(const ComplexPtr& K, const Coeffs& R,
                               const Bitset& U);

// The dualizing complex: one generator per cell, labeled by the cell, in
// degree minus its dimension, with the transposed signed incidence as the
// differential. Already minimal.
LabComplex dualizing_labeled(const ComplexPtr& K, const Coeffs& R);

// Derived direct image along a proper cellular map: relabel each generator
// by the image of its label.
LabComplex pushforward_labeled(const CellularMap& f, const LabComplex& L);

// Inverse image on an up-closed subset: keep the generators labeled inside.
LabComplex restrict_labeled(const LabComplex& L, const Bitset& U);

// Injective model of a representation complex: one generator per ascending
// chain and basis slot of the value at the chain's top, labeled by the
// bottom. For a representation supported on an open domain this builds the
// derived direct image under the inclusion of the domain.
LabComplex rep_to_labeled(const RepComplex& F);

// The same object read off as a representation complex: the stalk at a cell
// collects the generators labeled at or above it, and generization maps
// forget the slots that drop out.
RepComplex labeled_to_rep(const LabComplex& L);

// Value of the complex at one cell: generators labeled at or above it.
ChainComplex stalk_labeled(const LabComplex& L, int cell);
// Sections supported at one cell: the same-label diagonal block.
ChainComplex costalk_labeled(const LabComplex& L, int cell);
// Derived global sections: each elementary injective contributes one slot,
// so this is the scalar matrix read as a plain complex.
ChainComplex sections_labeled(const LabComplex& L);

// The dual complex, assembled from the dualizing complexes of the label
// closures. Minimize afterwards; the raw output has one generator per
// (generator, face of its label) pair.
LabComplex verdier_labeled(const LabComplex& L);

// Maps from A to B as a complex of modules; cohomology in degree n gives
// the maps A -> B[n] in the derived category. Dense, so keep the inputs
// minimized.
ChainComplex hom_chain(const LabComplex& A, const LabComplex& B);

} // namespace gx
