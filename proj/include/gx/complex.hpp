#pragma once
// Finite regular cell complexes presented by their face posets: simplicial
// complexes with per-cell vertex orders, and regular CW complexes with signed
// covering relations. Open sets are up-closed cell sets (open stars and their
// unions); this is the combinatorial carrier everything downstream computes on.

#include "gx/matrix.hpp"
#include <map>
#include <string>
#include <tuple>

namespace gx {

// Minimal fixed-size bit set used for cell subsets and the face-order closure.
class Bitset {
public:
  Bitset() : n_(0) {}
  explicit Bitset(size_t n) : n_(n), w_((n + 63) / 64, 0) {}
  static Bitset full(size_t n) {
    Bitset b(n);
    for (size_t i = 0; i < n; ++i) b.set(i);
    return b;
  }
  size_t size() const { return n_; }
  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i, bool v = true) {
    if (v)
      w_[i >> 6] |= (uint64_t)1 << (i & 63);
    else
      w_[i >> 6] &= ~((uint64_t)1 << (i & 63));
  }
  size_t count() const {
    size_t c = 0;
    for (uint64_t w : w_) c += (size_t)__builtin_popcountll(w);
    return c;
  }
  bool any() const {
    for (uint64_t w : w_)
      if (w) return true;
    return false;
  }
  Bitset& operator|=(const Bitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  Bitset& subtract(const Bitset& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }
  bool operator==(const Bitset& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool is_subset_of(const Bitset& o) const {
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  bool intersects(const Bitset& o) const {
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }
  std::vector<int> to_list() const {
    std::vector<int> v;
    for (size_t i = 0; i < n_; ++i)
      if (get(i)) v.push_back((int)i);
    return v;
  }

private:
  size_t n_;
  std::vector<uint64_t> w_;
};

struct Cell {
  std::string name; // canonical id used in reports and gluing
  int dim = 0;
  std::vector<int> verts; // simplicial cells: oriented vertex list; empty for CW cells
};

// A finite regular cell complex. Immutable once constructed. Construction
// verifies that the signed covering relation squares to zero; the CW
// constructor derives the signs itself (each cell's attaching signs are read
// off a generating cycle on its boundary subcomplex, which both orients the
// cell and certifies that the boundary has the homology of a sphere in top
// degree).
class CellComplex {
public:
  CellComplex() = default;

  // Simplicial complex generated by the given simplices (all faces are added).
  // Each simplex is listed by its ordered vertex list; the order fixes the
  // orientation used for incidence signs. Cells are indexed canonically by
  // (dimension, sorted vertex list).
  static CellComplex from_simplices(const std::vector<std::vector<int>>& simplices);

  // Regular CW complex from explicit cells and unsigned covering pairs
  // (face, cell). Signs are derived dimension by dimension.
  static CellComplex regular_cw(std::vector<Cell> cells,
                                const std::vector<std::pair<int, int>>& covering);

  // Regular CW complex with caller-supplied signs (face, cell, sign).
  static CellComplex regular_cw_signed(std::vector<Cell> cells,
                                       const std::vector<std::tuple<int, int, int>>& covering);

  int size() const { return (int)cells_.size(); }
  int dim() const { return top_dim_; }
  const Cell& cell(int i) const { return cells_[(size_t)i]; }
  int dim_of(int i) const { return cells_[(size_t)i].dim; }
  bool simplicial() const { return simplicial_; }
  int cell_by_name(const std::string& n) const; // -1 if absent
  int simplex_index(std::vector<int> verts) const; // sorted internally; -1 if absent
  const std::vector<std::pair<int, int>>& facets(int i) const { return facets_[(size_t)i]; }
  const std::vector<int>& cofacets(int i) const { return cofacets_[(size_t)i]; }
  const std::vector<int>& cells_of_dim(int d) const;

  // Face order (reflexive): a is a face of b.
  bool leq(int a, int b) const { return downsets_[(size_t)b].get((size_t)a); }
  const Bitset& down_set(int i) const { return downsets_[(size_t)i]; } // faces of i, incl. i
  Bitset up_set(int i) const;                                         // open star of i
  Bitset down_closure(const Bitset& s) const;
  Bitset up_closure(const Bitset& s) const;
  bool is_up_closed(const Bitset& s) const;
  bool is_down_closed(const Bitset& s) const;
  Bitset all_cells() const { return Bitset::full(cells_.size()); }

  // Signed boundary operator from d-cells to (d-1)-cells, optionally restricted
  // to a subset (rows and columns keep only subset cells; the result is a chain
  // complex when the subset is down-closed, and the relative quotient complex
  // when the subset is the complement of a down-closed set).
  Matrix boundary_matrix(int d, const Coeffs& R) const;
  Matrix boundary_matrix(int d, const Coeffs& R, const Bitset& subset) const;

  long euler_characteristic() const;

  // Certify that every cell's boundary interval carries the reduced homology
  // of a sphere of the right dimension (over Q and over F2). Throws with the
  // offending cell's name on failure.
  void verify_boundary_spheres() const;

  std::string describe() const;

private:
  void finalize();              // closure bitsets, dim index, d^2 = 0 check
  void assign_signs();          // derive facet signs dimension by dimension

  std::vector<Cell> cells_;
  std::vector<std::vector<std::pair<int, int>>> facets_; // (face index, sign)
  std::vector<std::vector<int>> cofacets_;
  std::vector<Bitset> downsets_;
  std::vector<std::vector<int>> by_dim_;
  std::map<std::string, int> name_index_;
  std::map<std::vector<int>, int> simplex_index_;
  int top_dim_ = -1;
  bool simplicial_ = true;
};

// Lightweight face-poset view of a complex.
struct FacePoset {
  const CellComplex* K;
  bool leq(int a, int b) const { return K->leq(a, b); }
  int height() const { return K->dim() + 1; } // longest chain, counted by elements
  std::vector<int> elements_per_dim() const;
};
inline FacePoset face_poset(const CellComplex& K) { return FacePoset{&K}; }

// An open set of the face-poset topology: an up-closed set of cells.
struct OpenSet {
  Bitset cells;
  static OpenSet star(const CellComplex& K, int cell) { return OpenSet{K.up_set(cell)}; }
  static OpenSet all(const CellComplex& K) { return OpenSet{K.all_cells()}; }
  static OpenSet of(const CellComplex& K, const Bitset& s); // validates up-closedness
  Bitset complement_closed(const CellComplex& K) const;
};

// Betti numbers over a field, degrees 0..dim (unreduced and reduced).
std::vector<int> betti_numbers(const CellComplex& K, const Coeffs& R);
std::vector<int> reduced_betti(const CellComplex& K, const Coeffs& R);
// Relative Betti numbers of (K, A) for a down-closed A.
std::vector<int> betti_rel(const CellComplex& K, const Bitset& A, const Coeffs& R);

// The order complex of a subset of the face poset: vertices are the subset's
// cells, simplices are the chains. vertex_cell maps new vertex ids back to
// cells; carrier maps each new cell to the maximum of its chain.
struct OrderComplexResult {
  CellComplex complex;
  std::vector<int> vertex_cell; // new vertex id -> old cell index
  std::vector<int> carrier;     // new cell index -> old cell index (top of chain)
};
OrderComplexResult order_complex(const CellComplex& K, const Bitset& subset);

// An ordered partition into locally closed strata; the union of the strata up
// to each index must be open (so strata are listed from most generic to most
// special), and each stratum carries its declared complex dimension, with
// 2 * complex_dim equal to the top cell dimension in the stratum.
struct Stratification {
  std::vector<Bitset> strata;
  std::vector<int> complex_dim;
  static Stratification make(const CellComplex& K, std::vector<Bitset> strata,
                             std::vector<int> complex_dim);
  // Stratification by cell dimension is always valid (one stratum per
  // occupied dimension, top first); complex_dim is then dim/2 rounded up.
  static Stratification by_dimension(const CellComplex& K);
  int stratum_of(int cell) const;
};

} // namespace gx
