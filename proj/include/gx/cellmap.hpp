#pragma once
// Cellular maps between face posets: order-preserving, dimension-nonincreasing
// cell assignments, optionally presented by a simplicial vertex map. Also the
// induced chain maps on cellular chains, solved degree by degree.

#include "gx/complex.hpp"
#include <memory>

namespace gx {

using ComplexPtr = std::shared_ptr<const CellComplex>;

struct CellularMap {
  ComplexPtr source;
  ComplexPtr target;
  std::vector<int> image;      // per source cell, the target cell
  std::vector<int> vertex_map; // simplicial presentation when nonempty
  bool smooth_proper = false;  // caller-asserted geometric flag

  int operator()(int cell) const { return image[(size_t)cell]; }
  bool is_simplicial() const { return !vertex_map.empty(); }

  // Validates monotonicity and the dimension bound.
  static CellularMap of(ComplexPtr src, ComplexPtr tgt, std::vector<int> image);
  // Builds the cell assignment from a vertex map; every simplex's image vertex
  // set must span a simplex of the target.
  static CellularMap from_vertex_map(ComplexPtr src, ComplexPtr tgt,
                                     const std::vector<int>& vmap);
  static CellularMap identity(ComplexPtr K);
};

CellularMap compose(const CellularMap& g, const CellularMap& f); // g after f

// A refinement assignment from a subdivided complex to the complex it
// subdivides: order-preserving with dimensions nondecreasing, each fine cell
// sent to the coarse cell whose interior contains it. The dimension bound runs
// the other way from a cellular map's, so refinements get their own type.
struct Refinement {
  ComplexPtr fine;
  ComplexPtr coarse;
  std::vector<int> carrier; // per fine cell, the coarse cell

  int operator()(int cell) const { return carrier[(size_t)cell]; }
  static Refinement of(ComplexPtr fine, ComplexPtr coarse, std::vector<int> carrier);
  static Refinement identity(ComplexPtr K);
};

// outer after inner: inner subdivides outer.fine, the result subdivides
// outer.coarse.
Refinement compose(const Refinement& outer, const Refinement& inner);

Bitset preimage(const CellularMap& f, const Bitset& target_set);

// The composite f after r, from the refined complex to f's target. Only legal
// when every refined cell still lands weakly below its carrier's image in
// dimension (e.g. the subdivided region collapses under f); validated.
CellularMap through_refinement(const CellularMap& f, const Refinement& r);

// Whether f restricts to a bijection of cells between the preimage of U and U
// (the combinatorial form of "isomorphism over U"); U must be up-closed.
bool is_iso_over(const CellularMap& f, const Bitset& U);

// The induced map on cellular chain complexes: matrices C_d(source) ->
// C_d(target). A cell whose image drops dimension contributes zero; a
// dimension-preserving cell maps onto its image cell with the coefficient
// forced by commutation with the boundary. Throws if no chain map exists
// compatible with the cell assignment (the map is then not realizable on
// this cell structure).
std::vector<Matrix> chain_maps(const CellularMap& f, const Coeffs& R);

} // namespace gx
