#pragma once
// Geometric constructions on cell complexes: cones, suspensions, staircase
// products, barycentric and relative subdivision, mapping cylinders (pinched
// prisms over the collapsed directions), quotients by free involutions,
// subcomplexes, gluing, and simplicial approximation of vertex maps.

#include "gx/cellmap.hpp"

namespace gx {

ComplexPtr simplex_complex(int n);            // full n-simplex
ComplexPtr sphere_complex(int n);             // boundary of the (n+1) cross-polytope
ComplexPtr circle_complex(int m);             // m-gon, m >= 3
ComplexPtr point_complex();

struct ConeResult {
  ComplexPtr complex;
  ComplexPtr interval;     // cone on a point: the target of the collapse
  CellularMap collapse;    // cone(K) -> interval, K-levels to the base vertex
  CellularMap incl_base;   // K -> cone(K)
  int apex_vertex = -1;
  int apex_cell = -1;      // in cone(K)
};
ConeResult cone(ComplexPtr K);

struct SuspensionResult {
  ComplexPtr complex;
  CellularMap incl_base;
  int north_vertex = -1, south_vertex = -1;
  int north_cell = -1, south_cell = -1;
};
SuspensionResult suspension(ComplexPtr K);

struct ProductResult {
  ComplexPtr complex;
  CellularMap proj1, proj2;
  int stride = 0; // vertex (a, b) of the product has id a * stride + b
  int vid(int a, int b) const { return a * stride + b; }
};
// Staircase triangulation; both factors must have face-consistent vertex
// orders (each face's stored order is the order induced from every parent).
ProductResult product(ComplexPtr K, ComplexPtr L);

struct SubdivisionResult {
  ComplexPtr complex;
  Refinement carrier;           // subdivision -> K, each new cell to the top of its chain
  std::vector<int> vertex_cell; // barycenter vertex -> cell of K
};
SubdivisionResult barycentric(ComplexPtr K);
// Subdivide only the cells in the down-closed set S; cells outside S survive
// unchanged, cells of S are replaced by the chains they dominate.
SubdivisionResult relative_subdivision(ComplexPtr K, const Bitset& S);

struct CylinderResult {
  ComplexPtr complex;
  CellularMap incl_source;  // A -> Cyl
  CellularMap incl_target;  // B -> Cyl
  CellularMap retraction;   // Cyl -> B, the homotopy equivalence
  CellularMap to_cone;      // Cyl -> cone(A), collapsing B to the apex
  ConeResult cone_source;   // the cone on A that to_cone lands in
};
// The mapping cylinder of a simplicial map, as a regular CW complex: cells of
// B, cells of A, and one radial (dim+1)-cell per cell of A. Over directions
// phi collapses, the radial cells pinch onto lower-dimensional B-cells.
CylinderResult mapping_cylinder(const CellularMap& phi);

struct QuotientResult {
  ComplexPtr complex;
  CellularMap projection;
  std::vector<int> vertex_orbit; // vertex of K -> vertex of quotient
};
// Quotient by a simplicial involution acting freely on cells; rejects actions
// where a simplex meets an orbit twice or a fibre is not exactly one orbit.
QuotientResult quotient_by_involution(ComplexPtr K, const std::vector<int>& tau);

// Complex generated by the images of K's simplices under a vertex map
// (dimension may collapse).
ComplexPtr simplicial_image(ComplexPtr K, const std::vector<int>& vmap);

struct SubcomplexResult {
  ComplexPtr complex;
  CellularMap inclusion;
  std::vector<int> old_of_new, new_of_old; // new_of_old is -1 off the subcomplex
};
SubcomplexResult subcomplex(ComplexPtr K, const Bitset& cells); // down-closed

struct GluePiece {
  ComplexPtr K;
  std::vector<std::string> names; // names[i] renames cell i; equal names are glued
};
struct GlueResult {
  ComplexPtr complex;
  std::vector<std::vector<int>> piece_maps; // per piece, cell -> glued cell
};
// Union of the pieces with cells of equal name identified. Dimensions, facet
// lists, and incidence signs must agree on shared cells.
GlueResult glue(const std::vector<GluePiece>& pieces);

// Same gluing, but the pieces' incidence signs are discarded and a fresh
// consistent assignment is derived for the union. Needed when pieces were
// signed independently: a shared cell's sign normalization depends on cell
// numbering, so honest unions of separately built complexes can clash even
// though the unsigned incidence data agrees.
GlueResult glue_resign(const std::vector<GluePiece>& pieces);

struct ApproxResult {
  CellularMap map;       // sd^k(A) -> B, simplicial
  Refinement carrier;    // sd^k(A) -> A
  int subdivisions = 0;
};
// Simplicial approximation: subdivide A until the vertex map extends to a
// simplicial map (original vertices keep their images, barycenters are chosen
// greedily). Throws if the bound is exhausted.
ApproxResult subdivide_map(ComplexPtr A, ComplexPtr B, const std::vector<int>& vmap, int bound);

} // namespace gx
