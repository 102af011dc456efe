#pragma once
#include "gx/build.hpp"

#include <utility>

// Geometry shared by the test corpus and the command line tool. Everything
// here is built from the primitive constructions and revalidated by the
// builders themselves (face consistency, freeness of involutions, simplicial
// map checks), so a fixture that constructs at all is already well formed.

namespace gx {

struct MapFixture {
  ComplexPtr source;
  ComplexPtr target;
  CellularMap map;
};

// A proper map onto a complex with a distinguished open subset over which the
// map is a cell-level isomorphism.
struct ResolutionFixture {
  ComplexPtr source;
  ComplexPtr target;
  CellularMap f;
  Bitset U;
};

// A proper family over the hexagonal disk: six fibres over the rim vertices
// joined by prisms over the rim edges, plus a degenerate fibre over the apex.
struct FamilyFixture {
  ComplexPtr total;
  ComplexPtr base;              // cone over the hexagon rim
  CellularMap projection;
  Bitset punctured;             // base minus the apex
  std::vector<int> rim_cycle;   // v0, e01, v1, e12, ... closing back to v0
};

// A self-correspondence of a resolution: the fibre product with its two
// projections onto the resolution source, and the up-closed part where
// boundary effects are cut away.
struct CorrespondenceFixture {
  ResolutionFixture base;
  ComplexPtr W;
  CellularMap p1, p2;
  Bitset open_part;
};

ComplexPtr fx_simplex(int n);
ComplexPtr fx_sphere(int n);
ComplexPtr fx_circle(int k);
ComplexPtr fx_torus();                 // staircase product of two triangles
ComplexPtr fx_rp2();                   // icosahedron mod the antipode

// Grid tori on m x m vertices: squares cut along the main diagonal, along the
// other diagonal, and into four triangles around a center vertex.
ComplexPtr fx_torus_grid(int m);
ComplexPtr fx_torus_grid_anti(int m);
ComplexPtr fx_torus_grid_quad(int m);

// Genus-one Heegaard three-sphere over an m-gon: two triangulated solid tori
// (a disc times a circle, filled in each of the two directions) sharing the
// m x m grid torus. The triangulation is invariant under rotating both
// circle directions simultaneously.
ComplexPtr fx_heegaard_sphere(int m);
// The free antipodal involution of the m = 6 Heegaard sphere.
std::vector<int> fx_heegaard_antipode();
ComplexPtr fx_rp3();

// Two m-gon discs glued along the rim: the two-sphere the circle bundles
// collapse to. Vertices 0..m-1 are the rim, m and m+1 the two centers.
ComplexPtr fx_disc_pair_sphere(int m);

// The fibre collapse of the Heegaard sphere onto the disc pair, (i, j) -> i-j.
MapFixture fx_hopf(int m);
// Its quotient: the circle bundle rp3 -> two-sphere.
MapFixture fx_hopf_quotient();

// Two parallel fibre circles of the 4x4 grid torus collapsed to points: two
// spheres meeting at two points.
ComplexPtr fx_pinched_spheres();
MapFixture fx_pinch();                 // grid torus -> pinched spheres

// Each pair shares one target complex, so the two members can be compared
// as resolutions of the same space over the same open subset.

// Disc-bundle cylinder over the cone on rp3 (through the circle-bundle
// collapse), and the same source with the collapsed end subdivided.
std::pair<ResolutionFixture, ResolutionFixture> fx_cone_rp3_pair();

// The cone on the m = 4 Heegaard sphere: the identity, and the blow-up
// cylinder through the fibre collapse (apex fibre a two-sphere).
std::pair<ResolutionFixture, ResolutionFixture> fx_cone_s3_pair();

// Double cylinder resolving the suspension of rp3 from both ends, and a
// refined variant (one collapsed end subdivided).
std::pair<ResolutionFixture, ResolutionFixture> fx_suspension_rp3_pair();

// Fibre product of the cone-rp3 resolution with itself.
CorrespondenceFixture fx_cone_rp3_self_correspondence();

// Torus bundle over the punctured disk with monodromy a double shear,
// degenerating to the pinched spheres over the apex.
FamilyFixture fx_i2_model();
// The constant torus family over the same disk.
FamilyFixture fx_i2_trivial();

} // namespace gx
