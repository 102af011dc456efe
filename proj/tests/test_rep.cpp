#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gx/build.hpp"
#include "gx/fixtures.hpp"
#include "gx/rep.hpp"

using namespace gx;

static std::map<int, int> as_map(const std::vector<int>& betti) {
  std::map<int, int> m;
  for (size_t i = 0; i < betti.size(); ++i)
    if (betti[i] != 0) m[(int)i] = betti[i];
  return m;
}

// independent mod-p^k cohomology of the whole complex, straight off the
// transposed boundary matrices
static std::map<int, long> cw_cohomology_log(const CellComplex& K, const Coeffs& R) {
  ChainComplex c;
  c.R = R;
  c.lo = 0;
  for (int d = 0; d <= K.dim(); ++d) {
    c.dims.push_back((int)K.cells_of_dim(d).size());
    if (d < K.dim()) c.d.push_back(K.boundary_matrix(d + 1, R).transpose());
  }
  return c.cohomology_log_sizes();
}

TEST_CASE("sections of the constant sheaf recover cell cohomology") {
  for (ComplexPtr K : {fx_sphere(2), fx_torus(), fx_rp2()}) {
    for (const Coeffs& R : {Coeffs::prime_field(2), Coeffs::rationals(), Coeffs::prime_field(3)}) {
      RepComplex F = constant_sheaf(K, R);
      F.validate();
      std::map<int, int> expect = as_map(betti_numbers(*K, R));
      CHECK(compact_sections(F, K->all_cells()).cohomology_dims() == expect);
      CHECK(sections_roos(F, K->all_cells()).cohomology_dims() == expect);
    }
  }
}

TEST_CASE("compactly supported sections of open pieces") {
  ComplexPtr K = fx_torus();
  Coeffs q = Coeffs::rationals();
  RepComplex F = constant_sheaf(K, q);
  for (int c : {K->simplex_index({0}), K->simplex_index({0, 1})}) {
    Bitset U = K->up_set(c);
    Bitset A = K->all_cells();
    A.subtract(U);
    std::map<int, int> expect = as_map(betti_rel(*K, A, q));
    CHECK(compact_sections(F, U).cohomology_dims() == expect);
    CHECK(compact_sections(restrict_rep(F, U), K->all_cells()).cohomology_dims() == expect);
  }
  // an open star is contractible from the inside: sections see only the point
  CHECK(sections_roos(F, K->up_set(K->simplex_index({0}))).cohomology_dims() ==
        std::map<int, int>{{0, 1}});
}

TEST_CASE("sections around the cone point") {
  auto pr = fx_cone_rp3_pair();
  ComplexPtr K = pr.first.target;
  int apex = -1;
  for (int c = 0; c < K->size(); ++c)
    if (!pr.first.U.get((size_t)c)) apex = c;
  REQUIRE(apex >= 0);
  Bitset punctured = K->up_set(apex);
  punctured.set((size_t)apex, false);
  CHECK(K->is_up_closed(punctured));

  RepComplex f2 = constant_sheaf(K, Coeffs::prime_field(2));
  RepComplex q = constant_sheaf(K, Coeffs::rationals());
  CHECK(compact_sections(f2, punctured).cohomology_dims() ==
        std::map<int, int>{{1, 1}, {2, 1}, {3, 1}, {4, 1}});
  CHECK(compact_sections(q, punctured).cohomology_dims() ==
        std::map<int, int>{{1, 1}, {4, 1}});
}

TEST_CASE("derived sections near the apex of a cone over the torus") {
  ConeResult cn = cone(fx_torus());
  ComplexPtr K = cn.complex;
  Coeffs q = Coeffs::rationals(), f2 = Coeffs::prime_field(2);
  std::map<int, int> torus_coh = as_map(betti_numbers(*fx_torus(), q));
  // sections of the punctured star see the link
  Bitset punctured = K->up_set(cn.apex_cell);
  punctured.set((size_t)cn.apex_cell, false);
  RepComplex F = constant_sheaf(K, q);
  CHECK(sections_roos(F, punctured).cohomology_dims() == torus_coh);
  // local sections at the apex: reduced link cohomology, shifted up by one
  CHECK(costalk_roos(F, cn.apex_cell).cohomology_dims() ==
        std::map<int, int>{{2, 2}, {3, 1}});
  CHECK(costalk_roos(constant_sheaf(K, f2), cn.apex_cell).cohomology_dims() ==
        std::map<int, int>{{2, 2}, {3, 1}});
}

TEST_CASE("local sections detect manifold dimension") {
  Coeffs q = Coeffs::rationals(), f2 = Coeffs::prime_field(2);
  ComplexPtr s2 = fx_sphere(2);
  RepComplex F = constant_sheaf(s2, q);
  // at a d-cell of an n-manifold the supported sections live in degree n-d:
  // one codimension step per level of the link
  for (int c = 0; c < s2->size(); ++c)
    CHECK(costalk_roos(F, c).cohomology_dims() ==
          std::map<int, int>{{2 - s2->dim_of(c), 1}});

  ComplexPtr rp3 = fx_rp3();
  RepComplex G2 = constant_sheaf(rp3, f2);
  RepComplex Gq = constant_sheaf(rp3, q);
  for (int d = 0; d <= 3; ++d) {
    int c = rp3->cells_of_dim(d).front();
    CHECK(costalk_roos(G2, c).cohomology_dims() == std::map<int, int>{{3 - d, 1}});
    CHECK(costalk_roos(Gq, c).cohomology_dims() == std::map<int, int>{{3 - d, 1}});
  }
}

TEST_CASE("verdier duality on closed spaces") {
  Coeffs q = Coeffs::rationals(), f2 = Coeffs::prime_field(2), f3 = Coeffs::prime_field(3);

  ComplexPtr s2 = fx_sphere(2);
  RepComplex D2 = verdier_dual(constant_sheaf(s2, q));
  D2.validate();
  for (int c = 0; c < s2->size(); ++c)
    CHECK(stalk_complex(D2, c).cohomology_dims() == std::map<int, int>{{-2, 1}});
  CHECK(compact_sections(D2, s2->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {0, 1}});

  ComplexPtr s3 = fx_sphere(3);
  RepComplex D3 = verdier_dual(constant_sheaf(s3, f2));
  for (int c = 0; c < s3->size(); ++c)
    CHECK(stalk_complex(D3, c).cohomology_dims() == std::map<int, int>{{-3, 1}});
  CHECK(compact_sections(D3, s3->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-3, 1}, {0, 1}});

  ComplexPtr t2 = fx_torus();
  CHECK(compact_sections(verdier_dual(constant_sheaf(t2, q)), t2->all_cells())
            .cohomology_dims() == std::map<int, int>{{-2, 1}, {-1, 2}, {0, 1}});

  // the projective plane: self-dual mod two, dual concentrated away from
  // degree zero mod three
  ComplexPtr rp2 = fx_rp2();
  RepComplex W2 = verdier_dual(constant_sheaf(rp2, f2));
  W2.validate();
  for (int c = 0; c < rp2->size(); ++c)
    CHECK(stalk_complex(W2, c).cohomology_dims() == std::map<int, int>{{-2, 1}});
  CHECK(compact_sections(W2, rp2->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {-1, 1}, {0, 1}});
  RepComplex W3 = verdier_dual(constant_sheaf(rp2, f3));
  CHECK(compact_sections(W3, rp2->all_cells()).cohomology_dims() ==
        std::map<int, int>{{0, 1}});
}

TEST_CASE("verdier duality over a modular ring") {
  Coeffs z4 = Coeffs::local_ring(2, 2);
  ComplexPtr rp2 = fx_rp2();
  std::map<int, long> plain = cw_cohomology_log(*rp2, z4);
  CHECK(plain == std::map<int, long>{{0, 2}, {1, 1}, {2, 1}});
  RepComplex D = verdier_dual(constant_sheaf(rp2, z4));
  D.validate();
  // global duality: the dual's section sizes mirror the plain ones
  CHECK(compact_sections(D, rp2->all_cells()).cohomology_log_sizes() ==
        std::map<int, long>{{-2, 1}, {-1, 1}, {0, 2}});
  // stalkwise the dual of a disc is a single rank, placed in degree -2
  for (int c = 0; c < rp2->size(); ++c)
    CHECK(stalk_complex(D, c).cohomology_log_sizes() == std::map<int, long>{{-2, 2}});
}

TEST_CASE("double duals return to the start") {
  Coeffs f3 = Coeffs::prime_field(3);
  for (ComplexPtr K : {fx_sphere(2), fx_rp2()}) {
    RepComplex F = constant_sheaf(K, f3);
    RepComplex DD = verdier_dual(verdier_dual(F));
    DD.validate();
    for (int c = 0; c < K->size(); ++c)
      CHECK(stalk_complex(DD, c).cohomology_dims() == std::map<int, int>{{0, 1}});
    CHECK(compact_sections(DD, K->all_cells()).cohomology_dims() ==
          as_map(betti_numbers(*K, f3)));
  }
}

TEST_CASE("duality on an open subspace") {
  ComplexPtr K = fx_torus();
  Coeffs q = Coeffs::rationals();
  // remove a closed vertex star: an open one-holed torus remains
  Bitset U = K->all_cells();
  U.subtract(K->down_closure(K->up_set(K->simplex_index({0}))));
  REQUIRE(K->is_up_closed(U));
  RepComplex F = restrict_rep(constant_sheaf(K, q), U);
  F.validate();
  CHECK(sections_roos(F, U).cohomology_dims() == std::map<int, int>{{0, 1}, {1, 2}});
  RepComplex D = verdier_dual(F);
  D.validate();
  for (int c : U.to_list())
    CHECK(stalk_complex(D, c).cohomology_dims() == std::map<int, int>{{-2, 1}});
  CHECK(compact_sections(D, K->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-1, 2}, {0, 1}});
}

TEST_CASE("truncation and cohomology representations") {
  ComplexPtr rp2 = fx_rp2();
  Coeffs f2 = Coeffs::prime_field(2), f3 = Coeffs::prime_field(3);

  RepComplex D = verdier_dual(constant_sheaf(rp2, f2));
  RepComplex T = truncate_le(D, -2);
  T.validate();
  CHECK(T.hi() == -2);
  for (int c = 0; c < rp2->size(); ++c)
    CHECK(stalk_complex(T, c).cohomology_dims() == std::map<int, int>{{-2, 1}});
  CHECK(compact_sections(T, rp2->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {-1, 1}, {0, 1}});

  RepComplex H = cohomology_sheaf(D, -2);
  H.validate();
  for (int c = 0; c < rp2->size(); ++c) {
    CHECK(H.dim_at(-2, c) == 1);
    for (size_t s = 0; s < rp2->facets(c).size(); ++s)
      CHECK(is_invertible(H.gen_mat(-2, c, (int)s)));
  }
  CHECK(compact_sections(H, rp2->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {-1, 1}, {0, 1}});

  // mod three the dual is the orientation twist: no global sections in
  // degree -2, everything in the top
  RepComplex H3 = cohomology_sheaf(verdier_dual(constant_sheaf(rp2, f3)), -2);
  H3.validate();
  for (int c = 0; c < rp2->size(); ++c) CHECK(H3.dim_at(-2, c) == 1);
  CHECK(compact_sections(H3, rp2->all_cells()).cohomology_dims() ==
        std::map<int, int>{{0, 1}});
}

TEST_CASE("pullback along a collapse") {
  MapFixture pinch = fx_pinch();
  Coeffs f2 = Coeffs::prime_field(2);
  RepComplex F = pullback_rep(pinch.map, constant_sheaf(pinch.target, f2));
  F.validate();
  CHECK(compact_sections(F, pinch.source->all_cells()).cohomology_dims() ==
        as_map(betti_numbers(*pinch.source, f2)));
}

TEST_CASE("shifts and direct sums") {
  ComplexPtr s2 = fx_sphere(2);
  Coeffs q = Coeffs::rationals();
  RepComplex F = constant_sheaf(s2, q);
  RepComplex G = shift_rep(F, 2);
  G.validate();
  CHECK(G.lo == -2);
  CHECK(compact_sections(G, s2->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {0, 1}});
  RepComplex S = rep_direct_sum(F, G);
  S.validate();
  CHECK(compact_sections(S, s2->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {0, 2}, {2, 1}});
  CHECK(S.total_dims() == std::vector<int>{26, 0, 26});
}

TEST_CASE("validation rejects corrupted structure") {
  ComplexPtr s2 = fx_sphere(2);
  Coeffs q = Coeffs::rationals();
  RepComplex F = constant_sheaf(s2, q);
  int top = s2->cells_of_dim(2).front();
  F.gen[0][(size_t)top][0].at(0, 0) = q.from_int(2);
  CHECK_THROWS_AS(F.validate(), std::logic_error);

  RepComplex G = constant_sheaf(s2, q);
  G.domain.set((size_t)s2->cells_of_dim(2).front(), false);
  CHECK_THROWS_AS(G.validate(), std::logic_error);
}
