#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gx/build.hpp"
#include "gx/fixtures.hpp"
#include "gx/lab.hpp"
#include "gx/rep.hpp"

#include <algorithm>

using namespace gx;

static std::map<int, int> as_map(const std::vector<int>& betti) {
  std::map<int, int> m;
  for (size_t i = 0; i < betti.size(); ++i)
    if (betti[i] != 0) m[(int)i] = betti[i];
  return m;
}

// For a closed manifold the smallest injective model of the constant sheaf
// has one summand per cell, a d-cell sitting in degree dim - d. Any smaller
// would miss supported local sections, so this is the exact yardstick the
// reducer has to hit.
static bool census_is_one_per_cell(const LabComplex& M) {
  const CellComplex& K = *M.K;
  if (M.lo != 0 || M.degree_count() != K.dim() + 1) return false;
  for (int k = 0; k <= K.dim(); ++k) {
    std::vector<int> got = M.labels[(size_t)k];
    std::sort(got.begin(), got.end());
    std::vector<int> want = K.cells_of_dim(K.dim() - k);
    std::sort(want.begin(), want.end());
    if (got != want) return false;
  }
  return true;
}

// Same yardstick for the dualizing complex: a d-cell in degree -d.
static bool census_is_dual_cells(const LabComplex& M) {
  const CellComplex& K = *M.K;
  if (M.lo != -K.dim() || M.degree_count() != K.dim() + 1) return false;
  for (int d = 0; d <= K.dim(); ++d) {
    std::vector<int> got = M.labels[(size_t)(K.dim() - d)];
    std::sort(got.begin(), got.end());
    std::vector<int> want = K.cells_of_dim(d);
    std::sort(want.begin(), want.end());
    if (got != want) return false;
  }
  return true;
}

TEST_CASE("reduced constant-sheaf model hits one summand per cell") {
  for (ComplexPtr K : {fx_sphere(2), fx_torus(), fx_rp2()}) {
    for (const Coeffs& R :
         {Coeffs::prime_field(2), Coeffs::rationals(), Coeffs::prime_field(3)}) {
      LabComplex L = resolve_constant(K, R);
      L.validate();
      LabReduction red = minimize_labeled(L, true);
      red.M.validate();
      CHECK(census_is_one_per_cell(red.M));
      std::map<int, int> expect = as_map(betti_numbers(*K, R));
      CHECK(sections_labeled(red.M).cohomology_dims() == expect);
      for (int c = 0; c < K->size(); ++c) {
        CHECK(stalk_labeled(red.M, c).cohomology_dims() ==
              std::map<int, int>{{0, 1}});
        CHECK(costalk_labeled(red.M, c).cohomology_dims() ==
              std::map<int, int>{{K->dim() - K->dim_of(c), 1}});
      }
      // the reduction maps are genuine mutually inverse homotopy data
      red.iota.validate(red.M, L);
      red.pi.validate(L, red.M);
      LabMap pi_iota = compose_lab(red.pi, red.iota);
      for (int n = red.M.lo; n <= red.M.hi(); ++n)
        CHECK(pi_iota.at(n).equals(SparseMat::identity(R, red.M.dim_at(n))));
    }
  }
}

TEST_CASE("unreduced constant-sheaf model already computes sections") {
  ComplexPtr K = fx_sphere(2);
  Coeffs q = Coeffs::rationals();
  LabComplex L = resolve_constant(K, q);
  CHECK(sections_labeled(L).cohomology_dims() ==
        std::map<int, int>{{0, 1}, {2, 1}});
  for (int c = 0; c < K->size(); ++c)
    CHECK(stalk_labeled(L, c).cohomology_dims() ==
          std::map<int, int>{{0, 1}});
}

TEST_CASE("open stars and their complements through the open-set model") {
  ComplexPtr K = fx_torus_grid(4);
  Coeffs f2 = Coeffs::prime_field(2);
  int v = K->cells_of_dim(0)[0];
  Bitset star = K->up_set(v);
  LabComplex Ls = resolve_constant_on(K, f2, star);
  Ls.validate();
  CHECK(sections_labeled(minimize_labeled(Ls).M).cohomology_dims() ==
        std::map<int, int>{{0, 1}});

  Bitset closed_star = K->down_closure(star);
  Bitset away = K->all_cells();
  away.subtract(closed_star);
  REQUIRE(K->is_up_closed(away));
  LabComplex La = resolve_constant_on(K, f2, away);
  La.validate();
  LabReduction red = minimize_labeled(La);
  // torus minus a closed disk retracts to a wedge of two circles
  CHECK(sections_labeled(red.M).cohomology_dims() ==
        std::map<int, int>{{0, 1}, {1, 2}});
  // reducing a reduced complex changes nothing
  LabReduction again = minimize_labeled(red.M);
  CHECK(again.M.total() == red.M.total());
  CHECK(again.M.label_census() == red.M.label_census());
}

TEST_CASE("circle-fibre collapses push to rank-two stalks everywhere") {
  struct Pin {
    MapFixture fx;
    Coeffs R;
    std::map<int, int> global;
  };
  std::vector<Pin> pins;
  pins.push_back({fx_hopf(4), Coeffs::prime_field(2),
                  std::map<int, int>{{0, 1}, {3, 1}}});
  pins.push_back({fx_hopf(4), Coeffs::rationals(),
                  std::map<int, int>{{0, 1}, {3, 1}}});
  pins.push_back({fx_hopf_quotient(), Coeffs::prime_field(2),
                  std::map<int, int>{{0, 1}, {1, 1}, {2, 1}, {3, 1}}});
  pins.push_back({fx_hopf_quotient(), Coeffs::rationals(),
                  std::map<int, int>{{0, 1}, {3, 1}}});
  for (const Pin& pin : pins) {
    LabComplex L = resolve_constant(pin.fx.source, pin.R);
    LabComplex P = pushforward_labeled(pin.fx.map, L);
    P.validate();
    LabComplex M = minimize_labeled(P).M;
    CHECK(sections_labeled(M).cohomology_dims() == pin.global);
    for (int c = 0; c < pin.fx.target->size(); ++c)
      CHECK(stalk_labeled(M, c).cohomology_dims() ==
            std::map<int, int>{{0, 1}, {1, 1}});
    // rank-two stalks at every cell force at least two summands per cell
    CHECK(M.total() >= 2 * pin.fx.target->size());
  }
}

TEST_CASE("collapsing two parallel circles pinches exactly two stalks") {
  MapFixture fx = fx_pinch();
  for (const Coeffs& R : {Coeffs::prime_field(2), Coeffs::rationals()}) {
    LabComplex P = pushforward_labeled(fx.map, resolve_constant(fx.source, R));
    LabComplex M = minimize_labeled(P).M;
    CHECK(sections_labeled(M).cohomology_dims() ==
          as_map(betti_numbers(*fx.source, R)));
    int fat = 0;
    for (int c = 0; c < fx.target->size(); ++c) {
      auto h = stalk_labeled(M, c).cohomology_dims();
      if (h == std::map<int, int>{{0, 1}, {1, 1}}) {
        ++fat;
        CHECK(fx.target->dim_of(c) == 0);
      } else {
        CHECK(h == std::map<int, int>{{0, 1}});
      }
    }
    CHECK(fat == 2);
  }
}

TEST_CASE("dualizing complex carries Borel-Moore homology") {
  Coeffs q = Coeffs::rationals(), f2 = Coeffs::prime_field(2),
         f3 = Coeffs::prime_field(3);
  struct Pin {
    ComplexPtr K;
    Coeffs R;
    std::map<int, int> bm;
  };
  for (const Pin& pin : std::vector<Pin>{
           {fx_sphere(2), q, {{-2, 1}, {0, 1}}},
           {fx_rp2(), f2, {{-2, 1}, {-1, 1}, {0, 1}}},
           {fx_rp2(), f3, {{0, 1}}},
           {fx_torus(), q, {{-2, 1}, {-1, 2}, {0, 1}}}}) {
    LabComplex W = dualizing_labeled(pin.K, pin.R);
    W.validate();
    CHECK(census_is_dual_cells(W));
    CHECK(sections_labeled(W).cohomology_dims() == pin.bm);
    // locally the dual complex is the orientation class of an open disk
    for (int c = 0; c < pin.K->size(); ++c)
      CHECK(stalk_labeled(W, c).cohomology_dims() ==
            std::map<int, int>{{-pin.K->dim(), 1}});
  }
}

TEST_CASE("duality swaps the constant and dualizing models") {
  ComplexPtr K = fx_rp2();
  Coeffs f2 = Coeffs::prime_field(2);
  LabComplex L = resolve_constant(K, f2);
  LabComplex V = minimize_labeled(verdier_labeled(L)).M;
  V.validate();
  CHECK(census_is_dual_cells(V));
  CHECK(sections_labeled(V).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {-1, 1}, {0, 1}});
  // and back: the double dual is the constant sheaf again
  LabComplex VV = minimize_labeled(verdier_labeled(V)).M;
  VV.validate();
  CHECK(census_is_one_per_cell(VV));
  CHECK(sections_labeled(VV).cohomology_dims() ==
        std::map<int, int>{{0, 1}, {1, 1}, {2, 1}});
  for (int c = 0; c < K->size(); ++c)
    CHECK(stalk_labeled(VV, c).cohomology_dims() ==
          std::map<int, int>{{0, 1}});
}

TEST_CASE("mapping complexes report derived homs") {
  ComplexPtr K = fx_sphere(2);
  Coeffs q = Coeffs::rationals();
  LabComplex M = minimize_labeled(resolve_constant(K, q)).M;
  LabComplex W = dualizing_labeled(K, q);
  // self-maps of the constant sheaf: one in degree 0, one per top class
  CHECK(hom_chain(M, M).cohomology_dims() ==
        std::map<int, int>{{0, 1}, {2, 1}});
  // maps to the dualizing complex: Borel-Moore classes again
  CHECK(hom_chain(M, W).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {0, 1}});
  CHECK(hom_chain(W, W).cohomology_dims() ==
        std::map<int, int>{{0, 1}, {2, 1}});

  ComplexPtr P = fx_rp2();
  Coeffs f2 = Coeffs::prime_field(2);
  LabComplex MP = minimize_labeled(resolve_constant(P, f2)).M;
  CHECK(hom_chain(MP, MP).cohomology_dims() ==
        std::map<int, int>{{0, 1}, {1, 1}, {2, 1}});
}

TEST_CASE("representation complexes round trip through the injective model") {
  ComplexPtr K = fx_rp2();
  Coeffs f2 = Coeffs::prime_field(2);

  // outbound: the value-level dual becomes the dualizing complex
  RepComplex D = verdier_dual(constant_sheaf(K, f2));
  LabComplex LD = rep_to_labeled(D);
  LD.validate();
  CHECK(census_is_dual_cells(minimize_labeled(LD).M));

  // inbound: the reduced dualizing complex back to representation form
  RepComplex G = labeled_to_rep(minimize_labeled(dualizing_labeled(K, f2)).M);
  G.validate();
  CHECK(compact_sections(G, K->all_cells()).cohomology_dims() ==
        std::map<int, int>{{-2, 1}, {-1, 1}, {0, 1}});
  for (int c = 0; c < K->size(); ++c)
    CHECK(stalk_complex(G, c).cohomology_dims() ==
          std::map<int, int>{{-2, 1}});
}

TEST_CASE("constant sheaf round trips over the torus") {
  ComplexPtr K = fx_torus();
  Coeffs q = Coeffs::rationals();
  LabComplex L = rep_to_labeled(constant_sheaf(K, q));
  L.validate();
  LabComplex M = minimize_labeled(L).M;
  CHECK(census_is_one_per_cell(M));
  for (int c = 0; c < K->size(); ++c)
    CHECK(stalk_labeled(M, c).cohomology_dims() ==
          std::map<int, int>{{0, 1}});
  RepComplex G = labeled_to_rep(M);
  G.validate();
  std::map<int, int> expect{{0, 1}, {1, 2}, {2, 1}};
  CHECK(compact_sections(G, K->all_cells()).cohomology_dims() == expect);
  CHECK(sections_roos(G, K->all_cells()).cohomology_dims() == expect);
}

TEST_CASE("prime-power coefficients keep their torsion through reduction") {
  ComplexPtr K = fx_rp2();
  Coeffs z4 = Coeffs::local_ring(2, 2);
  LabComplex M = minimize_labeled(resolve_constant(K, z4)).M;
  M.validate();
  CHECK(sections_labeled(M).cohomology_log_sizes() ==
        std::map<int, long>{{0, 2}, {1, 1}, {2, 1}});
  for (int c = 0; c < K->size(); ++c)
    CHECK(stalk_labeled(M, c).cohomology_log_sizes() ==
          std::map<int, long>{{0, 2}});
  LabComplex W = dualizing_labeled(K, z4);
  CHECK(sections_labeled(W).cohomology_log_sizes() ==
        std::map<int, long>{{-2, 1}, {-1, 1}, {0, 2}});
}

TEST_CASE("shifts, sums and restriction behave on the injective side") {
  ComplexPtr K = fx_rp2();
  Coeffs f2 = Coeffs::prime_field(2);
  LabComplex M = minimize_labeled(resolve_constant(K, f2)).M;
  LabComplex S = M.shifted(-3);
  S.validate();
  CHECK(sections_labeled(S).cohomology_dims() ==
        std::map<int, int>{{3, 1}, {4, 1}, {5, 1}});
  LabComplex both = LabComplex::direct_sum(M, S);
  both.validate();
  CHECK(sections_labeled(both).cohomology_dims() ==
        std::map<int, int>{{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}});

  // restriction to an open star leaves exactly the locally visible part
  int v = K->cells_of_dim(0)[0];
  LabComplex R = restrict_labeled(M, K->up_set(v));
  R.validate();
  CHECK(sections_labeled(R).cohomology_dims() ==
        std::map<int, int>{{0, 1}});
}
