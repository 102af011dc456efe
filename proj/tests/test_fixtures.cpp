#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gx/fixtures.hpp"
#include "gx/matrix.hpp"

#include <algorithm>

using namespace gx;

// Betti numbers of the subcomplex spanned by a closed cell subset, trailing
// zeros trimmed so fibres can be compared against their intrinsic type.
static std::vector<int> sub_betti(const CellComplex& K, const Coeffs& R, const Bitset& S) {
  int top = K.dim();
  std::vector<int> counts, ranks;
  for (int d = 0; d <= top + 1; ++d) {
    Matrix B = K.boundary_matrix(d, R, S);
    if (d <= top) counts.push_back(B.cols());
    ranks.push_back(rank_of(B));
  }
  std::vector<int> b;
  for (int d = 0; d <= top; ++d) {
    int incoming = (d + 1 <= top) ? ranks[(size_t)d + 1] : 0;
    b.push_back(counts[(size_t)d] - ranks[(size_t)d] - incoming);
  }
  while (!b.empty() && b.back() == 0) b.pop_back();
  return b;
}

static std::vector<int> closed_fibre_betti(const CellularMap& f, int target_cell,
                                           const Coeffs& R) {
  Bitset t((size_t)f.target->size());
  t.set((size_t)target_cell);
  return sub_betti(*f.source, R, preimage(f, t));
}

static std::vector<int> dim_counts(const CellComplex& K) {
  std::vector<int> c((size_t)K.dim() + 1, 0);
  for (int i = 0; i < K.size(); ++i) c[(size_t)K.dim_of(i)] += 1;
  return c;
}

// log2 sizes of kernel and image of a matrix over Z/4, from its diagonal form.
static std::pair<long, long> z4_ker_im_log2(const Matrix& A) {
  if (A.cols() == 0) return {0, 0};
  if (A.rows() == 0) return {2L * A.cols(), 0};
  const Coeffs& R = A.ring();
  LocalDiagResult d = diagonalize_over_local(A);
  int mn = std::min(A.rows(), A.cols());
  long ker = 0, im = 0;
  for (int j = 0; j < A.cols(); ++j) {
    long e = j < mn ? (long)R.val_p(d.D.at(j, j)) : 2;
    ker += e;
    if (j < mn) im += 2 - e;
  }
  return {ker, im};
}

// Cochain differential out of degree k (transposed boundary one degree up).
static Matrix codiff(const CellComplex& K, int k, const Coeffs& R) {
  return K.boundary_matrix(k + 1, R).transpose();
}

static long z4_cohomology_log2(const CellComplex& K, int k, const Coeffs& R) {
  long ker = z4_ker_im_log2(codiff(K, k, R)).first;
  long im = k == 0 ? 0 : z4_ker_im_log2(codiff(K, k - 1, R)).second;
  return ker - im;
}

TEST_CASE("spheres, torus, projective plane") {
  Coeffs f2 = Coeffs::prime_field(2), q = Coeffs::rationals();
  CHECK(betti_numbers(*fx_sphere(1), q) == std::vector<int>{1, 1});
  CHECK(betti_numbers(*fx_sphere(2), q) == std::vector<int>{1, 0, 1});
  CHECK(betti_numbers(*fx_sphere(3), q) == std::vector<int>{1, 0, 0, 1});
  CHECK(betti_numbers(*fx_circle(6), f2) == std::vector<int>{1, 1});
  CHECK(betti_numbers(*fx_torus(), q) == std::vector<int>{1, 2, 1});

  ComplexPtr rp2 = fx_rp2();
  CHECK(dim_counts(*rp2) == std::vector<int>{6, 15, 10});
  CHECK(betti_numbers(*rp2, f2) == std::vector<int>{1, 1, 1});
  CHECK(betti_numbers(*rp2, q) == std::vector<int>{1, 0, 0});
}

TEST_CASE("grid tori in all three tilings") {
  Coeffs f2 = Coeffs::prime_field(2), q = Coeffs::rationals();
  for (ComplexPtr t : {fx_torus_grid(4), fx_torus_grid_anti(4), fx_torus_grid_quad(4),
                       fx_torus_grid(6)}) {
    CHECK(t->euler_characteristic() == 0);
    CHECK(betti_numbers(*t, f2) == std::vector<int>{1, 2, 1});
    CHECK(betti_numbers(*t, q) == std::vector<int>{1, 2, 1});
  }
  CHECK(fx_torus_grid_quad(4)->size() == 16 + 16 + 96 + 64);
}

TEST_CASE("heegaard spheres") {
  Coeffs f2 = Coeffs::prime_field(2), q = Coeffs::rationals();
  for (int m : {4, 6}) {
    ComplexPtr s3 = fx_heegaard_sphere(m);
    CHECK(betti_numbers(*s3, f2) == std::vector<int>{1, 0, 0, 1});
    CHECK(betti_numbers(*s3, q) == std::vector<int>{1, 0, 0, 1});
    CHECK(dim_counts(*s3)[3] == 6 * m * m);
  }
  // the m x m grid torus sits inside as the splitting surface, same vertex ids
  ComplexPtr s3 = fx_heegaard_sphere(6);
  ComplexPtr rim = fx_torus_grid(6);
  for (int i = 0; i < rim->size(); ++i)
    if (rim->cofacets(i).empty()) CHECK(s3->simplex_index(rim->cell(i).verts) >= 0);
}

TEST_CASE("real projective three-space") {
  Coeffs f2 = Coeffs::prime_field(2), q = Coeffs::rationals();
  ComplexPtr rp3 = fx_rp3();
  CHECK(dim_counts(*rp3) == std::vector<int>{24, 132, 216, 108});
  CHECK(betti_numbers(*rp3, f2) == std::vector<int>{1, 1, 1, 1});
  CHECK(betti_numbers(*rp3, q) == std::vector<int>{1, 0, 0, 1});
  CHECK(betti_numbers(*rp3, Coeffs::prime_field(3)) == std::vector<int>{1, 0, 0, 1});
}

TEST_CASE("circle collapses: fibres are circles") {
  Coeffs f2 = Coeffs::prime_field(2);
  MapFixture hopf = fx_hopf(6);
  CHECK(betti_numbers(*hopf.target, f2) == std::vector<int>{1, 0, 1});
  // fibres over the two disc centers and over a rim vertex
  CHECK(closed_fibre_betti(hopf.map, hopf.target->simplex_index({6}), f2) ==
        std::vector<int>{1, 1});
  CHECK(closed_fibre_betti(hopf.map, hopf.target->simplex_index({7}), f2) ==
        std::vector<int>{1, 1});
  CHECK(closed_fibre_betti(hopf.map, hopf.target->simplex_index({2}), f2) ==
        std::vector<int>{1, 1});

  MapFixture hq = fx_hopf_quotient();
  CHECK(hq.source->size() == 480);
  CHECK(closed_fibre_betti(hq.map, hq.target->simplex_index({6}), f2) ==
        std::vector<int>{1, 1});
  CHECK(closed_fibre_betti(hq.map, hq.target->simplex_index({0}), f2) ==
        std::vector<int>{1, 1});
}

TEST_CASE("mod four cohomology across the circle bundle") {
  Coeffs z4 = Coeffs::local_ring(2, 2);
  MapFixture hq = fx_hopf_quotient();
  const CellComplex& B = *hq.target;
  const CellComplex& P = *hq.source;

  CHECK(z4_cohomology_log2(B, 0, z4) == 2);
  CHECK(z4_cohomology_log2(B, 1, z4) == 0);
  CHECK(z4_cohomology_log2(B, 2, z4) == 2);
  CHECK(z4_cohomology_log2(P, 0, z4) == 2);
  CHECK(z4_cohomology_log2(P, 1, z4) == 1);
  CHECK(z4_cohomology_log2(P, 2, z4) == 1);
  CHECK(z4_cohomology_log2(P, 3, z4) == 2);

  // A generator of the degree-two group downstairs: diagonalize the cochain
  // differential and pull the free coordinate back through the row transform.
  Matrix d1B = codiff(B, 1, z4);
  LocalDiagResult dg = diagonalize_over_local(d1B);
  int free_row = -1;
  for (int i = 0; i < std::min(d1B.rows(), d1B.cols()); ++i)
    if (z4.val_p(dg.D.at(i, i)) == 2) {
      CHECK(free_row == -1);
      free_row = i;
    }
  REQUIRE(free_row >= 0);
  std::vector<Scalar> e((size_t)d1B.rows(), z4.zero());
  e[(size_t)free_row] = z4.one();
  auto gsol = solve(dg.U, e);
  REQUIRE(gsol.has_value());
  std::vector<Scalar> g = *gsol;

  auto times2 = [&](const std::vector<Scalar>& v) {
    std::vector<Scalar> w = v;
    for (auto& x : w) x = z4.mul(z4.from_int(2), x);
    return w;
  };
  // order four downstairs
  CHECK(!solve(d1B, g).has_value());
  CHECK(!solve(d1B, times2(g)).has_value());

  // pulled back along the bundle projection the order drops to two
  Matrix pull2 = chain_maps(hq.map, z4)[2].transpose();
  std::vector<Scalar> z = pull2.apply(g);
  std::vector<Scalar> dz = codiff(P, 2, z4).apply(z);
  for (const Scalar& x : dz) CHECK(z4.is_zero(x));
  Matrix d1P = codiff(P, 1, z4);
  CHECK(!solve(d1P, z).has_value());
  CHECK(solve(d1P, times2(z)).has_value());
}

TEST_CASE("pinched spheres and the pinch collapse") {
  Coeffs f2 = Coeffs::prime_field(2), q = Coeffs::rationals();
  ComplexPtr pinched = fx_pinched_spheres();
  CHECK(pinched->euler_characteristic() == 2);
  CHECK(betti_numbers(*pinched, f2) == std::vector<int>{1, 1, 2});
  CHECK(betti_numbers(*pinched, q) == std::vector<int>{1, 1, 2});

  MapFixture pinch = fx_pinch();
  // fibre over a pinch point is a circle, over an equator vertex a point
  CHECK(closed_fibre_betti(pinch.map, pinch.target->simplex_index({8}), f2) ==
        std::vector<int>{1, 1});
  CHECK(closed_fibre_betti(pinch.map, pinch.target->simplex_index({9}), f2) ==
        std::vector<int>{1, 1});
  CHECK(closed_fibre_betti(pinch.map, pinch.target->simplex_index({2}), f2) ==
        std::vector<int>{1});
}

static void check_resolution_pair(const std::pair<ResolutionFixture, ResolutionFixture>& pr,
                                  const std::vector<int>& target_f2,
                                  const std::vector<int>& target_q) {
  const ResolutionFixture& a = pr.first;
  const ResolutionFixture& b = pr.second;
  CHECK(a.target == b.target); // literally the same complex
  CHECK(a.U == b.U);
  Coeffs f2 = Coeffs::prime_field(2), q = Coeffs::rationals();
  CHECK(betti_numbers(*a.target, f2) == target_f2);
  CHECK(betti_numbers(*a.target, q) == target_q);
  CHECK(a.target->is_up_closed(a.U));
  CHECK(is_iso_over(a.f, a.U));
  CHECK(is_iso_over(b.f, b.U));
  CHECK(a.f.smooth_proper);
  CHECK(b.f.smooth_proper);
}

TEST_CASE("resolution pair: cone over rp3") {
  auto pr = fx_cone_rp3_pair();
  check_resolution_pair(pr, {1, 0, 0, 0, 0}, {1, 0, 0, 0, 0});
  Coeffs f2 = Coeffs::prime_field(2), q = Coeffs::rationals();
  CHECK(betti_numbers(*pr.first.source, f2) == std::vector<int>{1, 0, 1, 0, 0});
  CHECK(betti_numbers(*pr.first.source, q) == std::vector<int>{1, 0, 1, 0, 0});
  CHECK(betti_numbers(*pr.second.source, f2) == std::vector<int>{1, 0, 1, 0, 0});
  CHECK(pr.second.source->size() > pr.first.source->size()); // refined end
}

TEST_CASE("resolution pair: cone over the three-sphere") {
  auto pr = fx_cone_s3_pair();
  check_resolution_pair(pr, {1, 0, 0, 0, 0}, {1, 0, 0, 0, 0});
  CHECK(pr.first.source == pr.first.target); // identity member
  CHECK(betti_numbers(*pr.second.source, Coeffs::prime_field(2)) ==
        std::vector<int>{1, 0, 1, 0, 0});
  CHECK(betti_numbers(*pr.second.source, Coeffs::rationals()) ==
        std::vector<int>{1, 0, 1, 0, 0});
}

TEST_CASE("resolution pair: suspension of rp3") {
  auto pr = fx_suspension_rp3_pair();
  const ResolutionFixture& a = pr.first;
  Coeffs f2 = Coeffs::prime_field(2), f5 = Coeffs::prime_field(5);
  Coeffs q = Coeffs::rationals();
  CHECK(a.target == pr.second.target);
  CHECK(betti_numbers(*a.target, f2) == std::vector<int>{1, 0, 1, 1, 1});
  CHECK(betti_numbers(*a.target, q) == std::vector<int>{1, 0, 0, 0, 1});
  CHECK(betti_numbers(*a.source, f2) == std::vector<int>{1, 0, 2, 0, 1});
  CHECK(betti_numbers(*a.source, f5) == std::vector<int>{1, 0, 2, 0, 1});
  CHECK(betti_numbers(*pr.second.source, f2) == std::vector<int>{1, 0, 2, 0, 1});
  CHECK(a.target->is_up_closed(a.U));
  CHECK(a.U.count() == (size_t)a.target->size() - 2);
  CHECK(is_iso_over(a.f, a.U));
  CHECK(is_iso_over(pr.second.f, pr.second.U));
}

TEST_CASE("self correspondence of the cone resolution") {
  CorrespondenceFixture fx = fx_cone_rp3_self_correspondence();
  // the cylinder retracts onto the product of the two collapse targets
  CHECK(fx.W->euler_characteristic() == 4);
  CHECK(fx.p1.source == fx.W);
  CHECK(fx.p2.source == fx.W);
  CHECK(fx.p1.target == fx.base.source);
  CHECK(fx.p2.target == fx.base.source);
  CHECK(fx.W->is_up_closed(fx.open_part));
  CHECK(is_iso_over(fx.base.f, fx.base.U));
}

static void check_family_shape(const FamilyFixture& fam) {
  CHECK(fam.projection.source == fam.total);
  CHECK(fam.projection.target == fam.base);
  CHECK(fam.projection.smooth_proper);
  CHECK(fam.base->is_up_closed(fam.punctured));
  CHECK(fam.punctured.count() == (size_t)fam.base->size() - 1);
  REQUIRE(fam.rim_cycle.size() == 12);
  for (size_t i = 0; i < fam.rim_cycle.size(); ++i) {
    int c = fam.rim_cycle[i];
    CHECK(fam.base->dim_of(c) == (int)(i % 2));
    if (i % 2 == 1) {
      // each edge is framed by the vertices before and after it
      std::vector<int> ends;
      for (auto& [f, s] : fam.base->facets(c)) ends.push_back(f);
      std::sort(ends.begin(), ends.end());
      std::vector<int> expect{fam.rim_cycle[i - 1], fam.rim_cycle[(i + 1) % 12]};
      std::sort(expect.begin(), expect.end());
      CHECK(ends == expect);
    }
  }
}

static int apex_of(const FamilyFixture& fam) {
  for (int c = 0; c < fam.base->size(); ++c)
    if (!fam.punctured.get((size_t)c)) return c;
  return -1;
}

TEST_CASE("torus family with a double shear around the rim") {
  Coeffs f2 = Coeffs::prime_field(2), f5 = Coeffs::prime_field(5);
  FamilyFixture fam = fx_i2_model();
  check_family_shape(fam);
  // fibres: tori around the rim, the pinched sphere pair in the middle
  for (int k = 0; k < 12; k += 2)
    CHECK(closed_fibre_betti(fam.projection, fam.rim_cycle[(size_t)k], f2) ==
          std::vector<int>{1, 2, 1});
  int apex = apex_of(fam);
  REQUIRE(apex >= 0);
  CHECK(closed_fibre_betti(fam.projection, apex, f2) == std::vector<int>{1, 1, 2});
  CHECK(closed_fibre_betti(fam.projection, apex, Coeffs::rationals()) ==
        std::vector<int>{1, 1, 2});
  // total space: central sphere pair with a twisted torus ring attached
  CHECK(betti_numbers(*fam.total, f2) == std::vector<int>{1, 2, 4, 1});
  CHECK(betti_numbers(*fam.total, f5) == std::vector<int>{1, 1, 3, 1});
}

TEST_CASE("constant torus family over the same disk") {
  Coeffs f2 = Coeffs::prime_field(2), f5 = Coeffs::prime_field(5);
  FamilyFixture fam = fx_i2_trivial();
  check_family_shape(fam);
  for (int k = 0; k < 12; k += 2)
    CHECK(closed_fibre_betti(fam.projection, fam.rim_cycle[(size_t)k], f2) ==
          std::vector<int>{1, 2, 1});
  int apex = apex_of(fam);
  REQUIRE(apex >= 0);
  CHECK(closed_fibre_betti(fam.projection, apex, f2) == std::vector<int>{1, 2, 1});
  CHECK(betti_numbers(*fam.total, f2) == std::vector<int>{1, 3, 3, 1});
  CHECK(betti_numbers(*fam.total, f5) == std::vector<int>{1, 3, 3, 1});
}

TEST_CASE("families agree on the base") {
  FamilyFixture a = fx_i2_model(), b = fx_i2_trivial();
  CHECK(a.base->size() == b.base->size());
  CHECK(a.rim_cycle == b.rim_cycle);
}
