#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gx/build.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace gx;

// ---------------------------------------------------------------------------
// Independent oracle: simplicial homology mod p computed straight from sorted
// vertex lists. Orientations come from the sorted order, ranks from a naive
// elimination with exhaustive inverses; nothing is shared with the library's
// stored-order signs, boundary assembly, or Matrix eliminations.
// ---------------------------------------------------------------------------

static int oracle_rank_mod(std::vector<std::vector<uint64_t>> m, uint64_t p) {
  size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  auto inv = [&](uint64_t a) {
    for (uint64_t c = 1; c < p; ++c)
      if (a * c % p == 1) return c;
    return uint64_t(0);
  };
  int rank = 0;
  for (size_t c = 0; c < cols; ++c) {
    size_t piv = rows;
    for (size_t i = (size_t)rank; i < rows; ++i)
      if (m[i][c] % p != 0) { piv = i; break; }
    if (piv == rows) continue;
    std::swap(m[piv], m[(size_t)rank]);
    uint64_t f0 = inv(m[(size_t)rank][c] % p);
    for (size_t j = 0; j < cols; ++j) m[(size_t)rank][j] = m[(size_t)rank][j] % p * f0 % p;
    for (size_t i = 0; i < rows; ++i) {
      if ((int)i == rank || m[i][c] % p == 0) continue;
      uint64_t f = m[i][c] % p;
      for (size_t j = 0; j < cols; ++j) m[i][j] = (m[i][j] + (p - f) * m[(size_t)rank][j]) % p;
    }
    ++rank;
  }
  return rank;
}

static std::vector<int> oracle_betti_fp(std::vector<std::vector<int>> simplices, uint64_t p) {
  for (auto& s : simplices) std::sort(s.begin(), s.end());
  int top = 0;
  for (auto& s : simplices) top = std::max(top, (int)s.size() - 1);
  std::vector<int> count((size_t)top + 1, 0);
  std::map<std::vector<int>, int> pos; // position within its dimension
  for (auto& s : simplices) pos[s] = count[s.size() - 1]++;
  std::vector<int> rank((size_t)top + 2, 0);
  for (int d = 1; d <= top; ++d) {
    std::vector<std::vector<uint64_t>> m((size_t)count[(size_t)d - 1],
                                         std::vector<uint64_t>((size_t)count[(size_t)d], 0));
    for (auto& s : simplices) {
      if ((int)s.size() - 1 != d) continue;
      for (size_t i = 0; i < s.size(); ++i) {
        std::vector<int> face;
        for (size_t j = 0; j < s.size(); ++j)
          if (j != i) face.push_back(s[j]);
        m[(size_t)pos.at(face)][(size_t)pos.at(s)] = (i % 2 == 0) ? 1 : p - 1;
      }
    }
    rank[(size_t)d] = oracle_rank_mod(std::move(m), p);
  }
  std::vector<int> b((size_t)top + 1, 0);
  for (int d = 0; d <= top; ++d) b[(size_t)d] = count[(size_t)d] - rank[(size_t)d] - rank[(size_t)d + 1];
  return b;
}

// All cells of a simplicial complex as vertex lists, for feeding the oracle.
static std::vector<std::vector<int>> vertex_lists(const CellComplex& K) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < K.size(); ++i) {
    REQUIRE(!K.cell(i).verts.empty());
    out.push_back(K.cell(i).verts);
  }
  return out;
}

static void check_betti_against_oracle(const CellComplex& K) {
  for (uint64_t p : {2u, 3u, 5u}) {
    std::vector<int> lib = betti_numbers(K, Coeffs::prime_field(p));
    std::vector<int> ora = oracle_betti_fp(vertex_lists(K), p);
    CHECK(lib == ora);
  }
}

// ---------------------------------------------------------------------------
// Shared fixtures
// ---------------------------------------------------------------------------

static ComplexPtr icosahedron() {
  std::vector<std::vector<int>> f;
  for (int i = 0; i < 5; ++i) {
    int j = (i + 1) % 5;
    f.push_back({10, i, j});
    f.push_back({11, 5 + i, 5 + j});
    f.push_back({i, j, 5 + i});
    f.push_back({j, 5 + i, 5 + j});
  }
  return std::make_shared<CellComplex>(CellComplex::from_simplices(f));
}

// The antipodal vertex involution of the icosahedron above (top ring offset
// from the bottom ring by two steps).
static std::vector<int> icosa_antipode() {
  std::vector<int> tau(12);
  for (int i = 0; i < 5; ++i) {
    tau[(size_t)i] = 5 + (i + 2) % 5;
    tau[(size_t)(5 + i)] = (i + 3) % 5;
  }
  tau[10] = 11;
  tau[11] = 10;
  return tau;
}

static std::vector<int> dims_census(const CellComplex& K) {
  return face_poset(K).elements_per_dim();
}

static void check_chain_commutes(const CellularMap& f, const Coeffs& R) {
  auto M = chain_maps(f, R);
  const CellComplex& X = *f.source;
  const CellComplex& Y = *f.target;
  REQUIRE((int)M.size() == X.dim() + 1);
  for (int d = 1; d <= X.dim(); ++d) {
    Matrix lhs = Y.boundary_matrix(d, R) * M[(size_t)d];
    Matrix rhs = M[(size_t)d - 1] * X.boundary_matrix(d, R);
    CHECK(lhs == rhs);
  }
}

// ---------------------------------------------------------------------------
// Basic posets
// ---------------------------------------------------------------------------

TEST_CASE("a single vertex is a one element poset") {
  ComplexPtr pt = point_complex();
  CHECK(pt->size() == 1);
  CHECK(pt->dim() == 0);
  CHECK(pt->euler_characteristic() == 1);
  CHECK(betti_numbers(*pt, Coeffs::rationals()) == std::vector<int>{1});
  CHECK(reduced_betti(*pt, Coeffs::rationals()) == std::vector<int>{0});
  CHECK(face_poset(*pt).height() == 1);
}

TEST_CASE("the full triangle has three vertices three edges and one face") {
  ComplexPtr t = simplex_complex(2);
  CHECK(dims_census(*t) == std::vector<int>{3, 3, 1});
  CHECK(face_poset(*t).height() == 3);
  int v0 = t->cell_by_name("0"), e01 = t->cell_by_name("0.1"), top = t->cell_by_name("0.1.2");
  REQUIRE(v0 >= 0);
  REQUIRE(e01 >= 0);
  REQUIRE(top >= 0);
  CHECK(t->leq(v0, e01));
  CHECK(t->leq(e01, top));
  CHECK(t->leq(v0, top));
  CHECK(!t->leq(e01, v0));
  CHECK(!t->leq(t->cell_by_name("2"), e01));
  CHECK(t->simplex_index({1, 0}) == e01); // lookup sorts its argument
  CHECK(t->euler_characteristic() == 1);
}

TEST_CASE("the face order is antisymmetric") {
  ComplexPtr s = sphere_complex(2);
  for (int a = 0; a < s->size(); ++a)
    for (int b = 0; b < s->size(); ++b)
      if (a != b) CHECK(!(s->leq(a, b) && s->leq(b, a)));
}

TEST_CASE("the tetrahedron boundary is a two sphere") {
  CellComplex K = CellComplex::from_simplices({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
  CHECK(dims_census(K) == std::vector<int>{4, 6, 4});
  CHECK(K.euler_characteristic() == 2);
  CHECK(betti_numbers(K, Coeffs::rationals()) == std::vector<int>{1, 0, 1});
  CHECK(reduced_betti(K, Coeffs::prime_field(2)) == std::vector<int>{0, 0, 1});
  CHECK_NOTHROW(K.verify_boundary_spheres());
  check_betti_against_oracle(K);
}

TEST_CASE("cross polytope boundaries are spheres in every dimension") {
  for (int n = 0; n <= 3; ++n) {
    ComplexPtr s = sphere_complex(n);
    std::vector<int> expect_betti((size_t)n + 1, 0);
    expect_betti[0] += 1;
    expect_betti[(size_t)n] += 1;
    CHECK(betti_numbers(*s, Coeffs::rationals()) == expect_betti);
    CHECK(betti_numbers(*s, Coeffs::prime_field(7)) == expect_betti);
    CHECK(s->euler_characteristic() == (n % 2 == 0 ? 2 : 0));
    CHECK_NOTHROW(s->verify_boundary_spheres());
  }
  // counts for the octahedron
  CHECK(dims_census(*sphere_complex(2)) == std::vector<int>{6, 12, 8});
  check_betti_against_oracle(*sphere_complex(2));
}

TEST_CASE("malformed simplex lists are rejected") {
  CHECK_THROWS_AS(CellComplex::from_simplices({{}}), std::invalid_argument);
  CHECK_THROWS_AS(CellComplex::from_simplices({{0, 0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(CellComplex::from_simplices({{-1, 2}}), std::invalid_argument);
}

TEST_CASE("cell tables are canonical regardless of input order") {
  std::vector<std::vector<int>> tris = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  CellComplex a = CellComplex::from_simplices(tris);
  std::reverse(tris.begin(), tris.end());
  CellComplex b = CellComplex::from_simplices(tris);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.cell(i).name == b.cell(i).name);
    CHECK(a.facets(i) == b.facets(i)); // sorted inputs, so signs agree too
  }
  CHECK(a.describe() == b.describe());
}

// ---------------------------------------------------------------------------
// Boundary operators
// ---------------------------------------------------------------------------

TEST_CASE("signed boundaries square to zero over every ring") {
  std::vector<ComplexPtr> fixtures = {sphere_complex(2), sphere_complex(3),
                                      simplex_complex(3), circle_complex(5)};
  std::vector<Coeffs> rings = {Coeffs::rationals(), Coeffs::prime_field(2),
                               Coeffs::prime_field(5), Coeffs::local_ring(2, 3),
                               Coeffs::local_ring(3, 2)};
  for (auto& K : fixtures)
    for (auto& R : rings)
      for (int d = 1; d <= K->dim(); ++d) {
        Matrix prod = K->boundary_matrix(d, R) * K->boundary_matrix(d + 1, R);
        CHECK(prod.is_zero());
      }
}

TEST_CASE("euler characteristic equals the alternating betti sum") {
  std::vector<ComplexPtr> fixtures = {sphere_complex(2), simplex_complex(3), circle_complex(4),
                                      icosahedron()};
  for (auto& K : fixtures) {
    std::vector<int> b = betti_numbers(*K, Coeffs::rationals());
    long sum = 0;
    for (size_t d = 0; d < b.size(); ++d) sum += (d % 2 == 0 ? 1 : -1) * (long)b[d];
    CHECK(sum == K->euler_characteristic());
  }
}

TEST_CASE("top dimensional cycles of oriented spheres have unit coefficients") {
  for (int n = 1; n <= 3; ++n) {
    ComplexPtr s = sphere_complex(n);
    Matrix ker = kernel_basis(s->boundary_matrix(n, Coeffs::rationals()));
    REQUIRE(ker.cols() == 1);
    for (int i = 0; i < ker.rows(); ++i) {
      mpq_class v = std::get<mpq_class>(ker.at(i, 0));
      CHECK((v == 1 || v == -1));
    }
  }
}

TEST_CASE("relative homology of the disc modulo its rim is concentrated on top") {
  ComplexPtr t = simplex_complex(2);
  Bitset rim((size_t)t->size());
  for (const char* n : {"0", "1", "2", "0.1", "0.2", "1.2"}) rim.set((size_t)t->cell_by_name(n));
  CHECK(betti_rel(*t, rim, Coeffs::rationals()) == std::vector<int>{0, 0, 1});
  // the subset handed to betti_rel must be closed
  Bitset open_edge((size_t)t->size());
  open_edge.set((size_t)t->cell_by_name("0.1"));
  CHECK_THROWS_AS(betti_rel(*t, open_edge, Coeffs::rationals()), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Open sets, stars, closures
// ---------------------------------------------------------------------------

TEST_CASE("open stars are the expected cell sets") {
  ComplexPtr t = simplex_complex(2);
  CHECK(OpenSet::star(*t, t->cell_by_name("0")).cells.count() == 4);
  CHECK(OpenSet::star(*t, t->cell_by_name("0.1.2")).cells.count() == 1);
  ConeResult c = cone(std::make_shared<CellComplex>(
      CellComplex::from_simplices({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}})));
  CHECK(OpenSet::star(*c.complex, c.apex_cell).cells.count() == 15);
}

TEST_CASE("up closed sets are open and their complements are closed") {
  ComplexPtr t = simplex_complex(2);
  Bitset not_open((size_t)t->size());
  not_open.set((size_t)t->cell_by_name("0"));
  CHECK_THROWS_AS(OpenSet::of(*t, not_open), std::invalid_argument);
  OpenSet star = OpenSet::star(*t, t->cell_by_name("0"));
  CHECK(t->is_down_closed(star.complement_closed(*t)));
}

TEST_CASE("closure operators are idempotent and land in the right class") {
  ComplexPtr torus = product(circle_complex(3), circle_complex(3)).complex;
  Rng rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    Bitset s((size_t)torus->size());
    for (int i = 0; i < torus->size(); ++i)
      if (rng.below(4) == 0) s.set((size_t)i);
    Bitset up = torus->up_closure(s);
    Bitset down = torus->down_closure(s);
    CHECK(torus->is_up_closed(up));
    CHECK(torus->is_down_closed(down));
    CHECK(torus->up_closure(up) == up);
    CHECK(torus->down_closure(down) == down);
  }
}

// ---------------------------------------------------------------------------
// Order complexes
// ---------------------------------------------------------------------------

TEST_CASE("the order complex of the tetrahedron boundary keeps its homology") {
  CellComplex K = CellComplex::from_simplices({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
  OrderComplexResult oc = order_complex(K, K.all_cells());
  CHECK(dims_census(oc.complex) == std::vector<int>{14, 36, 24});
  CHECK(betti_numbers(oc.complex, Coeffs::rationals()) == std::vector<int>{1, 0, 1});
  check_betti_against_oracle(oc.complex);
  // every chain's carrier is its top element
  for (int i = 0; i < oc.complex.size(); ++i) {
    int top = oc.carrier[(size_t)i];
    for (int v : oc.complex.cell(i).verts) CHECK(K.leq(oc.vertex_cell[(size_t)v], top));
  }
}

// ---------------------------------------------------------------------------
// Cones and suspensions
// ---------------------------------------------------------------------------

TEST_CASE("the cone on the empty complex is a point") {
  ConeResult c = cone(std::make_shared<CellComplex>());
  CHECK(c.complex->size() == 1);
  CHECK(c.complex->dim() == 0);
  CHECK(c.apex_cell == 0);
}

TEST_CASE("the cone on two points is a contractible vee") {
  ConeResult c = cone(std::make_shared<CellComplex>(CellComplex::from_simplices({{0}, {1}})));
  CHECK(dims_census(*c.complex) == std::vector<int>{3, 2});
  CHECK(betti_numbers(*c.complex, Coeffs::rationals()) == std::vector<int>{1, 0});
}

TEST_CASE("the cone on the tetrahedron boundary is contractible with a spherical apex link") {
  ComplexPtr base = std::make_shared<CellComplex>(
      CellComplex::from_simplices({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}));
  ConeResult c = cone(base);
  CHECK(c.complex->size() == 29); // 14 base, 14 joined, 1 apex
  CHECK(reduced_betti(*c.complex, Coeffs::rationals()) == std::vector<int>{0, 0, 0, 0});
  CHECK(reduced_betti(*c.complex, Coeffs::prime_field(2)) == std::vector<int>{0, 0, 0, 0});
  // boundary of the apex's closed star, minus the apex: the base sphere again
  CHECK_NOTHROW(c.complex->verify_boundary_spheres());
  // the collapse to the interval sends the base to one end and the apex to the other
  for (int j = 0; j < base->size(); ++j)
    CHECK(c.collapse.image[(size_t)c.incl_base.image[(size_t)j]] ==
          c.collapse.target->cell_by_name("0"));
  CHECK(c.collapse.image[(size_t)c.apex_cell] == c.collapse.target->cell_by_name("1"));
  check_betti_against_oracle(*c.complex);
}

TEST_CASE("suspending two points gives a circle") {
  SuspensionResult s =
      suspension(std::make_shared<CellComplex>(CellComplex::from_simplices({{0}, {1}})));
  CHECK(dims_census(*s.complex) == std::vector<int>{4, 4});
  CHECK(betti_numbers(*s.complex, Coeffs::rationals()) == std::vector<int>{1, 1});
}

TEST_CASE("suspending the octahedron gives the three sphere") {
  SuspensionResult s = suspension(sphere_complex(2));
  CHECK(betti_numbers(*s.complex, Coeffs::rationals()) == std::vector<int>{1, 0, 0, 1});
  CHECK(betti_numbers(*s.complex, Coeffs::prime_field(3)) == std::vector<int>{1, 0, 0, 1});
  CHECK(s.complex->euler_characteristic() == 0);
  CHECK_NOTHROW(s.complex->verify_boundary_spheres());
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

TEST_CASE("the product with a point keeps the shape") {
  ProductResult p = product(point_complex(), circle_complex(4));
  CHECK(dims_census(*p.complex) == dims_census(*circle_complex(4)));
  CHECK(betti_numbers(*p.complex, Coeffs::rationals()) == std::vector<int>{1, 1});
}

TEST_CASE("the square splits into two triangles along the staircase diagonal") {
  ProductResult p = product(simplex_complex(1), simplex_complex(1));
  CHECK(dims_census(*p.complex) == std::vector<int>{4, 5, 2});
  CHECK(betti_numbers(*p.complex, Coeffs::rationals()) == std::vector<int>{1, 0, 0});
  CHECK(p.vid(1, 1) == 1 * p.stride + 1);
}

TEST_CASE("the product of two triangulated circles is a torus") {
  ProductResult p = product(circle_complex(3), circle_complex(3));
  CHECK(dims_census(*p.complex) == std::vector<int>{9, 27, 18});
  CHECK(p.complex->euler_characteristic() == 0);
  CHECK(betti_numbers(*p.complex, Coeffs::rationals()) == std::vector<int>{1, 2, 1});
  CHECK(betti_numbers(*p.complex, Coeffs::prime_field(2)) == std::vector<int>{1, 2, 1});
  CHECK_NOTHROW(p.complex->verify_boundary_spheres());
  check_betti_against_oracle(*p.complex);
  check_chain_commutes(p.proj1, Coeffs::rationals());
  check_chain_commutes(p.proj2, Coeffs::prime_field(2));
}

TEST_CASE("betti numbers of products satisfy the field coefficient convolution") {
  std::vector<std::pair<ComplexPtr, ComplexPtr>> pairs = {
      {circle_complex(3), circle_complex(4)},
      {simplex_complex(1), circle_complex(4)},
      {std::make_shared<CellComplex>(CellComplex::from_simplices({{0}, {1}})), circle_complex(3)},
  };
  for (auto& R : {Coeffs::rationals(), Coeffs::prime_field(2), Coeffs::prime_field(5)})
    for (auto& [K, L] : pairs) {
      ProductResult p = product(K, L);
      std::vector<int> bk = betti_numbers(*K, R), bl = betti_numbers(*L, R);
      std::vector<int> expect(bk.size() + bl.size() - 1, 0);
      for (size_t i = 0; i < bk.size(); ++i)
        for (size_t j = 0; j < bl.size(); ++j) expect[i + j] += bk[i] * bl[j];
      while (expect.size() > 1 && expect.back() == 0) expect.pop_back();
      std::vector<int> got = betti_numbers(*p.complex, R);
      while (got.size() > 1 && got.back() == 0) got.pop_back();
      CHECK(got == expect);
    }
}

TEST_CASE("products reject factors whose vertex orders disagree across faces") {
  // the shared edge is first seen as (1, 0), then induced as (0, 1)
  ComplexPtr bad =
      std::make_shared<CellComplex>(CellComplex::from_simplices({{1, 0}, {0, 1, 2}}));
  CHECK_THROWS_AS(product(bad, point_complex()), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Subdivision
// ---------------------------------------------------------------------------

TEST_CASE("the subdivided interval is a three vertex path") {
  SubdivisionResult sd = barycentric(simplex_complex(1));
  CHECK(dims_census(*sd.complex) == std::vector<int>{3, 2});
  CHECK(betti_numbers(*sd.complex, Coeffs::rationals()) == std::vector<int>{1, 0});
}

TEST_CASE("the subdivided triangle rim is a hexagon") {
  ComplexPtr rim =
      std::make_shared<CellComplex>(CellComplex::from_simplices({{0, 1}, {1, 2}, {0, 2}}));
  SubdivisionResult sd = barycentric(rim);
  CHECK(dims_census(*sd.complex) == std::vector<int>{6, 6});
  CHECK(betti_numbers(*sd.complex, Coeffs::prime_field(3)) == std::vector<int>{1, 1});
}

TEST_CASE("barycentric subdivision preserves homology on random complexes") {
  Rng rng(2026);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<std::vector<int>> tops;
    int ntri = 3 + (int)rng.below(4);
    for (int t = 0; t < ntri; ++t) {
      int a = (int)rng.below(6), b = a, c = a;
      while (b == a) b = (int)rng.below(6);
      while (c == a || c == b) c = (int)rng.below(6);
      tops.push_back({a, b, c});
    }
    tops.push_back({(int)rng.below(6), 6}); // a whisker so the shape is not pure
    ComplexPtr K = std::make_shared<CellComplex>(CellComplex::from_simplices(tops));
    check_betti_against_oracle(*K);
    SubdivisionResult sd = barycentric(K);
    check_betti_against_oracle(*sd.complex);
    for (auto& R : {Coeffs::rationals(), Coeffs::prime_field(2), Coeffs::prime_field(5)})
      CHECK(betti_numbers(*K, R) == betti_numbers(*sd.complex, R));
    // one barycenter vertex per original cell
    CHECK((int)sd.complex->cells_of_dim(0).size() == K->size());
    CHECK(sd.carrier.fine.get() == sd.complex.get());
    CHECK(sd.carrier.coarse.get() == K.get());
  }
}

TEST_CASE("relative subdivision splits only the marked edge of the triangle") {
  ComplexPtr t = simplex_complex(2);
  Bitset marked((size_t)t->size());
  marked.set((size_t)t->cell_by_name("0.1"));
  SubdivisionResult sd = relative_subdivision(t, t->down_closure(marked));
  CHECK(dims_census(*sd.complex) == std::vector<int>{4, 4, 1});
  CHECK(betti_numbers(*sd.complex, Coeffs::rationals()) == std::vector<int>{1, 0, 0});
  // the surviving face is now a square: four rim edges
  int face = sd.complex->cell_by_name("0.1.2");
  REQUIRE(face >= 0);
  CHECK(sd.complex->facets(face).size() == 4);
  // the barycenter vertex of the split edge carries back to that edge
  int bc = sd.complex->cell_by_name("c" + std::to_string(t->cell_by_name("0.1")));
  REQUIRE(bc >= 0);
  CHECK(sd.vertex_cell[(size_t)bc] == t->cell_by_name("0.1"));
  CHECK_NOTHROW(sd.complex->verify_boundary_spheres());
  // an unmarked complex passes through with the same census
  Bitset none((size_t)t->size());
  CHECK(dims_census(*relative_subdivision(t, none).complex) == dims_census(*t));
  // marking everything is plain barycentric subdivision
  CHECK(dims_census(*relative_subdivision(t, t->all_cells()).complex) ==
        dims_census(*barycentric(t).complex));
  // the marked set must be closed
  CHECK_THROWS_AS(relative_subdivision(t, marked), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Regular CW constructions and their certificates
// ---------------------------------------------------------------------------

TEST_CASE("two lens cells over a bigon make a sphere") {
  std::vector<Cell> cells = {{"a", 0, {}}, {"b", 0, {}}, {"x", 1, {}},
                             {"y", 1, {}}, {"P", 2, {}}, {"Q", 2, {}}};
  std::vector<std::pair<int, int>> cov = {{0, 2}, {1, 2}, {0, 3}, {1, 3},
                                          {2, 4}, {3, 4}, {2, 5}, {3, 5}};
  CellComplex pillow = CellComplex::regular_cw(std::move(cells), cov);
  CHECK(dims_census(pillow) == std::vector<int>{2, 2, 2});
  CHECK(pillow.euler_characteristic() == 2);
  CHECK(betti_numbers(pillow, Coeffs::rationals()) == std::vector<int>{1, 0, 1});
  CHECK_NOTHROW(pillow.verify_boundary_spheres());
}

TEST_CASE("a disc cannot attach to a single edge") {
  std::vector<Cell> cells = {{"a", 0, {}}, {"b", 0, {}}, {"x", 1, {}}, {"P", 2, {}}};
  std::vector<std::pair<int, int>> cov = {{0, 2}, {1, 2}, {2, 3}};
  CHECK_THROWS_AS(CellComplex::regular_cw(std::move(cells), cov), std::runtime_error);
}

TEST_CASE("a disc cannot attach to two disjoint circles") {
  std::vector<Cell> cells = {{"a", 0, {}}, {"b", 0, {}}, {"x", 1, {}}, {"y", 1, {}},
                             {"c", 0, {}}, {"d", 0, {}}, {"z", 1, {}}, {"w", 1, {}},
                             {"P", 2, {}}};
  std::vector<std::pair<int, int>> cov = {{0, 2}, {1, 2}, {0, 3}, {1, 3}, {4, 6}, {5, 6},
                                          {4, 7}, {5, 7}, {2, 8}, {3, 8}, {6, 8}, {7, 8}};
  CHECK_THROWS_AS(CellComplex::regular_cw(std::move(cells), cov), std::runtime_error);
}

TEST_CASE("covering relations must drop dimension by one") {
  std::vector<Cell> cells = {{"a", 0, {}}, {"P", 2, {}}};
  CHECK_THROWS_AS(CellComplex::regular_cw_signed(std::move(cells), {{0, 1, 1}}),
                  std::invalid_argument);
}

TEST_CASE("an edge needs exactly two distinct endpoints") {
  std::vector<Cell> one = {{"a", 0, {}}, {"x", 1, {}}};
  CHECK_THROWS_AS(CellComplex::regular_cw(std::move(one), {{0, 1}}), std::invalid_argument);
}

TEST_CASE("capping the torus with a single solid cell kills the fundamental class") {
  ComplexPtr torus = product(circle_complex(3), circle_complex(3)).complex;
  std::vector<Cell> cells;
  std::vector<std::pair<int, int>> cov;
  for (int i = 0; i < torus->size(); ++i) {
    Cell c = torus->cell(i);
    c.verts.clear();
    cells.push_back(std::move(c));
    for (auto& [f, s] : torus->facets(i)) cov.push_back({f, i});
  }
  int solid = (int)cells.size();
  cells.push_back(Cell{"solid", 3, {}});
  for (int f : torus->cells_of_dim(2)) cov.push_back({f, solid});
  // the torus carries a unit fundamental cycle, so the cap itself goes through
  CellComplex X = CellComplex::regular_cw(std::move(cells), cov);
  CHECK(X.dim() == 3);
  CHECK(betti_numbers(X, Coeffs::rationals()) == std::vector<int>{1, 2, 0, 0});
  // but the cap's boundary is not a sphere, and the certificate says so
  CHECK_THROWS_AS(X.verify_boundary_spheres(), std::runtime_error);
}

// ---------------------------------------------------------------------------
// Cellular maps
// ---------------------------------------------------------------------------

TEST_CASE("vertex maps must send simplices onto simplices") {
  ComplexPtr edge = simplex_complex(1);
  ComplexPtr two = std::make_shared<CellComplex>(CellComplex::from_simplices({{0}, {1}}));
  CHECK_THROWS_AS(CellularMap::from_vertex_map(edge, two, {0, 1}), std::invalid_argument);
  CHECK_NOTHROW(CellularMap::from_vertex_map(edge, two, {0, 0}));
}

TEST_CASE("cell assignments must be monotone and dimension nonincreasing") {
  ComplexPtr t = simplex_complex(1);
  // sending the edge above one endpoint but a vertex elsewhere breaks order
  std::vector<int> img((size_t)t->size());
  img[(size_t)t->cell_by_name("0")] = t->cell_by_name("0");
  img[(size_t)t->cell_by_name("1")] = t->cell_by_name("1");
  img[(size_t)t->cell_by_name("0.1")] = t->cell_by_name("0.1");
  CHECK_NOTHROW(CellularMap::of(t, t, img));
  img[(size_t)t->cell_by_name("0.1")] = t->cell_by_name("0");
  CHECK_THROWS_AS(CellularMap::of(t, t, img), std::invalid_argument);
  // a vertex cannot map to an edge
  std::vector<int> up((size_t)t->size(), t->cell_by_name("0.1"));
  CHECK_THROWS_AS(CellularMap::of(t, t, up), std::invalid_argument);
}

TEST_CASE("the double cover of the triangle circle behaves like one") {
  ComplexPtr c6 = circle_complex(6), c3 = circle_complex(3);
  std::vector<int> vmap(6);
  for (int j = 0; j < 6; ++j) vmap[(size_t)j] = j % 3;
  CellularMap dbl = CellularMap::from_vertex_map(c6, c3, vmap);
  // preimage of an open star doubles
  OpenSet star = OpenSet::star(*c3, c3->cell_by_name("0"));
  CHECK(preimage(dbl, star.cells).count() == 2 * star.cells.count());
  // two cells sit over every cell, so nowhere an isomorphism
  CHECK(!is_iso_over(dbl, star.cells));
  CHECK(is_iso_over(CellularMap::identity(c3), star.cells));
  // chain level: commutes, and the fundamental cycle pushes to twice the base one
  check_chain_commutes(dbl, Coeffs::rationals());
  check_chain_commutes(dbl, Coeffs::prime_field(3));
  Coeffs Q = Coeffs::rationals();
  auto M = chain_maps(dbl, Q);
  Matrix z6 = kernel_basis(c6->boundary_matrix(1, Q));
  Matrix z3 = kernel_basis(c3->boundary_matrix(1, Q));
  REQUIRE(z6.cols() == 1);
  REQUIRE(z3.cols() == 1);
  std::vector<Scalar> v6;
  for (int i = 0; i < z6.rows(); ++i) v6.push_back(z6.at(i, 0));
  std::vector<Scalar> w = M[1].apply(v6);
  int j0 = -1;
  for (int i = 0; i < z3.rows(); ++i)
    if (!Q.is_zero(z3.at(i, 0))) { j0 = i; break; }
  REQUIRE(j0 >= 0);
  Scalar ratio = Q.div(w[(size_t)j0], z3.at(j0, 0));
  CHECK((Q.eq(ratio, Q.from_int(2)) || Q.eq(ratio, Q.from_int(-2))));
  for (int i = 0; i < z3.rows(); ++i) CHECK(Q.eq(w[(size_t)i], Q.mul(ratio, z3.at(i, 0))));
}

TEST_CASE("identity chain maps are identity matrices") {
  ComplexPtr s = sphere_complex(2);
  auto M = chain_maps(CellularMap::identity(s), Coeffs::prime_field(5));
  for (int d = 0; d <= s->dim(); ++d)
    CHECK(M[(size_t)d] == Matrix::identity(Coeffs::prime_field(5), (int)s->cells_of_dim(d).size()));
}

TEST_CASE("composition of cellular maps composes images and vertex maps") {
  ComplexPtr c6 = circle_complex(6), c3 = circle_complex(3);
  std::vector<int> vmap(6);
  for (int j = 0; j < 6; ++j) vmap[(size_t)j] = j % 3;
  CellularMap dbl = CellularMap::from_vertex_map(c6, c3, vmap);
  ConeResult cc = cone(c3);
  CellularMap in_cone = compose(cc.incl_base, dbl);
  CHECK(in_cone.is_simplicial());
  for (int i = 0; i < c6->size(); ++i)
    CHECK(in_cone.image[(size_t)i] == cc.incl_base.image[(size_t)dbl.image[(size_t)i]]);
  check_chain_commutes(in_cone, Coeffs::prime_field(2));
}

// ---------------------------------------------------------------------------
// Mapping cylinders
// ---------------------------------------------------------------------------

TEST_CASE("the cylinder of an identity circle map is an annulus") {
  ComplexPtr c3 = circle_complex(3);
  CylinderResult cyl = mapping_cylinder(CellularMap::identity(c3));
  CHECK(dims_census(*cyl.complex) == std::vector<int>{6, 9, 3});
  CHECK(cyl.complex->euler_characteristic() == 0);
  CHECK(betti_numbers(*cyl.complex, Coeffs::rationals()) == std::vector<int>{1, 1, 0});
  CHECK_NOTHROW(cyl.complex->verify_boundary_spheres());
}

TEST_CASE("the cylinder of a collapse pinches to a triangle") {
  ComplexPtr edge = simplex_complex(1);
  CellularMap collapse = CellularMap::from_vertex_map(edge, point_complex(), {0, 0});
  CylinderResult cyl = mapping_cylinder(collapse);
  CHECK(dims_census(*cyl.complex) == std::vector<int>{3, 3, 1});
  CHECK(betti_numbers(*cyl.complex, Coeffs::rationals()) == std::vector<int>{1, 0, 0});
  // the radial cell over the collapsed edge has a triangular rim
  int pinched = cyl.complex->cell_by_name("R:0.1");
  REQUIRE(pinched >= 0);
  CHECK(cyl.complex->facets(pinched).size() == 3);
  CHECK_NOTHROW(cyl.complex->verify_boundary_spheres());
}

TEST_CASE("the cylinder of the circle double cover is an annulus too") {
  ComplexPtr c6 = circle_complex(6), c3 = circle_complex(3);
  std::vector<int> vmap(6);
  for (int j = 0; j < 6; ++j) vmap[(size_t)j] = j % 3;
  CylinderResult cyl = mapping_cylinder(CellularMap::from_vertex_map(c6, c3, vmap));
  CHECK(cyl.complex->euler_characteristic() == 0);
  CHECK(betti_numbers(*cyl.complex, Coeffs::rationals()) == std::vector<int>{1, 1, 0});
  CHECK(betti_numbers(*cyl.complex, Coeffs::prime_field(2)) == std::vector<int>{1, 1, 0});
  CHECK_NOTHROW(cyl.complex->verify_boundary_spheres());
  // the retraction restricts the A side to the original covering map
  for (int i = 0; i < c6->size(); ++i)
    CHECK(cyl.retraction.image[(size_t)cyl.incl_source.image[(size_t)i]] ==
          CellularMap::from_vertex_map(c6, c3, vmap).image[(size_t)i]);
}

TEST_CASE("collapsing the target side of a cylinder gives the cone away from the apex") {
  ComplexPtr c3 = circle_complex(3);
  CylinderResult cyl = mapping_cylinder(CellularMap::identity(c3));
  const CellComplex& cone_cx = *cyl.cone_source.complex;
  Bitset away = cone_cx.all_cells();
  away.set((size_t)cyl.cone_source.apex_cell, false);
  REQUIRE(cone_cx.is_up_closed(away));
  CHECK(is_iso_over(cyl.to_cone, away));
  CHECK(!is_iso_over(cyl.to_cone, cone_cx.all_cells()));
}

// ---------------------------------------------------------------------------
// Quotients
// ---------------------------------------------------------------------------

TEST_CASE("the icosahedron modulo the antipodal map is the projective plane") {
  QuotientResult q = quotient_by_involution(icosahedron(), icosa_antipode());
  CHECK(dims_census(*q.complex) == std::vector<int>{6, 15, 10});
  CHECK(q.complex->euler_characteristic() == 1);
  CHECK(betti_numbers(*q.complex, Coeffs::prime_field(2)) == std::vector<int>{1, 1, 1});
  CHECK(betti_numbers(*q.complex, Coeffs::rationals()) == std::vector<int>{1, 0, 0});
  CHECK(betti_numbers(*q.complex, Coeffs::prime_field(3)) == std::vector<int>{1, 0, 0});
  check_betti_against_oracle(*q.complex);
  CHECK(q.vertex_orbit[0] == q.vertex_orbit[7]); // an antipodal pair
  check_chain_commutes(q.projection, Coeffs::prime_field(2));
  // the mod 2 fundamental class of the sphere dies in the quotient
  Coeffs F2 = Coeffs::prime_field(2);
  auto M = chain_maps(q.projection, F2);
  Matrix z = kernel_basis(q.projection.source->boundary_matrix(2, F2));
  REQUIRE(z.cols() == 1);
  std::vector<Scalar> v;
  for (int i = 0; i < z.rows(); ++i) v.push_back(z.at(i, 0));
  for (auto& c : M[2].apply(v)) CHECK(F2.is_zero(c));
}

TEST_CASE("the octahedron antipodal quotient is rejected for identifying edge pairs") {
  // opposite edges would land on the same vertex pair, so the cell fibres
  // are four cells instead of one orbit
  CHECK_THROWS_AS(quotient_by_involution(sphere_complex(2), {1, 0, 3, 2, 5, 4}),
                  std::invalid_argument);
}

TEST_CASE("involutions with fixed vertices or non simplicial action are rejected") {
  ComplexPtr c4 = circle_complex(4);
  CHECK_THROWS_AS(quotient_by_involution(c4, {0, 1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(quotient_by_involution(c4, {1, 0, 3, 2}), std::invalid_argument);
  // the square circle's antipode would fold onto a bigon, which no simplicial
  // complex can express: opposite edges share their image vertex pair
  CHECK_THROWS_AS(quotient_by_involution(c4, {2, 3, 0, 1}), std::invalid_argument);
  // the hexagon's antipode folds cleanly onto a triangle
  QuotientResult q = quotient_by_involution(circle_complex(6), {3, 4, 5, 0, 1, 2});
  CHECK(dims_census(*q.complex) == std::vector<int>{3, 3});
  CHECK(betti_numbers(*q.complex, Coeffs::rationals()) == std::vector<int>{1, 1});
  check_chain_commutes(q.projection, Coeffs::rationals());
}

// ---------------------------------------------------------------------------
// Subcomplexes and gluing
// ---------------------------------------------------------------------------

TEST_CASE("the equator of the octahedron is a square circle") {
  ComplexPtr s = sphere_complex(2);
  Bitset eq((size_t)s->size());
  for (const char* n : {"2.4", "2.5", "3.4", "3.5"}) {
    int i = s->cell_by_name(n);
    REQUIRE(i >= 0);
    eq.set((size_t)i);
  }
  CHECK_THROWS_AS(subcomplex(s, eq), std::invalid_argument); // vertices missing
  SubcomplexResult sub = subcomplex(s, s->down_closure(eq));
  CHECK(dims_census(*sub.complex) == std::vector<int>{4, 4});
  CHECK(betti_numbers(*sub.complex, Coeffs::rationals()) == std::vector<int>{1, 1});
  for (size_t i = 0; i < sub.old_of_new.size(); ++i)
    CHECK(sub.inclusion.image[i] == sub.old_of_new[i]);
  check_chain_commutes(sub.inclusion, Coeffs::rationals());
}

TEST_CASE("two discs glued along their rim make a sphere") {
  ComplexPtr c4 = circle_complex(4);
  ConeResult disc = cone(c4);
  auto names = [&](const std::string& prefix) {
    std::vector<std::string> n((size_t)disc.complex->size());
    for (int i = 0; i < disc.complex->size(); ++i)
      n[(size_t)i] = prefix + disc.complex->cell(i).name;
    for (int j = 0; j < c4->size(); ++j)
      n[(size_t)disc.incl_base.image[(size_t)j]] = c4->cell(j).name;
    return n;
  };
  GlueResult g = glue({{disc.complex, names("P1:")}, {disc.complex, names("P2:")}});
  CHECK(g.complex->size() == 2 * disc.complex->size() - c4->size());
  CHECK(g.complex->euler_characteristic() == 2);
  CHECK(betti_numbers(*g.complex, Coeffs::rationals()) == std::vector<int>{1, 0, 1});
  CHECK(betti_numbers(*g.complex, Coeffs::prime_field(2)) == std::vector<int>{1, 0, 1});
  CHECK_NOTHROW(g.complex->verify_boundary_spheres());
  // shared rim cells are literally shared
  for (int j = 0; j < c4->size(); ++j)
    CHECK(g.piece_maps[0][(size_t)disc.incl_base.image[(size_t)j]] ==
          g.piece_maps[1][(size_t)disc.incl_base.image[(size_t)j]]);
}

TEST_CASE("gluing rejects orientation clashes on shared cells") {
  ComplexPtr e1 = std::make_shared<CellComplex>(CellComplex::from_simplices({{0, 1}}));
  ComplexPtr e2 = std::make_shared<CellComplex>(CellComplex::from_simplices({{1, 0}}));
  std::vector<std::string> n = {"p", "q", "e"};
  CHECK_THROWS_AS(glue({{e1, n}, {e2, n}}), std::invalid_argument);
  CHECK_NOTHROW(glue({{e1, n}, {e1, n}}));
}

TEST_CASE("gluing rejects cells whose boundaries differ between pieces") {
  // a 'join' edge between p and q in one piece, between p and r in the other
  ComplexPtr e1 = std::make_shared<CellComplex>(CellComplex::from_simplices({{0, 1}}));
  std::vector<std::string> n1 = {"p", "q", "join"};
  std::vector<std::string> n2 = {"p", "r", "join"};
  CHECK_THROWS_AS(glue({{e1, n1}, {e1, n2}}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Simplicial approximation
// ---------------------------------------------------------------------------

TEST_CASE("endpoint maps extend simplicially after one subdivision") {
  ComplexPtr edge = simplex_complex(1);
  ComplexPtr path = std::make_shared<CellComplex>(CellComplex::from_simplices({{0, 1}, {1, 2}}));
  ApproxResult res = subdivide_map(edge, path, {0, 2}, 5);
  CHECK(res.subdivisions == 1);
  CHECK(res.map.is_simplicial());
  // the barycenter lands on the middle vertex
  CHECK(res.map.vertex_map == std::vector<int>{0, 2, 1});
  CHECK(res.carrier.coarse.get() == edge.get());
  CHECK(res.carrier.fine.get() == res.map.source.get());
  // the subdivided edge's pieces carry into the original edge
  int e = edge->cell_by_name("0.1");
  for (int i = 0; i < res.map.source->size(); ++i)
    if (res.map.source->dim_of(i) == 1) CHECK(res.carrier.carrier[(size_t)i] == e);
}

TEST_CASE("maps into a disconnected target cannot be approximated") {
  ComplexPtr edge = simplex_complex(1);
  ComplexPtr two = std::make_shared<CellComplex>(CellComplex::from_simplices({{0}, {1}}));
  CHECK_THROWS_AS(subdivide_map(edge, two, {0, 1}, 2), std::runtime_error);
}

TEST_CASE("already simplicial maps need no subdivision") {
  ComplexPtr c6 = circle_complex(6), c3 = circle_complex(3);
  std::vector<int> vmap(6);
  for (int j = 0; j < 6; ++j) vmap[(size_t)j] = j % 3;
  ApproxResult res = subdivide_map(c6, c3, vmap, 3);
  CHECK(res.subdivisions == 0);
  CHECK(res.map.image == CellularMap::from_vertex_map(c6, c3, vmap).image);
}

// ---------------------------------------------------------------------------
// Stratifications
// ---------------------------------------------------------------------------

TEST_CASE("stratification by dimension lists strata from most generic down") {
  ComplexPtr t = simplex_complex(2);
  Stratification st = Stratification::by_dimension(*t);
  REQUIRE(st.strata.size() == 3);
  CHECK(st.complex_dim == std::vector<int>{1, 1, 0});
  CHECK(st.stratum_of(t->cell_by_name("0.1.2")) == 0);
  CHECK(st.stratum_of(t->cell_by_name("0.1")) == 1);
  CHECK(st.stratum_of(t->cell_by_name("2")) == 2);
}

TEST_CASE("stratifications validate openness coverage and even dimensions") {
  ComplexPtr s = sphere_complex(2);
  CHECK_NOTHROW(Stratification::make(*s, {s->all_cells()}, {1}));
  // a circle's top stratum has odd dimension, so no complex dimension fits
  ComplexPtr c = circle_complex(3);
  CHECK_THROWS_AS(Stratification::make(*c, {c->all_cells()}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(Stratification::make(*c, {c->all_cells()}, {1}), std::invalid_argument);
  // strata listed closed first violate prefix openness
  ComplexPtr t = simplex_complex(2);
  Bitset verts((size_t)t->size()), rest((size_t)t->size());
  for (int i = 0; i < t->size(); ++i)
    (t->dim_of(i) == 0 ? verts : rest).set((size_t)i);
  CHECK_THROWS_AS(Stratification::make(*t, {verts, rest}, {0, 1}), std::invalid_argument);
  // overlap and non coverage
  CHECK_THROWS_AS(Stratification::make(*s, {s->all_cells(), s->all_cells()}, {1, 1}),
                  std::invalid_argument);
  Bitset some((size_t)s->size());
  some.set(0);
  CHECK_THROWS_AS(Stratification::make(*s, {some}, {0}), std::invalid_argument);
}
