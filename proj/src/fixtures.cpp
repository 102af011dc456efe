#include "gx/fixtures.hpp"

#include <stdexcept>
#include <string>

namespace gx {

namespace {

int top_vertex(const CellComplex& K) {
  int m = -1;
  for (int i = 0; i < K.size(); ++i)
    for (int v : K.cell(i).verts) m = std::max(m, v);
  return m;
}

ComplexPtr make(std::vector<std::vector<int>> tops) {
  return std::make_shared<CellComplex>(CellComplex::from_simplices(std::move(tops)));
}

// Mapping cylinders lay their cells out as [target | source | prisms]; the
// renames below rely on that layout.
struct CylinderRename {
  std::string target_prefix, source_prefix, prism_prefix;
};

GluePiece rename_cylinder(const CylinderResult& cyl, const CellularMap& phi,
                          const CylinderRename& r) {
  const CellComplex& B = *phi.target;
  const CellComplex& A = *phi.source;
  int nb = B.size(), na = A.size();
  GluePiece piece;
  piece.K = cyl.complex;
  piece.names.resize((size_t)cyl.complex->size());
  for (int b = 0; b < nb; ++b) piece.names[(size_t)b] = r.target_prefix + B.cell(b).name;
  for (int a = 0; a < na; ++a) {
    piece.names[(size_t)(nb + a)] = r.source_prefix + A.cell(a).name;
    piece.names[(size_t)(nb + na + a)] = r.prism_prefix + A.cell(a).name;
  }
  return piece;
}

} // namespace

ComplexPtr fx_simplex(int n) { return simplex_complex(n); }
ComplexPtr fx_sphere(int n) { return sphere_complex(n); }
ComplexPtr fx_circle(int k) { return circle_complex(k); }

ComplexPtr fx_torus() {
  return product(circle_complex(3), circle_complex(3)).complex;
}

ComplexPtr fx_rp2() {
  // Icosahedron: poles 10, 11, upper pentagon 0..4, lower pentagon 5..9.
  std::vector<std::vector<int>> tops;
  for (int i = 0; i < 5; ++i) {
    int j = (i + 1) % 5;
    tops.push_back({10, i, j});
    tops.push_back({i, j, 5 + i});
    tops.push_back({5 + i, 5 + j, j});
    tops.push_back({11, 5 + i, 5 + j});
  }
  ComplexPtr icosa = make(std::move(tops));
  // Antipode: upper vertex i faces lower vertex i+2, poles swap.
  std::vector<int> tau(12);
  for (int i = 0; i < 5; ++i) {
    tau[(size_t)i] = 5 + (i + 2) % 5;
    tau[(size_t)(5 + i)] = (i + 3) % 5;
  }
  tau[10] = 11;
  tau[11] = 10;
  return quotient_by_involution(icosa, tau).complex;
}

// Grid vertex ids: (a, b) -> a*m + b, both coordinates mod m.

ComplexPtr fx_torus_grid(int m) {
  if (m < 3) throw std::invalid_argument("grid torus needs m >= 3");
  auto g = [m](int a, int b) { return ((a + m) % m) * m + (b + m) % m; };
  std::vector<std::vector<int>> tops;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      tops.push_back({g(a, b), g(a + 1, b), g(a + 1, b + 1)});
      tops.push_back({g(a, b), g(a, b + 1), g(a + 1, b + 1)});
    }
  return make(std::move(tops));
}

ComplexPtr fx_torus_grid_anti(int m) {
  if (m < 3) throw std::invalid_argument("grid torus needs m >= 3");
  auto g = [m](int a, int b) { return ((a + m) % m) * m + (b + m) % m; };
  std::vector<std::vector<int>> tops;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      tops.push_back({g(a, b), g(a + 1, b), g(a, b + 1)});
      tops.push_back({g(a + 1, b), g(a, b + 1), g(a + 1, b + 1)});
    }
  return make(std::move(tops));
}

ComplexPtr fx_torus_grid_quad(int m) {
  if (m < 3) throw std::invalid_argument("grid torus needs m >= 3");
  auto g = [m](int a, int b) { return ((a + m) % m) * m + (b + m) % m; };
  std::vector<std::vector<int>> tops;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      int c = m * m + a * m + b;
      tops.push_back({c, g(a, b), g(a + 1, b)});
      tops.push_back({c, g(a + 1, b), g(a + 1, b + 1)});
      tops.push_back({c, g(a + 1, b + 1), g(a, b + 1)});
      tops.push_back({c, g(a, b + 1), g(a, b)});
    }
  return make(std::move(tops));
}

ComplexPtr fx_heegaard_sphere(int m) {
  if (m < 3) throw std::invalid_argument("heegaard sphere needs m >= 3");
  auto g = [m](int a, int b) { return ((a + m) % m) * m + (b + m) % m; };
  // Core circles: m*m + b closes off the a-direction, m*m + m + a the
  // b-direction. Each solid torus is a ring of triangulated prisms; the
  // staircase below always draws the square diagonal from (a, b) to
  // (a+1, b+1), so both boundary tori carry the grid triangulation of
  // fx_torus_grid and the whole thing is rotation invariant.
  auto core_a = [m](int b) { return m * m + (b + m) % m; };
  auto core_b = [m](int a) { return m * m + m + (a + m) % m; };
  std::vector<std::vector<int>> tops;
  for (int j = 0; j < m; ++j)
    for (int v = 0; v < m; ++v) {
      // first solid torus: triangle (j, j+1, core) times edge (v, v+1)
      tops.push_back({g(j, v), g(j + 1, v), core_a(v), core_a(v + 1)});
      tops.push_back({g(j, v), g(j + 1, v), g(j + 1, v + 1), core_a(v + 1)});
      tops.push_back({g(j, v), g(j, v + 1), g(j + 1, v + 1), core_a(v + 1)});
      // second solid torus: edge (j, j+1) times triangle (v, v+1, core)
      tops.push_back({g(j, v), g(j + 1, v), g(j + 1, v + 1), core_b(j + 1)});
      tops.push_back({g(j, v), g(j, v + 1), g(j + 1, v + 1), core_b(j + 1)});
      tops.push_back({g(j, v), g(j, v + 1), core_b(j), core_b(j + 1)});
    }
  return make(std::move(tops));
}

std::vector<int> fx_heegaard_antipode() {
  const int m = 6;
  std::vector<int> tau(m * m + 2 * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      tau[(size_t)(a * m + b)] = ((a + 3) % m) * m + (b + 3) % m;
  for (int b = 0; b < m; ++b) tau[(size_t)(m * m + b)] = m * m + (b + 3) % m;
  for (int a = 0; a < m; ++a) tau[(size_t)(m * m + m + a)] = m * m + m + (a + 3) % m;
  return tau;
}

ComplexPtr fx_rp3() { return fx_hopf_quotient().source; }

ComplexPtr fx_disc_pair_sphere(int m) {
  if (m < 3) throw std::invalid_argument("disc pair needs m >= 3");
  std::vector<std::vector<int>> tops;
  for (int k = 0; k < m; ++k) {
    tops.push_back({k, (k + 1) % m, m});
    tops.push_back({k, (k + 1) % m, m + 1});
  }
  return make(std::move(tops));
}

MapFixture fx_hopf(int m) {
  MapFixture fx;
  fx.source = fx_heegaard_sphere(m);
  fx.target = fx_disc_pair_sphere(m);
  std::vector<int> vmap((size_t)(m * m + 2 * m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) vmap[(size_t)(a * m + b)] = (a - b + m) % m;
  for (int b = 0; b < m; ++b) vmap[(size_t)(m * m + b)] = m;
  for (int a = 0; a < m; ++a) vmap[(size_t)(m * m + m + a)] = m + 1;
  fx.map = CellularMap::from_vertex_map(fx.source, fx.target, vmap);
  fx.map.smooth_proper = true;
  return fx;
}

MapFixture fx_hopf_quotient() {
  const int m = 6;
  MapFixture hopf = fx_hopf(m);
  QuotientResult q = quotient_by_involution(hopf.source, fx_heegaard_antipode());
  // The collapse is antipode invariant, so it descends to the orbit vertices.
  std::vector<int> hv(hopf.map.vertex_map);
  int orbits = 0;
  for (int o : q.vertex_orbit) orbits = std::max(orbits, o + 1);
  std::vector<int> vmap((size_t)orbits, -1);
  for (size_t v = 0; v < q.vertex_orbit.size(); ++v) {
    int o = q.vertex_orbit[v];
    if (vmap[(size_t)o] == -1)
      vmap[(size_t)o] = hv[v];
    else if (vmap[(size_t)o] != hv[v])
      throw std::logic_error("fibre collapse does not descend to the quotient");
  }
  MapFixture fx;
  fx.source = q.complex;
  fx.target = hopf.target;
  fx.map = CellularMap::from_vertex_map(fx.source, fx.target, vmap);
  fx.map.smooth_proper = true;
  return fx;
}

ComplexPtr fx_pinched_spheres() {
  std::vector<std::vector<int>> tops;
  for (int a = 0; a < 4; ++a) {
    int A = (a + 1) % 4;
    tops.push_back({8, a, A});
    tops.push_back({a, A, 9});
    tops.push_back({9, 4 + a, 4 + A});
    tops.push_back({4 + a, 4 + A, 8});
  }
  return make(std::move(tops));
}

MapFixture fx_pinch() {
  MapFixture fx;
  fx.source = fx_torus_grid(4);
  fx.target = fx_pinched_spheres();
  // Rows b = 0 and b = 2 collapse to the pinch points, rows 1 and 3 become
  // the two equators.
  std::vector<int> vmap(16);
  for (int a = 0; a < 4; ++a) {
    vmap[(size_t)(4 * a + 0)] = 8;
    vmap[(size_t)(4 * a + 1)] = a;
    vmap[(size_t)(4 * a + 2)] = 9;
    vmap[(size_t)(4 * a + 3)] = 4 + a;
  }
  fx.map = CellularMap::from_vertex_map(fx.source, fx.target, vmap);
  fx.map.smooth_proper = true;
  return fx;
}

namespace {

// Shared shape of the cone resolutions: the mapping cylinder of a fibre
// collapse phi, crushed onto the cone over phi's source, is an isomorphism
// away from the apex.
std::pair<ResolutionFixture, ResolutionFixture>
cylinder_cone_pair(const MapFixture& phi, bool first_is_identity) {
  CylinderResult cyl = mapping_cylinder(phi.map);
  ComplexPtr target = cyl.cone_source.complex;
  Bitset U = Bitset::full((size_t)target->size());
  U.set((size_t)cyl.cone_source.apex_cell, false);

  ResolutionFixture blowup;
  blowup.source = cyl.complex;
  blowup.target = target;
  blowup.f = cyl.to_cone;
  blowup.f.smooth_proper = true;
  blowup.U = U;

  ResolutionFixture other;
  if (first_is_identity) {
    other.source = target;
    other.target = target;
    other.f = CellularMap::identity(target);
    other.f.smooth_proper = true;
    other.U = U;
    return {other, blowup};
  }
  // Refined variant: subdivide the collapsed end (the cylinder's target
  // side, which sits over the apex) and push the crush through.
  int nb = phi.target->size();
  Bitset endS((size_t)cyl.complex->size());
  for (int b = 0; b < nb; ++b) endS.set((size_t)b);
  SubdivisionResult sub = relative_subdivision(cyl.complex, endS);
  other.source = sub.complex;
  other.target = target;
  other.f = through_refinement(blowup.f, sub.carrier);
  other.f.smooth_proper = true;
  other.U = U;
  return {blowup, other};
}

} // namespace

std::pair<ResolutionFixture, ResolutionFixture> fx_cone_rp3_pair() {
  return cylinder_cone_pair(fx_hopf_quotient(), false);
}

std::pair<ResolutionFixture, ResolutionFixture> fx_cone_s3_pair() {
  return cylinder_cone_pair(fx_hopf(4), true);
}

std::pair<ResolutionFixture, ResolutionFixture> fx_suspension_rp3_pair() {
  MapFixture phi = fx_hopf_quotient();
  SuspensionResult susp = suspension(phi.source);
  CylinderResult cn = mapping_cylinder(phi.map);
  CylinderResult cs = mapping_cylinder(phi.map);
  int nb = phi.target->size(), na = phi.source->size();

  // Glue the two cylinders along their shared rp3 end; the collapses then
  // crush the far ends onto the two poles.
  GluePiece north = rename_cylinder(cn, phi.map, {"N:", "E:", "N*:"});
  GluePiece south = rename_cylinder(cs, phi.map, {"S:", "E:", "S*:"});
  GlueResult glued = glue_resign({north, south});

  auto cone_to_pole = [&](const CylinderResult& cyl, int pole_vertex) {
    int apex = cyl.cone_source.apex_vertex;
    std::vector<int> vmap((size_t)(apex + 1));
    for (int v = 0; v < apex; ++v) vmap[(size_t)v] = v;
    vmap[(size_t)apex] = pole_vertex;
    return CellularMap::from_vertex_map(cyl.cone_source.complex, susp.complex, vmap);
  };
  CellularMap to_north = cone_to_pole(cn, susp.north_vertex);
  CellularMap to_south = cone_to_pole(cs, susp.south_vertex);

  std::vector<int> img((size_t)glued.complex->size());
  for (int c = 0; c < nb + 2 * na; ++c) {
    img[(size_t)glued.piece_maps[0][(size_t)c]] = to_north.image[(size_t)cn.to_cone.image[(size_t)c]];
    img[(size_t)glued.piece_maps[1][(size_t)c]] = to_south.image[(size_t)cs.to_cone.image[(size_t)c]];
  }

  Bitset U = Bitset::full((size_t)susp.complex->size());
  U.set((size_t)susp.north_cell, false);
  U.set((size_t)susp.south_cell, false);

  ResolutionFixture plain;
  plain.source = glued.complex;
  plain.target = susp.complex;
  plain.f = CellularMap::of(glued.complex, susp.complex, img);
  plain.f.smooth_proper = true;
  plain.U = U;

  // Refined variant: subdivide the north collapsed end.
  Bitset endS((size_t)glued.complex->size());
  for (int b = 0; b < nb; ++b) endS.set((size_t)glued.piece_maps[0][(size_t)b]);
  SubdivisionResult sub = relative_subdivision(glued.complex, endS);
  ResolutionFixture refined;
  refined.source = sub.complex;
  refined.target = susp.complex;
  refined.f = through_refinement(plain.f, sub.carrier);
  refined.f.smooth_proper = true;
  refined.U = U;

  return {plain, refined};
}

CorrespondenceFixture fx_cone_rp3_self_correspondence() {
  CorrespondenceFixture fx;
  MapFixture hq = fx_hopf_quotient();
  fx.base = cylinder_cone_pair(hq, false).first;
  const CellularMap& phi = hq.map;
  ProductResult bb = product(phi.target, phi.target);

  // The diagonal (phi, phi) is simplicial: the image of a simplex runs along
  // the main diagonal of the staircase on (image) x (image).
  int nv = top_vertex(*phi.source) + 1;
  std::vector<int> diag_v((size_t)nv);
  for (int v = 0; v < nv; ++v)
    diag_v[(size_t)v] = phi.vertex_map[(size_t)v] * bb.stride + phi.vertex_map[(size_t)v];
  CellularMap diag = CellularMap::from_vertex_map(phi.source, bb.complex, diag_v);
  CylinderResult w = mapping_cylinder(diag);
  fx.W = w.complex;

  const CellComplex& Wres = *fx.base.source;
  const CellComplex& A = *phi.source;
  const CellComplex& BB = *bb.complex;
  int nbb = BB.size(), na = A.size();
  auto project = [&](const CellularMap& proj) {
    std::vector<int> img((size_t)fx.W->size());
    for (int c = 0; c < nbb; ++c)
      img[(size_t)c] = Wres.cell_by_name("B:" + proj.target->cell(proj.image[(size_t)c]).name);
    for (int a = 0; a < na; ++a) {
      img[(size_t)(nbb + a)] = Wres.cell_by_name("A:" + A.cell(a).name);
      img[(size_t)(nbb + na + a)] = Wres.cell_by_name("R:" + A.cell(a).name);
    }
    return CellularMap::of(fx.W, fx.base.source, std::move(img));
  };
  fx.p1 = project(bb.proj1);
  fx.p2 = project(bb.proj2);
  fx.p1.smooth_proper = true;
  fx.p2.smooth_proper = true;

  // Everything except the closed rp3 end.
  fx.open_part = Bitset::full((size_t)fx.W->size());
  for (int a = 0; a < na; ++a) fx.open_part.set((size_t)(nbb + a), false);
  return fx;
}

namespace {

struct DiskFamilyPieces {
  std::vector<GluePiece> pieces;
  std::vector<const CellularMap*> maps; // per piece, for the index layout
  std::vector<int> source_vertex;       // rim vertex under the source end
  std::vector<int> target_vertex;       // rim vertex under the target end, -1 = apex
};

FamilyFixture assemble_disk_family(const DiskFamilyPieces& parts) {
  const int rim = 6;
  ConeResult base = cone(circle_complex(rim));
  FamilyFixture fx;
  fx.base = base.complex;
  GlueResult glued = glue_resign(parts.pieces);
  fx.total = glued.complex;

  auto rim_vertex = [&](int k) { return base.complex->simplex_index({(k + rim) % rim}); };
  auto rim_edge = [&](int k) {
    int u = (k + rim) % rim, v = (k + 1) % rim;
    std::vector<int> e{std::min(u, v), std::max(u, v)};
    return base.complex->simplex_index(e);
  };
  int spoke0 = base.complex->simplex_index({0, base.apex_vertex});

  std::vector<int> img((size_t)fx.total->size(), -1);
  for (size_t p = 0; p < parts.pieces.size(); ++p) {
    const CellularMap& phi = *parts.maps[p];
    int nb = phi.target->size(), na = phi.source->size();
    int sv = parts.source_vertex[p], tv = parts.target_vertex[p];
    int btag = tv < 0 ? base.apex_cell : rim_vertex(tv);
    int rtag = tv < 0 ? spoke0 : rim_edge(std::min(sv, tv) == 0 && std::max(sv, tv) == rim - 1
                                              ? rim - 1
                                              : std::min(sv, tv));
    for (int b = 0; b < nb; ++b) img[(size_t)glued.piece_maps[p][(size_t)b]] = btag;
    for (int a = 0; a < na; ++a) {
      img[(size_t)glued.piece_maps[p][(size_t)(nb + a)]] = rim_vertex(sv);
      img[(size_t)glued.piece_maps[p][(size_t)(nb + na + a)]] = rtag;
    }
  }
  fx.projection = CellularMap::of(fx.total, fx.base, std::move(img));
  fx.projection.smooth_proper = true;

  fx.punctured = Bitset::full((size_t)base.complex->size());
  fx.punctured.set((size_t)base.apex_cell, false);
  for (int k = 0; k < rim; ++k) {
    fx.rim_cycle.push_back(rim_vertex(k));
    fx.rim_cycle.push_back(rim_edge(k));
  }
  return fx;
}

} // namespace

FamilyFixture fx_i2_model() {
  ComplexPtr t_std = fx_torus_grid(4);
  ComplexPtr t_anti = fx_torus_grid_anti(4);
  ComplexPtr t_quad = fx_torus_grid_quad(4);
  const int m = 4;
  auto g = [m](int a, int b) { return ((a + m) % m) * m + (b + m) % m; };

  // Square centers drop to a corner; which corner decides whether the
  // receiving torus is the standard or the opposite diagonal one.
  std::vector<int> vq_std(32), vq_anti(32);
  for (int v = 0; v < 16; ++v) vq_std[(size_t)v] = vq_anti[(size_t)v] = v;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      vq_std[(size_t)(16 + a * m + b)] = g(a, b);
      vq_anti[(size_t)(16 + a * m + b)] = g(a + 1, b);
    }
  CellularMap q_std = CellularMap::from_vertex_map(t_quad, t_std, vq_std);
  CellularMap q_anti = CellularMap::from_vertex_map(t_quad, t_anti, vq_anti);

  // The shear carrying the opposite-diagonal tiling back to the standard one.
  std::vector<int> vsh(16);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) vsh[(size_t)g(a, b)] = g(a, a + b);
  CellularMap shear = CellularMap::from_vertex_map(t_anti, t_std, vsh);

  MapFixture pinch = fx_pinch();

  CylinderResult cyl_qs = mapping_cylinder(q_std);
  CylinderResult cyl_qa = mapping_cylinder(q_anti);
  CylinderResult cyl_sh = mapping_cylinder(shear);
  CylinderResult cyl_pn = mapping_cylinder(pinch.map);

  DiskFamilyPieces parts;
  auto add = [&](const CylinderResult& cyl, const CellularMap& phi, int sv, int tv,
                 const std::string& prism) {
    std::string sp = "L" + std::to_string(sv) + ":";
    std::string tp = tv < 0 ? "F:" : "L" + std::to_string(tv) + ":";
    parts.pieces.push_back(rename_cylinder(cyl, phi, {tp, sp, prism}));
    parts.maps.push_back(&phi);
    parts.source_vertex.push_back(sv);
    parts.target_vertex.push_back(tv);
  };
  add(cyl_qs, q_std, 1, 0, "P0:");
  add(cyl_qa, q_anti, 1, 2, "P1:");
  add(cyl_sh, shear, 2, 3, "P2:");
  add(cyl_qs, q_std, 4, 3, "P3:");
  add(cyl_qa, q_anti, 4, 5, "P4:");
  add(cyl_sh, shear, 5, 0, "P5:");
  add(cyl_pn, pinch.map, 0, -1, "C:");
  return assemble_disk_family(parts);
}

FamilyFixture fx_i2_trivial() {
  ComplexPtr t_std = fx_torus_grid(4);
  CellularMap id = CellularMap::identity(t_std);
  CylinderResult cyl = mapping_cylinder(id);
  DiskFamilyPieces parts;
  auto add = [&](int sv, int tv, const std::string& prism) {
    std::string sp = "L" + std::to_string(sv) + ":";
    std::string tp = tv < 0 ? "F:" : "L" + std::to_string(tv) + ":";
    parts.pieces.push_back(rename_cylinder(cyl, id, {tp, sp, prism}));
    parts.maps.push_back(&id);
    parts.source_vertex.push_back(sv);
    parts.target_vertex.push_back(tv);
  };
  for (int k = 0; k < 6; ++k) add((k + 1) % 6, k, "P" + std::to_string(k) + ":");
  add(0, -1, "C:");
  return assemble_disk_family(parts);
}

} // namespace gx
