#pragma once
// Krull-Schmidt machinery for minimal labeled complexes: endomorphism
// algebras, radicals, idempotents, certified direct-sum decompositions, and
// isomorphism testing.
//
// Everything runs through the label-diagonal symbol of a chain endomorphism.
// In a minimal complex the differential never carries a unit between two
// generators with the same label, so null-homotopic endomorphisms and
// strictly label-decreasing ones form nilpotent ideals; what survives is the
// block-diagonal part of the endomorphism, one block per (degree, label)
// multiplicity space. The symbol map is an algebra homomorphism onto a
// finite-dimensional matrix algebra whose semisimple quotient equals that of
// the full derived endomorphism ring. Idempotents found there lift by Newton
// iteration to honest chain idempotents, and those split the complex by a
// label-triangular change of basis. No homotopy bookkeeping is ever needed.
//
// The symbol algebra itself is computed by sparse elimination of the chain
// map equations: eliminate the label-decreasing unknowns, keep the induced
// relations on the diagonal ones, and read the symbol space off the small
// residual system. Pivot rows are retained so any symbol solution can be
// lifted back to a full chain map.

#include "gx/lab.hpp"
#include "gx/poly.hpp"

#include <optional>
#include <string>

namespace gx {

// One (degree, label) multiplicity space of a labeled complex.
struct SymBlock {
  int degree = 0;
  int label = 0;
  int mult = 0;
};

// The space of label-diagonal symbols of chain maps A -> B, with a stored
// chain map lifting each generator. Over a field the generators are a basis.
struct SymbolSpace {
  Coeffs R;
  std::vector<SymBlock> rows; // blocks of B
  std::vector<SymBlock> cols; // blocks of A; for endomorphisms rows == cols
  // gens[i]: one matrix per paired block (rows[j].mult x cols[j].mult);
  // only blocks with matching (degree, label) pair up, listed in paired
  std::vector<std::pair<int, int>> paired; // (row block, col block) indices
  std::vector<std::vector<Matrix>> gens;
  std::vector<LabMap> lifts; // chain maps A -> B realizing each generator
};

// Symbols of chain maps A -> B. A and B must be minimal and share the space.
SymbolSpace chain_map_symbols(const LabComplex& A, const LabComplex& B);

// The endomorphism data of a minimal complex: the symbol algebra plus the
// identity's coordinates.
struct EndAlgebra {
  Coeffs R;
  LabComplex M; // the complex the endomorphisms act on
  std::vector<SymBlock> blocks;
  std::vector<std::vector<Matrix>> basis; // symbol generators (basis over fields)
  std::vector<LabMap> lifts;
  int dim() const { return (int)basis.size(); }
};

EndAlgebra end_algebra(const LabComplex& M);

// Flatten a symbol (one matrix per block) into coordinates, and back.
std::vector<Scalar> flatten_symbol(const EndAlgebra& A,
                                   const std::vector<Matrix>& sym);
std::vector<Matrix> symbol_product(const EndAlgebra& A,
                                   const std::vector<Matrix>& x,
                                   const std::vector<Matrix>& y);
std::vector<Matrix> identity_symbol(const EndAlgebra& A);

// Basis of the Jacobson radical of the symbol algebra, as coordinate vectors
// in terms of A's basis. Fields only; certified nilpotent before returning.
// Over F_p the iterated characteristic-coefficient kernels handle the small
// characteristic; over Q the trace form alone suffices.
std::vector<std::vector<Scalar>> radical_coordinates(const EndAlgebra& A);

// A chain idempotent that is neither 0 nor homotopic to the identity, if the
// complex splits; nullopt when the endomorphism algebra is certified local
// (or, over Q, when the search was inconclusive - see the flag).
struct IdempotentSearch {
  std::optional<LabMap> idem; // honest chain idempotent when found
  bool certified_local = false;
  std::string note;
};
IdempotentSearch find_split_idempotent(const EndAlgebra& A, Rng& rng);

// Split a minimal complex along an honest chain idempotent. Parts stay
// minimal; incl/proj are chain maps to and from the given complex with
// proj o incl = id and incl o proj the idempotent (up to the complement).
struct SplitPart {
  LabComplex piece;
  LabMap incl;
  LabMap proj;
};
std::pair<SplitPart, SplitPart> split_idempotent(const LabComplex& M,
                                                 const LabMap& e);

struct Summand {
  LabComplex piece; // minimal
  LabMap incl;      // piece -> parent minimal model
  LabMap proj;      // parent minimal model -> piece
  std::vector<int> support; // cells with nonzero stalk cohomology
};

struct Decomposition {
  LabComplex M; // the minimal model all summand maps refer to
  LabReduction reduction; // from the input complex to M (tracked)
  std::vector<Summand> parts;
  bool complete = true; // false: some split was inconclusive (Q only)
  std::string note;
};

// Full recursive decomposition with certificates. Deterministic per seed.
Decomposition decompose(const LabComplex& C, Rng& rng);

// Summands whose restriction to the open set U survive (nonzero in the
// derived category; for minimal complexes that is simply a nonempty
// restriction).
std::vector<int> dense_part_indices(const Decomposition& D, const Bitset& U);

// Isomorphism testing between complexes (minimized internally). A found
// isomorphism relates the minimal models; a mismatch of label censuses or
// graded stalk dimensions is a certified obstruction.
struct IsoResult {
  bool is_iso = false;
  bool certain = true; // false only for an exhausted inconclusive search
  LabMap fwd, bwd;     // between the minimal models, when found
  LabComplex min_a, min_b;
  std::string obstruction;
};
IsoResult iso_test(const LabComplex& A, const LabComplex& B, Rng& rng);

// Random direct sum of indecomposable one- and two-term complexes hidden by
// a random label-triangular automorphism; the returned complex is minimal.
LabComplex random_labeled_complex(const ComplexPtr& K, const Coeffs& R,
                                  Rng& rng, int pieces);

// A fresh presentation of the same complex: generators permuted within each
// degree and the differential conjugated by a random labeled automorphism.
LabComplex shuffle_labeled(const LabComplex& L, Rng& rng);

} // namespace gx
