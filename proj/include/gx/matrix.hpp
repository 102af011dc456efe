#pragma once
// Dense exact matrices over a Coeffs ring, with the eliminations the engine
// relies on: reduced row echelon over fields (with transform certificate),
// diagonalization over Z/p^k (local Smith form with invertible U, V), linear
// solving over every supported ring, kernels, and minimal polynomials.

#include "gx/poly.hpp"
#include <optional>

namespace gx {

class Matrix {
public:
  Matrix() : R_(Coeffs::rationals()), rows_(0), cols_(0) {}
  Matrix(Coeffs R, int rows, int cols)
      : R_(std::move(R)), rows_(rows), cols_(cols), a_((size_t)rows * cols, R_.zero()) {}
  static Matrix identity(const Coeffs& R, int n);
  static Matrix from_ints(const Coeffs& R, const std::vector<std::vector<long>>& v);

  const Coeffs& ring() const { return R_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Scalar& at(int i, int j) { return a_[(size_t)i * cols_ + j]; }
  const Scalar& at(int i, int j) const { return a_[(size_t)i * cols_ + j]; }

  bool is_zero() const;
  Matrix transpose() const;
  std::string str() const;
  bool operator==(const Matrix& o) const;

  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  Matrix scale(const Scalar& s) const;
  std::vector<Scalar> apply(const std::vector<Scalar>& v) const; // A*v

private:
  Coeffs R_;
  int rows_, cols_;
  std::vector<Scalar> a_;
};

struct RowReduceResult {
  int rank = 0;
  std::vector<int> pivot_cols;
  Matrix rref;      // reduced row echelon form
  Matrix transform; // invertible T with T*A = rref
};

// Field coefficients only; rejects Z/p^k with k > 1.
RowReduceResult row_reduce(const Matrix& A);

// Rank over a field.
int rank_of(const Matrix& A);

// Columns form a generating set of {x : A x = 0}. Over a field this is a basis;
// over Z/p^k it generates the kernel submodule (computed through the local
// diagonalization).
Matrix kernel_basis(const Matrix& A);

// One solution of A x = b if any exists (all rings).
std::optional<std::vector<Scalar>> solve(const Matrix& A, const std::vector<Scalar>& b);

// One solution of A X = B, if every column is solvable (all rings).
std::optional<Matrix> solve_matrix(const Matrix& A, const Matrix& B);

struct LocalDiagResult {
  Matrix U, D, V; // U*A*V = D, U and V invertible, D diagonal with p-power-times-unit entries
};

// Smith-type diagonalization over the local rings Z/p^k (also accepts fields,
// where it degenerates to an ordinary diagonalization).
LocalDiagResult diagonalize_over_local(const Matrix& A);

// Invertibility over any supported ring (unit determinant for modular rings is
// checked via the rank of the mod-p reduction).
bool is_invertible(const Matrix& A);

// Determinant over a field (elimination).
Scalar det(const Matrix& A);

// Monic minimal polynomial over a field via Krylov iteration per basis vector.
Poly minimal_polynomial(const Matrix& A);

Matrix reduce_mod_p(const Matrix& A); // Z/p^k -> F_p entrywise

} // namespace gx
