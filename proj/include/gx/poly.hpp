#pragma once
// Dense univariate polynomials over a Coeffs ring, coefficients stored low
// degree first with no trailing zeros (the zero polynomial is empty).
// Factorization is over prime fields only.

#include "gx/rings.hpp"
#include <optional>
#include <utility>

namespace gx {

class Poly {
public:
  Poly() = default;
  Poly(Coeffs R, std::vector<Scalar> coeffs) : R_(std::move(R)), c_(std::move(coeffs)) { trim(); }
  static Poly zero(const Coeffs& R) { return Poly(R, {}); }
  static Poly constant(const Coeffs& R, const Scalar& a) { return Poly(R, {a}); }
  static Poly x(const Coeffs& R) { return Poly(R, {R.zero(), R.one()}); }
  static Poly from_ints(const Coeffs& R, const std::vector<long>& v);

  const Coeffs& ring() const { return R_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return (int)c_.size() - 1; } // -1 for zero
  const Scalar& operator[](size_t i) const { return c_[i]; }
  const std::vector<Scalar>& coeffs() const { return c_; }
  Scalar lead() const { return c_.empty() ? R_.zero() : c_.back(); }
  bool is_monic() const { return !c_.empty() && R_.is_one(c_.back()); }

  Poly monic() const; // divide by leading unit; errors if lead not a unit
  Poly derivative() const;
  Scalar eval(const Scalar& a) const;
  std::string str(const std::string& var = "x") const;

  bool operator==(const Poly& o) const;

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scale(const Scalar& s) const;

  // Euclidean division; requires unit leading coefficient of the divisor.
  static std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
  static Poly gcd(const Poly& a, const Poly& b); // monic gcd, field coefficients
  static Poly lcm(const Poly& a, const Poly& b);
  static Poly powmod(const Poly& base, const mpz_class& e, const Poly& mod);

private:
  void trim();
  Coeffs R_ = Coeffs::rationals();
  std::vector<Scalar> c_;
};

struct Factorization {
  Scalar lead;                          // overall unit
  std::vector<std::pair<Poly, int>> factors; // monic irreducible, multiplicity; canonically sorted
};

// Complete factorization over F_p (squarefree split + distinct-degree +
// Cantor-Zassenhaus equal-degree; the char-2 equal-degree split uses the trace
// polynomial). Errors on the zero polynomial and on non-prime-field rings.
Factorization factor_over_prime_field(const Poly& f, Rng& rng);

} // namespace gx
