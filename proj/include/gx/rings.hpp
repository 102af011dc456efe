#pragma once
// Coefficient rings for the engine: exact rationals, prime fields F_p, and the
// local rings Z/p^k. All arithmetic is exact; modular elements are canonical
// residues in [0, p^k), rationals are GMP mpq_class in canonical form.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>
#include <gmpxx.h>

namespace gx {

// A scalar is either a modular residue or a rational, interpreted relative to a
// Coeffs object. Keeping the modular case a bare uint64_t avoids GMP allocation
// on the hot paths.
using Scalar = std::variant<uint64_t, mpq_class>;

enum class RingKind { rationals, prime_field, local_ring };

bool is_prime_u64(uint64_t n);

class Coeffs {
public:
  static Coeffs rationals();
  static Coeffs prime_field(uint64_t p);
  static Coeffs local_ring(uint64_t p, unsigned k); // k 1..: modulus p^k < 2^63
  // Accepts the canonical textual forms: "Q", "F<p>", "Z/<p^k>".
  static Coeffs parse(const std::string& name);

  RingKind kind() const { return kind_; }
  bool is_rational() const { return kind_ == RingKind::rationals; }
  bool is_field() const { return kind_ != RingKind::local_ring; }
  uint64_t p() const { return p_; }
  unsigned k() const { return k_; }
  uint64_t modulus() const { return q_; }
  std::string name() const;

  bool operator==(const Coeffs& o) const {
    return kind_ == o.kind_ && p_ == o.p_ && k_ == o.k_;
  }
  bool operator!=(const Coeffs& o) const { return !(*this == o); }

  Scalar zero() const;
  Scalar one() const;
  Scalar from_int(long v) const;
  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  // Errors on non-units (and on division by zero).
  Scalar inv(const Scalar& a) const;
  Scalar div(const Scalar& a, const Scalar& b) const { return mul(a, inv(b)); }
  bool is_zero(const Scalar& a) const;
  bool is_one(const Scalar& a) const;
  bool is_unit(const Scalar& a) const;
  bool eq(const Scalar& a, const Scalar& b) const;
  // p-adic valuation of a modular residue (k if zero); errors for rationals.
  unsigned val_p(const Scalar& a) const;
  // Exact division by p^v (modular only).
  Scalar divide_p_power(const Scalar& a, unsigned v) const;

  std::string to_string(const Scalar& a) const;
  Scalar from_string(const std::string& s) const;

  // Modular fast path (valid only for non-rational rings).
  uint64_t madd(uint64_t a, uint64_t b) const {
    uint64_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  uint64_t msub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + q_ - b; }
  uint64_t mmul(uint64_t a, uint64_t b) const {
    return (uint64_t)((__uint128_t)a * b % q_);
  }
  uint64_t minv(uint64_t a) const; // errors on non-unit
  uint64_t mneg(uint64_t a) const { return a ? q_ - a : 0; }

private:
  RingKind kind_ = RingKind::rationals;
  uint64_t p_ = 0;
  unsigned k_ = 0;
  uint64_t q_ = 0;
};

// Deterministic RNG for everything seeded: mt19937_64 is fully specified by the
// standard, and the below() reduction is hand-rolled so results are identical
// across platforms (std::uniform_int_distribution is not portable).
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  uint64_t raw() { return eng_(); }
  // Uniform in [0, n), n >= 1, by rejection.
  uint64_t below(uint64_t n);
  // Fork a stream deterministically (for parallel-in-structure subtasks).
  Rng fork() { return Rng(eng_() ^ 0x9e3779b97f4a7c15ull); }

private:
  std::mt19937_64 eng_;
};

} // namespace gx
