#include "gx/rings.hpp"

namespace gx {

namespace {
uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = (uint64_t)((__uint128_t)r * b % m);
    b = (uint64_t)((__uint128_t)b * b % m);
    e >>= 1;
  }
  return r;
}
} // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  // Deterministic Miller-Rabin with a witness set valid far beyond 2^31.
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = (uint64_t)((__uint128_t)x * x % n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

Coeffs Coeffs::rationals() {
  Coeffs c;
  c.kind_ = RingKind::rationals;
  return c;
}

Coeffs Coeffs::prime_field(uint64_t p) {
  if (p >= (1ull << 31)) throw std::invalid_argument("prime_field: p must be < 2^31");
  if (!is_prime_u64(p)) throw std::invalid_argument("prime_field: " + std::to_string(p) + " is not prime");
  Coeffs c;
  c.kind_ = RingKind::prime_field;
  c.p_ = p;
  c.k_ = 1;
  c.q_ = p;
  return c;
}

Coeffs Coeffs::local_ring(uint64_t p, unsigned k) {
  if (k == 0) throw std::invalid_argument("local_ring: exponent must be >= 1");
  if (k == 1) return prime_field(p); // identical behavior by construction
  if (p >= (1ull << 31)) throw std::invalid_argument("local_ring: p must be < 2^31");
  if (!is_prime_u64(p)) throw std::invalid_argument("local_ring: " + std::to_string(p) + " is not prime");
  __uint128_t q = 1;
  for (unsigned i = 0; i < k; ++i) {
    q *= p;
    if (q >= ((__uint128_t)1 << 63)) throw std::invalid_argument("local_ring: p^k must be < 2^63");
  }
  Coeffs c;
  c.kind_ = RingKind::local_ring;
  c.p_ = p;
  c.k_ = k;
  c.q_ = (uint64_t)q;
  return c;
}

Coeffs Coeffs::parse(const std::string& name) {
  if (name == "Q") return rationals();
  if (name.size() >= 2 && name[0] == 'F') {
    return prime_field(std::stoull(name.substr(1)));
  }
  if (name.rfind("Z/", 0) == 0) {
    uint64_t m = std::stoull(name.substr(2));
    if (m < 2) throw std::invalid_argument("coefficient parse: modulus must be >= 2");
    // factor m = p^k
    uint64_t p = 0;
    for (uint64_t d = 2; d * d <= m; ++d) {
      if (m % d == 0) { p = d; break; }
    }
    if (p == 0) p = m;
    unsigned k = 0;
    uint64_t t = m;
    while (t % p == 0) t /= p, ++k;
    if (t != 1) throw std::invalid_argument("coefficient parse: modulus must be a prime power");
    return local_ring(p, k);
  }
  throw std::invalid_argument("unrecognized coefficient name: " + name);
}

std::string Coeffs::name() const {
  switch (kind_) {
    case RingKind::rationals: return "Q";
    case RingKind::prime_field: return "F" + std::to_string(p_);
    case RingKind::local_ring: return "Z/" + std::to_string(q_);
  }
  return "?";
}

Scalar Coeffs::zero() const {
  if (is_rational()) return mpq_class(0);
  return uint64_t(0);
}

Scalar Coeffs::one() const {
  if (is_rational()) return mpq_class(1);
  return uint64_t(1 % q_);
}

Scalar Coeffs::from_int(long v) const {
  if (is_rational()) return mpq_class(v);
  long m = (long)q_;
  long r = v % m;
  if (r < 0) r += m;
  return (uint64_t)r;
}

Scalar Coeffs::add(const Scalar& a, const Scalar& b) const {
  if (is_rational()) {
    mpq_class r = std::get<mpq_class>(a) + std::get<mpq_class>(b);
    r.canonicalize();
    return r;
  }
  return madd(std::get<uint64_t>(a), std::get<uint64_t>(b));
}

Scalar Coeffs::sub(const Scalar& a, const Scalar& b) const {
  if (is_rational()) {
    mpq_class r = std::get<mpq_class>(a) - std::get<mpq_class>(b);
    r.canonicalize();
    return r;
  }
  return msub(std::get<uint64_t>(a), std::get<uint64_t>(b));
}

Scalar Coeffs::neg(const Scalar& a) const {
  if (is_rational()) return mpq_class(-std::get<mpq_class>(a));
  return mneg(std::get<uint64_t>(a));
}

Scalar Coeffs::mul(const Scalar& a, const Scalar& b) const {
  if (is_rational()) {
    mpq_class r = std::get<mpq_class>(a) * std::get<mpq_class>(b);
    r.canonicalize();
    return r;
  }
  return mmul(std::get<uint64_t>(a), std::get<uint64_t>(b));
}

uint64_t Coeffs::minv(uint64_t a) const {
  a %= q_;
  if (a == 0 || a % p_ == 0) throw std::domain_error("inv: not a unit in " + name());
  // extended Euclid on int64 (q_ < 2^63)
  int64_t t = 0, newt = 1;
  int64_t r = (int64_t)q_, newr = (int64_t)a;
  while (newr != 0) {
    int64_t qq = r / newr;
    int64_t tmp = t - qq * newt;
    t = newt;
    newt = tmp;
    tmp = r - qq * newr;
    r = newr;
    newr = tmp;
  }
  if (t < 0) t += (int64_t)q_;
  return (uint64_t)t;
}

Scalar Coeffs::inv(const Scalar& a) const {
  if (is_rational()) {
    const mpq_class& x = std::get<mpq_class>(a);
    if (x == 0) throw std::domain_error("inv: division by zero");
    mpq_class r = 1 / x;
    r.canonicalize();
    return r;
  }
  return minv(std::get<uint64_t>(a));
}

bool Coeffs::is_zero(const Scalar& a) const {
  if (is_rational()) return std::get<mpq_class>(a) == 0;
  return std::get<uint64_t>(a) % q_ == 0;
}

bool Coeffs::is_one(const Scalar& a) const {
  if (is_rational()) return std::get<mpq_class>(a) == 1;
  return std::get<uint64_t>(a) % q_ == 1 % q_;
}

bool Coeffs::is_unit(const Scalar& a) const {
  if (is_rational()) return std::get<mpq_class>(a) != 0;
  uint64_t v = std::get<uint64_t>(a) % q_;
  return v != 0 && v % p_ != 0;
}

bool Coeffs::eq(const Scalar& a, const Scalar& b) const {
  if (is_rational()) return std::get<mpq_class>(a) == std::get<mpq_class>(b);
  return std::get<uint64_t>(a) % q_ == std::get<uint64_t>(b) % q_;
}

unsigned Coeffs::val_p(const Scalar& a) const {
  if (is_rational()) throw std::domain_error("val_p: rational coefficients");
  uint64_t v = std::get<uint64_t>(a) % q_;
  if (v == 0) return k_;
  unsigned w = 0;
  while (v % p_ == 0) v /= p_, ++w;
  return w;
}

Scalar Coeffs::divide_p_power(const Scalar& a, unsigned v) const {
  if (is_rational()) throw std::domain_error("divide_p_power: rational coefficients");
  uint64_t x = std::get<uint64_t>(a) % q_;
  for (unsigned i = 0; i < v; ++i) {
    if (x % p_ != 0) throw std::domain_error("divide_p_power: not divisible");
    x /= p_;
  }
  return x;
}

std::string Coeffs::to_string(const Scalar& a) const {
  if (is_rational()) return std::get<mpq_class>(a).get_str();
  return std::to_string(std::get<uint64_t>(a) % q_);
}

Scalar Coeffs::from_string(const std::string& s) const {
  if (is_rational()) {
    mpq_class r(s);
    r.canonicalize();
    return r;
  }
  // allow negative input strings
  bool neg = !s.empty() && s[0] == '-';
  uint64_t v = std::stoull(neg ? s.substr(1) : s) % q_;
  return neg ? mneg(v) : v;
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  if (n == 1) return 0;
  // rejection sampling on the smallest covering power-of-two mask
  uint64_t mask = ~uint64_t(0);
  if ((n & (n - 1)) == 0) return eng_() & (n - 1);
  int bits = 64;
  while (bits > 1 && (uint64_t(1) << (bits - 1)) >= n) --bits;
  mask = (bits == 64) ? ~uint64_t(0) : ((uint64_t(1) << bits) - 1);
  for (;;) {
    uint64_t v = eng_() & mask;
    if (v < n) return v;
  }
}

} // namespace gx
