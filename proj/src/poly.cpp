#include "gx/poly.hpp"
#include <algorithm>
#include <map>

namespace gx {

void Poly::trim() {
  while (!c_.empty() && R_.is_zero(c_.back())) c_.pop_back();
}

Poly Poly::from_ints(const Coeffs& R, const std::vector<long>& v) {
  std::vector<Scalar> c;
  c.reserve(v.size());
  for (long x : v) c.push_back(R.from_int(x));
  return Poly(R, std::move(c));
}

Poly Poly::monic() const {
  if (is_zero()) throw std::domain_error("monic: zero polynomial");
  Scalar u = R_.inv(c_.back());
  return scale(u);
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return zero(R_);
  std::vector<Scalar> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = R_.mul(c_[i], R_.from_int((long)i));
  return Poly(R_, std::move(d));
}

Scalar Poly::eval(const Scalar& a) const {
  Scalar r = R_.zero();
  for (size_t i = c_.size(); i-- > 0;) r = R_.add(R_.mul(r, a), c_[i]);
  return r;
}

std::string Poly::str(const std::string& var) const {
  if (is_zero()) return "0";
  std::string s;
  for (size_t i = c_.size(); i-- > 0;) {
    if (R_.is_zero(c_[i])) continue;
    if (!s.empty()) s += " + ";
    std::string coef = R_.to_string(c_[i]);
    if (i == 0) {
      s += coef;
    } else {
      if (coef != "1") s += coef + "*";
      s += var;
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s;
}

bool Poly::operator==(const Poly& o) const {
  if (c_.size() != o.c_.size()) return false;
  for (size_t i = 0; i < c_.size(); ++i)
    if (!R_.eq(c_[i], o.c_[i])) return false;
  return true;
}

Poly operator+(const Poly& a, const Poly& b) {
  const Coeffs& R = a.R_;
  std::vector<Scalar> c(std::max(a.c_.size(), b.c_.size()), R.zero());
  for (size_t i = 0; i < a.c_.size(); ++i) c[i] = a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) c[i] = R.add(c[i], b.c_[i]);
  return Poly(R, std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) {
  const Coeffs& R = a.R_;
  std::vector<Scalar> c(std::max(a.c_.size(), b.c_.size()), R.zero());
  for (size_t i = 0; i < a.c_.size(); ++i) c[i] = a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) c[i] = R.sub(c[i], b.c_[i]);
  return Poly(R, std::move(c));
}

Poly operator*(const Poly& a, const Poly& b) {
  const Coeffs& R = a.R_;
  if (a.is_zero() || b.is_zero()) return Poly::zero(R);
  std::vector<Scalar> c(a.c_.size() + b.c_.size() - 1, R.zero());
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (R.is_zero(a.c_[i])) continue;
    for (size_t j = 0; j < b.c_.size(); ++j)
      c[i + j] = R.add(c[i + j], R.mul(a.c_[i], b.c_[j]));
  }
  return Poly(R, std::move(c));
}

Poly Poly::scale(const Scalar& s) const {
  std::vector<Scalar> c(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) c[i] = R_.mul(c_[i], s);
  return Poly(R_, std::move(c));
}

std::pair<Poly, Poly> Poly::divmod(const Poly& a, const Poly& b) {
  const Coeffs& R = a.R_;
  if (b.is_zero()) throw std::domain_error("divmod: division by zero polynomial");
  if (!R.is_unit(b.lead())) throw std::domain_error("divmod: divisor leading coefficient is not a unit");
  Scalar li = R.inv(b.lead());
  std::vector<Scalar> rem = a.c_;
  int db = b.degree();
  if ((int)rem.size() - 1 < db) return {zero(R), a};
  std::vector<Scalar> q(rem.size() - db, R.zero());
  for (int i = (int)rem.size() - 1; i >= db; --i) {
    if (R.is_zero(rem[i])) continue;
    Scalar f = R.mul(rem[i], li);
    q[i - db] = f;
    for (int j = 0; j <= db; ++j)
      rem[i - db + j] = R.sub(rem[i - db + j], R.mul(f, b.c_[j]));
  }
  return {Poly(R, std::move(q)), Poly(R, std::move(rem))};
}

Poly Poly::gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    auto [q, r] = divmod(x, y);
    (void)q;
    x = y;
    y = r;
  }
  if (x.is_zero()) return x;
  return x.monic();
}

Poly Poly::lcm(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return zero(a.R_);
  Poly g = gcd(a, b);
  auto [q, r] = divmod(a * b, g);
  (void)r;
  return q.monic();
}

Poly Poly::powmod(const Poly& base, const mpz_class& e, const Poly& mod) {
  const Coeffs& R = base.ring();
  Poly r = constant(R, R.one());
  Poly b = divmod(base, mod).second;
  mpz_class k = e;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) r = divmod(r * b, mod).second;
    b = divmod(b * b, mod).second;
    k >>= 1;
  }
  return r;
}

namespace {

// f with f' = 0 over F_p is g(x^p); over the prime field the p-th root has the
// same coefficients read off every p-th slot.
Poly pth_root(const Poly& f) {
  const Coeffs& R = f.ring();
  uint64_t p = R.p();
  std::vector<Scalar> c;
  for (size_t i = 0; i < (size_t)f.degree() + 1; i += p) c.push_back(f[i]);
  return Poly(R, std::move(c));
}

// Yun-style squarefree decomposition adapted to characteristic p.
void squarefree(const Poly& f, int mult, std::map<int, Poly>& out) {
  const Coeffs& R = f.ring();
  if (f.degree() <= 0) return;
  Poly d = f.derivative();
  if (d.is_zero()) {
    squarefree(pth_root(f), mult * (int)R.p(), out);
    return;
  }
  Poly g = Poly::gcd(f, d);
  Poly w = Poly::divmod(f, g).first; // product of squarefree part factors
  int i = 1;
  while (w.degree() > 0) {
    Poly y = Poly::gcd(w, g);
    Poly fac = Poly::divmod(w, y).first; // factors appearing with exact multiplicity i
    if (fac.degree() > 0) {
      auto it = out.find(mult * i);
      if (it == out.end()) out.emplace(mult * i, fac.monic());
      else it->second = (it->second * fac).monic();
    }
    w = y;
    g = Poly::divmod(g, y).first;
    ++i;
  }
  if (g.degree() > 0) squarefree(g, mult, out); // leftover p-th power content
}

Poly random_poly(const Coeffs& R, int deg, Rng& rng) {
  std::vector<Scalar> c(deg + 1);
  for (int i = 0; i <= deg; ++i) c[i] = R.from_int((long)rng.below(R.p()));
  return Poly(R, std::move(c));
}

// Equal-degree factorization of a squarefree product of degree-d irreducibles.
void edf(const Poly& f, int d, Rng& rng, std::vector<Poly>& out) {
  const Coeffs& R = f.ring();
  if (f.degree() == d) {
    out.push_back(f.monic());
    return;
  }
  uint64_t p = R.p();
  for (;;) {
    Poly a = random_poly(R, f.degree() - 1, rng);
    if (a.degree() < 1) continue;
    Poly g = Poly::gcd(a, f);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      edf(g, d, rng, out);
      edf(Poly::divmod(f, g).first, d, rng, out);
      return;
    }
    Poly b;
    if (p == 2) {
      // trace polynomial a + a^2 + a^4 + ... (d terms) splits char-2 factors
      Poly t = Poly::zero(R), s = a;
      for (int i = 0; i < d; ++i) {
        t = Poly::divmod(t + s, f).second;
        s = Poly::divmod(s * s, f).second;
      }
      b = t;
    } else {
      mpz_class e = 1;
      mpz_class pp = (long)p;
      mpz_pow_ui(e.get_mpz_t(), pp.get_mpz_t(), d);
      e = (e - 1) / 2;
      b = Poly::powmod(a, e, f) - Poly::constant(R, R.one());
    }
    Poly g2 = Poly::gcd(b, f);
    if (g2.degree() > 0 && g2.degree() < f.degree()) {
      edf(g2, d, rng, out);
      edf(Poly::divmod(f, g2).first, d, rng, out);
      return;
    }
  }
}

} // namespace

Factorization factor_over_prime_field(const Poly& f, Rng& rng) {
  const Coeffs& R = f.ring();
  if (R.kind() != RingKind::prime_field)
    throw std::domain_error("factor_over_prime_field: coefficients must be a prime field");
  if (f.is_zero()) throw std::domain_error("factor_over_prime_field: zero polynomial");
  Factorization out;
  out.lead = f.lead();
  if (f.degree() == 0) return out;
  Poly g = f.monic();

  std::map<int, Poly> sqf;
  squarefree(g, 1, sqf);

  for (auto& [mult, part] : sqf) {
    // distinct-degree split of the squarefree part
    Poly rest = part;
    Poly xp = Poly::x(R);
    Poly frob = xp; // x^(p^d) mod rest, updated as rest shrinks by full recompute
    int d = 0;
    while (rest.degree() > 0) {
      ++d;
      if (2 * d > rest.degree()) {
        // remainder is a single irreducible of degree = rest.degree()
        out.factors.emplace_back(rest.monic(), mult);
        break;
      }
      mpz_class e;
      mpz_class pp = (long)R.p();
      mpz_pow_ui(e.get_mpz_t(), pp.get_mpz_t(), d);
      frob = Poly::powmod(xp, e, rest);
      Poly gd = Poly::gcd(frob - xp, rest);
      if (gd.degree() > 0) {
        std::vector<Poly> pieces;
        edf(gd, d, rng, pieces);
        for (auto& irr : pieces) out.factors.emplace_back(irr, mult);
        rest = Poly::divmod(rest, gd).first;
      }
    }
  }

  std::sort(out.factors.begin(), out.factors.end(), [&](const auto& a, const auto& b) {
    if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
    for (int i = a.first.degree(); i >= 0; --i) {
      uint64_t x = std::get<uint64_t>(a.first[i]), y = std::get<uint64_t>(b.first[i]);
      if (x != y) return x < y;
    }
    return a.second < b.second;
  });
  return out;
}

} // namespace gx
