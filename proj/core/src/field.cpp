#include "pir/field.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace pir {
namespace {

bool is_small_prime(uint32_t p) {
  if (p < 2) return false;
  for (uint32_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Frozen canonical moduli (lexicographically-first primitive polynomials,
// x a generator; m = 1 entries are x - g with g the smallest primitive
// root). Verified offline and re-verified by the table walk at build time.
struct ModulusEntry {
  uint32_t p, m;
  std::vector<uint32_t> coeffs;  // c_0..c_m
};

const std::vector<ModulusEntry>& modulus_table() {
  static const std::vector<ModulusEntry> kTable = {
      {2, 1, {1, 1}},
      {2, 2, {1, 1, 1}},
      {2, 3, {1, 1, 0, 1}},
      {2, 4, {1, 1, 0, 0, 1}},
      {2, 5, {1, 0, 1, 0, 0, 1}},
      {2, 6, {1, 1, 0, 0, 0, 0, 1}},
      {2, 7, {1, 1, 0, 0, 0, 0, 0, 1}},
      {2, 8, {1, 0, 1, 1, 1, 0, 0, 0, 1}},
      {2, 9, {1, 0, 0, 0, 1, 0, 0, 0, 0, 1}},
      {2, 10, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1}},
      {2, 11, {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {2, 12, {1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1}},
      {2, 13, {1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {2, 14, {1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {2, 15, {1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {2, 16, {1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {2, 17, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {2, 18, {1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {2, 19, {1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {2, 20,
       {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {3, 1, {1, 1}},
      {3, 2, {2, 1, 1}},
      {3, 3, {1, 2, 0, 1}},
      {3, 4, {2, 1, 0, 0, 1}},
      {3, 5, {1, 2, 0, 0, 0, 1}},
      {3, 6, {2, 1, 0, 0, 0, 0, 1}},
      {3, 7, {1, 2, 1, 0, 0, 0, 0, 1}},
      {3, 8, {2, 0, 0, 1, 0, 0, 0, 0, 1}},
      {3, 9, {1, 0, 1, 2, 0, 0, 0, 0, 0, 1}},
      {3, 10, {2, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1}},
      {3, 11, {1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
      {3, 12, {2, 2, 2, 1, 2, 0, 0, 0, 0, 0, 0, 0, 1}},
      {5, 1, {3, 1}},
      {5, 2, {2, 1, 1}},
      {5, 3, {2, 3, 0, 1}},
      {5, 4, {2, 2, 1, 0, 1}},
      {5, 5, {2, 4, 0, 0, 0, 1}},
      {5, 6, {2, 1, 0, 0, 0, 0, 1}},
      {5, 7, {2, 3, 0, 0, 0, 0, 0, 1}},
      {5, 8, {3, 2, 1, 0, 0, 0, 0, 0, 1}},
      {7, 1, {4, 1}},
      {7, 2, {3, 1, 1}},
      {7, 3, {2, 3, 0, 1}},
      {7, 4, {5, 3, 1, 0, 1}},
      {7, 5, {4, 1, 0, 0, 0, 1}},
      {7, 6, {5, 1, 3, 0, 0, 0, 1}},
      {7, 7, {2, 6, 0, 0, 0, 0, 0, 1}},
  };
  return kTable;
}

uint64_t ipow(uint64_t b, uint32_t e) {
  uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

// p^m > cap, computed without overflow.
bool order_exceeds(uint64_t p, uint64_t m, uint64_t cap) {
  uint64_t r = 1;
  while (m--) {
    r *= p;
    if (r > cap) return true;
  }
  return false;
}

// Walks 1, x, x^2, ... in F_p[x]/(modulus). Returns true iff the walk visits
// exactly q-1 distinct nonzero codes and closes back at 1 — which holds iff
// the quotient is a field with x primitive. When exp/log are given they are
// filled along the way (exp must have size 2(q-1), log size q).
bool primitive_walk(uint32_t p, const std::vector<uint32_t>& modulus,
                    std::vector<uint32_t>* exp_out,
                    std::vector<int32_t>* log_out) {
  const uint32_t m = uint32_t(modulus.size()) - 1;
  const uint32_t q = uint32_t(ipow(p, m));
  std::vector<int32_t> local_log;
  std::vector<int32_t>& lg = log_out ? *log_out : local_log;
  lg.assign(q, -1);

  std::vector<uint32_t> cur(m, 0);
  cur[0] = 1;
  uint32_t code = 1;
  lg[1] = 0;
  if (exp_out) (*exp_out)[0] = 1;

  for (uint32_t i = 1; i < q - 1; ++i) {
    // cur *= x, reduced by the modulus
    const uint32_t carry = m > 0 ? cur[m - 1] : 0;
    for (uint32_t d = m; d-- > 1;) cur[d] = cur[d - 1];
    cur[0] = 0;
    if (carry) {
      for (uint32_t d = 0; d < m; ++d) {
        const uint64_t s = uint64_t(carry) * modulus[d] % p;
        cur[d] = uint32_t((cur[d] + p - s) % p);
      }
    }
    code = 0;
    for (uint32_t d = m; d-- > 0;) code = code * p + cur[d];
    if (code == 0 || lg[code] != -1) return false;
    lg[code] = int32_t(i);
    if (exp_out) (*exp_out)[i] = code;
  }
  // one more step must return to 1
  const uint32_t carry = m > 0 ? cur[m - 1] : 0;
  for (uint32_t d = m; d-- > 1;) cur[d] = cur[d - 1];
  if (m > 0) cur[0] = 0;
  if (carry) {
    for (uint32_t d = 0; d < m; ++d) {
      const uint64_t s = uint64_t(carry) * modulus[d] % p;
      cur[d] = uint32_t((cur[d] + p - s) % p);
    }
  }
  code = 0;
  for (uint32_t d = m; d-- > 0;) code = code * p + cur[d];
  return code == 1;
}

uint64_t pow_mod(uint64_t b, uint64_t e, uint64_t mod) {
  uint64_t r = 1 % mod;
  b %= mod;
  while (e) {
    if (e & 1) r = r * b % mod;
    b = b * b % mod;
    e >>= 1;
  }
  return r;
}

std::vector<uint64_t> prime_factors(uint64_t n) {
  std::vector<uint64_t> fs;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      fs.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) fs.push_back(n);
  return fs;
}

uint32_t smallest_primitive_root(uint32_t p) {
  if (p == 2) return 1;
  const auto fs = prime_factors(p - 1);
  for (uint32_t g = 2; g < p; ++g) {
    bool ok = true;
    for (uint64_t r : fs)
      if (pow_mod(g, (p - 1) / r, p) == 1) { ok = false; break; }
    if (ok) return g;
  }
  throw integrity_error("no primitive root found");  // unreachable for prime p
}

// Gauss-Jordan inverse over the prime field F_p; a is dim x dim row-major.
bool invert_prime_matrix(uint32_t p, uint32_t dim, std::vector<uint32_t> a,
                         std::vector<uint32_t>& out) {
  auto inv_mod = [&](uint32_t v) {
    return uint32_t(pow_mod(v, p - 2, p));
  };
  out.assign(size_t(dim) * dim, 0);
  for (uint32_t i = 0; i < dim; ++i) out[size_t(i) * dim + i] = 1;
  for (uint32_t col = 0; col < dim; ++col) {
    uint32_t piv = col;
    while (piv < dim && a[size_t(piv) * dim + col] == 0) ++piv;
    if (piv == dim) return false;
    if (piv != col) {
      for (uint32_t j = 0; j < dim; ++j) {
        std::swap(a[size_t(piv) * dim + j], a[size_t(col) * dim + j]);
        std::swap(out[size_t(piv) * dim + j], out[size_t(col) * dim + j]);
      }
    }
    const uint32_t s = inv_mod(a[size_t(col) * dim + col]);
    for (uint32_t j = 0; j < dim; ++j) {
      a[size_t(col) * dim + j] = uint32_t(uint64_t(a[size_t(col) * dim + j]) * s % p);
      out[size_t(col) * dim + j] =
          uint32_t(uint64_t(out[size_t(col) * dim + j]) * s % p);
    }
    for (uint32_t r = 0; r < dim; ++r) {
      if (r == col) continue;
      const uint32_t f = a[size_t(r) * dim + col];
      if (!f) continue;
      for (uint32_t j = 0; j < dim; ++j) {
        a[size_t(r) * dim + j] = uint32_t(
            (a[size_t(r) * dim + j] + uint64_t(p - f) * a[size_t(col) * dim + j]) % p);
        out[size_t(r) * dim + j] = uint32_t(
            (out[size_t(r) * dim + j] + uint64_t(p - f) * out[size_t(col) * dim + j]) % p);
      }
    }
  }
  return true;
}

}  // namespace

bool is_prime_power(uint32_t q, uint32_t* p_out, uint32_t* m_out) {
  if (q < 2) return false;
  uint32_t p = 0;
  for (uint32_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) { p = d; break; }
  }
  if (p == 0) p = q;  // q itself prime
  uint32_t m = 0, rest = q;
  while (rest % p == 0) { rest /= p; ++m; }
  if (rest != 1) return false;
  if (p_out) *p_out = p;
  if (m_out) *m_out = m;
  return true;
}

std::vector<uint32_t> canonical_modulus(uint32_t p, uint32_t m) {
  if (!is_small_prime(p)) throw invalid_argument("canonical_modulus: p not prime");
  if (m == 0) throw invalid_argument("canonical_modulus: m must be >= 1");
  const uint64_t q64 = ipow(p, m);
  if (q64 > Field::kMaxOrder)
    throw invalid_argument("canonical_modulus: field order exceeds 2^20");
  for (const auto& e : modulus_table())
    if (e.p == p && e.m == m) return e.coeffs;
  if (m == 1) {
    const uint32_t g = smallest_primitive_root(p);
    return {(p - g % p) % p, 1};
  }
  // Deterministic fallback: lexicographic scan over (c_0..c_{m-1}).
  const uint32_t q = uint32_t(q64);
  std::vector<uint32_t> mod(m + 1, 0);
  mod[m] = 1;
  for (uint32_t code = 1; code < q; ++code) {
    uint32_t c = code;
    for (uint32_t i = 0; i < m; ++i) { mod[i] = c % p; c /= p; }
    if (mod[0] == 0) continue;  // x | modulus: never a field
    if (primitive_walk(p, mod, nullptr, nullptr)) return mod;
  }
  throw integrity_error("canonical_modulus: no primitive polynomial found");
}

std::shared_ptr<const Field> Field::build(uint32_t p,
                                          std::vector<uint32_t> modulus) {
  if (!is_small_prime(p)) throw invalid_argument("Field: p not prime");
  if (modulus.size() < 2 || modulus.back() != 1)
    throw invalid_argument("Field: modulus must be monic of degree >= 1");
  for (uint32_t c : modulus)
    if (c >= p) throw invalid_argument("Field: modulus coefficient out of range");
  const uint32_t m = uint32_t(modulus.size()) - 1;
  const uint64_t q64 = ipow(p, m);
  if (q64 > kMaxOrder) throw invalid_argument("Field: order exceeds 2^20");
  const uint32_t q = uint32_t(q64);

  auto f = std::shared_ptr<Field>(new Field());
  f->p_ = p;
  f->m_ = m;
  f->q_ = q;
  f->modulus_ = std::move(modulus);
  f->exp_.assign(size_t(2) * (q - 1), 0);
  if (!primitive_walk(p, f->modulus_, &f->exp_, &f->log_))
    throw invalid_argument(
        "Field: modulus is not irreducible with x primitive");
  for (uint32_t i = 0; i < q - 1; ++i) f->exp_[q - 1 + i] = f->exp_[i];
  f->gen_ = f->exp_[q == 2 ? 0 : 1];
  if (p != 2 && q <= 256) {
    f->add_.assign(size_t(q) * q, 0);
    for (uint32_t a = 0; a < q; ++a)
      for (uint32_t b = 0; b < q; ++b) f->add_[a * q + b] = f->digit_add(a, b);
  }
  return f;
}

std::shared_ptr<const Field> Field::make(uint32_t p,
                                         std::vector<uint32_t> modulus) {
  return build(p, std::move(modulus));
}

std::shared_ptr<const Field> Field::make(uint32_t q) {
  static std::mutex mu;
  static std::map<uint32_t, std::shared_ptr<const Field>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(q);
    if (it != cache.end()) return it->second;
  }
  uint32_t p = 0, m = 0;
  if (!is_prime_power(q, &p, &m))
    throw invalid_argument("Field: order " + std::to_string(q) +
                           " is not a prime power");
  auto f = build(p, canonical_modulus(p, m));
  std::lock_guard<std::mutex> lock(mu);
  auto [it, _] = cache.emplace(q, std::move(f));
  return it->second;
}

uint32_t Field::digit_add(uint32_t a, uint32_t b) const {
  uint32_t r = 0, mult = 1;
  for (uint32_t i = 0; i < m_; ++i) {
    r += (a % p_ + b % p_) % p_ * mult;
    a /= p_;
    b /= p_;
    mult *= p_;
  }
  return r;
}

uint32_t Field::digit_neg(uint32_t a) const {
  uint32_t r = 0, mult = 1;
  for (uint32_t i = 0; i < m_; ++i) {
    const uint32_t d = a % p_;
    r += (d ? p_ - d : 0) * mult;
    a /= p_;
    mult *= p_;
  }
  return r;
}

std::vector<uint32_t> Field::coords(uint32_t a) const {
  std::vector<uint32_t> d(m_);
  for (uint32_t i = 0; i < m_; ++i) { d[i] = a % p_; a /= p_; }
  return d;
}

uint32_t Field::from_coords(std::span<const uint32_t> digits) const {
  if (digits.size() != m_) throw invalid_argument("Field::from_coords: size");
  uint32_t code = 0;
  for (uint32_t i = m_; i-- > 0;) {
    if (digits[i] >= p_) throw invalid_argument("Field::from_coords: digit");
    code = code * p_ + digits[i];
  }
  return code;
}

Tower Tower::make(FieldPtr base, uint32_t ell) {
  if (!base) throw invalid_argument("Tower: null base");
  if (ell == 0) throw invalid_argument("Tower: ell must be >= 1");
  const uint32_t p = base->p();
  const uint64_t mtop64 = uint64_t(base->m()) * ell;
  if (order_exceeds(p, mtop64, Field::kMaxOrder))
    throw invalid_argument("Tower: top field order exceeds 2^20");

  Tower tw;
  tw.base_ = base;
  tw.ell_ = ell;
  tw.top_ = Field::make(uint32_t(ipow(p, uint32_t(mtop64))));
  const Field& top = *tw.top_;
  const Field& bf = *base;
  const uint32_t Q = top.q(), qb = bf.q();

  // Image of the base generator: the root of the base modulus, among the
  // order-(qb-1) subgroup plus zero, with the smallest element code.
  uint32_t img = 0;
  bool found = false;
  const uint32_t stride = (Q - 1) / (qb - 1);
  for (uint32_t j = 0; j < qb - 1; ++j) {
    const uint32_t cand = top.exp(uint64_t(j) * stride);
    uint32_t acc = 0;  // Horner: modulus coefficients are prime-subfield codes
    for (uint32_t i = uint32_t(bf.modulus().size()); i-- > 0;)
      acc = top.add(top.mul(acc, cand), bf.modulus()[i]);
    if (acc == 0 && (!found || cand < img)) { img = cand; found = true; }
  }
  if (!found && qb == 2) { img = 1; found = true; }  // F_2: generator is 1
  if (!found) throw integrity_error("Tower: base modulus has no root upstairs");
  tw.base_img_ = img;

  // Change of basis over F_p: columns are digit vectors of alpha^j * img^i.
  const uint32_t mb = bf.m();
  tw.dim_ = mb * ell;
  tw.basis_.assign(size_t(tw.dim_) * tw.dim_, 0);
  const uint32_t alpha = top.generator();
  for (uint32_t j = 0; j < ell; ++j) {
    for (uint32_t i = 0; i < mb; ++i) {
      const uint32_t el = top.mul(top.pow(alpha, j), top.pow(img, i));
      const auto digs = top.coords(el);
      for (uint32_t r = 0; r < tw.dim_; ++r)
        tw.basis_[size_t(r) * tw.dim_ + (j * mb + i)] = digs[r];
    }
  }
  if (!invert_prime_matrix(p, tw.dim_, tw.basis_, tw.inv_))
    throw integrity_error("Tower: basis matrix is singular");

  // Minimal polynomial of alpha over the base: product of (x - alpha^(qb^i)).
  std::vector<uint32_t> poly = {1};  // coefficients in the top field
  uint64_t e = 1;
  for (uint32_t i = 0; i < ell; ++i) {
    const uint32_t root = top.pow(alpha, e);
    std::vector<uint32_t> next(poly.size() + 1, 0);
    for (size_t d = 0; d < poly.size(); ++d) {
      next[d + 1] = top.add(next[d + 1], poly[d]);
      next[d] = top.sub(next[d], top.mul(poly[d], root));
    }
    poly = std::move(next);
    e = e * qb % (Q - 1);
  }
  tw.minpoly_.resize(poly.size());
  for (size_t d = 0; d < poly.size(); ++d) {
    auto b = tw.project(poly[d]);
    if (!b) throw integrity_error("Tower: minimal polynomial not over base");
    tw.minpoly_[d] = *b;
  }
  return tw;
}

std::vector<uint32_t> Tower::prime_digits(uint32_t a) const {
  return top_->coords(a);
}

uint32_t Tower::embed(uint32_t a) const {
  if (a >= base_->q()) throw invalid_argument("Tower::embed: out of range");
  const auto digs = base_->coords(a);
  uint32_t acc = 0;
  for (uint32_t i = base_->m(); i-- > 0;)
    acc = top_->add(top_->mul(acc, base_img_), digs[i]);
  return acc;
}

std::vector<uint32_t> Tower::coords(uint32_t a) const {
  const auto digs = prime_digits(a);
  const uint32_t p = base_->p(), mb = base_->m();
  std::vector<uint32_t> v(dim_, 0);
  for (uint32_t r = 0; r < dim_; ++r) {
    uint64_t acc = 0;
    for (uint32_t c = 0; c < dim_; ++c)
      acc += uint64_t(inv_[size_t(r) * dim_ + c]) * digs[c];
    v[r] = uint32_t(acc % p);
  }
  std::vector<uint32_t> out(ell_);
  for (uint32_t j = 0; j < ell_; ++j) {
    uint32_t code = 0;
    for (uint32_t i = mb; i-- > 0;) code = code * p + v[j * mb + i];
    out[j] = code;
  }
  return out;
}

uint32_t Tower::from_coords(std::span<const uint32_t> base_coords) const {
  if (base_coords.size() != ell_)
    throw invalid_argument("Tower::from_coords: size");
  const uint32_t alpha = top_->generator();
  uint32_t acc = 0;
  for (uint32_t j = ell_; j-- > 0;)
    acc = top_->add(top_->mul(acc, alpha), embed(base_coords[j]));
  return acc;
}

std::optional<uint32_t> Tower::project(uint32_t a) const {
  const auto v = coords(a);
  for (uint32_t j = 1; j < ell_; ++j)
    if (v[j] != 0) return std::nullopt;
  return v[0];
}

}  // namespace pir
