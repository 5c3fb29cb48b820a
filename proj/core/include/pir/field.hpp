#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pir/common.hpp"

namespace pir {

// Finite field F_{p^m}, p^m <= 2^20. Elements are densely coded as
// uint32_t values in [0, q): the code of sum_i d_i * x^i (d_i digits mod p)
// is sum_i d_i * p^i. For p = 2 the code is the plain bit pattern of the
// coefficient vector, which is also the byte layout used on the wire.
//
// The defining modulus is monic of degree m and is chosen so that the class
// of x generates the multiplicative group; arithmetic runs on exp/log tables.
class Field {
 public:
  static constexpr uint32_t kMaxOrder = 1u << 20;

  // Canonical field of order q (q = p^m). The modulus is the
  // lexicographically first monic degree-m polynomial over F_p, ordered by
  // (c_0, c_1, ..., c_{m-1}), that is irreducible with x primitive; for
  // m = 1 it is x - g with g the smallest primitive root mod p. Instances
  // are cached: repeated calls return the same object.
  static std::shared_ptr<const Field> make(uint32_t q);

  // Field with an explicitly given monic modulus (coefficients c_0..c_m,
  // c_m = 1, each in [0, p)). The modulus must be irreducible with x
  // primitive; throws invalid_argument otherwise. Not cached.
  static std::shared_ptr<const Field> make(uint32_t p,
                                           std::vector<uint32_t> modulus);

  uint32_t p() const { return p_; }
  uint32_t m() const { return m_; }
  uint32_t q() const { return q_; }
  const std::vector<uint32_t>& modulus() const { return modulus_; }

  // The class of x: a fixed generator of the multiplicative group.
  uint32_t generator() const { return gen_; }

  uint32_t add(uint32_t a, uint32_t b) const {
    if (p_ == 2) return a ^ b;
    if (!add_.empty()) return add_[a * q_ + b];
    return digit_add(a, b);
  }
  uint32_t neg(uint32_t a) const {
    if (p_ == 2) return a;
    return digit_neg(a);
  }
  uint32_t sub(uint32_t a, uint32_t b) const { return add(a, neg(b)); }

  uint32_t mul(uint32_t a, uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  uint32_t inv(uint32_t a) const {
    if (a == 0) throw invalid_argument("Field::inv: zero has no inverse");
    if (a == 1) return 1;
    return exp_[q_ - 1 - log_[a]];
  }
  uint32_t div(uint32_t a, uint32_t b) const { return mul(a, inv(b)); }

  uint32_t pow(uint32_t a, uint64_t e) const {
    if (a == 0) return e == 0 ? 1 : 0;
    const uint64_t r = uint64_t(log_[a]) * (e % (q_ - 1)) % (q_ - 1);
    return exp_[r];
  }

  // a = g^e for nonzero a.
  uint32_t log(uint32_t a) const {
    if (a == 0) throw invalid_argument("Field::log: zero");
    return uint32_t(log_[a]);
  }
  uint32_t exp(uint64_t e) const { return exp_[e % (q_ - 1)]; }

  // Fixed enumeration of all q elements: 0, 1, g, g^2, ..., g^{q-2}.
  uint32_t element_by_index(uint32_t idx) const {
    if (idx >= q_) throw invalid_argument("Field::element_by_index: out of range");
    return idx == 0 ? 0 : exp_[idx - 1];
  }

  // Base-p digits of the code, length m (coefficient of x^i at position i).
  std::vector<uint32_t> coords(uint32_t a) const;
  uint32_t from_coords(std::span<const uint32_t> digits) const;

 private:
  Field() = default;
  static std::shared_ptr<const Field> build(uint32_t p,
                                            std::vector<uint32_t> modulus);

  uint32_t digit_add(uint32_t a, uint32_t b) const;
  uint32_t digit_neg(uint32_t a) const;

  uint32_t p_ = 0, m_ = 0, q_ = 0, gen_ = 0;
  std::vector<uint32_t> modulus_;
  std::vector<uint32_t> exp_;  // size 2(q-1): exp_[i] = g^i, wrap-free for mul
  std::vector<int32_t> log_;   // size q, log_[0] = -1
  std::vector<uint32_t> add_;  // q*q table for odd p with q <= 256, else empty
};

using FieldPtr = std::shared_ptr<const Field>;

// Factors q as p^m with p prime; false if q is not a prime power (or < 2).
bool is_prime_power(uint32_t q, uint32_t* p_out = nullptr,
                    uint32_t* m_out = nullptr);

// The canonical modulus Field::make(q) would use, as coefficients c_0..c_m.
std::vector<uint32_t> canonical_modulus(uint32_t p, uint32_t m);

// Extension pair F_{q^ell} / F_q realized inside two concretely coded fields
// over the same prime. The base generator's image in the top field is the
// root of the base modulus with the smallest element code, which pins down
// one specific embedding; coordinates over the base use the basis
// {alpha^j : j < ell} with alpha the top field's generator.
class Tower {
 public:
  static Tower make(FieldPtr base, uint32_t ell);

  const FieldPtr& base() const { return base_; }
  const FieldPtr& top() const { return top_; }
  uint32_t ell() const { return ell_; }
  uint32_t alpha() const { return top_->generator(); }
  // Image of the base field's generator in the top field.
  uint32_t base_generator_image() const { return base_img_; }

  // Base element -> its image in the top field.
  uint32_t embed(uint32_t a) const;
  // Top element -> base element if it lies in the embedded subfield.
  std::optional<uint32_t> project(uint32_t a) const;

  // Coordinates of a top element over the base field in basis
  // {1, alpha, ..., alpha^{ell-1}}: a = sum_j coords[j] * alpha^j.
  std::vector<uint32_t> coords(uint32_t a) const;
  uint32_t from_coords(std::span<const uint32_t> base_coords) const;

  // Monic minimal polynomial of alpha over the base field: degree ell,
  // coefficients c_0..c_ell as base-field codes.
  const std::vector<uint32_t>& minimal_polynomial() const { return minpoly_; }

 private:
  FieldPtr base_, top_;
  uint32_t ell_ = 0, base_img_ = 0;
  std::vector<uint32_t> minpoly_;
  // Change of basis over the prime field: column (j*mb + i) holds the
  // p-digit vector of alpha^j * c^i (c = base generator image), and inv_
  // is its inverse; both are (mb*ell) x (mb*ell), row-major.
  std::vector<uint32_t> basis_, inv_;
  uint32_t dim_ = 0;

  std::vector<uint32_t> prime_digits(uint32_t a) const;
};

}  // namespace pir
