#pragma once

/**
 * @file torus.hpp
 * @brief Exact arithmetic in F_p, Z_{p^{k+1}} and the p-power torus.
 *
 * A TorusValue is a/p^{k+1} mod 1 stored with an integer numerator. Values
 * are kept canonical: the numerator is never divisible by p except for the
 * zero value, which always has level 0. The prime travels with each value;
 * combining values of different primes is a programming error and is
 * asserted.
 */

#include <cassert>
#include <charconv>
#include <cmath>
#include <compare>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>

#include "hofa/common.hpp"

namespace hofa {

namespace detail {
// p^{level+1} must stay well inside 64 bits so that sums never wrap.
inline constexpr u64 kMaxDenominator = u64{1} << 60;

inline unsigned merge_prime(unsigned a, unsigned b) {
  assert(a == 0 || b == 0 || a == b);
  return a != 0 ? a : b;
}
}  // namespace detail

/// Element of F_p, stored as its standard representative |x| in [0, p-1].
class FieldElem {
 public:
  constexpr FieldElem() = default;
  FieldElem(unsigned p, i64 v) : p_(p), r_(static_cast<unsigned>(detail::reduce(v, p))) {}

  unsigned prime() const { return p_; }
  /// The standard map F -> {0,...,p-1}.
  unsigned magnitude() const { return r_; }

  friend FieldElem operator+(FieldElem a, FieldElem b) {
    const unsigned p = detail::merge_prime(a.p_, b.p_);
    return {p, static_cast<i64>(a.r_) + b.r_};
  }
  friend FieldElem operator-(FieldElem a, FieldElem b) {
    const unsigned p = detail::merge_prime(a.p_, b.p_);
    return {p, static_cast<i64>(a.r_) - b.r_};
  }
  friend FieldElem operator*(FieldElem a, FieldElem b) {
    const unsigned p = detail::merge_prime(a.p_, b.p_);
    return {p, static_cast<i64>(a.r_) * b.r_};
  }
  FieldElem inverse() const {
    if (r_ == 0) throw std::domain_error("FieldElem: zero has no inverse");
    return {p_, static_cast<i64>(*detail::inverse_mod(r_, p_))};
  }
  bool operator==(const FieldElem&) const = default;

  std::string str() const { return std::to_string(r_); }

 private:
  unsigned p_ = 0;
  unsigned r_ = 0;
};

/// An element of U_{level+1} = (1/p^{level+1}) Z / Z.
class TorusValue {
 public:
  TorusValue() = default;

  /// numerator/p^{level+1} mod 1, canonicalized.
  TorusValue(unsigned p, i64 numerator, unsigned level) : p_(p), num_(0), level_(level) {
    const u64 den = detail::checked_pow(p, level + 1);
    if (den > detail::kMaxDenominator) throw std::overflow_error("TorusValue: level too large");
    num_ = detail::reduce(numerator, den);
    canonicalize();
  }

  static TorusValue zero(unsigned p) { return TorusValue(p, 0, 0); }

  unsigned prime() const { return p_; }
  u64 numerator() const { return num_; }
  unsigned level() const { return level_; }
  u64 denominator() const { return detail::checked_pow(p_, level_ + 1); }
  bool is_zero() const { return num_ == 0; }

  /// Numerator when written over p^{target+1}; requires target >= level().
  u64 numerator_at(unsigned target) const {
    assert(target >= level_);
    return num_ * detail::checked_pow(p_, target - level_);
  }

  friend TorusValue operator+(const TorusValue& a, const TorusValue& b) {
    const unsigned p = detail::merge_prime(a.p_, b.p_);
    if (p == 0) return {};
    const unsigned lvl = std::max(a.level_, b.level_);
    const u64 den = detail::checked_pow(p, lvl + 1);
    TorusValue r;
    r.p_ = p;
    r.level_ = lvl;
    r.num_ = (a.scaled(p, lvl) + b.scaled(p, lvl)) % den;
    r.canonicalize();
    return r;
  }
  friend TorusValue operator-(const TorusValue& a) { return -1 * a; }
  friend TorusValue operator-(const TorusValue& a, const TorusValue& b) { return a + (-b); }

  /// n·a, the n-fold sum (negated for n < 0).
  friend TorusValue operator*(i64 n, const TorusValue& a) {
    if (a.p_ == 0) return a;
    const u64 den = detail::checked_pow(a.p_, a.level_ + 1);
    TorusValue r;
    r.p_ = a.p_;
    r.level_ = a.level_;
    r.num_ = detail::mulmod(detail::reduce(n, den), a.num_, den);
    r.canonicalize();
    return r;
  }

  TorusValue& operator+=(const TorusValue& o) { return *this = *this + o; }
  TorusValue& operator-=(const TorusValue& o) { return *this = *this - o; }

  bool operator==(const TorusValue& o) const {
    return num_ == o.num_ && (num_ == 0 || level_ == o.level_);
  }
  std::strong_ordering operator<=>(const TorusValue& o) const {
    if (auto c = level_ <=> o.level_; c != 0) return c;
    return num_ <=> o.num_;
  }

  /// e(a) = exp(2πi a). Exact at multiples of 1/4.
  std::complex<double> phase() const {
    if (num_ == 0) return {1.0, 0.0};
    const u64 den = denominator();
    if ((4 * num_) % den == 0) {
      switch ((4 * num_) / den) {
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        case 3: return {0.0, -1.0};
        default: break;
      }
    }
    const double t = 2.0 * std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den);
    return {std::cos(t), std::sin(t)};
  }

  /// "a/p^(k+1)" with the denominator written out, or "0".
  std::string str() const {
    if (num_ == 0) return "0";
    return std::to_string(num_) + "/" + std::to_string(denominator());
  }

  /// Parses "a/b" or "a" (an integer, i.e. 0 mod 1). b must be a power of p.
  static TorusValue parse(unsigned p, std::string_view text, std::size_t column_offset = 0) {
    const auto slash = text.find('/');
    auto parse_int = [&](std::string_view s, std::size_t col) -> u64 {
      u64 v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError("expected an unsigned integer, got '" + std::string(s) + "'", col);
      return v;
    };
    const u64 num = parse_int(text.substr(0, slash), column_offset + 1);
    if (slash == std::string_view::npos) return zero(p);
    const u64 den = parse_int(text.substr(slash + 1), column_offset + slash + 2);
    u64 d = den;
    unsigned e = 0;
    while (d > 1 && d % p == 0) {
      d /= p;
      ++e;
    }
    if (d != 1 || e == 0) {
      if (den == 1) return zero(p);
      throw ParseError("denominator not a power of p=" + std::to_string(p), column_offset + slash + 2);
    }
    return TorusValue(p, static_cast<i64>(num % den), e - 1);
  }

 private:
  u64 scaled(unsigned p, unsigned lvl) const {
    if (num_ == 0) return 0;
    return num_ * detail::checked_pow(p, lvl - level_);
  }

  void canonicalize() {
    if (num_ == 0) {
      level_ = 0;
      return;
    }
    while (level_ > 0 && num_ % p_ == 0) {
      num_ /= p_;
      --level_;
    }
  }

  unsigned p_ = 0;
  u64 num_ = 0;
  unsigned level_ = 0;
};

inline TorusValue torus_add(const TorusValue& a, const TorusValue& b) { return a + b; }
inline TorusValue int_scale(i64 n, const TorusValue& a) { return n * a; }
inline std::complex<double> phase(const TorusValue& a) { return a.phase(); }

/// Element of the cyclic group Z_{p^{e}} (e = k+1).
class CyclicInt {
 public:
  CyclicInt() = default;
  CyclicInt(unsigned p, unsigned exponent, i64 v)
      : p_(p), e_(exponent), mod_(detail::checked_pow(p, exponent)),
        v_(detail::reduce(v, mod_)) {}

  unsigned prime() const { return p_; }
  unsigned exponent() const { return e_; }
  u64 modulus() const { return mod_; }
  u64 value() const { return v_; }
  bool is_zero() const { return v_ == 0; }
  /// Largest j with p^j | value, or exponent() for zero.
  unsigned valuation() const { return detail::valuation(v_, p_, e_); }

  friend CyclicInt operator+(CyclicInt a, const CyclicInt& b) {
    assert(a.mod_ == b.mod_);
    a.v_ = (a.v_ + b.v_) % a.mod_;
    return a;
  }
  friend CyclicInt operator-(CyclicInt a, const CyclicInt& b) {
    assert(a.mod_ == b.mod_);
    a.v_ = (a.v_ + a.mod_ - b.v_) % a.mod_;
    return a;
  }
  friend CyclicInt operator*(CyclicInt a, const CyclicInt& b) {
    assert(a.mod_ == b.mod_);
    a.v_ = detail::mulmod(a.v_, b.v_, a.mod_);
    return a;
  }
  CyclicInt pow(u64 k) const {
    CyclicInt r = *this;
    r.v_ = detail::powmod(v_, k, mod_);
    return r;
  }
  bool operator==(const CyclicInt&) const = default;

 private:
  unsigned p_ = 0;
  unsigned e_ = 0;
  u64 mod_ = 1;
  u64 v_ = 0;
};

/**
 * The scaling constant σ(d,k) ∈ Z_{p^{k+1}} of homogeneous polynomials of
 * degree d and depth k: the unique σ with σ ≡ |ζ|^d (mod p) and σ^{p-1} = 1.
 * It is the Teichmüller lift (|ζ|^d mod p)^{p^k}.
 */
inline CyclicInt teichmuller_sigma(unsigned p, unsigned d, unsigned k) {
  require_prime(p);
  const u64 zeta = primitive_root(p);
  const u64 base = detail::powmod(zeta, d, p);
  const u64 mod = detail::checked_pow(p, k + 1);
  const u64 sigma = detail::powmod(base, detail::checked_pow(p, k), mod);
  CyclicInt r(p, k + 1, static_cast<i64>(sigma));
  assert(r.value() % p == base % p);
  assert(r.pow(p - 1).value() == 1 % mod);
  return r;
}

}  // namespace hofa
