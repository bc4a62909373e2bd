#pragma once

// Dense tables over F_p^n. Points are addressed by the mixed-radix index
// Σ x_i p^{i-1}, so x_1 is the least significant digit.

#include <complex>
#include <span>
#include <vector>

#include "hofa/torus.hpp"

namespace hofa {

using Point = std::vector<unsigned>;

/// The vector space F_p^n with index-level arithmetic.
class PointSpace {
 public:
  PointSpace(unsigned p, unsigned n) : p_(p), n_(n), size_(detail::checked_pow(p, n)) {
    require_prime(p);
    if (size_ > (u64{1} << 31)) throw std::invalid_argument("PointSpace: p^n too large");
    pow_.resize(n + 1);
    for (unsigned i = 0; i <= n; ++i) pow_[i] = static_cast<u32>(detail::checked_pow(p, i));
    if (size_ <= kTableLimit) {
      add_.resize(size_ * size_);
      for (u32 a = 0; a < size_; ++a)
        for (u32 b = 0; b < size_; ++b) add_[a * size_ + b] = add_slow(a, b);
    }
  }

  unsigned prime() const { return p_; }
  unsigned dim() const { return n_; }
  u32 size() const { return static_cast<u32>(size_); }

  unsigned digit(u32 idx, unsigned i) const { return (idx / pow_[i]) % p_; }

  Point point(u32 idx) const {
    Point x(n_);
    for (unsigned i = 0; i < n_; ++i) x[i] = digit(idx, i);
    return x;
  }

  u32 index(std::span<const unsigned> x) const {
    if (x.size() != n_) throw std::invalid_argument("point dimension mismatch");
    u32 idx = 0;
    for (unsigned i = 0; i < n_; ++i) idx += static_cast<u32>(x[i] % p_) * pow_[i];
    return idx;
  }

  u32 add(u32 a, u32 b) const { return add_.empty() ? add_slow(a, b) : add_[a * size_ + b]; }

  u32 scale(unsigned c, u32 a) const {
    c %= p_;
    u32 r = 0;
    for (unsigned i = 0; i < n_; ++i) r += static_cast<u32>((digit(a, i) * c) % p_) * pow_[i];
    return r;
  }

  u32 neg(u32 a) const { return scale(p_ - 1, a); }

 private:
  static constexpr u64 kTableLimit = 1024;

  u32 add_slow(u32 a, u32 b) const {
    u32 r = 0;
    for (unsigned i = 0; i < n_; ++i) r += static_cast<u32>((digit(a, i) + digit(b, i)) % p_) * pow_[i];
    return r;
  }

  unsigned p_;
  unsigned n_;
  u64 size_;
  std::vector<u32> pow_;
  std::vector<u32> add_;
};

/**
 * A total map F_p^n -> U_{level+1}, stored as numerators over p^{level+1}.
 * Entries need not be canonical individually; at(i) canonicalizes.
 */
class FunctionTable {
 public:
  FunctionTable(unsigned p, unsigned n, unsigned level, std::vector<u64> numerators)
      : p_(p), n_(n), level_(level), mod_(detail::checked_pow(p, level + 1)), nums_(std::move(numerators)) {
    if (nums_.size() != detail::checked_pow(p, n)) throw std::invalid_argument("FunctionTable: wrong size");
    for (auto& v : nums_) v %= mod_;
  }

  static FunctionTable from_values(unsigned p, unsigned n, std::span<const TorusValue> values) {
    unsigned lvl = 0;
    for (const auto& v : values) lvl = std::max(lvl, v.level());
    std::vector<u64> nums(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) nums[i] = values[i].numerator_at(lvl);
    return FunctionTable(p, n, lvl, std::move(nums));
  }

  unsigned prime() const { return p_; }
  unsigned dim() const { return n_; }
  unsigned level() const { return level_; }
  u64 modulus() const { return mod_; }
  std::size_t size() const { return nums_.size(); }
  std::span<const u64> numerators() const { return nums_; }
  u64 numerator(u32 idx) const { return nums_[idx]; }
  TorusValue at(u32 idx) const { return TorusValue(p_, static_cast<i64>(nums_[idx]), level_); }

  bool operator==(const FunctionTable& o) const {
    if (p_ != o.p_ || n_ != o.n_) return false;
    for (std::size_t i = 0; i < nums_.size(); ++i)
      if (at(static_cast<u32>(i)) != o.at(static_cast<u32>(i))) return false;
    return true;
  }

 private:
  unsigned p_;
  unsigned n_;
  unsigned level_;
  u64 mod_;
  std::vector<u64> nums_;
};

/// A bounded complex function F_p^n -> D.
class ComplexTable {
 public:
  ComplexTable(unsigned p, unsigned n, std::vector<std::complex<double>> values)
      : p_(p), n_(n), values_(std::move(values)) {
    if (values_.size() != detail::checked_pow(p, n)) throw std::invalid_argument("ComplexTable: wrong size");
    for (const auto& v : values_)
      if (std::abs(v) > 1.0 + 1e-12) throw std::invalid_argument("ComplexTable: |f| exceeds 1");
  }

  static ComplexTable constant(unsigned p, unsigned n, std::complex<double> c) {
    return ComplexTable(p, n, std::vector<std::complex<double>>(detail::checked_pow(p, n), c));
  }

  /// x -> e(t(x)).
  static ComplexTable phase_of(const FunctionTable& t) {
    std::vector<std::complex<double>> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = t.at(static_cast<u32>(i)).phase();
    return ComplexTable(t.prime(), t.dim(), std::move(v));
  }

  unsigned prime() const { return p_; }
  unsigned dim() const { return n_; }
  std::size_t size() const { return values_.size(); }
  std::span<const std::complex<double>> values() const { return values_; }
  const std::complex<double>& operator[](u32 i) const { return values_[i]; }

 private:
  unsigned p_;
  unsigned n_;
  std::vector<std::complex<double>> values_;
};

}  // namespace hofa
