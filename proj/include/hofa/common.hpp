#pragma once

// Integer helpers, error types and shared constants used across the library.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace hofa {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

/// Default cap on inner-loop iterations for exact enumeration kernels.
inline constexpr u64 kDefaultBudget = 100'000'000;

/// Raised when an exact enumeration would exceed its iteration budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, u64 required, u64 budget)
      : std::runtime_error(what + " (requires " + std::to_string(required) +
                           " iterations, budget " + std::to_string(budget) + ")"),
        required_(required),
        budget_(budget) {}

  u64 required() const noexcept { return required_; }
  u64 budget() const noexcept { return budget_; }

 private:
  u64 required_;
  u64 budget_;
};

/// Syntax error in one of the text formats; carries a 1-based column.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t column)
      : std::invalid_argument("column " + std::to_string(column) + ": " + what),
        column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

namespace detail {

inline u64 checked_pow(u64 base, unsigned exp) {
  u64 r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<u64>::max() / base)
      throw std::overflow_error("integer power overflows 64 bits");
    r *= base;
  }
  return r;
}

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

inline u64 powmod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 r = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return r;
}

/// Least non-negative residue of a signed integer.
inline u64 reduce(i64 v, u64 m) {
  const i64 sm = static_cast<i64>(m);
  i64 r = v % sm;
  if (r < 0) r += sm;
  return static_cast<u64>(r);
}

inline std::optional<u64> inverse_mod(u64 a, u64 m) {
  i64 old_r = static_cast<i64>(a % m), r = static_cast<i64>(m);
  i64 old_s = 1, s = 0;
  while (r != 0) {
    const i64 q = old_r / r;
    i64 t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) return std::nullopt;
  return reduce(old_s, m);
}

/// p-adic valuation; valuation(0) is reported as `cap`.
inline unsigned valuation(u64 v, unsigned p, unsigned cap) {
  if (v == 0) return cap;
  unsigned j = 0;
  while (v % p == 0 && j < cap) {
    v /= p;
    ++j;
  }
  return j;
}

}  // namespace detail

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Smallest generator of F_p^*; this is the fixed ζ used for homogeneity.
inline unsigned primitive_root(unsigned p) {
  if (!is_prime(p)) throw std::invalid_argument("primitive_root: p must be prime");
  if (p == 2) return 1;
  const unsigned order = p - 1;
  for (unsigned g = 2; g < p; ++g) {
    bool ok = true;
    unsigned m = order;
    for (unsigned q = 2; q <= m; ++q) {
      if (m % q != 0) continue;
      while (m % q == 0) m /= q;
      if (detail::powmod(g, order / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("primitive_root: no generator found");
}

inline void require_prime(unsigned p) {
  if (!is_prime(p)) throw std::invalid_argument("p=" + std::to_string(p) + " is not prime");
}

}  // namespace hofa
