#pragma once

// Dense linear algebra over F_p and Z_{p^m}. Sizes here are desk scale, so
// everything is plain Gauss-Jordan elimination on row-major storage.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hofa/common.hpp"

namespace hofa {

struct ModMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<u64> a;

  ModMatrix() = default;
  ModMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

  u64& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  u64 operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

/// Inverse over Z_mod where mod is a power of p, or nullopt if singular mod p.
inline std::optional<ModMatrix> invert_mod(ModMatrix m, unsigned p, u64 mod) {
  if (m.rows != m.cols) throw std::invalid_argument("invert_mod: matrix is not square");
  const std::size_t n = m.rows;
  ModMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1 % mod;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r)
      if (m(r, col) % p != 0) {
        piv = r;
        break;
      }
    if (piv == n) return std::nullopt;
    if (piv != col)
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(m(piv, c), m(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    const u64 s = *detail::inverse_mod(m(col, col), mod);
    for (std::size_t c = 0; c < n; ++c) {
      m(col, c) = detail::mulmod(m(col, c), s, mod);
      inv(col, c) = detail::mulmod(inv(col, c), s, mod);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m(r, col) == 0) continue;
      const u64 f = m(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        m(r, c) = (m(r, c) + mod - detail::mulmod(f, m(col, c), mod)) % mod;
        inv(r, c) = (inv(r, c) + mod - detail::mulmod(f, inv(col, c), mod)) % mod;
      }
    }
  }
  return inv;
}

struct Echelon {
  ModMatrix rref;
  std::vector<std::size_t> pivots;  // pivot column per nonzero row
  std::size_t rank() const { return pivots.size(); }
};

/// Reduced row echelon form over F_p.
inline Echelon row_reduce(ModMatrix m, unsigned p) {
  Echelon e;
  std::size_t row = 0;
  for (auto& v : m.a) v %= p;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t piv = m.rows;
    for (std::size_t r = row; r < m.rows; ++r)
      if (m(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv == m.rows) continue;
    for (std::size_t c = 0; c < m.cols; ++c) std::swap(m(piv, c), m(row, c));
    const u64 s = *detail::inverse_mod(m(row, col), p);
    for (std::size_t c = 0; c < m.cols; ++c) m(row, c) = m(row, c) * s % p;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r == row || m(r, col) == 0) continue;
      const u64 f = m(r, col);
      for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = (m(r, c) + p - f * m(row, c) % p) % p;
    }
    e.pivots.push_back(col);
    ++row;
  }
  e.rref = std::move(m);
  return e;
}

/// Basis of {v : M v = 0} over F_p, one vector per free column.
inline std::vector<std::vector<u64>> kernel_basis(const ModMatrix& m, unsigned p) {
  const Echelon e = row_reduce(m, p);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<std::vector<u64>> basis;
  for (std::size_t free = 0; free < m.cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<u64> v(m.cols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = (p - e.rref(r, free)) % p;
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Rank over F_p of a list of equal-length vectors.
inline std::size_t rank_of(std::span<const std::vector<unsigned>> vectors, unsigned p) {
  if (vectors.empty()) return 0;
  ModMatrix m(vectors.size(), vectors.front().size());
  for (std::size_t r = 0; r < vectors.size(); ++r)
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = vectors[r][c] % p;
  return row_reduce(std::move(m), p).rank();
}

/// Whether target lies in the F_p-span of vectors.
inline bool in_span(std::span<const std::vector<unsigned>> vectors, const std::vector<unsigned>& target, unsigned p) {
  bool target_zero = true;
  for (auto t : target) target_zero = target_zero && (t % p == 0);
  if (target_zero) return true;
  if (vectors.empty()) return false;
  std::vector<std::vector<unsigned>> with(vectors.begin(), vectors.end());
  const std::size_t r0 = rank_of(with, p);
  with.push_back(target);
  return rank_of(with, p) == r0;
}

}  // namespace hofa
