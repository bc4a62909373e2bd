#pragma once

/**
 * @file polynomial.hpp
 * @brief Non-classical polynomials F_p^n -> T in canonical form.
 *
 * Every polynomial is uniquely
 *
 *     P(x) = α + Σ c_{e,k} |x_1|^{e_1}⋯|x_n|^{e_n} / p^{k+1}  (mod 1)
 *
 * with 0 ≤ e_i < p, e ≠ 0 and c_{e,k} ∈ [0, p-1]. For a fixed exponent
 * vector e the sum over k is a single torus value Σ_k c_{e,k}/p^{k+1}, whose
 * base-p digits are the c_{e,k}. NCPoly stores exactly that: the shift α and
 * a map e -> (nonzero) torus value, the "slot" of e. Addition and integer
 * scaling then act slot-wise and carries between depths come for free.
 *
 * A monomial c|x|^e/p^{k+1} has degree Σe_i + k(p-1).
 */

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "hofa/linear_form.hpp"
#include "hofa/modular_linalg.hpp"
#include "hofa/tables.hpp"

namespace hofa {

using Exponents = std::vector<std::uint8_t>;

inline unsigned exponent_sum(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0U);
}

/// Total exponent first, then x1 before x2 (lexicographically larger first).
struct GradedLex {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const unsigned sa = exponent_sum(a), sb = exponent_sum(b);
    if (sa != sb) return sa < sb;
    return b < a;
  }
};

struct Monomial {
  Exponents exponents;
  unsigned depth = 0;
  unsigned coefficient = 0;  // in [1, p-1]

  unsigned degree(unsigned p) const { return exponent_sum(exponents) + depth * (p - 1); }
  bool operator==(const Monomial&) const = default;
};

class NCPoly {
 public:
  using SlotMap = std::map<Exponents, TorusValue, GradedLex>;

  NCPoly(unsigned p, unsigned n) : p_(p), n_(n), shift_(TorusValue::zero(p)) { require_prime(p); }

  /// coefficient·|x|^e / p^{depth+1}; any integer coefficient is accepted.
  static NCPoly monomial(unsigned p, Exponents e, unsigned depth, i64 coefficient) {
    NCPoly r(p, static_cast<unsigned>(e.size()));
    r.add_to_slot(e, TorusValue(p, coefficient, depth));
    return r;
  }

  static NCPoly constant(unsigned p, unsigned n, const TorusValue& value) {
    NCPoly r(p, n);
    r.shift_ = value;
    return r;
  }

  unsigned prime() const { return p_; }
  unsigned dim() const { return n_; }
  const TorusValue& shift() const { return shift_; }
  const SlotMap& slots() const { return slots_; }

  bool is_zero() const { return shift_.is_zero() && slots_.empty(); }
  bool is_constant() const { return slots_.empty(); }

  /// Canonical term list in print order (slot order, then increasing depth).
  std::vector<Monomial> terms() const {
    std::vector<Monomial> out;
    for (const auto& [e, v] : slots_) {
      const unsigned lvl = v.level();
      for (unsigned k = 0; k <= lvl; ++k) {
        const u64 c = (v.numerator() / detail::checked_pow(p_, lvl - k)) % p_;
        if (c != 0) out.push_back({e, k, static_cast<unsigned>(c)});
      }
    }
    return out;
  }

  /// Max over terms of Σe + k(p-1); 0 for constants.
  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, v] : slots_) d = std::max(d, exponent_sum(e) + v.level() * (p_ - 1));
    return d;
  }

  /// Largest k with a nonzero c_{e,k}; 0 for constants.
  unsigned depth() const {
    unsigned k = 0;
    for (const auto& [e, v] : slots_) k = std::max(k, v.level());
    return k;
  }

  /// Smallest K such that every value lies in U_{K+1}.
  unsigned value_level() const { return std::max(depth(), shift_.level()); }

  TorusValue eval(std::span<const unsigned> x) const {
    if (x.size() != n_) throw std::invalid_argument("eval: point has dimension " + std::to_string(x.size()) +
                                                    ", polynomial has " + std::to_string(n_));
    TorusValue acc = shift_;
    for (const auto& [e, v] : slots_) {
      const u64 den = detail::checked_pow(p_, v.level() + 1);
      u64 m = 1 % den;
      for (unsigned i = 0; i < n_; ++i)
        for (unsigned j = 0; j < e[i]; ++j) m = detail::mulmod(m, x[i] % p_, den);
      if (m != 0) acc += static_cast<i64>(m) * v;
    }
    return acc;
  }

  /// Values at every point as numerators over p^{level+1}; level >= value_level().
  FunctionTable table(unsigned level) const {
    if (level < value_level()) throw std::invalid_argument("table: level below polynomial value level");
    const PointSpace space(p_, n_);
    const u64 mod = detail::checked_pow(p_, level + 1);
    std::vector<u64> nums(space.size(), shift_.numerator_at(level) % mod);
    for (const auto& [e, v] : slots_) {
      const u64 c = v.numerator_at(level);
      // |x_i|^{e_i} as integers mod p^{level+1}, per variable and value
      for (u32 idx = 0; idx < space.size(); ++idx) {
        u64 m = 1 % mod;
        for (unsigned i = 0; i < n_ && m != 0; ++i)
          m = detail::mulmod(m, detail::powmod(space.digit(idx, i), e[i], mod), mod);
        if (e.empty() || m == 0) continue;
        nums[idx] = (nums[idx] + detail::mulmod(m, c, mod)) % mod;
      }
    }
    return FunctionTable(p_, n_, level, std::move(nums));
  }

  FunctionTable table() const { return table(value_level()); }

  NCPoly without_shift() const {
    NCPoly r = *this;
    r.shift_ = TorusValue::zero(p_);
    return r;
  }

  bool operator==(const NCPoly& o) const {
    return p_ == o.p_ && n_ == o.n_ && shift_ == o.shift_ && slots_ == o.slots_;
  }

  friend NCPoly operator+(NCPoly a, const NCPoly& b) {
    if (a.p_ != b.p_ || a.n_ != b.n_) throw std::invalid_argument("add: polynomials over different spaces");
    a.shift_ += b.shift_;
    for (const auto& [e, v] : b.slots_) a.add_to_slot(e, v);
    return a;
  }

  friend NCPoly operator*(i64 lambda, const NCPoly& a) {
    NCPoly r(a.p_, a.n_);
    r.shift_ = lambda * a.shift_;
    for (const auto& [e, v] : a.slots_) r.add_to_slot(e, lambda * v);
    return r;
  }

  friend NCPoly operator-(const NCPoly& a) { return -1 * a; }
  friend NCPoly operator-(const NCPoly& a, const NCPoly& b) { return a + (-b); }

  /// Adds v to the slot of e (the coefficient torus value of |x|^e).
  void add_to_slot(const Exponents& e, const TorusValue& v) {
    if (e.size() != n_) throw std::invalid_argument("monomial dimension mismatch");
    bool nonconstant = false;
    for (auto ei : e) {
      if (ei >= p_) throw std::invalid_argument("exponent " + std::to_string(ei) + " must be < p=" + std::to_string(p_));
      nonconstant = nonconstant || ei > 0;
    }
    if (!nonconstant) {
      // |x|^0 = 1 everywhere: the term is a constant
      shift_ += v;
      return;
    }
    auto it = slots_.find(e);
    if (it == slots_.end()) {
      if (!v.is_zero()) slots_.emplace(e, v);
      return;
    }
    it->second += v;
    if (it->second.is_zero()) slots_.erase(it);
  }

 private:
  unsigned p_;
  unsigned n_;
  TorusValue shift_;
  SlotMap slots_;
};

inline NCPoly add(const NCPoly& a, const NCPoly& b) { return a + b; }
inline NCPoly scale(i64 lambda, const NCPoly& a) { return lambda * a; }
inline TorusValue eval(const NCPoly& P, std::span<const unsigned> x) { return P.eval(x); }
inline unsigned degree(const NCPoly& P) { return P.degree(); }
inline unsigned depth(const NCPoly& P) { return P.depth(); }

namespace detail {

/// Inverse of the Vandermonde matrix V[x][e] = x^e (0^0 = 1) over Z_mod.
inline ModMatrix inverse_vandermonde(unsigned p, u64 mod) {
  ModMatrix v(p, p);
  for (unsigned x = 0; x < p; ++x)
    for (unsigned e = 0; e < p; ++e) v(x, e) = detail::powmod(x, e, mod);
  auto inv = invert_mod(std::move(v), p, mod);
  assert(inv.has_value());
  return *inv;
}

}  // namespace detail

/**
 * The unique polynomial whose values are the table. The monomial-value
 * matrix is a tensor power of the univariate Vandermonde matrix, which is
 * invertible mod p and hence mod p^{K+1}; its inverse is applied one
 * variable at a time. Every U_{K+1}-valued table is realizable.
 */
inline NCPoly interpolate(const FunctionTable& t) {
  const unsigned p = t.prime(), n = t.dim(), K = t.level();
  const u64 mod = t.modulus();
  NCPoly out = NCPoly::constant(p, n, t.at(0));
  const u64 base = t.numerator(0);
  std::vector<u64> a(t.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (t.numerator(static_cast<u32>(i)) + mod - base) % mod;

  const ModMatrix vinv = detail::inverse_vandermonde(p, mod);
  std::vector<u64> col(p);
  u64 stride = 1;
  for (unsigned axis = 0; axis < n; ++axis, stride *= p) {
    for (u64 idx = 0; idx < a.size(); ++idx) {
      if ((idx / stride) % p != 0) continue;
      for (unsigned x = 0; x < p; ++x) col[x] = a[idx + x * stride];
      for (unsigned e = 0; e < p; ++e) {
        u64 s = 0;
        for (unsigned x = 0; x < p; ++x) s = (s + detail::mulmod(vinv(e, x), col[x], mod)) % mod;
        a[idx + e * stride] = s;
      }
    }
  }
  assert(a[0] == 0);
  const PointSpace space(p, n);
  for (u32 idx = 1; idx < a.size(); ++idx) {
    if (a[idx] == 0) continue;
    Exponents e(n);
    for (unsigned i = 0; i < n; ++i) e[i] = static_cast<std::uint8_t>(space.digit(idx, i));
    out.add_to_slot(e, TorusValue(p, static_cast<i64>(a[idx]), K));
  }
  return out;
}

/// D_h P(x) = P(x+h) - P(x), in canonical form.
inline NCPoly additive_derivative(const NCPoly& P, std::span<const unsigned> h) {
  if (h.size() != P.dim()) throw std::invalid_argument("additive_derivative: direction dimension mismatch");
  const PointSpace space(P.prime(), P.dim());
  const FunctionTable t = P.table();
  const u32 hi = space.index(h);
  std::vector<u64> nums(t.size());
  for (u32 x = 0; x < t.size(); ++x) nums[x] = (t.numerator(space.add(x, hi)) + t.modulus() - t.numerator(x)) % t.modulus();
  return interpolate(FunctionTable(P.prime(), P.dim(), t.level(), std::move(nums)));
}

/// D_{h_1}⋯D_{h_t} P(x) = Σ_{S ⊆ [t]} (-1)^{t-|S|} P(x + Σ_{i∈S} h_i).
inline TorusValue partial_derivative_eval(const NCPoly& P, std::span<const unsigned> x,
                                          std::span<const Point> hs) {
  const PointSpace space(P.prime(), P.dim());
  const u32 xi = space.index(x);
  std::vector<u32> hi;
  for (const auto& h : hs) hi.push_back(space.index(h));
  const std::size_t t = hs.size();
  TorusValue acc = TorusValue::zero(P.prime());
  for (u64 mask = 0; mask < (u64{1} << t); ++mask) {
    u32 pt = xi;
    int bits = 0;
    for (std::size_t i = 0; i < t; ++i)
      if (mask >> i & 1U) {
        pt = space.add(pt, hi[i]);
        ++bits;
      }
    const TorusValue v = P.eval(space.point(pt));
    acc += ((t - bits) % 2 == 0) ? v : -v;
  }
  return acc;
}

/// ∂P(h_1..h_d) = D_{h_1}⋯D_{h_d} P(0) at the top degree d = deg P.
inline TorusValue derivative_poly_eval(const NCPoly& P, std::span<const Point> hs) {
  if (hs.size() != P.degree())
    throw std::invalid_argument("derivative_poly_eval: expected " + std::to_string(P.degree()) +
                                " directions (the degree), got " + std::to_string(hs.size()));
  const Point origin(P.dim(), 0);
  return partial_derivative_eval(P, origin, hs);
}

/// X -> P(L(X)) on (F^n)^ℓ, evaluated through a cached value table.
class ComposedPoly {
 public:
  ComposedPoly(const NCPoly& P, LinearForm form)
      : space_(P.prime(), P.dim()), table_(P.table()), form_(std::move(form)) {}

  TorusValue eval(std::span<const u32> x_indices) const {
    if (x_indices.size() != form_.arity()) throw std::invalid_argument("ComposedPoly: wrong tuple length");
    return table_.at(form_.apply(space_, x_indices));
  }

  TorusValue eval(std::span<const Point> xs) const {
    std::vector<u32> idx;
    for (const auto& x : xs) idx.push_back(space_.index(x));
    return eval(idx);
  }

  const LinearForm& form() const { return form_; }

 private:
  PointSpace space_;
  FunctionTable table_;
  LinearForm form_;
};

inline ComposedPoly compose_linear(const NCPoly& P, const LinearForm& form) { return ComposedPoly(P, form); }

// ---------------------------------------------------------------------------
// Text format: "shift a/b + c/p^(k+1) x1^e1 x2^e2 + ...", or "0".

inline std::string to_string(const NCPoly& P) {
  std::string s;
  auto sep = [&] {
    if (!s.empty()) s += " + ";
  };
  if (!P.shift().is_zero()) s += "shift " + P.shift().str();
  for (const auto& m : P.terms()) {
    sep();
    s += std::to_string(m.coefficient) + "/" + std::to_string(detail::checked_pow(P.prime(), m.depth + 1));
    for (std::size_t i = 0; i < m.exponents.size(); ++i)
      if (m.exponents[i] > 0) s += " x" + std::to_string(i + 1) + "^" + std::to_string(m.exponents[i]);
  }
  return s.empty() ? "0" : s;
}

/// Parses the text format. n = 0 infers the dimension from the largest variable.
inline NCPoly parse_poly(unsigned p, std::string_view text, unsigned n = 0) {
  require_prime(p);
  struct RawTerm {
    TorusValue coeff;
    std::vector<std::pair<unsigned, unsigned>> vars;  // (index, exponent)
    std::size_t column;
  };
  std::vector<RawTerm> raw;
  TorusValue shift = TorusValue::zero(p);
  unsigned max_var = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto plus = text.find('+', pos);
    if (plus == std::string_view::npos) plus = text.size();
    std::string_view term = text.substr(pos, plus - pos);
    std::size_t col = pos;
    while (!term.empty() && term.front() == ' ') {
      term.remove_prefix(1);
      ++col;
    }
    while (!term.empty() && term.back() == ' ') term.remove_suffix(1);
    if (term.empty()) throw ParseError("empty term", col + 1);

    // split on spaces
    std::vector<std::pair<std::string_view, std::size_t>> toks;
    std::size_t i = 0;
    while (i < term.size()) {
      while (i < term.size() && term[i] == ' ') ++i;
      const std::size_t j0 = i;
      while (i < term.size() && term[i] != ' ') ++i;
      if (i > j0) toks.emplace_back(term.substr(j0, i - j0), col + j0);
    }

    if (toks.front().first == "shift") {
      if (toks.size() != 2) throw ParseError("expected 'shift a/b'", col + 1);
      shift += TorusValue::parse(p, toks[1].first, toks[1].second);
    } else if (toks.size() == 1 && toks.front().first.find('/') == std::string_view::npos) {
      // a bare integer is a constant, 0 mod 1
      TorusValue::parse(p, toks[0].first, toks[0].second);
    } else {
      if (toks.front().first.find('/') == std::string_view::npos)
        throw ParseError("coefficient must be written a/b", toks.front().second + 1);
      RawTerm rt{TorusValue::parse(p, toks[0].first, toks[0].second), {}, col};
      for (std::size_t t = 1; t < toks.size(); ++t) {
        auto [tok, tcol] = toks[t];
        if (tok.size() < 2 || tok[0] != 'x') throw ParseError("expected a variable like x1^2, got '" + std::string(tok) + "'", tcol + 1);
        const auto caret = tok.find('^');
        unsigned var = 0, ex = 1;
        auto vs = tok.substr(1, caret == std::string_view::npos ? std::string_view::npos : caret - 1);
        auto [p1, e1] = std::from_chars(vs.data(), vs.data() + vs.size(), var);
        if (e1 != std::errc() || p1 != vs.data() + vs.size() || var == 0)
          throw ParseError("bad variable index in '" + std::string(tok) + "'", tcol + 2);
        if (caret != std::string_view::npos) {
          auto es = tok.substr(caret + 1);
          auto [p2, e2] = std::from_chars(es.data(), es.data() + es.size(), ex);
          if (e2 != std::errc() || p2 != es.data() + es.size())
            throw ParseError("bad exponent in '" + std::string(tok) + "'", tcol + caret + 2);
        }
        max_var = std::max(max_var, var);
        rt.vars.emplace_back(var, ex);
      }
      raw.push_back(std::move(rt));
    }
    pos = plus + 1;
  }

  if (n == 0) n = std::max(max_var, 1U);
  if (max_var > n) throw ParseError("variable x" + std::to_string(max_var) + " exceeds dimension " + std::to_string(n), 1);
  NCPoly out = NCPoly::constant(p, n, shift);
  for (const auto& rt : raw) {
    std::vector<unsigned> e(n, 0);
    for (auto [var, ex] : rt.vars) e[var - 1] += ex;
    Exponents ee(n);
    for (unsigned i = 0; i < n; ++i) {
      if (e[i] >= p)
        throw ParseError("exponent of x" + std::to_string(i + 1) + " must be < p=" + std::to_string(p), rt.column + 1);
      ee[i] = static_cast<std::uint8_t>(e[i]);
    }
    out.add_to_slot(ee, rt.coeff);
  }
  return out;
}

}  // namespace hofa
