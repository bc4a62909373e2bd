#pragma once

/**
 * @file linear_forms.hpp
 * @brief Systems of linear forms: tensor powers, Cauchy-Schwarz and true
 *        complexity, the counting operator and the rewriting calculus.
 *
 * The rewriting identities all come from one fact: a polynomial of degree d
 * is killed by any d+1 additive derivatives, so for |L| > d the value
 * P(L(X)) can be traded for values at forms of smaller weight.
 */

#include <algorithm>
#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hofa/gowers.hpp"
#include "hofa/linear_form.hpp"
#include "hofa/modular_linalg.hpp"

namespace hofa {

// ---------------------------------------------------------------------------
// Tensor powers

/// Exponent multisets of total degree d on ℓ variables, m_1 descending first.
inline std::vector<std::vector<unsigned>> exponent_multisets(std::size_t ell, unsigned d) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> m(ell, 0);
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i + 1 == ell) {
      m[i] = left;
      out.push_back(m);
      return;
    }
    for (unsigned v = left + 1; v-- > 0;) {
      m[i] = v;
      self(self, i + 1, left - v);
    }
  };
  if (ell > 0) rec(rec, 0, d);
  return out;
}

/// L^{⊗d} with repeated coordinates collapsed: value ∏ λ_j^{m_j} per multiset m.
inline std::vector<unsigned> tensor_power(const LinearForm& L, unsigned d) {
  if (d < 1) throw std::invalid_argument("tensor_power: d must be >= 1");
  const unsigned p = L.prime();
  std::vector<unsigned> out;
  for (const auto& m : exponent_multisets(L.arity(), d)) {
    u64 v = 1;
    for (std::size_t j = 0; j < m.size(); ++j) v = v * detail::powmod(L[j], m[j], p) % p;
    out.push_back(static_cast<unsigned>(v));
  }
  return out;
}

struct TensorRank {
  unsigned d = 0;
  std::size_t rank = 0;
  bool independent = false;
  std::vector<unsigned> witness;  // Σ witness_i L_i^{⊗d} = 0 when dependent
};

inline TensorRank tensor_rank(const FormSystem& S, unsigned d) {
  const unsigned p = S.prime();
  std::vector<std::vector<unsigned>> cols;
  for (const auto& L : S) cols.push_back(tensor_power(L, d));
  ModMatrix M(cols.front().size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < M.rows; ++r) M(r, c) = cols[c][r];
  TensorRank tr;
  tr.d = d;
  tr.rank = row_reduce(M, p).rank();
  tr.independent = tr.rank == S.size();
  if (!tr.independent) {
    const auto ker = kernel_basis(M, p);
    for (auto v : ker.front()) tr.witness.push_back(static_cast<unsigned>(v));
  }
  return tr;
}

inline std::vector<TensorRank> tensor_rank_profile(const FormSystem& S, unsigned dmax) {
  std::vector<TensorRank> out;
  for (unsigned d = 1; d <= dmax; ++d) out.push_back(tensor_rank(S, d));
  return out;
}

// ---------------------------------------------------------------------------
// Complexity

inline void require_pairwise_independent(const FormSystem& S) {
  if (!S.pairwise_independent()) throw std::invalid_argument("form system is not pairwise linearly independent");
}

struct CsIndexCertificate {
  unsigned s = 0;
  std::vector<std::vector<std::size_t>> classes;  // partition of the other indices
};

struct CsComplexity {
  unsigned s = 0;
  std::vector<CsIndexCertificate> per_index;
};

/**
 * Cauchy-Schwarz complexity: for each i, the least s_i such that the other
 * forms split into s_i + 1 classes none of whose spans contains L_i.
 * Exact minimum by dynamic programming over subsets.
 */
inline CsComplexity cs_complexity(const FormSystem& S) {
  require_pairwise_independent(S);
  const std::size_t m = S.size();
  if (m > 12) throw std::invalid_argument("cs_complexity: at most 12 forms supported");
  const unsigned p = S.prime();
  CsComplexity out;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) others.push_back(j);
    const std::size_t r = others.size();
    CsIndexCertificate cert;
    if (r == 0) {
      out.per_index.push_back(cert);
      continue;
    }
    const u32 full = (u32{1} << r) - 1;
    const std::vector<unsigned> target(S[i].coeffs().begin(), S[i].coeffs().end());
    std::vector<char> good(full + 1, 0);
    for (u32 mask = 1; mask <= full; ++mask) {
      std::vector<std::vector<unsigned>> vecs;
      for (std::size_t b = 0; b < r; ++b)
        if (mask >> b & 1U) vecs.emplace_back(S[others[b]].coeffs().begin(), S[others[b]].coeffs().end());
      good[mask] = !in_span(vecs, target, p);
    }
    constexpr unsigned kInf = ~0U;
    std::vector<unsigned> dp(full + 1, kInf);
    std::vector<u32> choice(full + 1, 0);
    dp[0] = 0;
    for (u32 mask = 1; mask <= full; ++mask) {
      const u32 low = mask & (~mask + 1);
      for (u32 sub = mask; sub != 0; sub = (sub - 1) & mask) {
        if (!(sub & low) || !good[sub] || dp[mask ^ sub] == kInf) continue;
        if (dp[mask ^ sub] + 1 < dp[mask]) {
          dp[mask] = dp[mask ^ sub] + 1;
          choice[mask] = sub;
        }
      }
    }
    if (dp[full] == kInf) throw std::invalid_argument("cs_complexity: no valid partition exists");
    cert.s = dp[full] - 1;
    for (u32 mask = full; mask != 0; mask ^= choice[mask]) {
      std::vector<std::size_t> cls;
      for (std::size_t b = 0; b < r; ++b)
        if (choice[mask] >> b & 1U) cls.push_back(others[b]);
      cert.classes.push_back(std::move(cls));
    }
    out.s = std::max(out.s, cert.s);
    out.per_index.push_back(std::move(cert));
  }
  return out;
}

/**
 * Smallest d >= 0 whose (d+1)-st tensor powers are linearly independent.
 * d = 0 happens exactly for linearly independent forms, where the count
 * factors and U^1 already controls it. The search stops at cs_complexity;
 * running past it means the characterization failed and is reported as a
 * logic_error.
 */
inline unsigned true_complexity(const FormSystem& S) {
  require_pairwise_independent(S);
  const unsigned cap = cs_complexity(S).s;
  for (unsigned d = 0; d <= cap; ++d)
    if (tensor_rank(S, d + 1).independent) return d;
  throw std::logic_error("true_complexity: tensor powers still dependent at the Cauchy-Schwarz bound " +
                         std::to_string(cap));
}

// ---------------------------------------------------------------------------
// Counting operator E_X ∏ f_i(L_i(X))

inline std::complex<double> count_operator(std::span<const ComplexTable> fs, const FormSystem& S,
                                           u64 budget = kDefaultBudget) {
  if (fs.size() != S.size()) throw std::invalid_argument("count_operator: need one function per form");
  const PointSpace space(fs.front().prime(), fs.front().dim());
  for (const auto& f : fs)
    if (f.prime() != space.prime() || f.dim() != space.dim()) throw std::invalid_argument("count_operator: space mismatch");
  const TupleSpace tuples(space, S.arity());
  const u64 work = tuples.size() * S.size();
  if (work > budget) throw BudgetExceeded("counting operator enumeration; use count_operator_mc", work, budget);
  std::vector<u32> x;
  std::complex<double> sum{0.0, 0.0};
  for (u64 t = 0; t < tuples.size(); ++t) {
    tuples.decode(t, x);
    std::complex<double> prod{1.0, 0.0};
    for (std::size_t i = 0; i < S.size() && prod != 0.0; ++i) prod *= fs[i][S[i].apply(space, x)];
    sum += prod;
  }
  return sum / static_cast<double>(tuples.size());
}

struct ComplexEstimate {
  std::complex<double> estimate;
  double std_error = 0.0;
};

inline ComplexEstimate count_operator_mc(std::span<const ComplexTable> fs, const FormSystem& S, u64 samples, u64 seed) {
  if (fs.size() != S.size()) throw std::invalid_argument("count_operator: need one function per form");
  if (samples < 1) throw std::invalid_argument("count_operator_mc: samples must be >= 1");
  const PointSpace space(fs.front().prime(), fs.front().dim());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<u32> pick(0, space.size() - 1);
  std::vector<u32> x(S.arity());
  std::complex<double> sum{0.0, 0.0};
  double sq = 0.0;
  for (u64 s = 0; s < samples; ++s) {
    for (auto& v : x) v = pick(rng);
    std::complex<double> prod{1.0, 0.0};
    for (std::size_t i = 0; i < S.size(); ++i) prod *= fs[i][S[i].apply(space, x)];
    sum += prod;
    sq += std::norm(prod);
  }
  const double n = static_cast<double>(samples);
  const std::complex<double> mean = sum / n;
  const double var = samples > 1 ? std::max(0.0, (sq - n * std::norm(mean)) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

// ---------------------------------------------------------------------------
// Rewriting identities

struct FormTerm {
  i64 a = 0;
  LinearForm form;
};

/**
 * P(L(X)) = Σ a·P(M(X)) for every P of degree <= d, with |M| <= d and M <= L
 * coordinatewise. One step takes the |L| copies y of the x_j in the
 * vanishing |L|-fold derivative and groups subsets by how many copies of
 * each x_j they pick:
 *     P(L(X)) = Σ_{t<L} (-1)^{|L|-|t|+1} ∏_j C(λ_j, t_j) P(t(X)).
 * The zero form, P(0), is kept.
 */
inline std::vector<FormTerm> expand_high_weight(const LinearForm& L, unsigned d) {
  if (d < 1) throw std::invalid_argument("expand_high_weight: d must be >= 1");
  const unsigned p = L.prime();
  std::map<LinearForm, i64> acc;
  std::map<LinearForm, std::map<LinearForm, i64>> memo;

  auto binom = [](unsigned n, unsigned k) {
    i64 r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };

  auto expand = [&](auto&& self, const LinearForm& form) -> const std::map<LinearForm, i64>& {
    if (auto it = memo.find(form); it != memo.end()) return it->second;
    std::map<LinearForm, i64> out;
    if (form.weight() <= d) {
      out[form] = 1;
    } else {
      const std::size_t ell = form.arity();
      std::vector<unsigned> t(ell, 0);
      const unsigned W = form.weight();
      while (true) {
        if (t != std::vector<unsigned>(form.coeffs().begin(), form.coeffs().end())) {
          unsigned wt = 0;
          i64 mult = 1;
          for (std::size_t j = 0; j < ell; ++j) {
            wt += t[j];
            mult *= binom(form[j], t[j]);
          }
          const i64 sign = ((W - wt + 1) % 2 == 0) ? 1 : -1;
          for (const auto& [M, a] : self(self, LinearForm(p, t))) out[M] += sign * mult * a;
        }
        std::size_t j = 0;
        while (j < ell && t[j] == form[j]) t[j++] = 0;
        if (j == ell) break;
        ++t[j];
      }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return memo.emplace(form, std::move(out)).first->second;
  };

  std::vector<FormTerm> result;
  for (const auto& [M, a] : expand(expand, L)) result.push_back({a, M});
  return result;
}

struct ScaledFormTerm {
  i64 a = 0;
  unsigned c = 1;  // P(c·M(X)), c ∈ F^*
  LinearForm form;
};

/**
 * P(L(X)) = Σ a·P(c·M(X)) over leading-1 forms M with |M| <= d, for every
 * P of degree <= d with P(0) = 0. Scales L to leading coefficient 1,
 * expands, and recurses on the forms whose leading entry vanished.
 */
inline std::vector<ScaledFormTerm> normalize_leading(const LinearForm& L, unsigned d) {
  if (L.is_zero()) throw std::invalid_argument("normalize_leading: zero form");
  const unsigned p = L.prime();
  std::map<std::pair<LinearForm, unsigned>, i64> acc;

  auto rec = [&](auto&& self, const LinearForm& form, i64 mult) -> void {
    const unsigned lead = form.leading_coefficient();
    const unsigned c = static_cast<unsigned>(*detail::inverse_mod(lead, p));  // c·form has leading 1
    const unsigned cinv = lead;
    const LinearForm scaled = form.scaled(c);
    for (const auto& [a, M] : expand_high_weight(scaled, d)) {
      if (M.is_zero()) continue;
      if (M.leading_index() == scaled.leading_index()) {
        acc[{M, cinv}] += mult * a;
      } else {
        self(self, M.scaled(cinv), mult * a);
      }
    }
  };
  rec(rec, L, 1);

  std::vector<ScaledFormTerm> out;
  for (const auto& [key, a] : acc)
    if (a != 0) out.push_back({a, key.second, key.first});
  return out;
}

/**
 * Σ λ_i P(L_i) for a symbolic homogeneous P of degree d and depth k.
 * Coefficients live in Z_{p^{k+1}}.
 */
class FormalSum {
 public:
  FormalSum(unsigned p, unsigned d, unsigned k, std::size_t arity)
      : p_(p), d_(d), k_(k), arity_(arity), mod_(detail::checked_pow(p, k + 1)) {
    require_prime(p);
    if (d < k * (p - 1) + 1) throw std::invalid_argument("FormalSum: degree " + std::to_string(d) + " too small for depth " + std::to_string(k));
  }

  unsigned prime() const { return p_; }
  unsigned degree() const { return d_; }
  unsigned depth() const { return k_; }
  std::size_t arity() const { return arity_; }
  u64 modulus() const { return mod_; }
  const std::map<LinearForm, u64>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(i64 coefficient, const LinearForm& L) {
    if (L.arity() != arity_) throw std::invalid_argument("FormalSum: form arity mismatch");
    const u64 c = detail::reduce(coefficient, mod_);
    if (c == 0) return;
    auto& slot = terms_[L];
    slot = (slot + c) % mod_;
    if (slot == 0) terms_.erase(L);
  }

  bool operator==(const FormalSum& o) const {
    return p_ == o.p_ && d_ == o.d_ && k_ == o.k_ && terms_ == o.terms_;
  }

  /// "a*(l1,..,lℓ) + ..." or "0".
  std::string str() const {
    std::string s;
    for (const auto& [L, a] : terms_) {
      if (!s.empty()) s += " + ";
      s += std::to_string(a) + "*(" + L.str() + ")";
    }
    return s.empty() ? "0" : s;
  }

  static FormalSum parse(unsigned p, unsigned d, unsigned k, std::string_view text) {
    struct Raw {
      i64 a;
      LinearForm L;
    };
    std::vector<Raw> raw;
    std::size_t pos = 0;
    std::size_t arity = 0;
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
      if (term == "0" && raw.empty() && plus == text.size()) break;
      const auto star = term.find('*');
      i64 a = 1;
      std::string_view body = term;
      if (star != std::string_view::npos) {
        auto num = term.substr(0, star);
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), a);
        if (ec != std::errc() || ptr != num.data() + num.size()) throw ParseError("bad coefficient '" + std::string(num) + "'", col + 1);
        body = term.substr(star + 1);
        col += star + 1;
      }
      if (body.size() < 2 || body.front() != '(' || body.back() != ')')
        throw ParseError("expected a form in parentheses like (1,2)", col + 1);
      LinearForm L = LinearForm::parse(p, body.substr(1, body.size() - 2), col + 1);
      if (arity == 0) arity = L.arity();
      if (L.arity() != arity) throw ParseError("forms must have the same number of coefficients", col + 1);
      raw.push_back({a, std::move(L)});
      pos = plus + 1;
    }
    FormalSum fs(p, d, k, std::max<std::size_t>(arity, 1));
    for (const auto& r : raw) fs.add(r.a, r.L);
    return fs;
  }

 private:
  unsigned p_, d_, k_;
  std::size_t arity_;
  u64 mod_;
  std::map<LinearForm, u64> terms_;
};

/// Whether a term a·P(M) already satisfies the normal-form conditions.
inline bool is_normal_term(const FormalSum& fs, const LinearForm& M, u64 a) {
  const unsigned j = detail::valuation(a, fs.prime(), fs.depth() + 1);
  if (j > fs.depth() || M.is_zero()) return false;
  const unsigned d_eff = fs.degree() - j * (fs.prime() - 1);
  return M.leading_coefficient() == 1 && M.weight() <= d_eff;
}

/**
 * Normal form of a formal sum: only leading-1 forms, nonzero coefficients
 * a_M mod p^{k+1}, and |M| <= deg(a_M P) = d - j(p-1) where p^j || a_M.
 * Terms are processed in graded-lex order of forms until a fixpoint.
 */
inline FormalSum canonical_rewrite(const FormalSum& in, std::size_t max_iterations = 1000) {
  const unsigned p = in.prime();
  const u64 mod = in.modulus();
  const u64 sigma = teichmuller_sigma(p, in.degree(), in.depth()).value();
  // σ^i for c = ζ^i
  std::vector<u64> scale_of(p, 0);
  {
    const unsigned zeta = primitive_root(p);
    u64 c = 1, s = 1 % mod;
    for (unsigned i = 0; i + 1 < p; ++i) {
      scale_of[c] = s;
      c = c * zeta % p;
      s = detail::mulmod(s, sigma, mod);
    }
  }
  std::map<std::pair<LinearForm, unsigned>, std::vector<ScaledFormTerm>> memo;

  // P(0) = 0 for zero-shift homogeneous P
  FormalSum cur(p, in.degree(), in.depth(), in.arity());
  for (const auto& [L, a] : in.terms())
    if (!L.is_zero()) cur.add(static_cast<i64>(a), L);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    FormalSum next(p, in.degree(), in.depth(), in.arity());
    bool changed = false;
    for (const auto& [L, a] : cur.terms()) {
      if (is_normal_term(cur, L, a)) {
        next.add(static_cast<i64>(a), L);
        continue;
      }
      changed = true;
      const unsigned j = detail::valuation(a, p, in.depth() + 1);
      const unsigned d_eff = in.degree() - j * (p - 1);
      auto key = std::make_pair(L, d_eff);
      auto mit = memo.find(key);
      if (mit == memo.end()) mit = memo.emplace(key, normalize_leading(L, d_eff)).first;
      for (const auto& t : mit->second) {
        const u64 coef = detail::mulmod(detail::mulmod(a, detail::reduce(t.a, mod), mod), scale_of[t.c], mod);
        next.add(static_cast<i64>(coef), t.form);
      }
    }
    if (!changed) return next;
    cur = std::move(next);
  }
  throw std::runtime_error("canonical_rewrite: no fixpoint after " + std::to_string(max_iterations) +
                           " iterations");
}

/// Σ a·P(M(X)) at a tuple, for a concrete polynomial table.
inline TorusValue evaluate_formal_sum(const FormalSum& fs, const FunctionTable& P, const PointSpace& space,
                                      std::span<const u32> x) {
  TorusValue acc = TorusValue::zero(fs.prime());
  for (const auto& [L, a] : fs.terms()) acc += static_cast<i64>(a) * P.at(L.apply(space, x));
  return acc;
}

}  // namespace hofa
