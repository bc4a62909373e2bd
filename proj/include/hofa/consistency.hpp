#pragma once

/**
 * @file consistency.hpp
 * @brief Consistency groups Φ_{d,k}(L) ⊆ U_{k+1}^m, their annihilators, the
 *        near-orthogonality check and the equidistribution experiment.
 *
 * With M = p^{k+1}, U_{k+1}^m is identified with Z_M^m via β_i = b_i/M.
 * Subgroups are stored as a membership bitmap over all M^m tuples, which is
 * fine at the sizes used here.
 */

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hofa/factor.hpp"
#include "hofa/homogeneous.hpp"
#include "hofa/linear_forms.hpp"

namespace hofa {

/// A subgroup of Z_M^m.
class TupleGroup {
 public:
  TupleGroup(u64 modulus, std::size_t m) : M_(modulus), m_(m) {
    total_ = detail::checked_pow(modulus, static_cast<unsigned>(m));
    if (total_ > (u64{1} << 26)) throw std::invalid_argument("TupleGroup: M^m too large");
    member_.assign(total_, 0);
    member_[0] = 1;
    elems_.push_back(0);
  }

  static TupleGroup whole(u64 modulus, std::size_t m) {
    TupleGroup g(modulus, m);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<u64> e(m, 0);
      e[i] = 1;
      g.add_generator(e);
    }
    return g;
  }

  u64 modulus() const { return M_; }
  std::size_t arity() const { return m_; }
  u64 size() const { return elems_.size(); }
  u64 ambient_size() const { return total_; }
  const std::vector<std::vector<u64>>& generators() const { return gens_; }

  u64 encode(std::span<const u64> v) const {
    u64 c = 0;
    for (std::size_t i = m_; i-- > 0;) c = c * M_ + v[i] % M_;
    return c;
  }
  std::vector<u64> decode(u64 c) const {
    std::vector<u64> v(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      v[i] = c % M_;
      c /= M_;
    }
    return v;
  }

  bool contains(std::span<const u64> v) const { return member_[encode(v)] != 0; }
  bool contains_code(u64 c) const { return member_[c] != 0; }

  std::vector<std::vector<u64>> elements() const {
    std::vector<u64> codes = elems_;
    std::sort(codes.begin(), codes.end());
    std::vector<std::vector<u64>> out;
    for (auto c : codes) out.push_back(decode(c));
    return out;
  }

  /// Grows the group to ⟨G, g⟩; returns whether it grew.
  bool add_generator(std::span<const u64> g) {
    if (contains(g)) return false;
    gens_.emplace_back(g.begin(), g.end());
    const std::vector<u64> base = elems_;
    std::vector<u64> step(g.begin(), g.end());
    std::vector<u64> mult = step;  // t·g
    while (!contains(mult)) {
      for (auto c : base) {
        auto v = decode(c);
        for (std::size_t i = 0; i < m_; ++i) v[i] = (v[i] + mult[i]) % M_;
        const u64 code = encode(v);
        if (!member_[code]) {
          member_[code] = 1;
          elems_.push_back(code);
        }
      }
      for (std::size_t i = 0; i < m_; ++i) mult[i] = (mult[i] + step[i]) % M_;
    }
    return true;
  }

  /// {λ : Σ λ_i β_i ≡ 0 (mod M) for all β in the group}.
  TupleGroup annihilator() const {
    TupleGroup out(M_, m_);
    for (u64 c = 1; c < total_; ++c) {
      if (out.contains_code(c)) continue;
      const auto lam = decode(c);
      bool ok = true;
      for (const auto& g : gens_) {
        u64 s = 0;
        for (std::size_t i = 0; i < m_; ++i) s = (s + detail::mulmod(lam[i], g[i], M_)) % M_;
        if (s != 0) {
          ok = false;
          break;
        }
      }
      if (ok) out.add_generator(lam);
    }
    return out;
  }

  bool operator==(const TupleGroup& o) const { return M_ == o.M_ && m_ == o.m_ && member_ == o.member_; }

 private:
  u64 M_;
  std::size_t m_;
  u64 total_;
  std::vector<char> member_;
  std::vector<u64> elems_;
  std::vector<std::vector<u64>> gens_;
};

inline void require_feasible(unsigned p, unsigned d, unsigned k) {
  require_prime(p);
  if (d < k * (p - 1) + 1)
    throw std::invalid_argument("no polynomial has degree " + std::to_string(d) + " and depth " + std::to_string(k) +
                                " over F_" + std::to_string(p));
}

/// Φ^⊥_{d,k}(L) as a subgroup of Z_{p^{k+1}}^m.
struct Annihilator {
  unsigned d = 0, k = 0;
  TupleGroup group;
};

struct ConsistencyGroup {
  unsigned d = 0, k = 0;
  TupleGroup group;
  std::string provenance;             // "sampled" or "dual-of-annihilator"
  std::vector<u64> size_by_n;         // sampled: |Φ| after each n (0 when infeasible)
  std::optional<unsigned> stable_from;  // sampled: first n after which the group stopped growing
  bool stable = true;
};

/// λ ∈ Φ^⊥ iff the formal sum Σ λ_i P(L_i) rewrites to the empty normal form.
inline bool annihilates(unsigned d, unsigned k, const FormSystem& S, std::span<const u64> lambda) {
  FormalSum fs(S.prime(), d, k, S.arity());
  for (std::size_t i = 0; i < S.size(); ++i) fs.add(static_cast<i64>(lambda[i]), S[i]);
  return canonical_rewrite(fs).empty();
}

inline Annihilator phi_perp_symbolic(unsigned d, unsigned k, const FormSystem& S, u64 budget = kDefaultBudget) {
  const unsigned p = S.prime();
  require_feasible(p, d, k);
  const u64 M = detail::checked_pow(p, k + 1);
  TupleGroup g(M, S.size());
  if (g.ambient_size() > budget) throw BudgetExceeded("annihilator enumeration", g.ambient_size(), budget);
  std::vector<u64> kernel;
  for (u64 c = 1; c < g.ambient_size(); ++c)
    if (annihilates(d, k, S, g.decode(c))) kernel.push_back(c);
  for (auto c : kernel) g.add_generator(g.decode(c));
  if (g.size() != kernel.size() + 1)
    throw std::logic_error("phi_perp_symbolic: annihilating tuples do not form a group");
  return {d, k, std::move(g)};
}

inline ConsistencyGroup phi_from_duality(const Annihilator& A) {
  ConsistencyGroup out{A.d, A.k, A.group.annihilator(), "dual-of-annihilator", {}, std::nullopt, true};
  if (out.group.size() * A.group.size() != A.group.ambient_size())
    throw std::logic_error("phi_from_duality: |Φ|·|Φ^⊥| differs from p^{(k+1)m}");
  return out;
}

struct PhiSampleOptions {
  unsigned n_max = 3;
  unsigned polys_per_n = 8;
  u64 seed = 1;
  u64 budget = kDefaultBudget;
};

/**
 * Subgroup generated by (P(L_1(X)),..,P(L_m(X))) over sampled homogeneous
 * P of degree d, depth k on F_p^n and all X, for n = 1..n_max.
 */
inline ConsistencyGroup phi_sampled(unsigned d, unsigned k, const FormSystem& S, const PhiSampleOptions& opt = {}) {
  const unsigned p = S.prime();
  require_feasible(p, d, k);
  const u64 M = detail::checked_pow(p, k + 1);
  ConsistencyGroup out{d, k, TupleGroup(M, S.size()), "sampled", {}, std::nullopt, false};
  std::mt19937_64 rng(opt.seed);
  u64 used = 0;
  u64 last_size = 0;
  bool seen_feasible = false;
  for (unsigned n = 1; n <= opt.n_max; ++n) {
    if (d - k * (p - 1) > n * (p - 1)) {
      out.size_by_n.push_back(0);
      continue;
    }
    const PointSpace space(p, n);
    const TupleSpace tuples(space, S.arity());
    std::vector<std::vector<u32>> images;
    for (const auto& L : S) images.push_back(tuples.image(L));
    const HomogeneousSampler sampler(p, d, k, n);
    for (unsigned s = 0; s < opt.polys_per_n; ++s) {
      used += tuples.size() * S.size();
      if (used > opt.budget) throw BudgetExceeded("consistency sampling", used, opt.budget);
      const NCPoly P = sampler.draw(rng);
      const FunctionTable t = P.table(k);
      std::vector<u64> beta(S.size());
      for (u64 x = 0; x < tuples.size(); ++x) {
        for (std::size_t i = 0; i < S.size(); ++i) beta[i] = t.numerator(images[i][x]);
        out.group.add_generator(beta);
      }
    }
    out.size_by_n.push_back(out.group.size());
    if (seen_feasible && out.group.size() == last_size) {
      if (!out.stable_from) out.stable_from = n - 1;
    } else {
      out.stable_from.reset();
    }
    seen_feasible = true;
    last_size = out.group.size();
  }
  out.stable = out.stable_from.has_value() || out.group.size() == out.group.ambient_size();
  return out;
}

// ---------------------------------------------------------------------------
// Λ matrices and near-orthogonality

/// Integer matrix (λ_{i,j}), i over factor polynomials, j over forms.
class LambdaMatrix {
 public:
  LambdaMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols, 0) {}
  LambdaMatrix(std::size_t rows, std::size_t cols, std::vector<i64> entries) : r_(rows), c_(cols), a_(std::move(entries)) {
    if (a_.size() != rows * cols) throw std::invalid_argument("LambdaMatrix: wrong number of entries");
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  i64& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  i64 operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }
  std::vector<u64> row(std::size_t i, u64 mod) const {
    std::vector<u64> v(c_);
    for (std::size_t j = 0; j < c_; ++j) v[j] = detail::reduce((*this)(i, j), mod);
    return v;
  }

  /// "1,1,-1;0,1,2": rows separated by ';'.
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < r_; ++i) {
      if (i) s += ';';
      for (std::size_t j = 0; j < c_; ++j) {
        if (j) s += ',';
        s += std::to_string((*this)(i, j));
      }
    }
    return s;
  }

  static LambdaMatrix parse(std::string_view text) {
    std::vector<std::vector<i64>> rows;
    std::size_t start = 0;
    while (true) {
      const auto semi = text.find(';', start);
      const auto rowtxt = text.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start);
      std::vector<i64> row;
      std::size_t s2 = 0;
      while (true) {
        const auto comma = rowtxt.find(',', s2);
        auto tok = rowtxt.substr(s2, comma == std::string_view::npos ? std::string_view::npos : comma - s2);
        std::size_t lead = 0;
        while (lead < tok.size() && tok[lead] == ' ') ++lead;
        tok.remove_prefix(lead);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        i64 v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
          throw ParseError("expected an integer, got '" + std::string(tok) + "'", start + s2 + lead + 1);
        row.push_back(v);
        if (comma == std::string_view::npos) break;
        s2 = comma + 1;
      }
      if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("rows differ in length", start + 1);
      rows.push_back(std::move(row));
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    LambdaMatrix out(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
    return out;
  }

  bool operator==(const LambdaMatrix&) const = default;

 private:
  std::size_t r_, c_;
  std::vector<i64> a_;
};

struct NearOrthoVerdict {
  bool predicted_zero = false;   // every row rewrites to the empty normal form
  bool identically_zero = false;  // P_Λ ≡ 0 observed
  double bias = 0.0;
  double epsilon = 0.0;
  bool certified = false;  // factor uniformity certified, so the bias bound is asserted
  bool consistent = false;
  std::vector<std::string> row_normal_forms;
};

/// Precomputed tables for evaluating Σ λ_{i,j} P_i(L_j(X)) over all X.
class FactorOnForms {
 public:
  FactorOnForms(const PolyFactor& B, const FormSystem& S, u64 budget = kDefaultBudget)
      : space_(B.prime(), B.dim()), tuples_(space_, S.arity()) {
    const u64 work = tuples_.size() * S.size();
    if (work > budget) throw BudgetExceeded("enumeration over (F^n)^l", work, budget);
    level_ = 0;
    for (const auto& P : B.polys()) level_ = std::max(level_, P.value_level());
    for (const auto& P : B.polys()) tables_.push_back(P.table(level_));
    for (const auto& L : S) images_.push_back(tuples_.image(L));
  }

  const PointSpace& space() const { return space_; }
  u64 tuples() const { return tuples_.size(); }
  unsigned level() const { return level_; }
  /// Numerator over p^{level+1} of P_i(L_j(X)).
  u64 value(std::size_t i, std::size_t j, u64 x) const { return tables_[i].numerator(images_[j][x]); }

 private:
  PointSpace space_;
  TupleSpace tuples_;
  unsigned level_ = 0;
  std::vector<FunctionTable> tables_;
  std::vector<std::vector<u32>> images_;
};

inline double lambda_bias(const FactorOnForms& ev, unsigned p, const LambdaMatrix& lam, bool* zero = nullptr) {
  const u64 mod = detail::checked_pow(p, ev.level() + 1);
  std::vector<std::pair<std::size_t, std::size_t>> nz;
  std::vector<u64> coef;
  for (std::size_t i = 0; i < lam.rows(); ++i)
    for (std::size_t j = 0; j < lam.cols(); ++j) {
      const u64 c = detail::reduce(lam(i, j), mod);
      if (c != 0) {
        nz.emplace_back(i, j);
        coef.push_back(c);
      }
    }
  PhaseHistogram h(p, ev.level());
  for (u64 x = 0; x < ev.tuples(); ++x) {
    u64 v = 0;
    for (std::size_t t = 0; t < nz.size(); ++t) v = (v + detail::mulmod(coef[t], ev.value(nz[t].first, nz[t].second, x), mod)) % mod;
    h.add(v);
  }
  if (zero) *zero = h.degenerate();
  return std::abs(h.mean_phase());
}

/**
 * Decides whether P_Λ(X) = Σ λ_{i,j} P_i(L_j(X)) vanishes identically from
 * the normal forms of its rows, then measures the exact bias. ZERO must come
 * with bias 1; NONZERO with bias < ε when the factor is certified ε-uniform.
 */
inline NearOrthoVerdict near_orthogonality_check(const PolyFactor& B, const FormSystem& S, const LambdaMatrix& lam,
                                                 double epsilon, u64 budget = kDefaultBudget) {
  if (lam.rows() != B.complexity() || lam.cols() != S.size())
    throw std::invalid_argument("near_orthogonality_check: Λ must be C x m");
  for (const auto& P : B.polys())
    if (!is_homogeneous(P, budget).homogeneous) throw std::invalid_argument("near_orthogonality_check: factor has a non-homogeneous polynomial");
  NearOrthoVerdict v;
  v.epsilon = epsilon;
  v.certified = B.certificate() && B.certificate()->certified && B.certificate()->epsilon <= epsilon;
  v.predicted_zero = true;
  for (std::size_t i = 0; i < B.complexity(); ++i) {
    const unsigned d = B[i].degree(), k = B[i].depth();
    FormalSum fs(B.prime(), d, k, S.arity());
    for (std::size_t j = 0; j < S.size(); ++j) fs.add(lam(i, j), S[j]);
    const FormalSum nf = canonical_rewrite(fs);
    v.row_normal_forms.push_back(nf.str());
    v.predicted_zero = v.predicted_zero && nf.empty();
  }
  const FactorOnForms ev(B, S, budget);
  v.bias = lambda_bias(ev, B.prime(), lam, &v.identically_zero);
  if (v.predicted_zero)
    v.consistent = v.identically_zero && v.bias == 1.0;
  else
    v.consistent = !v.identically_zero && (!v.certified || v.bias < epsilon);
  return v;
}

// ---------------------------------------------------------------------------
// Equidistribution

struct EquidistReport {
  u64 K = 1;                   // ∏ |Φ_i|
  u64 tuples = 0;              // |(F^n)^ℓ|
  u64 observed_cells = 0;
  u64 inconsistent_mass = 0;   // number of X landing outside ∏ Φ_i
  double max_deviation = 0.0;  // max over consistent cells of |Pr - 1/K|
  double epsilon = 0.0;
  bool passed = false;
  std::vector<u64> phi_sizes;
  std::map<std::vector<u64>, u64> histogram;  // cell (row-major b_{i,j}) -> count
};

/**
 * Exact joint distribution of the C x m matrix (P_i(L_j(X))) over all X,
 * compared with the uniform distribution 1/K on the consistent cells.
 */
inline EquidistReport equidist_experiment(const PolyFactor& B, const FormSystem& S, double epsilon,
                                          u64 budget = kDefaultBudget) {
  const unsigned p = B.prime();
  EquidistReport rep;
  rep.epsilon = epsilon;
  std::vector<TupleGroup> phis;
  for (const auto& P : B.polys()) {
    phis.push_back(phi_from_duality(phi_perp_symbolic(P.degree(), P.depth(), S, budget)).group);
    rep.phi_sizes.push_back(phis.back().size());
    rep.K *= phis.back().size();
  }
  const FactorOnForms ev(B, S, budget);
  rep.tuples = ev.tuples();
  const u64 top = detail::checked_pow(p, ev.level() + 1);
  std::vector<u64> cell(B.complexity() * S.size());
  for (u64 x = 0; x < ev.tuples(); ++x) {
    for (std::size_t i = 0; i < B.complexity(); ++i) {
      const u64 Mi = phis[i].modulus();
      for (std::size_t j = 0; j < S.size(); ++j) cell[i * S.size() + j] = ev.value(i, j, x) / (top / Mi);
    }
    ++rep.histogram[cell];
  }
  rep.observed_cells = rep.histogram.size();

  auto row_ok = [&](const std::vector<u64>& c, std::size_t i) {
    return phis[i].contains(std::span<const u64>(c.data() + i * S.size(), S.size()));
  };
  const double inv_k = 1.0 / static_cast<double>(rep.K);
  u64 consistent_seen = 0;
  for (const auto& [c, count] : rep.histogram) {
    bool ok = true;
    for (std::size_t i = 0; i < B.complexity(); ++i) ok = ok && row_ok(c, i);
    if (!ok) {
      rep.inconsistent_mass += count;
      continue;
    }
    ++consistent_seen;
    rep.max_deviation = std::max(rep.max_deviation, std::abs(static_cast<double>(count) / static_cast<double>(rep.tuples) - inv_k));
  }
  if (consistent_seen < rep.K) rep.max_deviation = std::max(rep.max_deviation, inv_k);  // unobserved consistent cells
  rep.passed = rep.inconsistent_mass == 0 && rep.max_deviation <= epsilon;
  return rep;
}

/// Pr[P_i(L_j(X)) = β_{i,j} for all i,j]; rejects a target whose row i lies outside Φ_i.
inline double equidist_probability(const PolyFactor& B, const FormSystem& S, const std::vector<std::vector<TorusValue>>& beta,
                                   u64 budget = kDefaultBudget) {
  if (beta.size() != B.complexity()) throw std::invalid_argument("equidist_probability: need one row per polynomial");
  const unsigned p = B.prime();
  std::vector<std::vector<u64>> target;
  for (std::size_t i = 0; i < B.complexity(); ++i) {
    const unsigned k = B[i].depth();
    const auto phi = phi_from_duality(phi_perp_symbolic(B[i].degree(), k, S, budget)).group;
    std::vector<u64> row;
    for (const auto& b : beta[i]) {
      if (b.level() > k) throw std::invalid_argument("equidist_probability: row " + std::to_string(i + 1) + " has a value outside U_{k+1}");
      row.push_back(b.numerator_at(k));
    }
    if (row.size() != S.size() || !phi.contains(row))
      throw std::invalid_argument("equidist_probability: row " + std::to_string(i + 1) + " is not consistent with the forms");
    target.push_back(std::move(row));
  }
  const FactorOnForms ev(B, S, budget);
  const u64 top = detail::checked_pow(p, ev.level() + 1);
  u64 hits = 0;
  for (u64 x = 0; x < ev.tuples(); ++x) {
    bool ok = true;
    for (std::size_t i = 0; i < B.complexity() && ok; ++i) {
      const u64 Mi = detail::checked_pow(p, B[i].depth() + 1);
      for (std::size_t j = 0; j < S.size() && ok; ++j) ok = ev.value(i, j, x) / (top / Mi) == target[i][j];
    }
    hits += ok;
  }
  return static_cast<double>(hits) / static_cast<double>(ev.tuples());
}

}  // namespace hofa
