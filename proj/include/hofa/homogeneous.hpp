#pragma once

/**
 * @file homogeneous.hpp
 * @brief Homogeneous non-classical polynomials.
 *
 * P is homogeneous when P(ζx) = σ·P(x) for the fixed generator ζ of F_p^*.
 * For degree d and depth k the constant is forced to be σ(d,k), see
 * teichmuller_sigma(). The univariate basis h_0, h_1, ... is built by the
 * inductive construction: h_d corrects |x|^s/p^{j+1} by lower basis
 * elements of other scaling classes. Multivariate monomials are lifted by
 * multiplying the Z_{p^{j+1}}-valued versions of univariate elements.
 */

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "hofa/polynomial.hpp"

namespace hofa {

struct HomogeneityWitness {
  bool homogeneous = false;
  CyclicInt sigma;  // σ(deg P, depth P)
  std::optional<Point> counterexample;
};

/// Tests P(ζx) = σ(deg P, depth P)·P(x) at every point.
inline HomogeneityWitness is_homogeneous(const NCPoly& P, u64 budget = kDefaultBudget) {
  if (!P.shift().is_zero() && !P.is_constant())
    throw std::invalid_argument("is_homogeneous: polynomial has a nonzero shift");
  const unsigned p = P.prime();
  const PointSpace space(p, P.dim());
  if (space.size() > budget) throw BudgetExceeded("homogeneity check", space.size(), budget);
  HomogeneityWitness w;
  w.sigma = teichmuller_sigma(p, P.degree(), P.depth());
  const FunctionTable t = P.table();
  const unsigned zeta = primitive_root(p);
  for (u32 x = 0; x < space.size(); ++x) {
    const TorusValue lhs = t.at(space.scale(zeta, x));
    const TorusValue rhs = static_cast<i64>(w.sigma.value()) * t.at(x);
    if (lhs != rhs) {
      w.counterexample = space.point(x);
      return w;
    }
  }
  w.homogeneous = true;
  return w;
}

struct BasisElement {
  unsigned degree = 0;
  unsigned depth = 0;
  NCPoly poly{2, 1};
  CyclicInt sigma;  // h(ζx) = σ h(x), σ ∈ Z_{p^{depth+1}}
};

/// Univariate homogeneous basis h_0..h_d, extended on demand.
class HomogeneousBasis {
 public:
  explicit HomogeneousBasis(unsigned p, unsigned d = 0) : p_(p), zeta_(primitive_root(p)) {
    require_prime(p);
    extend_to(d);
  }

  unsigned prime() const { return p_; }
  unsigned max_degree() const { return static_cast<unsigned>(elems_.size()) - 1; }
  /// Over F_2 the generator is 1 and every polynomial is homogeneous with σ = 1.
  bool degenerate() const { return p_ == 2; }
  const std::vector<BasisElement>& elements() const { return elems_; }

  const BasisElement& element(unsigned e) {
    extend_to(e);
    return elems_[e];
  }

  void extend_to(unsigned d) {
    while (elems_.empty() || max_degree() < d) push_next();
  }

  /// Coefficients (e -> b_e) expressing a zero-shift univariate P through the basis, top down.
  std::map<unsigned, u64> coordinates(NCPoly P) {
    if (P.dim() != 1) throw std::invalid_argument("coordinates: univariate polynomial expected");
    std::map<unsigned, u64> out;
    if (!P.shift().is_zero()) {
      // only h_0 is nonzero at 0
      const TorusValue s = P.shift();
      if (s.level() != 0) throw std::invalid_argument("coordinates: shift outside U_1 cannot be expressed");
      const u64 c = s.numerator();
      out[0] = c;
      P = P - static_cast<i64>(c) * element(0).poly;
    }
    while (!P.is_zero()) {
      const auto [s, j, c] = top_term(P);
      const unsigned e = s + (p_ - 1) * j;
      out[e] = c;
      P = P - static_cast<i64>(c) * element(e).poly;
    }
    return out;
  }

 private:
  struct Top {
    unsigned s, j, c;
  };

  Top top_term(const NCPoly& P) const {
    Top best{0, 0, 0};
    unsigned best_deg = 0;
    for (const auto& m : P.terms()) {
      const unsigned dg = m.degree(p_);
      if (dg >= best_deg) {
        best = {m.exponents[0], m.depth, m.coefficient};
        best_deg = dg;
      }
    }
    return best;
  }

  void push_next() {
    const unsigned e = elems_.empty() ? 0 : max_degree() + 1;
    BasisElement b;
    b.degree = e;
    if (e == 0) {
      b.poly = NCPoly::constant(p_, 1, TorusValue(p_, 1, 0));
      b.sigma = CyclicInt(p_, 1, 1);
    } else if (e <= p_ - 1) {
      b.poly = NCPoly::monomial(p_, {static_cast<std::uint8_t>(e)}, 0, 1);
      b.sigma = CyclicInt(p_, 1, static_cast<i64>(detail::powmod(zeta_, e, p_)));
    } else {
      const unsigned j = (e - 1) / (p_ - 1);
      const unsigned s = e - j * (p_ - 1);
      build_higher(b, s, j);
    }
    elems_.push_back(std::move(b));
  }

  // h_e for e = s + (p-1)j, j >= 1.
  void build_higher(BasisElement& b, unsigned s, unsigned j) {
    const u64 mod = detail::checked_pow(p_, j + 1);
    const u64 zs = detail::powmod(zeta_, s, u64{1} << 62);  // |ζ|^s as an integer
    // f(x) = |ζx|^s/p^{j+1} - |ζ|^s |x|^s/p^{j+1}
    std::vector<u64> f(p_);
    for (unsigned x = 0; x < p_; ++x) {
      const u64 zx = (u64{zeta_} * x) % p_;
      const u64 a = detail::powmod(zx, s, mod);
      const u64 bsub = detail::mulmod(zs % mod, detail::powmod(x, s, mod), mod);
      f[x] = (a + mod - bsub) % mod;
    }
    NCPoly rest = interpolate(FunctionTable(p_, 1, j, std::move(f)));
    assert(rest.degree() < s + (p_ - 1) * j);

    u64 A = zs % mod;
    std::map<unsigned, u64> bcoef;
    while (!rest.is_zero()) {
      const auto [s2, j2, c] = top_term(rest);
      if (s2 == s) {
        // a_ℓ |x|^s / p^ℓ with ℓ = j2+1 contributes a_ℓ p^{j+1-ℓ} to A
        A = (A + detail::mulmod(c, detail::checked_pow(p_, j - j2), mod)) % mod;
        rest = rest - NCPoly::monomial(p_, {static_cast<std::uint8_t>(s)}, j2, c);
      } else {
        const unsigned e2 = s2 + (p_ - 1) * j2;
        bcoef[e2] = c;
        rest = rest - static_cast<i64>(c) * elems_[e2].poly;
      }
    }

    NCPoly h = NCPoly::monomial(p_, {static_cast<std::uint8_t>(s)}, j, 1);
    for (const auto& [e2, c] : bcoef) {
      const BasisElement& lower = elems_[e2];
      const u64 m2 = lower.sigma.modulus();
      const u64 diff = (lower.sigma.value() + m2 - A % m2) % m2;
      const auto inv = detail::inverse_mod(diff, m2);
      if (!inv) throw std::logic_error("homogeneous basis: σ_e - A not invertible");
      const u64 coef = detail::mulmod(c % m2, *inv, m2);
      h = h - static_cast<i64>(coef) * lower.poly;
    }
    b.depth = j;
    b.sigma = CyclicInt(p_, j + 1, static_cast<i64>(A));
    b.poly = std::move(h);
    const CyclicInt expected = teichmuller_sigma(p_, s + (p_ - 1) * j, j);
    if (!(expected == b.sigma) || !is_homogeneous(b.poly).homogeneous || b.poly.degree() != b.degree)
      throw std::logic_error("homogeneous basis: construction failed at degree " + std::to_string(b.degree));
  }

  unsigned p_;
  unsigned zeta_;
  std::vector<BasisElement> elems_;
};

inline HomogeneousBasis univariate_basis(unsigned p, unsigned d) { return HomogeneousBasis(p, d); }

/**
 * Homogeneous polynomial whose only top-degree monomial is
 * |x_1|^{e_1}⋯|x_n|^{e_n}/p^{j+1}: the product over the support of the
 * Z_{p^{j+1}}-valued lifts of h_{e_i + (p-1)j}, divided by p^{j+1}.
 */
inline NCPoly homogeneous_lift(HomogeneousBasis& basis, const Exponents& e, unsigned j) {
  const unsigned p = basis.prime();
  const unsigned n = static_cast<unsigned>(e.size());
  const PointSpace space(p, n);
  const u64 mod = detail::checked_pow(p, j + 1);
  std::vector<std::vector<u64>> G;
  std::vector<unsigned> support;
  for (unsigned i = 0; i < n; ++i) {
    if (e[i] == 0) continue;
    const auto& h = basis.element(e[i] + (p - 1) * j).poly;
    std::vector<u64> g(p);
    for (unsigned x = 0; x < p; ++x) {
      const Point pt{x};
      g[x] = h.eval(pt).numerator_at(j) % mod;
    }
    G.push_back(std::move(g));
    support.push_back(i);
  }
  if (support.empty()) throw std::invalid_argument("homogeneous_lift: monomial has no variables");
  std::vector<u64> F(space.size());
  for (u32 idx = 0; idx < space.size(); ++idx) {
    u64 v = 1;
    for (std::size_t t = 0; t < support.size() && v != 0; ++t) v = detail::mulmod(v, G[t][space.digit(idx, support[t])], mod);
    F[idx] = v;
  }
  return interpolate(FunctionTable(p, n, j, std::move(F)));
}

struct HomogeneousComponent {
  u64 coefficient = 0;
  NCPoly poly;
};

/// Writes a zero-shift P as Σ c_i H_i with every H_i homogeneous.
inline std::vector<HomogeneousComponent> homogeneous_decompose(const NCPoly& P) {
  if (!P.shift().is_zero()) throw std::invalid_argument("homogeneous_decompose: polynomial has a nonzero shift");
  if (P.is_zero()) return {};
  if (is_homogeneous(P).homogeneous) return {{1, P}};
  const unsigned p = P.prime();
  HomogeneousBasis basis(p, 0);
  std::vector<HomogeneousComponent> out;
  NCPoly rest = P;
  while (!rest.is_zero()) {
    const auto terms = rest.terms();
    const Monomial* top = &terms.front();
    for (const auto& m : terms)
      if (m.degree(p) >= top->degree(p)) top = &m;
    NCPoly H = homogeneous_lift(basis, top->exponents, top->depth);
    rest = rest - static_cast<i64>(top->coefficient) * H;
    out.push_back({top->coefficient, std::move(H)});
  }
  return out;
}

/**
 * Random homogeneous polynomials of exact degree d and depth k on F_p^n.
 * Draws Σ c_m·lift(m) over the monomials m with degree ≤ d, depth ≤ k and
 * degree ≡ d (mod p-1), with c_m uniform in Z_{p^{depth(m)+1}}, and rejects
 * until degree and depth are exact.
 */
class HomogeneousSampler {
 public:
  HomogeneousSampler(unsigned p, unsigned d, unsigned k, unsigned n) : p_(p), d_(d), k_(k), n_(n) {
    require_prime(p);
    if (d < k * (p - 1) + 1 || d - k * (p - 1) > n * (p - 1))
      throw std::invalid_argument("homogeneous_sample: no polynomial of degree " + std::to_string(d) + " and depth " +
                                  std::to_string(k) + " in " + std::to_string(n) + " variables over F_" +
                                  std::to_string(p));
    HomogeneousBasis basis(p, 0);
    const PointSpace ex(p, n);  // exponent vectors enumerate like points
    for (unsigned j = 0; j <= k; ++j)
      for (u32 idx = 1; idx < ex.size(); ++idx) {
        Exponents e(n);
        unsigned sum = 0;
        for (unsigned i = 0; i < n; ++i) sum += (e[i] = static_cast<std::uint8_t>(ex.digit(idx, i)));
        const unsigned deg = sum + j * (p - 1);
        if (deg > d || (d - deg) % (p - 1) != 0) continue;
        lifts_.push_back({homogeneous_lift(basis, e, j), detail::checked_pow(p, j + 1)});
      }
  }

  unsigned degree() const { return d_; }
  unsigned depth() const { return k_; }

  template <class Rng>
  std::optional<NCPoly> try_draw(Rng& rng) const {
    NCPoly P(p_, n_);
    for (const auto& [lift, mod] : lifts_) {
      std::uniform_int_distribution<u64> pick(0, mod - 1);
      const u64 c = pick(rng);
      if (c != 0) P = P + static_cast<i64>(c) * lift;
    }
    if (P.degree() != d_ || P.depth() != k_) return std::nullopt;
    return P;
  }

  template <class Rng>
  NCPoly draw(Rng& rng, u64 budget = 10'000) const {
    for (u64 attempt = 0; attempt < budget; ++attempt)
      if (auto P = try_draw(rng)) return *P;
    throw BudgetExceeded("homogeneous sampling found no polynomial of exact degree and depth", budget + 1, budget);
  }

 private:
  unsigned p_, d_, k_, n_;
  std::vector<std::pair<NCPoly, u64>> lifts_;
};

inline NCPoly homogeneous_sample(unsigned p, unsigned d, unsigned k, unsigned n, u64 seed, u64 budget = 10'000) {
  std::mt19937_64 rng(seed);
  return HomogeneousSampler(p, d, k, n).draw(rng, budget);
}

}  // namespace hofa
