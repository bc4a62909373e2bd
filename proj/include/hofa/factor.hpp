#pragma once

// Polynomial factors B = (P_1..P_C): the partition of F_p^n into atoms
// {x : (P_1(x),..,P_C(x)) = b}, conditional expectations over that partition
// and the ε-uniformity certificate over all nonzero combinations Σ λ_i P_i.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hofa/gowers.hpp"

namespace hofa {

using AtomKey = std::vector<TorusValue>;

struct UniformityWitness {
  std::vector<u64> lambda;
  unsigned d = 0;
  double value = 0.0;
};

struct UniformityCertificate {
  double epsilon = 0.0;
  bool certified = false;
  double max_value = 0.0;
  u64 combinations = 0;
  std::vector<UniformityWitness> witnesses;  // worst combinations first
  std::optional<UniformityWitness> violation;
};

class PolyFactor {
 public:
  PolyFactor(unsigned p, unsigned n, std::vector<NCPoly> polys = {}) : p_(p), n_(n), polys_(std::move(polys)) {
    require_prime(p);
    for (const auto& P : polys_)
      if (P.prime() != p || P.dim() != n) throw std::invalid_argument("PolyFactor: polynomial over a different space");
  }

  unsigned prime() const { return p_; }
  unsigned dim() const { return n_; }
  /// |B| = C.
  std::size_t complexity() const { return polys_.size(); }
  const std::vector<NCPoly>& polys() const { return polys_; }
  const NCPoly& operator[](std::size_t i) const { return polys_[i]; }

  std::vector<unsigned> degrees() const {
    std::vector<unsigned> r;
    for (const auto& P : polys_) r.push_back(P.degree());
    return r;
  }
  std::vector<unsigned> depths() const {
    std::vector<unsigned> r;
    for (const auto& P : polys_) r.push_back(P.depth());
    return r;
  }
  /// Moduli p^{k_i+1} of the λ_i.
  std::vector<u64> moduli() const {
    std::vector<u64> r;
    for (const auto& P : polys_) r.push_back(detail::checked_pow(p_, P.depth() + 1));
    return r;
  }
  /// ∏ p^{k_i+1}, the bound on the number of atoms.
  u64 atom_bound() const {
    u64 b = 1;
    for (auto m : moduli()) b *= m;
    return b;
  }

  const std::optional<UniformityCertificate>& certificate() const { return cert_; }
  void attach(UniformityCertificate c) { cert_ = std::move(c); }

  std::string str() const {
    std::string s;
    for (const auto& P : polys_) s += to_string(P) + "\n";
    return s;
  }

  /// One polynomial per line; blank lines and '#' comments are skipped.
  static PolyFactor parse(unsigned p, unsigned n, std::string_view text) {
    std::vector<NCPoly> polys;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      auto line = text.substr(start, nl - start);
      while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.remove_suffix(1);
      std::size_t lead = 0;
      while (lead < line.size() && line[lead] == ' ') ++lead;
      if (lead < line.size() && line[lead] != '#') polys.push_back(parse_poly(p, line, n));
      start = nl + 1;
    }
    if (n == 0) {
      unsigned nn = 1;
      for (const auto& P : polys) nn = std::max(nn, P.dim());
      if (std::any_of(polys.begin(), polys.end(), [&](const NCPoly& P) { return P.dim() != nn; }))
        return parse(p, nn, text);
      n = nn;
    }
    return PolyFactor(p, n, std::move(polys));
  }

 private:
  unsigned p_;
  unsigned n_;
  std::vector<NCPoly> polys_;
  std::optional<UniformityCertificate> cert_;
};

inline AtomKey atom_of(const PolyFactor& B, std::span<const unsigned> x) {
  if (x.size() != B.dim()) throw std::invalid_argument("atom_of: point dimension mismatch");
  AtomKey key;
  for (const auto& P : B.polys()) key.push_back(P.eval(x));
  return key;
}

/// Atom keys of every point, by point index.
inline std::vector<AtomKey> atom_map(const PolyFactor& B, u64 budget = kDefaultBudget) {
  const PointSpace space(B.prime(), B.dim());
  const u64 work = u64{space.size()} * std::max<std::size_t>(B.complexity(), 1);
  if (work > budget) throw BudgetExceeded("atom enumeration", work, budget);
  std::vector<FunctionTable> tables;
  for (const auto& P : B.polys()) tables.push_back(P.table());
  std::vector<AtomKey> keys(space.size());
  for (u32 i = 0; i < space.size(); ++i)
    for (const auto& t : tables) keys[i].push_back(t.at(i));
  return keys;
}

/// E[f|B](x) = average of f over the atom containing x.
inline ComplexTable conditional_expectation(const ComplexTable& f, const PolyFactor& B, u64 budget = kDefaultBudget) {
  if (f.prime() != B.prime() || f.dim() != B.dim()) throw std::invalid_argument("conditional_expectation: space mismatch");
  const auto keys = atom_map(B, budget);
  std::map<AtomKey, std::pair<std::complex<double>, u64>> acc;
  for (u32 i = 0; i < keys.size(); ++i) {
    auto& [s, c] = acc[keys[i]];
    s += f[i];
    ++c;
  }
  std::vector<std::complex<double>> out(f.size());
  for (u32 i = 0; i < keys.size(); ++i) {
    const auto& [s, c] = acc.at(keys[i]);
    out[i] = s / static_cast<double>(c);
  }
  return ComplexTable(f.prime(), f.dim(), std::move(out));
}

struct AtomCensus {
  std::map<AtomKey, u64> sizes;
  u64 bound = 1;
  std::size_t count() const { return sizes.size(); }
  bool within_bound() const { return sizes.size() <= bound; }
};

inline AtomCensus atom_census(const PolyFactor& B, u64 budget = kDefaultBudget) {
  AtomCensus c;
  c.bound = B.atom_bound();
  for (auto& k : atom_map(B, budget)) ++c.sizes[std::move(k)];
  return c;
}

/**
 * Checks ‖e(Σ λ_i P_i)‖_{U^d} < ε for every λ with 0 ≤ λ_i < p^{k_i+1},
 * λ ≠ 0, where d = max_i deg(λ_i P_i).
 */
inline UniformityCertificate factor_uniformity(const PolyFactor& B, double epsilon, u64 budget = kDefaultBudget,
                                               std::size_t keep_witnesses = 3) {
  UniformityCertificate cert;
  cert.epsilon = epsilon;
  const auto mods = B.moduli();
  const u64 total = B.atom_bound();
  if (total > budget) throw BudgetExceeded("factor uniformity combinations", total, budget);
  std::vector<u64> lambda(mods.size(), 0);
  for (u64 code = 1; code < total; ++code) {
    u64 c = code;
    for (std::size_t i = 0; i < mods.size(); ++i) {
      lambda[i] = c % mods[i];
      c /= mods[i];
    }
    NCPoly Q(B.prime(), B.dim());
    unsigned d = 0;
    for (std::size_t i = 0; i < mods.size(); ++i) {
      if (lambda[i] == 0) continue;
      const NCPoly term = static_cast<i64>(lambda[i]) * B[i];
      d = std::max(d, term.degree());
      Q = Q + term;
    }
    d = std::max(d, 1U);
    const double value = gowers_norm_exact(Q.table(), d, budget).norm;
    ++cert.combinations;
    UniformityWitness w{lambda, d, value};
    cert.max_value = std::max(cert.max_value, value);
    if (value >= epsilon && !cert.violation) cert.violation = w;
    cert.witnesses.push_back(std::move(w));
    std::stable_sort(cert.witnesses.begin(), cert.witnesses.end(),
                     [](const UniformityWitness& a, const UniformityWitness& b) { return a.value > b.value; });
    if (cert.witnesses.size() > keep_witnesses) cert.witnesses.resize(keep_witnesses);
  }
  cert.certified = !cert.violation.has_value();
  return cert;
}

}  // namespace hofa
