#pragma once

/**
 * @file gowers.hpp
 * @brief Gowers uniformity norms and biases.
 *
 * ‖f‖_{U^d}^{2^d} = E_{x,y_1..y_d} Δ_{y_1}⋯Δ_{y_d} f(x), where
 * Δ_y f(x) = f(x+y)·conj(f(x)). The exact kernel walks the d directions
 * depth first, keeping one difference table of size N = p^n per level, so
 * it costs about N^{d+1} operations. For phases of torus-valued tables the
 * differences stay in U_{K+1} and the average is an exact integer histogram
 * that is converted to a complex number only at the end.
 */

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hofa/polynomial.hpp"

namespace hofa {

/// Integer counts of torus values a/p^{level+1}.
class PhaseHistogram {
 public:
  PhaseHistogram(unsigned p, unsigned level)
      : p_(p), level_(level), mod_(detail::checked_pow(p, level + 1)), counts_(mod_, 0) {}

  void add(u64 numerator, u64 times = 1) { counts_[numerator % mod_] += times; }
  void merge(const PhaseHistogram& o) {
    for (u64 i = 0; i < mod_; ++i) counts_[i] += o.counts_[i];
  }

  u64 total() const {
    u64 t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  /// True when every observation is the value 0.
  bool degenerate() const { return total() == counts_[0]; }

  /// E e(value). Exactly 1 when degenerate.
  std::complex<double> mean_phase() const {
    const u64 tot = total();
    if (tot == 0) return {0.0, 0.0};
    if (degenerate()) return {1.0, 0.0};
    std::complex<double> s{0.0, 0.0};
    for (u64 v = 0; v < mod_; ++v)
      if (counts_[v] != 0) s += static_cast<double>(counts_[v]) * TorusValue(p_, static_cast<i64>(v), level_).phase();
    return s / static_cast<double>(tot);
  }

  unsigned prime() const { return p_; }
  unsigned level() const { return level_; }
  std::span<const u64> counts() const { return counts_; }

 private:
  unsigned p_;
  unsigned level_;
  u64 mod_;
  std::vector<u64> counts_;
};

struct GowersResult {
  double norm = 0.0;
  double norm_pow = 0.0;  // ‖f‖^{2^d}, before taking the root
  std::string method;
  u64 budget_used = 0;
};

struct McEstimate {
  double estimate = 0.0;  // of ‖f‖^{2^d}
  double std_error = 0.0;
  u64 samples = 0;
};

namespace detail {

inline u64 gowers_cost(u64 N, unsigned d, u64 budget) {
  u64 cost = 1;
  for (unsigned i = 0; i <= d; ++i) {
    if (cost > std::numeric_limits<u64>::max() / N) throw BudgetExceeded("Gowers norm enumeration; use the Monte Carlo estimator", cost, budget);
    cost *= N;
  }
  if (cost > budget) throw BudgetExceeded("Gowers norm enumeration; use the Monte Carlo estimator", cost, budget);
  return cost;
}

inline double root_of(double pow_value, unsigned d) {
  if (pow_value <= 0.0) return 0.0;
  if (pow_value == 1.0) return 1.0;
  return std::pow(pow_value, 1.0 / static_cast<double>(u64{1} << d));
}

// Depth-first walk over (y_1..y_d): level j holds Δ_{y_1}⋯Δ_{y_j} f.
template <class T, class Diff, class Leaf>
void difference_walk(const PointSpace& space, std::vector<std::vector<T>>& levels, unsigned j, unsigned d,
                     const Diff& diff, const Leaf& leaf) {
  if (j == d) {
    leaf(levels[d]);
    return;
  }
  const u32 N = space.size();
  const auto& cur = levels[j];
  auto& next = levels[j + 1];
  for (u32 y = 0; y < N; ++y) {
    for (u32 x = 0; x < N; ++x) next[x] = diff(cur[space.add(x, y)], cur[x]);
    difference_walk(space, levels, j + 1, d, diff, leaf);
  }
}

}  // namespace detail

/// Exact ‖e(t)‖_{U^d} for a torus-valued table t.
inline GowersResult gowers_norm_exact(const FunctionTable& t, unsigned d, u64 budget = kDefaultBudget) {
  if (d < 1) throw std::invalid_argument("gowers_norm_exact: d must be >= 1");
  const PointSpace space(t.prime(), t.dim());
  const u64 cost = detail::gowers_cost(space.size(), d, budget);
  const u64 mod = t.modulus();
  std::vector<std::vector<u64>> levels(d + 1, std::vector<u64>(space.size()));
  levels[0].assign(t.numerators().begin(), t.numerators().end());
  PhaseHistogram hist(t.prime(), t.level());
  detail::difference_walk<u64>(
      space, levels, 0, d, [mod](u64 a, u64 b) { return (a + mod - b) % mod; },
      [&](const std::vector<u64>& last) {
        for (auto v : last) hist.add(v);
      });
  GowersResult r;
  r.norm_pow = hist.degenerate() ? 1.0 : std::max(0.0, hist.mean_phase().real());
  r.norm = detail::root_of(r.norm_pow, d);
  r.method = "exact";
  r.budget_used = cost;
  return r;
}

/// Exact ‖f‖_{U^d} for a bounded complex table.
inline GowersResult gowers_norm_exact(const ComplexTable& f, unsigned d, u64 budget = kDefaultBudget) {
  if (d < 1) throw std::invalid_argument("gowers_norm_exact: d must be >= 1");
  const PointSpace space(f.prime(), f.dim());
  const u64 cost = detail::gowers_cost(space.size(), d, budget);
  using C = std::complex<double>;
  std::vector<std::vector<C>> levels(d + 1, std::vector<C>(space.size()));
  levels[0].assign(f.values().begin(), f.values().end());
  C sum{0.0, 0.0};
  detail::difference_walk<C>(
      space, levels, 0, d, [](const C& a, const C& b) { return a * std::conj(b); },
      [&](const std::vector<C>& last) {
        C s{0.0, 0.0};
        for (const auto& v : last) s += v;
        sum += s;
      });
  GowersResult r;
  r.norm_pow = std::max(0.0, sum.real() / static_cast<double>(cost));
  r.norm = detail::root_of(r.norm_pow, d);
  r.method = "exact";
  r.budget_used = cost;
  return r;
}

inline GowersResult gowers_norm_exact(const NCPoly& P, unsigned d, u64 budget = kDefaultBudget) {
  return gowers_norm_exact(P.table(), d, budget);
}

/**
 * Monte Carlo estimate of ‖f‖_{U^d}^{2^d}, the mean of
 * Re ∏_{ω∈{0,1}^d} C^{d-|ω|} f(x + ω·y) over uniform (x, y). f maps a point
 * index of F_p^n to a complex number.
 */
template <class Eval>
McEstimate gowers_norm_mc(const PointSpace& space, Eval&& f, unsigned d, u64 samples, u64 seed) {
  if (samples < 1) throw std::invalid_argument("gowers_norm_mc: samples must be >= 1");
  if (d < 1 || d > 20) throw std::invalid_argument("gowers_norm_mc: d out of range");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<u32> pick(0, space.size() - 1);
  std::vector<u32> y(d);
  std::vector<u32> corner(u64{1} << d);
  double mean = 0.0, m2 = 0.0;
  for (u64 s = 0; s < samples; ++s) {
    const u32 x = pick(rng);
    for (auto& v : y) v = pick(rng);
    std::complex<double> prod{1.0, 0.0};
    corner[0] = x;
    for (u64 w = 1; w < corner.size(); ++w) {
      const unsigned low = static_cast<unsigned>(std::countr_zero(w));
      corner[w] = space.add(corner[w & (w - 1)], y[low]);
    }
    for (u64 w = 0; w < corner.size(); ++w) {
      const std::complex<double> v = f(corner[w]);
      prod *= ((d - std::popcount(w)) % 2 == 0) ? v : std::conj(v);
    }
    const double val = prod.real();
    const double delta = val - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (val - mean);
  }
  McEstimate r;
  r.estimate = mean;
  r.samples = samples;
  r.std_error = samples > 1 ? std::sqrt(std::max(0.0, m2 / static_cast<double>(samples - 1)) / static_cast<double>(samples)) : 0.0;
  return r;
}

inline McEstimate gowers_norm_mc(const ComplexTable& f, unsigned d, u64 samples, u64 seed) {
  const PointSpace space(f.prime(), f.dim());
  return gowers_norm_mc(space, [&f](u32 i) { return f[i]; }, d, samples, seed);
}

inline McEstimate gowers_norm_mc(const NCPoly& P, unsigned d, u64 samples, u64 seed) {
  const PointSpace space(P.prime(), P.dim());
  const FunctionTable t = P.table();
  return gowers_norm_mc(space, [&t](u32 i) { return t.at(i).phase(); }, d, samples, seed);
}

/// |E e(t)| over the whole table.
inline double bias(const FunctionTable& t) {
  PhaseHistogram h(t.prime(), t.level());
  for (auto v : t.numerators()) h.add(v);
  return std::abs(h.mean_phase());
}

inline double bias(const NCPoly& P, u64 budget = kDefaultBudget) {
  const u64 N = detail::checked_pow(P.prime(), P.dim());
  if (N > budget) throw BudgetExceeded("bias enumeration", N, budget);
  return bias(P.table());
}

/**
 * |E_i e(v(i))| for i in [0, domain) where v returns the numerator of a
 * value in U_{level+1}.
 */
template <class Eval>
double bias(unsigned p, unsigned level, u64 domain, Eval&& v, u64 budget = kDefaultBudget) {
  if (domain > budget) throw BudgetExceeded("bias enumeration", domain, budget);
  PhaseHistogram h(p, level);
  for (u64 i = 0; i < domain; ++i) h.add(v(i));
  return std::abs(h.mean_phase());
}

struct PolyUniformity {
  bool uniform = false;
  double value = 0.0;  // ‖e(P)‖_{U^{deg P}}
  unsigned d = 0;
};

/// Whether ‖e(P)‖_{U^{deg P}} < ε.
inline PolyUniformity poly_uniformity(const NCPoly& P, double epsilon, u64 budget = kDefaultBudget) {
  const unsigned d = P.degree();
  if (d < 1) throw std::invalid_argument("poly_uniformity: polynomial must have degree >= 1");
  const auto g = gowers_norm_exact(P.table(), d, budget);
  return {g.norm < epsilon, g.norm, d};
}

}  // namespace hofa
