#pragma once

/**
 * @file experiment.hpp
 * @brief Counting averages against Gowers norms along a system of forms.
 *
 * Two checks. First, |E ∏ f_i(L_i(X))| <= min_i ‖f_i‖_{U^{s+1}} with s the
 * Cauchy-Schwarz complexity, on random bounded tables. Second, a family
 * f_1 = α·e(w_1 Q) + (1-α)·e(R) with Q homogeneous of degree d (the true
 * complexity), R of degree d+1, and f_j = e(w_j Q) for j >= 2, where w is a
 * dependence among the d-th tensor powers so that Σ w_j Q(L_j(X)) ≡ 0. The
 * count then tracks α while ‖f_1‖_{U^{d+1}} shrinks with α, and the report
 * records the (norm, |count|) curve.
 */

#include <algorithm>
#include <complex>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "hofa/factor_search.hpp"
#include "hofa/linear_forms.hpp"

namespace hofa {

struct GowersWolfConfig {
  unsigned p = 5;
  unsigned n = 2;
  FormSystem system = FormSystem::parse(5, "1,0;1,1;1,2;1,3");
  u64 seed = 1;
  u64 budget = kDefaultBudget;
  unsigned bound_trials = 20;       // random instances for the counting bound
  unsigned families = 4;            // independent (Q, R) draws
  unsigned alpha_steps = 10;        // α = 0, 1/steps, .., 1
  unsigned bins = 4;                // quantile bins for the trend test
};

struct CurvePoint {
  double alpha = 0.0;
  double norm = 0.0;   // ‖f_1‖_{U^{d+1}}
  double count = 0.0;  // |E ∏ f_i(L_i(X))|
};

struct GowersWolfReport {
  unsigned true_complexity = 0;
  unsigned cs_complexity = 0;
  unsigned bound_trials = 0;
  unsigned bound_violations = 0;
  double worst_bound_slack = 0.0;  // max over trials of |count| - min_i ‖f_i‖
  std::vector<unsigned> witness;   // w with Σ w_j L_j^{⊗d} = 0, empty when independent
  std::vector<CurvePoint> curve;   // sorted by norm
  std::vector<double> bin_max;     // max |count| per norm-quantile bin
  bool monotone = false;
  double spearman = 0.0;
};

inline ComplexTable random_bounded_table(const PointSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.0, 1.0), th(0.0, 2.0 * std::numbers::pi);
  std::vector<std::complex<double>> v(space.size());
  for (auto& z : v) z = std::polar(std::sqrt(r(rng)), th(rng));
  return ComplexTable(space.prime(), space.dim(), std::move(v));
}

inline double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n, mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return (saa == 0 || sbb == 0) ? 0.0 : sab / std::sqrt(saa * sbb);
}

inline GowersWolfReport run_gowers_wolf_experiment(const GowersWolfConfig& cfg) {
  const FormSystem& S = cfg.system;
  if (S.prime() != cfg.p) throw std::invalid_argument("gowers-wolf: system parsed over a different prime");
  GowersWolfReport rep;
  rep.cs_complexity = cs_complexity(S).s;
  rep.true_complexity = true_complexity(S);
  const unsigned d = rep.true_complexity;
  const unsigned s = rep.cs_complexity;
  const PointSpace space(cfg.p, cfg.n);
  std::mt19937_64 rng(cfg.seed);

  // |count| <= min_i ‖f_i‖_{U^{s+1}}
  for (unsigned t = 0; t < cfg.bound_trials; ++t) {
    std::vector<ComplexTable> fs;
    for (std::size_t i = 0; i < S.size(); ++i) fs.push_back(random_bounded_table(space, rng));
    const double count = std::abs(count_operator(fs, S, cfg.budget));
    double bound = 1.0;
    for (const auto& f : fs) bound = std::min(bound, gowers_norm_exact(f, s + 1, cfg.budget).norm);
    ++rep.bound_trials;
    rep.worst_bound_slack = t == 0 ? count - bound : std::max(rep.worst_bound_slack, count - bound);
    if (count > bound + 1e-9) ++rep.bound_violations;
  }

  // the α family
  std::vector<unsigned> w;
  if (d >= 1 && !tensor_rank(S, d).independent) {
    // prefer a dependence that involves L_1
    for (const auto& v : kernel_basis([&] {
           ModMatrix M(tensor_power(S[0], d).size(), S.size());
           for (std::size_t c = 0; c < S.size(); ++c) {
             const auto col = tensor_power(S[c], d);
             for (std::size_t r = 0; r < M.rows; ++r) M(r, c) = col[r];
           }
           return M;
         }(), cfg.p))
      if (v[0] != 0) {
        w.assign(v.begin(), v.end());
        break;
      }
  }
  rep.witness = w;
  // Σ w_j Q(L_j) ≡ 0 needs Q classical of degree 1 <= d < p
  const bool classical_ok = d >= 1 && d < cfg.p && d <= cfg.n * (cfg.p - 1);
  std::optional<HomogeneousSampler> qs;
  if (classical_ok) qs.emplace(cfg.p, d, 0, cfg.n);
  const bool have_r = (d + 1) <= cfg.n * (cfg.p - 1);
  std::optional<HomogeneousSampler> rs;
  if (have_r) rs.emplace(cfg.p, d + 1, 0, cfg.n);

  std::vector<CurvePoint> curve;
  for (unsigned fam = 0; fam < cfg.families; ++fam) {
    const FunctionTable qt = qs ? qs->draw(rng).table(0) : NCPoly(cfg.p, cfg.n).table(0);
    std::optional<FunctionTable> rt;
    if (rs) rt = rs->draw(rng).table(0);
    auto phase_of = [&](const FunctionTable& t, u64 mult) {
      std::vector<std::complex<double>> v(space.size());
      for (u32 x = 0; x < space.size(); ++x) v[x] = (static_cast<i64>(mult) * t.at(x)).phase();
      return v;
    };
    std::vector<ComplexTable> others;
    std::vector<std::complex<double>> g1;
    if (!w.empty() && classical_ok) {
      g1 = phase_of(qt, w[0]);
      for (std::size_t j = 1; j < S.size(); ++j) others.emplace_back(cfg.p, cfg.n, phase_of(qt, w[j]));
    } else {
      const auto vals = random_bounded_table(space, rng).values();
      g1.assign(vals.begin(), vals.end());
      for (std::size_t j = 1; j < S.size(); ++j) others.push_back(random_bounded_table(space, rng));
    }
    const std::vector<std::complex<double>> r1 =
        rt ? phase_of(*rt, 1) : std::vector<std::complex<double>>(space.size(), {0.0, 0.0});
    for (unsigned a = 0; a <= cfg.alpha_steps; ++a) {
      const double alpha = static_cast<double>(a) / static_cast<double>(std::max(cfg.alpha_steps, 1U));
      std::vector<std::complex<double>> f1(space.size());
      for (u32 x = 0; x < space.size(); ++x) f1[x] = alpha * g1[x] + (1.0 - alpha) * r1[x];
      std::vector<ComplexTable> fs;
      fs.emplace_back(cfg.p, cfg.n, std::move(f1));
      for (const auto& o : others) fs.push_back(o);
      CurvePoint pt;
      pt.alpha = alpha;
      pt.norm = gowers_norm_exact(fs[0], d + 1, cfg.budget).norm;
      pt.count = std::abs(count_operator(fs, S, cfg.budget));
      curve.push_back(pt);
    }
  }
  std::stable_sort(curve.begin(), curve.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.norm < b.norm; });
  rep.curve = curve;

  const std::size_t bins = std::max<std::size_t>(1, std::min<std::size_t>(cfg.bins, curve.size()));
  rep.bin_max.assign(bins, 0.0);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const std::size_t b = i * bins / curve.size();
    rep.bin_max[b] = std::max(rep.bin_max[b], curve[i].count);
  }
  rep.monotone = true;
  for (std::size_t b = 1; b < bins; ++b) rep.monotone = rep.monotone && rep.bin_max[b] + 1e-12 >= rep.bin_max[b - 1];
  std::vector<double> xs, ys;
  for (const auto& c : curve) {
    xs.push_back(c.norm);
    ys.push_back(c.count);
  }
  rep.spearman = spearman_correlation(xs, ys);
  return rep;
}

}  // namespace hofa
