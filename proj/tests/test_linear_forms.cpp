#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "hofa/experiment.hpp"
#include "hofa/homogeneous.hpp"
#include "hofa/linear_forms.hpp"

using namespace hofa;
using cplx = std::complex<double>;

namespace {

FormSystem sys(unsigned p, const char* s) { return FormSystem::parse(p, s); }
LinearForm form(unsigned p, std::vector<unsigned> c) { return LinearForm(p, std::move(c)); }

// random polynomial of degree <= d in n variables, optional random shift
NCPoly random_poly(unsigned p, unsigned n, unsigned d, std::mt19937_64& rng, bool shift) {
  NCPoly P(p, n);
  std::vector<std::uint8_t> e(n, 0);
  while (true) {
    unsigned s = 0;
    for (auto v : e) s += v;
    for (unsigned j = 0; s >= 1 && s + j * (p - 1) <= d; ++j)
      P = P + NCPoly::monomial(p, Exponents(e.begin(), e.end()), j, static_cast<i64>(rng() % p));
    std::size_t i = 0;
    while (i < n && e[i] == p - 1) e[i++] = 0;
    if (i == n) break;
    ++e[i];
  }
  if (shift) P = P + NCPoly::constant(p, n, TorusValue(p, static_cast<i64>(rng() % (p * p)), 1));
  return P;
}

// every vector in the F_p-span of the given forms
std::set<std::vector<unsigned>> span_of(unsigned p, const std::vector<LinearForm>& fs, std::size_t ell) {
  std::set<std::vector<unsigned>> out{std::vector<unsigned>(ell, 0)};
  for (const auto& f : fs) {
    std::set<std::vector<unsigned>> next;
    for (const auto& v : out)
      for (unsigned c = 0; c < p; ++c) {
        auto w = v;
        for (std::size_t j = 0; j < ell; ++j) w[j] = (w[j] + c * f[j]) % p;
        next.insert(w);
      }
    out = std::move(next);
  }
  return out;
}

// minimum over set partitions of the other indices, by brute force
unsigned brute_cs(const FormSystem& S) {
  const unsigned p = S.prime();
  const std::size_t m = S.size();
  unsigned worst = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) others.push_back(j);
    const std::vector<unsigned> target(S[i].coeffs().begin(), S[i].coeffs().end());
    unsigned best = static_cast<unsigned>(m);
    std::vector<std::size_t> label(others.size(), 0);
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t pos, std::size_t used) {
      if (pos == others.size()) {
        for (std::size_t c = 0; c < used; ++c) {
          std::vector<LinearForm> cls;
          for (std::size_t q = 0; q < others.size(); ++q)
            if (label[q] == c) cls.push_back(S[others[q]]);
          if (span_of(p, cls, S.arity()).contains(target)) return;
        }
        best = std::min<unsigned>(best, static_cast<unsigned>(used));
        return;
      }
      for (std::size_t c = 0; c <= used; ++c) {
        label[pos] = c;
        go(pos + 1, std::max(used, c + 1));
      }
    };
    if (others.empty()) best = 1;
    else go(0, 0);
    worst = std::max(worst, best - 1);
  }
  return worst;
}

// Σ c_i L_i(x)^e vanishes as a function for some c ≠ 0 (faithful when e < p)
bool power_functions_dependent(const FormSystem& S, unsigned e) {
  const unsigned p = S.prime();
  const std::size_t m = S.size(), ell = S.arity();
  const u64 nc = detail::checked_pow(p, static_cast<unsigned>(m));
  const u64 nx = detail::checked_pow(p, static_cast<unsigned>(ell));
  for (u64 code = 1; code < nc; ++code) {
    bool vanishes = true;
    for (u64 xi = 0; xi < nx && vanishes; ++xi) {
      u64 acc = 0, cc = code;
      for (std::size_t i = 0; i < m; ++i, cc /= p) {
        u64 v = 0, xx = xi;
        for (std::size_t j = 0; j < ell; ++j, xx /= p) v += S[i][j] * (xx % p);
        acc += (cc % p) * detail::powmod(v % p, e, p);
      }
      vanishes = acc % p == 0;
    }
    if (vanishes) return true;
  }
  return false;
}

TorusValue eval_at(const FunctionTable& t, u32 idx) { return t.at(idx); }

}  // namespace

TEST(TensorPower, Examples) {
  EXPECT_EQ(tensor_power(form(3, {1, 2}), 2), (std::vector<unsigned>{1, 2, 1}));
  EXPECT_EQ(tensor_power(form(3, {1, 0}), 3), (std::vector<unsigned>{1, 0, 0, 0}));
  EXPECT_EQ(tensor_power(form(5, {1, 3}), 2), (std::vector<unsigned>{1, 3, 4}));
}

TEST(TensorPower, RankProfileExamples) {
  const auto ap4 = sys(5, "1,0;1,1;1,2;1,3");
  const auto r2 = tensor_rank(ap4, 2);
  EXPECT_FALSE(r2.independent);
  ASSERT_EQ(r2.witness.size(), 4u);
  // proportional to (2,4,1,3)
  const std::vector<unsigned> ref{2, 4, 1, 3};
  bool proportional = false;
  for (unsigned c = 1; c < 5; ++c) {
    bool ok = true;
    for (int i = 0; i < 4; ++i) ok = ok && r2.witness[i] == ref[i] * c % 5;
    proportional = proportional || ok;
  }
  EXPECT_TRUE(proportional);
  EXPECT_TRUE(tensor_rank(ap4, 3).independent);
  EXPECT_TRUE(tensor_rank(sys(2, "1,0;0,1;1,1"), 2).independent);
  const auto prof = tensor_rank_profile(ap4, 3);
  ASSERT_EQ(prof.size(), 3u);
  EXPECT_EQ(prof[1].rank, 3u);
}

TEST(TensorPower, WitnessesAnnihilateAndAgreeWithFunctionOracle) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 60; ++t) {
    const unsigned p = 5;
    const std::size_t m = 2 + rng() % 3, ell = 1 + rng() % 2;
    std::vector<LinearForm> fs;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<unsigned> c(ell);
      for (auto& v : c) v = static_cast<unsigned>(rng() % p);
      fs.emplace_back(p, c);
    }
    const FormSystem S(p, fs);
    for (unsigned d = 1; d <= 3; ++d) {
      const auto r = tensor_rank(S, d);
      EXPECT_EQ(!r.independent, power_functions_dependent(S, d)) << S.str() << " d=" << d;
      if (!r.independent) {
        const auto len = tensor_power(S[0], d).size();
        for (std::size_t row = 0; row < len; ++row) {
          u64 acc = 0;
          for (std::size_t i = 0; i < m; ++i) acc += r.witness[i] * tensor_power(S[i], d)[row];
          EXPECT_EQ(acc % p, 0u);
        }
      }
    }
  }
}

TEST(Complexity, CsExamples) {
  EXPECT_EQ(cs_complexity(sys(5, "1,2")).s, 0u);
  EXPECT_EQ(cs_complexity(sys(5, "1,0;0,1")).s, 0u);
  EXPECT_EQ(cs_complexity(sys(5, "1,0;1,1;1,2")).s, 1u);
  EXPECT_EQ(cs_complexity(sys(5, "1,0;1,1;1,2;1,3")).s, 2u);
  EXPECT_THROW(cs_complexity(sys(5, "1,2;2,4")), std::invalid_argument);
}

TEST(Complexity, CsMatchesBruteForceAndBound) {
  std::mt19937_64 rng(42);
  int tested = 0;
  while (tested < 60) {
    const unsigned p = (rng() % 2) ? 3 : 5;
    const std::size_t m = 2 + rng() % 4, ell = 2 + rng() % 2;
    std::vector<LinearForm> fs;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<unsigned> c(ell);
      for (auto& v : c) v = static_cast<unsigned>(rng() % p);
      fs.emplace_back(p, c);
    }
    const FormSystem S(p, fs);
    if (!S.pairwise_independent()) continue;
    ++tested;
    const auto cs = cs_complexity(S);
    EXPECT_EQ(cs.s, brute_cs(S)) << S.str();
    EXPECT_LE(cs.s, m - 2) << S.str();
    // certificates: each class span avoids L_i
    for (std::size_t i = 0; i < m; ++i) {
      const std::vector<unsigned> target(S[i].coeffs().begin(), S[i].coeffs().end());
      for (const auto& cls : cs.per_index[i].classes) {
        std::vector<LinearForm> members;
        for (auto j : cls) members.push_back(S[j]);
        EXPECT_FALSE(span_of(p, members, ell).contains(target));
      }
    }
  }
}

TEST(Complexity, TrueComplexityExamples) {
  EXPECT_EQ(true_complexity(sys(5, "1,0;1,1;1,2")), 1u);
  EXPECT_EQ(true_complexity(sys(5, "1,0;1,1;1,2;1,3")), 2u);
  // independent forms: U^1 already controls the count
  EXPECT_EQ(true_complexity(sys(5, "1,0;0,1")), 0u);
  EXPECT_EQ(true_complexity(sys(2, "1,0,0;0,1,0;0,0,1")), 0u);
  EXPECT_THROW(true_complexity(sys(3, "1,1;2,2")), std::invalid_argument);
}

TEST(Complexity, TrueAtMostCs) {
  std::mt19937_64 rng(43);
  int tested = 0;
  while (tested < 60) {
    const unsigned p = 5;
    const std::size_t m = 2 + rng() % 4, ell = 2 + rng() % 2;
    std::vector<LinearForm> fs;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<unsigned> c(ell);
      for (auto& v : c) v = static_cast<unsigned>(rng() % p);
      fs.emplace_back(p, c);
    }
    const FormSystem S(p, fs);
    if (!S.pairwise_independent()) continue;
    ++tested;
    const unsigned tc = true_complexity(S);
    EXPECT_LE(tc, cs_complexity(S).s);
    // minimality against the function oracle (faithful since tc + 1 <= 4 < p)
    EXPECT_FALSE(power_functions_dependent(S, tc + 1)) << S.str();
    if (tc > 0) {
      EXPECT_TRUE(power_functions_dependent(S, tc)) << S.str();
    }
  }
}

TEST(Count, Examples) {
  const auto ones = std::vector<ComplexTable>(3, ComplexTable::constant(3, 1, 1.0));
  EXPECT_NEAR(std::abs(count_operator(ones, sys(3, "1,0;1,1;1,2")) - 1.0), 0.0, 1e-12);

  const auto e3 = ComplexTable::phase_of(parse_poly(3, "1/3 x1^1").table());
  const std::vector<ComplexTable> ap3(3, e3);
  // x + (x+y) + (x+2y) = 3x + 3y vanishes mod 3, so every summand is e(0)
  EXPECT_NEAR(std::abs(count_operator(ap3, sys(3, "1,0;1,1;1,2")) - 1.0), 0.0, 1e-12);
  // a quadratic phase does cancel: Σ_x,y ω^{x²+(x+y)²+(x+2y)²} = Σ ω^{2y²} · 3
  const auto q3 = ComplexTable::phase_of(parse_poly(3, "1/3 x1^2").table());
  const std::vector<ComplexTable> ap3q(3, q3);
  EXPECT_NEAR(std::abs(count_operator(ap3q, sys(3, "1,0;1,1;1,2"))), 1.0 / std::sqrt(3.0), 1e-12);

  const auto e2 = ComplexTable::phase_of(parse_poly(2, "1/2 x1^1").table());
  const std::vector<ComplexTable> mixed{e2, ComplexTable::constant(2, 1, 1.0), ComplexTable::constant(2, 1, 1.0)};
  EXPECT_NEAR(std::abs(count_operator(mixed, sys(2, "1,0;1,1;0,1"))), 0.0, 1e-12);
}

TEST(Count, MatchesDirectSumAndMonteCarlo) {
  std::mt19937_64 rng(44);
  const PointSpace space(3, 1);
  for (int t = 0; t < 10; ++t) {
    std::vector<ComplexTable> fs;
    for (int i = 0; i < 3; ++i) fs.push_back(random_bounded_table(space, rng));
    const auto S = sys(3, "1,0;1,1;1,2");
    cplx direct = 0;
    for (u32 x = 0; x < 3; ++x)
      for (u32 y = 0; y < 3; ++y) direct += fs[0][x] * fs[1][(x + y) % 3] * fs[2][(x + 2 * y) % 3];
    direct /= 9.0;
    const cplx got = count_operator(fs, S);
    EXPECT_NEAR(std::abs(got - direct), 0.0, 1e-12);
    const auto mc = count_operator_mc(fs, S, 40000, 5 + t);
    EXPECT_LE(std::abs(mc.estimate - got), 4 * std::sqrt(2.0) * mc.std_error + 1e-9);
  }
  const std::vector<ComplexTable> big(4, ComplexTable::constant(3, 4, 1.0));
  EXPECT_THROW(count_operator(big, sys(3, "1,0;1,1;1,2;0,1"), 1000), BudgetExceeded);
}

TEST(Count, BoundedByGowersNorm) {
  std::mt19937_64 rng(45);
  const char* systems[] = {"1,0;1,1;1,2;1,3", "1,0;0,1;1,1", "1,0,0;0,1,0;1,1,0;1,1,1", "1,0;1,1;1,2"};
  for (const char* s : systems) {
    const auto S = sys(2, s);
    if (!S.pairwise_independent()) continue;
    const unsigned cs = cs_complexity(S).s;
    for (unsigned n = 1; n <= 3; ++n) {
      const PointSpace space(2, n);
      for (int t = 0; t < 5; ++t) {
        std::vector<ComplexTable> fs;
        for (std::size_t i = 0; i < S.size(); ++i) fs.push_back(random_bounded_table(space, rng));
        double mn = 1e9;
        for (const auto& f : fs) mn = std::min(mn, gowers_norm_exact(f, cs + 1).norm);
        EXPECT_LE(std::abs(count_operator(fs, S)), mn + 1e-9) << s << " n=" << n;
      }
    }
  }
}

TEST(Rewrite, ExpandExample) {
  // P(x1+x2+x3) by inclusion-exclusion at p=2, d=2
  const auto terms = expand_high_weight(form(2, {1, 1, 1}), 2);
  std::map<std::string, i64> got;
  for (const auto& t : terms) got[t.form.str()] = t.a;
  const std::map<std::string, i64> want{{"0,0,0", 1}, {"1,0,0", -1}, {"0,1,0", -1}, {"0,0,1", -1},
                                        {"1,1,0", 1}, {"1,0,1", 1}, {"0,1,1", 1}};
  EXPECT_EQ(got, want);
  const auto single = expand_high_weight(form(3, {1, 1}), 2);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].a, 1);
}

TEST(Rewrite, ExpandIsPointwiseSoundWithWeightBounds) {
  std::mt19937_64 rng(46);
  for (unsigned p : {2u, 3u})
    for (unsigned d = 1; d <= 3; ++d)
      for (int t = 0; t < 8; ++t) {
        const std::size_t ell = 1 + rng() % 3;
        std::vector<unsigned> c(ell);
        for (auto& v : c) v = static_cast<unsigned>(rng() % p);
        if (t == 0) std::fill(c.begin(), c.end(), p - 1);
        const LinearForm L(p, c);
        const auto terms = expand_high_weight(L, d);
        for (const auto& term : terms) {
          EXPECT_LE(term.form.weight(), d);
          for (std::size_t j = 0; j < ell; ++j) EXPECT_LE(term.form[j], L[j]);
        }
        const unsigned n = 1 + t % 2;
        const PointSpace space(p, n);
        const TupleSpace tuples(space, ell);
        for (int r = 0; r < 3; ++r) {
          const NCPoly P = random_poly(p, n, d, rng, true);
          const auto tab = P.table(std::max(P.value_level(), 1u));
          std::vector<u32> x;
          for (u64 i = 0; i < tuples.size(); ++i) {
            tuples.decode(i, x);
            TorusValue rhs = TorusValue::zero(p);
            for (const auto& term : terms) rhs += term.a * eval_at(tab, term.form.apply(space, x));
            ASSERT_EQ(eval_at(tab, L.apply(space, x)), rhs) << "L=" << L.str() << " P=" << to_string(P);
          }
        }
      }
}

TEST(Rewrite, NormalizeLeadingExamples) {
  const auto same = normalize_leading(form(3, {1, 1}), 2);
  ASSERT_EQ(same.size(), 1u);
  EXPECT_EQ(same[0].a, 1);
  EXPECT_EQ(same[0].c, 1u);
  const auto scaled = normalize_leading(form(3, {2}), 1);
  ASSERT_EQ(scaled.size(), 1u);
  EXPECT_EQ(scaled[0].c, 2u);
  EXPECT_EQ(scaled[0].form, form(3, {1}));
  EXPECT_THROW(normalize_leading(form(3, {0, 0}), 2), std::invalid_argument);
}

TEST(Rewrite, NormalizeLeadingIsPointwiseSound) {
  std::mt19937_64 rng(47);
  for (unsigned p : {2u, 3u})
    for (unsigned d = 1; d <= 3; ++d)
      for (int t = 0; t < 8; ++t) {
        const std::size_t ell = 1 + rng() % 3;
        std::vector<unsigned> c(ell);
        do
          for (auto& v : c) v = static_cast<unsigned>(rng() % p);
        while (std::all_of(c.begin(), c.end(), [](unsigned v) { return v == 0; }));
        if (p == 3 && d == 2 && t == 0) c = std::vector<unsigned>{2, 1};
        const LinearForm L(p, c);
        const auto terms = normalize_leading(L, d);
        for (const auto& term : terms) {
          EXPECT_EQ(term.form.leading_coefficient(), 1u);
          EXPECT_LE(term.form.weight(), d);
        }
        const unsigned n = 1 + t % 2;
        const PointSpace space(p, n);
        const TupleSpace tuples(space, L.arity());
        for (int r = 0; r < 20; ++r) {
          const NCPoly P = random_poly(p, n, d, rng, false);
          const auto tab = P.table(std::max(P.value_level(), 1u));
          std::vector<u32> x;
          for (u64 i = 0; i < tuples.size(); ++i) {
            tuples.decode(i, x);
            TorusValue rhs = TorusValue::zero(p);
            for (const auto& term : terms) rhs += term.a * eval_at(tab, space.scale(term.c, term.form.apply(space, x)));
            ASSERT_EQ(eval_at(tab, L.apply(space, x)), rhs) << "L=" << L.str() << " P=" << to_string(P);
          }
        }
      }
}

TEST(Rewrite, FormalSumRoundTrip) {
  const auto fs = FormalSum::parse(3, 3, 1, "1*(1,0) + 5*(2,1) + 8*(0,1)");
  // graded by weight, then lexicographic
  EXPECT_EQ(fs.str(), "8*(0,1) + 1*(1,0) + 5*(2,1)");
  EXPECT_EQ(FormalSum::parse(3, 3, 1, fs.str()), fs);
  EXPECT_EQ(FormalSum::parse(3, 3, 1, "4*(1,0) + 5*(1,0)").str(), "0");
  EXPECT_THROW(FormalSum::parse(3, 3, 1, "1*(1,0) + (1)"), ParseError);
  EXPECT_THROW(FormalSum::parse(3, 3, 1, "x*(1,0)"), ParseError);
  EXPECT_THROW(FormalSum(3, 2, 1, 1), std::invalid_argument);
}

TEST(Rewrite, CanonicalExamples) {
  const auto single = FormalSum::parse(3, 2, 0, "1*(1,1)");
  EXPECT_EQ(canonical_rewrite(single), single);
  EXPECT_TRUE(canonical_rewrite(FormalSum::parse(3, 1, 0, "1*(1,0) + 1*(0,1) + 2*(1,1)")).empty());
  EXPECT_EQ(canonical_rewrite(FormalSum::parse(3, 3, 1, "1*(2)")).str(), "8*(1)");
}

TEST(Rewrite, CanonicalIsSoundAndNormal) {
  std::mt19937_64 rng(48);
  const std::vector<std::array<unsigned, 3>> sigs{{2, 1, 0}, {2, 2, 0}, {2, 3, 1}, {3, 1, 0}, {3, 2, 0}, {3, 3, 1}, {3, 4, 1}};
  for (const auto& [p, d, k] : sigs)
    for (int t = 0; t < 6; ++t) {
      const std::size_t ell = 1 + rng() % 3;
      FormalSum fs(p, d, k, ell);
      const u64 mod = detail::checked_pow(p, k + 1);
      for (int i = 0; i < 3; ++i) {
        std::vector<unsigned> c(ell);
        for (auto& v : c) v = static_cast<unsigned>(rng() % p);
        fs.add(static_cast<i64>(rng() % mod), LinearForm(p, c));
      }
      const auto out = canonical_rewrite(fs);
      for (const auto& [M, a] : out.terms()) EXPECT_TRUE(is_normal_term(out, M, a)) << out.str();
      EXPECT_EQ(canonical_rewrite(out), out);
      const unsigned nmin = d - k * (p - 1) <= p - 1 ? 1 : 2;
      for (unsigned n = nmin; n <= 2; ++n) {
        const PointSpace space(p, n);
        const TupleSpace tuples(space, ell);
        for (int r = 0; r < 3; ++r) {
          const NCPoly P = homogeneous_sample(p, d, k, n, rng());
          const auto tab = P.table(k);
          std::vector<u32> x;
          for (u64 i = 0; i < tuples.size(); ++i) {
            tuples.decode(i, x);
            ASSERT_EQ(evaluate_formal_sum(fs, tab, space, x), evaluate_formal_sum(out, tab, space, x))
                << fs.str() << " -> " << out.str() << " P=" << to_string(P);
          }
        }
      }
    }
}

TEST(GowersWolf, DefaultExperimentIsConsistent) {
  GowersWolfConfig cfg;
  cfg.bound_trials = 6;
  cfg.families = 2;
  cfg.alpha_steps = 5;
  const auto r = run_gowers_wolf_experiment(cfg);
  EXPECT_EQ(r.true_complexity, 2u);
  EXPECT_EQ(r.cs_complexity, 2u);
  EXPECT_EQ(r.bound_violations, 0u);
  EXPECT_TRUE(r.monotone);
  for (const auto& pt : r.curve) {
    EXPECT_GE(pt.norm, 0.0);
    EXPECT_LE(pt.norm, 1.0 + 1e-9);
  }
  const auto again = run_gowers_wolf_experiment(cfg);
  ASSERT_EQ(again.curve.size(), r.curve.size());
  for (std::size_t i = 0; i < r.curve.size(); ++i) EXPECT_EQ(again.curve[i].count, r.curve[i].count);
}

TEST(GowersWolf, ThreeTermExampleOverF3) {
  // |E e(Q(x)) e(Q(x+y)) e(Q(x+2y))| <= ‖e(Q)‖_{U^2}
  const auto S = sys(3, "1,0;1,1;1,2");
  for (const char* q : {"1/3 x1^2", "1/3 x1^1 x2^1", "1/3 x1^2 + 1/3 x2^2"}) {
    const auto f = ComplexTable::phase_of(parse_poly(3, q, 2).table());
    const std::vector<ComplexTable> fs(3, f);
    EXPECT_LE(std::abs(count_operator(fs, S)), gowers_norm_exact(f, 2).norm + 1e-12) << q;
  }
}
