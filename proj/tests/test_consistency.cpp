#include <gtest/gtest.h>

#include <random>
#include <set>

#include "hofa/consistency.hpp"
#include "hofa/factor_search.hpp"

using namespace hofa;

namespace {

FormSystem sys(unsigned p, const char* s) { return FormSystem::parse(p, s); }

std::set<std::vector<u64>> as_set(const TupleGroup& g) {
  const auto e = g.elements();
  return {e.begin(), e.end()};
}

// |E e(Σ λ_ij P_i(L_j(X)))| by direct enumeration
double brute_bias(const PolyFactor& B, const FormSystem& S, const LambdaMatrix& lam) {
  const PointSpace space(B.prime(), B.dim());
  const TupleSpace tuples(space, S.arity());
  std::vector<FunctionTable> tabs;
  for (const auto& P : B.polys()) tabs.push_back(P.table(std::max(P.value_level(), 1u)));
  std::complex<double> acc = 0;
  std::vector<u32> x;
  for (u64 t = 0; t < tuples.size(); ++t) {
    tuples.decode(t, x);
    TorusValue v = TorusValue::zero(B.prime());
    for (std::size_t i = 0; i < B.complexity(); ++i)
      for (std::size_t j = 0; j < S.size(); ++j) v += lam(i, j) * tabs[i].at(S[j].apply(space, x));
    acc += v.phase();
  }
  return std::abs(acc) / static_cast<double>(tuples.size());
}

}  // namespace

TEST(TupleGroup, ClosureAndAnnihilatorOrder) {
  std::mt19937_64 rng(51);
  for (u64 M : {2u, 3u, 4u, 9u})
    for (int t = 0; t < 10; ++t) {
      const std::size_t m = 1 + rng() % 3;
      TupleGroup g(M, m);
      const int gens = static_cast<int>(rng() % 3);
      for (int i = 0; i < gens; ++i) {
        std::vector<u64> v(m);
        for (auto& x : v) x = rng() % M;
        g.add_generator(v);
      }
      const auto elems = g.elements();
      EXPECT_TRUE(g.contains(std::vector<u64>(m, 0)));
      for (const auto& a : elems)
        for (const auto& b : elems) {
          std::vector<u64> s(m);
          for (std::size_t i = 0; i < m; ++i) s[i] = (a[i] + b[i]) % M;
          ASSERT_TRUE(g.contains(s));
        }
      const auto ann = g.annihilator();
      EXPECT_EQ(g.size() * ann.size(), g.ambient_size());
      // brute-force annihilator
      u64 count = 0;
      for (u64 c = 0; c < g.ambient_size(); ++c) {
        const auto lam = g.decode(c);
        bool ok = true;
        for (const auto& b : elems) {
          u64 s = 0;
          for (std::size_t i = 0; i < m; ++i) s += lam[i] * b[i];
          ok = ok && s % M == 0;
        }
        if (ok) {
          ++count;
          EXPECT_TRUE(ann.contains(lam));
        }
      }
      EXPECT_EQ(count, ann.size());
      EXPECT_EQ(ann.annihilator(), g);
    }
}

TEST(PhiPerp, Examples) {
  const auto A = phi_perp_symbolic(1, 0, sys(3, "1,0;0,1;1,1"));
  EXPECT_EQ(A.group.size(), 3u);
  EXPECT_TRUE(A.group.contains(std::vector<u64>{1, 1, 2}));

  for (auto [p, d, k] : {std::array<unsigned, 3>{2, 1, 0}, {2, 2, 1}, {3, 2, 0}, {3, 3, 1}})
    EXPECT_EQ(phi_perp_symbolic(d, k, sys(p, "1")).group.size(), 1u) << p << " " << d << " " << k;

  EXPECT_EQ(phi_perp_symbolic(2, 0, sys(2, "1,0;0,1;1,1")).group.size(), 1u);
  EXPECT_THROW(phi_perp_symbolic(1, 1, sys(3, "1")), std::invalid_argument);
}

TEST(PhiPerp, MembersAnnihilatePointwise) {
  // Σ λ_i P(L_i(X)) ≡ 0 for sampled homogeneous P
  std::mt19937_64 rng(52);
  const std::vector<std::array<unsigned, 3>> sigs{{2, 2, 0}, {2, 2, 1}, {3, 2, 0}, {3, 3, 1}};
  for (const auto& [p, d, k] : sigs)
    for (const char* s : {"1,0;0,1;1,1", "1,0;1,1;0,1;1,2"}) {
      if (p == 2 && std::string(s).find('2') != std::string::npos) continue;
      const auto S = sys(p, s);
      const auto A = phi_perp_symbolic(d, k, S);
      for (unsigned n = 1; n <= 2; ++n) {
        if (d - k * (p - 1) > n * (p - 1)) continue;
        const PointSpace space(p, n);
        const TupleSpace tuples(space, S.arity());
        for (int r = 0; r < 3; ++r) {
          const auto tab = homogeneous_sample(p, d, k, n, rng()).table(k);
          std::vector<u32> x;
          for (const auto& lam : A.group.elements())
            for (u64 t = 0; t < tuples.size(); ++t) {
              tuples.decode(t, x);
              TorusValue v = TorusValue::zero(p);
              for (std::size_t i = 0; i < S.size(); ++i) v += static_cast<i64>(lam[i]) * tab.at(S[i].apply(space, x));
              ASSERT_TRUE(v.is_zero()) << s;
            }
        }
      }
    }
}

TEST(PhiSampled, Examples) {
  const auto g = phi_sampled(1, 0, sys(3, "1,0;0,1;1,1"));
  EXPECT_EQ(g.group.size(), 9u);
  for (u64 t = 0; t < 3; ++t)
    for (u64 u = 0; u < 3; ++u) EXPECT_TRUE(g.group.contains(std::vector<u64>{t, u, (t + u) % 3}));
  EXPECT_TRUE(g.stable);
  EXPECT_EQ(g.provenance, "sampled");

  const auto h = phi_sampled(1, 0, sys(3, "1;2"));
  EXPECT_EQ(h.group.size(), 3u);
  EXPECT_TRUE(h.group.contains(std::vector<u64>{1, 2}));
}

TEST(PhiDuality, Examples) {
  EXPECT_EQ(phi_from_duality(Annihilator{1, 0, TupleGroup(3, 1)}).group.size(), 3u);
  EXPECT_EQ(phi_from_duality(Annihilator{1, 0, TupleGroup::whole(3, 2)}).group.size(), 1u);
  const auto phi = phi_from_duality(phi_perp_symbolic(1, 0, sys(3, "1,0;0,1;1,1")));
  EXPECT_EQ(phi.provenance, "dual-of-annihilator");
  EXPECT_EQ(as_set(phi.group), as_set(phi_sampled(1, 0, sys(3, "1,0;0,1;1,1")).group));
}

TEST(PhiDuality, AgreesWithSampling) {
  const std::vector<std::array<unsigned, 3>> sigs{{2, 1, 0}, {2, 2, 0}, {2, 2, 1}, {2, 3, 1}, {3, 1, 0}, {3, 2, 0}, {3, 3, 1}};
  for (const auto& [p, d, k] : sigs)
    for (const char* s : {"1,0;0,1;1,1", "1,0;1,1", "1,0,0;0,1,0;1,1,1"}) {
      const auto S = sys(p, s);
      const auto dual = phi_from_duality(phi_perp_symbolic(d, k, S));
      PhiSampleOptions opt;
      opt.n_max = 3;
      const auto sampled = phi_sampled(d, k, S, opt);
      EXPECT_EQ(dual.group.size() * phi_perp_symbolic(d, k, S).group.size(), dual.group.ambient_size());
      // sampling only ever finds consistent tuples
      for (const auto& b : sampled.group.elements()) EXPECT_TRUE(dual.group.contains(b)) << s;
      if (sampled.stable) {
        EXPECT_EQ(sampled.group.size(), dual.group.size()) << "p=" << p << " d=" << d << " k=" << k << " " << s;
      }
    }
}

TEST(Lambda, ParseAndPrint) {
  const auto L = LambdaMatrix::parse("1,1,-1;0,1,2");
  EXPECT_EQ(L.rows(), 2u);
  EXPECT_EQ(L.cols(), 3u);
  EXPECT_EQ(L(0, 2), -1);
  EXPECT_EQ(L.str(), "1,1,-1;0,1,2");
  EXPECT_EQ(LambdaMatrix::parse(L.str()).str(), L.str());
  EXPECT_EQ(L.row(0, 9), (std::vector<u64>{1, 1, 8}));
  EXPECT_THROW(LambdaMatrix::parse("1,2;3"), ParseError);
  EXPECT_THROW(LambdaMatrix::parse("1,a"), ParseError);
}

TEST(NearOrthogonality, Examples) {
  const auto S = sys(3, "1,0;0,1;1,1");
  PolyFactor quad(3, 1, {parse_poly(3, "1/3 x1^2")});
  // ‖e(|x|²/3)‖_{U^2} = 3^{-1/4} ≈ 0.76
  quad.attach(factor_uniformity(quad, 0.8));
  ASSERT_TRUE(quad.certificate()->certified);

  const auto zero = near_orthogonality_check(quad, S, LambdaMatrix(1, 3), 0.8);
  EXPECT_TRUE(zero.predicted_zero);
  EXPECT_TRUE(zero.identically_zero);
  EXPECT_EQ(zero.bias, 1.0);
  EXPECT_TRUE(zero.consistent);

  const auto cross = near_orthogonality_check(quad, S, LambdaMatrix::parse("1,1,-1"), 0.8);
  EXPECT_FALSE(cross.predicted_zero);
  EXPECT_NEAR(cross.bias, 1.0 / 3.0, 1e-12);
  EXPECT_TRUE(cross.certified);
  EXPECT_TRUE(cross.consistent);

  PolyFactor lin(3, 1, {parse_poly(3, "1/3 x1^1")});
  lin.attach(factor_uniformity(lin, 0.5));
  const auto add = near_orthogonality_check(lin, S, LambdaMatrix::parse("1,1,2"), 0.5);
  EXPECT_TRUE(add.predicted_zero);
  EXPECT_EQ(add.bias, 1.0);
  EXPECT_TRUE(add.consistent);

  const PolyFactor bad(3, 1, {parse_poly(3, "1/9 x1^1")});
  EXPECT_THROW(near_orthogonality_check(bad, S, LambdaMatrix(1, 3), 0.5), std::invalid_argument);
  EXPECT_THROW(near_orthogonality_check(lin, S, LambdaMatrix(2, 3), 0.5), std::invalid_argument);
}

TEST(NearOrthogonality, DichotomyOverAllLambda) {
  const auto found = uniform_factor_search(3, {{2, 0}, {1, 0}}, 2, 0.8, 11);
  ASSERT_TRUE(found.factor.has_value());
  const PolyFactor& B = *found.factor;
  const auto S = sys(3, "1,0;1,1;1,2");
  int zeros = 0;
  for (u64 code = 0; code < 729; ++code) {
    std::vector<i64> e(6);
    u64 c = code;
    for (auto& v : e) v = static_cast<i64>(c % 3), c /= 3;
    const LambdaMatrix lam(2, 3, e);
    const auto v = near_orthogonality_check(B, S, lam, 0.8);
    ASSERT_TRUE(v.consistent) << lam.str();
    EXPECT_NEAR(v.bias, brute_bias(B, S, lam), 1e-9) << lam.str();
    if (v.predicted_zero) ++zeros;
    else EXPECT_LT(v.bias, 0.8);
  }
  // the linear row has a 1-dimensional annihilator on the 3-AP, the quadratic none
  EXPECT_EQ(zeros, 3);
}

TEST(Equidist, LinearFactorIsExactlyUniform) {
  const PolyFactor B(3, 1, {parse_poly(3, "1/3 x1^1")});
  const auto S = sys(3, "1,0;0,1;1,1");
  const auto r = equidist_experiment(B, S, 1e-12);
  EXPECT_EQ(r.K, 9u);
  EXPECT_EQ(r.inconsistent_mass, 0u);
  EXPECT_EQ(r.observed_cells, 9u);
  EXPECT_NEAR(r.max_deviation, 0.0, 1e-15);
  EXPECT_TRUE(r.passed);

  const TorusValue third(3, 1, 0), two_thirds(3, 2, 0);
  EXPECT_NEAR(equidist_probability(B, S, {{third, third, two_thirds}}), 1.0 / 9.0, 1e-15);
  try {
    equidist_probability(B, S, {{third, third, third}});
    FAIL() << "inconsistent target accepted";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(Equidist, BilinearWithinCertifiedEpsilon) {
  PolyFactor B(3, 2, {parse_poly(3, "1/3 x1^1 x2^1")});
  const auto cert = factor_uniformity(B, 0.7);
  ASSERT_TRUE(cert.certified);
  const auto r = equidist_experiment(B, sys(3, "1,0;0,1;1,1"), cert.max_value);
  EXPECT_EQ(r.K, 27u);
  EXPECT_EQ(r.tuples, 81u);
  EXPECT_EQ(r.inconsistent_mass, 0u);
  EXPECT_LE(r.max_deviation, cert.max_value);
  EXPECT_TRUE(r.passed);
}
