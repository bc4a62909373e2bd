#include <gtest/gtest.h>

#include <random>

#include "hofa/factor_search.hpp"

using namespace hofa;
using cplx = std::complex<double>;

namespace {

std::vector<unsigned> pt(std::initializer_list<unsigned> v) { return v; }

PolyFactor random_factor(unsigned p, unsigned n, std::size_t C, std::mt19937_64& rng) {
  const PointSpace space(p, n);
  std::vector<NCPoly> polys;
  for (std::size_t i = 0; i < C; ++i) {
    std::vector<u64> nums(space.size());
    for (auto& v : nums) v = rng() % (p * p);
    polys.push_back(interpolate(FunctionTable(p, n, 1, nums)));
  }
  return PolyFactor(p, n, std::move(polys));
}

}  // namespace

TEST(Atoms, Examples) {
  const PolyFactor lin(3, 1, {parse_poly(3, "1/3 x1^1")});
  EXPECT_EQ(atom_of(lin, pt({2})), AtomKey{TorusValue(3, 2, 0)});
  const PolyFactor empty(3, 1);
  EXPECT_TRUE(atom_of(empty, pt({2})).empty());
  EXPECT_EQ(atom_census(empty).count(), 1u);
  const PolyFactor both(3, 1, {parse_poly(3, "1/3 x1^1"), parse_poly(3, "1/3 x1^2")});
  EXPECT_EQ(atom_of(both, pt({1})), (AtomKey{TorusValue(3, 1, 0), TorusValue(3, 1, 0)}));
  EXPECT_THROW(atom_of(lin, pt({1, 1})), std::invalid_argument);
}

TEST(Atoms, CensusExamples) {
  const auto a = atom_census(PolyFactor(3, 1, {parse_poly(3, "1/3 x1^1")}));
  EXPECT_EQ(a.count(), 3u);
  EXPECT_EQ(a.bound, 3u);
  for (const auto& [k, sz] : a.sizes) EXPECT_EQ(sz, 1u);
  const auto b = atom_census(PolyFactor(3, 1, {parse_poly(3, "1/3 x1^2")}));
  EXPECT_EQ(b.count(), 2u);
  EXPECT_EQ(b.bound, 3u);
  const auto c = atom_census(PolyFactor(2, 1, {parse_poly(2, "1/4 x1^1")}));
  EXPECT_EQ(c.count(), 2u);
  EXPECT_EQ(c.bound, 4u);
}

TEST(Atoms, CountWithinBoundAndSizesSum) {
  std::mt19937_64 rng(61);
  for (unsigned p : {2u, 3u})
    for (int t = 0; t < 30; ++t) {
      const auto B = random_factor(p, 1 + t % 3, 1 + t % 3, rng);
      const auto c = atom_census(B);
      EXPECT_TRUE(c.within_bound());
      u64 total = 0;
      for (const auto& [k, sz] : c.sizes) total += sz;
      EXPECT_EQ(total, detail::checked_pow(p, B.dim()));
    }
}

TEST(Atoms, ExtensionRefines) {
  // B'(x) = B'(y) implies B(x) = B(y) when B' extends B
  std::mt19937_64 rng(62);
  for (int t = 0; t < 20; ++t) {
    const auto B = random_factor(3, 2, 2, rng);
    auto polys = B.polys();
    polys.push_back(random_factor(3, 2, 1, rng)[0]);
    const PolyFactor Bx(3, 2, polys);
    const auto fine = atom_map(Bx), coarse = atom_map(B);
    for (u32 x = 0; x < fine.size(); ++x)
      for (u32 y = 0; y < fine.size(); ++y)
        if (fine[x] == fine[y]) {
          ASSERT_EQ(coarse[x], coarse[y]);
        }
    EXPECT_GE(atom_census(Bx).count(), atom_census(B).count());
  }
}

TEST(ConditionalExpectation, Examples) {
  const PolyFactor sq(3, 1, {parse_poly(3, "1/3 x1^2")});
  const ComplexTable f(3, 1, {1.0, 0.0, 1.0});
  const auto g = conditional_expectation(f, sq);
  EXPECT_EQ(g[0], cplx(1.0));
  EXPECT_EQ(g[1], cplx(0.5));
  EXPECT_EQ(g[2], cplx(0.5));

  const PolyFactor lin(3, 1, {parse_poly(3, "1/3 x1^1")});
  const ComplexTable h(3, 1, {cplx(0.2, 0.6), 0.7, -0.9});
  const auto same = conditional_expectation(h, lin);
  for (u32 i = 0; i < 3; ++i) EXPECT_EQ(same[i], h[i]);
  const auto c = ComplexTable::constant(3, 1, cplx(0.3, -0.4));
  const auto cc = conditional_expectation(c, sq);
  for (u32 i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(cc[i] - c[i]), 0.0, 1e-15);
}

TEST(ConditionalExpectation, MeasurableIdempotentMeanPreserving) {
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> g(-0.7, 0.7);
  for (unsigned p : {2u, 3u})
    for (int t = 0; t < 20; ++t) {
      const unsigned n = 1 + t % 3;
      const auto B = random_factor(p, n, 1 + t % 2, rng);
      std::vector<cplx> v(detail::checked_pow(p, n));
      for (auto& z : v) z = cplx(g(rng), g(rng));
      const ComplexTable f(p, n, v);
      const auto e = conditional_expectation(f, B);
      const auto atoms = atom_map(B);
      for (u32 x = 0; x < atoms.size(); ++x)
        for (u32 y = 0; y < atoms.size(); ++y)
          if (atoms[x] == atoms[y]) {
            ASSERT_NEAR(std::abs(e[x] - e[y]), 0.0, 1e-12);
          }
      const auto ee = conditional_expectation(e, B);
      cplx m1 = 0, m2 = 0;
      for (u32 x = 0; x < atoms.size(); ++x) {
        EXPECT_NEAR(std::abs(ee[x] - e[x]), 0.0, 1e-12);
        m1 += f[x];
        m2 += e[x];
      }
      EXPECT_NEAR(std::abs(m1 - m2), 0.0, 1e-9);
      // trivial factor: the global mean everywhere
      const auto triv = conditional_expectation(f, PolyFactor(p, n));
      for (u32 x = 0; x < atoms.size(); ++x) EXPECT_NEAR(std::abs(triv[x] - m1 / static_cast<double>(atoms.size())), 0.0, 1e-12);
    }
}

TEST(FactorText, RoundTrip) {
  const auto B = PolyFactor::parse(3, 0, "# two polys\n1/3 x1^1 x2^1\n\n1/9 x1^1 + 1/3 x2^2\n");
  EXPECT_EQ(B.complexity(), 2u);
  EXPECT_EQ(B.dim(), 2u);
  const auto again = PolyFactor::parse(3, 2, B.str());
  ASSERT_EQ(again.complexity(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(again[i], B[i]);
  EXPECT_EQ(B.degrees(), (std::vector<unsigned>{2, 3}));
  EXPECT_EQ(B.depths(), (std::vector<unsigned>{0, 1}));
  EXPECT_EQ(B.atom_bound(), 27u);
  EXPECT_THROW(PolyFactor::parse(3, 0, "1/3 x1^1\n1/2 x1^1"), ParseError);
}

TEST(Search, Examples) {
  const auto lin = uniform_factor_search(3, {{1, 0}}, 2, 0.5, 1);
  ASSERT_TRUE(lin.factor.has_value());
  EXPECT_EQ(lin.attempts, 1u);
  EXPECT_TRUE(lin.factor->certificate()->certified);
  EXPECT_NEAR(lin.factor->certificate()->max_value, 0.0, 1e-12);

  const auto dup = uniform_factor_search(3, {{1, 0}, {1, 0}}, 1, 0.1, 2, 30);
  EXPECT_FALSE(dup.factor.has_value());
  EXPECT_EQ(dup.attempts, 30u);
  ASSERT_TRUE(dup.best.has_value());
  EXPECT_GE(dup.best_value, 0.1);

  const auto quad = uniform_factor_search(2, {{2, 0}}, 4, 0.8, 3);
  ASSERT_TRUE(quad.factor.has_value());
  const auto& cert = *quad.factor->certificate();
  EXPECT_LT(cert.max_value, 0.8);
  EXPECT_NEAR(cert.max_value, gowers_norm_exact((*quad.factor)[0], 2).norm, 1e-12);
}

TEST(Search, DeterministicPerSeed) {
  for (u64 seed : {5u, 6u, 7u}) {
    const auto a = uniform_factor_search(3, {{2, 0}, {1, 0}}, 2, 0.8, seed);
    const auto b = uniform_factor_search(3, {{2, 0}, {1, 0}}, 2, 0.8, seed);
    ASSERT_EQ(a.factor.has_value(), b.factor.has_value());
    EXPECT_EQ(a.attempts, b.attempts);
    if (a.factor) {
      EXPECT_EQ(a.factor->str(), b.factor->str());
    }
  }
}
