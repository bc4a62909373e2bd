#pragma once

// Random search for ε-uniform factors of homogeneous polynomials: draw each
// P_i with the requested (degree, depth) and keep the first factor whose
// uniformity certificate passes.

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "hofa/factor.hpp"
#include "hofa/homogeneous.hpp"

namespace hofa {

struct Signature {
  unsigned d = 1;
  unsigned k = 0;
};

struct FactorSearchResult {
  std::optional<PolyFactor> factor;  // carries its certificate when found
  u64 attempts = 0;
  double best_value = 1.0;  // smallest max-norm seen over all candidates
  std::optional<PolyFactor> best;
};

inline FactorSearchResult uniform_factor_search(unsigned p, const std::vector<Signature>& signatures, unsigned n,
                                                double epsilon, u64 seed, u64 attempts = 200,
                                                u64 budget = kDefaultBudget) {
  std::vector<HomogeneousSampler> samplers;
  for (const auto& s : signatures) samplers.emplace_back(p, s.d, s.k, n);
  std::mt19937_64 rng(seed);
  FactorSearchResult res;
  for (u64 a = 0; a < attempts; ++a) {
    ++res.attempts;
    std::vector<NCPoly> polys;
    for (const auto& s : samplers) polys.push_back(s.draw(rng));
    PolyFactor B(p, n, std::move(polys));
    UniformityCertificate cert = factor_uniformity(B, epsilon, budget);
    const bool ok = cert.certified;
    if (cert.max_value < res.best_value || !res.best) {
      res.best_value = cert.max_value;
      B.attach(cert);
      res.best = B;
    }
    if (ok) {
      B.attach(std::move(cert));
      res.factor = std::move(B);
      return res;
    }
  }
  return res;
}

}  // namespace hofa
