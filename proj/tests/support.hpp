#pragma once

// Shared helpers for the unit tests: small random generators for property
// checks and naive reference implementations.

#include "scucb/env.hpp"
#include "scucb/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

namespace scucb::testing {

inline Eigen::VectorXd random_vector(Rng& rng, std::size_t n, double lo = 0.0,
                                     double hi = 1.0) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = lo + (hi - lo) * uniform01(rng);
  return v;
}

inline CoverageReward random_coverage(Rng& rng, std::size_t arms, std::size_t targets) {
  CoverageReward cov;
  cov.weights = random_vector(rng, targets, 0.1, 2.0);
  cov.links.resize(static_cast<Eigen::Index>(arms), static_cast<Eigen::Index>(targets));
  for (Eigen::Index i = 0; i < cov.links.rows(); ++i)
    for (Eigen::Index j = 0; j < cov.links.cols(); ++j) cov.links(i, j) = uniform01(rng);
  return cov;
}

/// Reference coverage reward written straight from the definition.
inline double naive_coverage(const CoverageReward& cov, const Eigen::VectorXd& mu,
                             const Subset& s) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < cov.weights.size(); ++j) {
    double miss = 1.0;
    for (std::size_t i : s) {
      double reach = mu(static_cast<Eigen::Index>(i)) * cov.links(static_cast<Eigen::Index>(i), j);
      reach = std::min(1.0, std::max(0.0, reach));
      miss *= 1.0 - reach;
    }
    total += cov.weights(j) * (1.0 - miss);
  }
  return total;
}

/// All k-subsets of {0..m-1} by recursion, independent of for_each_subset.
inline void naive_subsets(std::size_t m, std::size_t k, std::size_t start, Subset& cur,
                          std::vector<Subset>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < m; ++i) {
    cur.push_back(i);
    naive_subsets(m, k, i + 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<Subset> all_subsets(std::size_t m, std::size_t k) {
  std::vector<Subset> out;
  Subset cur;
  naive_subsets(m, k, 0, cur, out);
  return out;
}

inline ProblemInstance linear_instance(std::vector<double> means, std::size_t k,
                                       std::vector<double> budgets = {}) {
  ProblemInstance inst;
  inst.means = Eigen::Map<Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
  if (budgets.empty()) budgets.assign(means.size(), 0.0);
  inst.budgets = Eigen::Map<Eigen::VectorXd>(budgets.data(), static_cast<Eigen::Index>(budgets.size()));
  inst.action_size = k;
  return inst;
}

}  // namespace scucb::testing
