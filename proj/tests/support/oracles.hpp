// Test-side oracles, kept independent of the library paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "creditnet/clearing.hpp"
#include "creditnet/network.hpp"
#include "creditnet/operations.hpp"

namespace creditnet::testing {

// Upward Picard iteration from P = 0. Its limit is the least fixed point,
// so the engine's downward result must dominate it component-wise.
inline PaymentMatrix clear_upward(const CreditNetwork& network,
                                  const ClearingConfig& config = {}) {
  const std::size_t n = network.size();
  SquareMatrix current(n, 0.0);
  SquareMatrix next(n, 0.0);
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double incoming = 0.0;
      for (std::size_t j = 0; j < n; ++j) incoming += current(j, i);
      const double held = network.external_asset(i) + incoming;
      const double owed = network.total_liability(i);
      const bool solvent =
          owed <= 0.0 || held >= owed - config.solvency_tolerance;
      for (std::size_t j = 0; j < n; ++j)
        next(i, j) = solvent ? network.liability(i, j)
                             : config.alpha * held * network.liability(i, j) /
                                   owed;
    }
    if (next.max_abs_diff(current) <= config.convergence_tolerance)
      return PaymentMatrix(next);
    std::swap(current, next);
  }
  return PaymentMatrix(current);
}

// Exhaustive simple-cycle enumeration over vertex sequences; exponential,
// fine for n <= 6. Sequences start at their smallest vertex.
inline std::vector<std::vector<std::size_t>> brute_force_cycles(
    const CreditNetwork& network, std::size_t max_len) {
  const std::size_t n = network.size();
  std::vector<std::vector<std::size_t>> found;
  std::vector<std::size_t> path;
  std::vector<bool> used(n, false);

  auto extend = [&](auto&& self, std::size_t start) -> void {
    const std::size_t v = path.back();
    if (path.size() >= 2 && network.liability(v, start) > 0.0)
      found.push_back(path);
    if (path.size() == max_len) return;
    for (std::size_t w = start + 1; w < n; ++w) {
      if (used[w] || !(network.liability(v, w) > 0.0)) continue;
      used[w] = true;
      path.push_back(w);
      self(self, start);
      path.pop_back();
      used[w] = false;
    }
  };

  for (std::size_t s = 0; s < n; ++s) {
    path.assign(1, s);
    std::fill(used.begin(), used.end(), false);
    used[s] = true;
    extend(extend, s);
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
  return found;
}

// Snaps every amount to multiples of 2^-10 so that sums of thousands of
// entries are exact in double arithmetic and identities can be asserted
// with == instead of a tolerance.
inline CreditNetwork snap_to_grid(const CreditNetwork& network) {
  const double grid = 1024.0;
  SquareMatrix liabilities = network.liabilities();
  for (std::size_t i = 0; i < network.size(); ++i)
    for (std::size_t j = 0; j < network.size(); ++j)
      liabilities(i, j) = std::round(liabilities(i, j) * grid) / grid;
  std::vector<double> assets = network.external_assets();
  for (double& a : assets) a = std::round(a * grid) / grid;
  return CreditNetwork(network.labels(), std::move(liabilities),
                       std::move(assets));
}

// Net position sum_j l_ij - sum_j l_ji; exact on grid-valued networks.
inline double net_position(const CreditNetwork& network, std::size_t firm) {
  return network.liabilities().row_sum(firm) -
         network.liabilities().column_sum(firm);
}

}  // namespace creditnet::testing
