#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

#include "creditnet/network.hpp"

namespace creditnet {

struct ClearingConfig {
  // Fraction of a defaulter's assets usable for repayment.
  double alpha = 0.5;
  // Convergence is declared on the max-norm payment change per sweep.
  double convergence_tolerance = 1e-9;
  std::size_t max_iterations = 100000;
  double solvency_tolerance = 1e-9;
  // Checks that every Picard iterate is component-wise <= its predecessor.
  bool verify_monotone = true;

  void validate() const;
};

struct ClearingResult {
  PaymentMatrix payments;
  std::vector<FirmMetrics> metrics;
  std::vector<std::size_t> default_set;  // sorted firm indices
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;  // max fixed-point violation of `payments`

  double total_assets() const;
};

class NotConvergedError : public Error {
 public:
  explicit NotConvergedError(ClearingResult best);
  const ClearingResult& best() const { return best_; }

 private:
  ClearingResult best_;
};

// Maximal clearing payments by downward Picard iteration from P = L:
// solvent firms pay liabilities in full, defaulters pay
// alpha * a_i * l_ij / L_i. Firms with L_i = 0 are solvent and pay nothing.
// Throws NotConvergedError (carrying the best iterate) when the sweep limit
// is hit first.
ClearingResult clear(const CreditNetwork& network,
                     const ClearingConfig& config = {});

struct FirmCheck {
  bool solvent = true;
  double max_deviation = 0.0;  // worst |p_ij - rule-implied p_ij| in the row
};

struct FixedPointReport {
  double residual = 0.0;  // max over firms
  std::vector<FirmCheck> firms;
};

// Independent checker: recomputes each rule-implied payment row from the
// a_i of `payments` and reports deviations. Never mutates anything.
FixedPointReport verify_fixed_point(const CreditNetwork& network,
                                    const PaymentMatrix& payments,
                                    const ClearingConfig& config = {});

nlohmann::ordered_json clearing_result_to_json(const ClearingResult& result);

}  // namespace creditnet
