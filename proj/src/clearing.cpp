#include "creditnet/clearing.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace creditnet {

void ClearingConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    fail(Errc::invalid_config, "alpha must lie in [0, 1]");
  if (!(convergence_tolerance > 0.0))
    fail(Errc::invalid_config, "convergence_tolerance must be positive");
  if (!(solvency_tolerance > 0.0))
    fail(Errc::invalid_config, "solvency_tolerance must be positive");
  if (max_iterations < 1)
    fail(Errc::invalid_config, "max_iterations must be at least 1");
}

double ClearingResult::total_assets() const {
  return creditnet::total_assets(metrics);
}

NotConvergedError::NotConvergedError(ClearingResult best)
    : Error(Errc::not_converged,
            "no fixed point within " + std::to_string(best.iterations) +
                " iterations, residual " + format_amount(best.residual)),
      best_(std::move(best)) {}

namespace {

// One application of the payment rule: given assets a, the implied payment
// row of every firm. Shared by the iteration; the verifier below has its own
// copy of the rule so the two stay independent code paths.
void assets_from_payments(const CreditNetwork& network, const SquareMatrix& p,
                          std::vector<double>& a) {
  const std::size_t n = network.size();
  for (std::size_t i = 0; i < n; ++i) {
    double incoming = 0.0;
    for (std::size_t j = 0; j < n; ++j) incoming += p(j, i);
    a[i] = network.external_asset(i) + incoming;
  }
}

ClearingResult make_result(const CreditNetwork& network, SquareMatrix payments,
                           std::size_t iterations, bool converged,
                           double residual, const ClearingConfig& config) {
  ClearingResult result{PaymentMatrix(std::move(payments)),
                        {},
                        {},
                        iterations,
                        converged,
                        residual};
  result.metrics =
      firm_metrics(network, result.payments, config.solvency_tolerance);
  for (std::size_t i = 0; i < network.size(); ++i)
    if (!result.metrics[i].solvent) result.default_set.push_back(i);
  return result;
}

}  // namespace

ClearingResult clear(const CreditNetwork& network,
                     const ClearingConfig& config) {
  config.validate();
  const std::size_t n = network.size();
  SquareMatrix current = network.liabilities();
  SquareMatrix next(n);
  std::vector<double> assets(n);

  std::size_t iterations = 0;
  double delta = 0.0;
  while (iterations < config.max_iterations) {
    ++iterations;
    assets_from_payments(network, current, assets);
    for (std::size_t i = 0; i < n; ++i) {
      const double owed = network.total_liability(i);
      const bool solvent =
          owed <= 0.0 || assets[i] >= owed - config.solvency_tolerance;
      if (solvent) {
        for (std::size_t j = 0; j < n; ++j)
          next(i, j) = network.liability(i, j);
      } else {
        const double scale = config.alpha * assets[i] / owed;
        for (std::size_t j = 0; j < n; ++j) {
          const double p = scale * network.liability(i, j);
          // alpha * a_i < L_i here, so proportional shares stay within the
          // liability; a breach means the rule itself was applied wrong.
          if (p > network.liability(i, j))
            fail(Errc::invariant_violation,
                 "defaulter payment exceeds liability at (" +
                     std::to_string(i) + "," + std::to_string(j) + ")");
          next(i, j) = p;
        }
      }
    }
    if (config.verify_monotone) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (next(i, j) > current(i, j))
            fail(Errc::invariant_violation,
                 "Picard iterate increased at (" + std::to_string(i) + "," +
                     std::to_string(j) + ")");
    }
    delta = next.max_abs_diff(current);
    if (delta <= config.convergence_tolerance) {
      // `current` is the iterate whose rule violation equals delta, so the
      // reported residual is exact for the returned payments.
      return make_result(network, std::move(current), iterations, true, delta,
                         config);
    }
    std::swap(current, next);
  }
  throw NotConvergedError(make_result(network, std::move(current), iterations,
                                      false, delta, config));
}

FixedPointReport verify_fixed_point(const CreditNetwork& network,
                                    const PaymentMatrix& payments,
                                    const ClearingConfig& config) {
  config.validate();
  const std::size_t n = network.size();
  if (payments.size() != n)
    fail(Errc::dimension_mismatch,
         "payments are " + std::to_string(payments.size()) + "x" +
             std::to_string(payments.size()) + " for a " + std::to_string(n) +
             "-firm network");

  FixedPointReport report;
  report.firms.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double owed = network.total_liability(i);
    const double held = network.external_asset(i) + payments.incoming(i);
    FirmCheck& check = report.firms[i];
    check.solvent = owed <= 0.0 || held >= owed - config.solvency_tolerance;
    for (std::size_t j = 0; j < n; ++j) {
      const double expected =
          check.solvent ? network.liability(i, j)
                        : config.alpha * held * network.liability(i, j) / owed;
      check.max_deviation =
          std::max(check.max_deviation, std::fabs(payments(i, j) - expected));
    }
    report.residual = std::max(report.residual, check.max_deviation);
  }
  return report;
}

nlohmann::ordered_json clearing_result_to_json(const ClearingResult& result) {
  nlohmann::ordered_json doc;
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  doc["residual"] = result.residual;
  doc["total_assets"] = result.total_assets();
  doc["default_set"] = result.default_set;
  auto metrics = nlohmann::ordered_json::array();
  for (const auto& m : result.metrics) {
    metrics.push_back({{"total_liability", m.total_liability},
                       {"total_assets", m.total_assets},
                       {"equity", m.equity},
                       {"solvent", m.solvent}});
  }
  doc["metrics"] = std::move(metrics);
  doc["payments"] = result.payments.values().to_rows();
  return doc;
}

}  // namespace creditnet
