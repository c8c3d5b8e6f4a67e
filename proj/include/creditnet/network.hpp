#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "creditnet/errors.hpp"

namespace creditnet {

// Absolute comparison tolerance used across the model unless a config says
// otherwise. Amounts are doubles in units of millions.
inline constexpr double kAmountTolerance = 1e-9;

class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0)
      : n_(n), values_(n * n, fill) {}

  // Throws NonSquareMatrix when the rows are ragged or row count differs
  // from column count.
  static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * n_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return values_[i * n_ + j];
  }

  double row_sum(std::size_t i) const;
  double column_sum(std::size_t j) const;
  double max_abs_diff(const SquareMatrix& other) const;

  std::vector<std::vector<double>> to_rows() const;

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Comparison key: trimmed, internal whitespace runs collapsed, lowercased.
std::string normalize_name(std::string_view raw);
// Same cleanup with the original casing kept for display.
std::string display_name(std::string_view raw);

// Immutable liability matrix L with external assets e and firm labels.
// Entry (i, j) is the amount firm i owes firm j. Firm order is label order.
class CreditNetwork {
 public:
  CreditNetwork(std::vector<std::string> labels, SquareMatrix liabilities,
                std::vector<double> external_assets);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const SquareMatrix& liabilities() const { return liabilities_; }
  const std::vector<double>& external_assets() const {
    return external_assets_;
  }

  double liability(std::size_t i, std::size_t j) const {
    return liabilities_(i, j);
  }
  double external_asset(std::size_t i) const { return external_assets_[i]; }
  // Row sum L_i, cached at construction.
  double total_liability(std::size_t i) const { return total_liabilities_[i]; }

  std::optional<std::size_t> find_firm(std::string_view name) const;

  // Same labels and assets over a new liability matrix, revalidated.
  CreditNetwork with_liabilities(SquareMatrix liabilities) const;

  bool operator==(const CreditNetwork&) const = default;

 private:
  std::vector<std::string> labels_;
  SquareMatrix liabilities_;
  std::vector<double> external_assets_;
  std::vector<double> total_liabilities_;
};

CreditNetwork new_network(std::vector<std::string> labels,
                          const std::vector<std::vector<double>>& liabilities,
                          std::vector<double> external_assets);

// Payments actually made, nonnegative with a zero diagonal. The bound
// p_ij <= l_ij is checked wherever a network is in hand.
class PaymentMatrix {
 public:
  explicit PaymentMatrix(SquareMatrix values);
  static PaymentMatrix zero(std::size_t n) {
    return PaymentMatrix(SquareMatrix(n));
  }

  std::size_t size() const { return values_.size(); }
  const SquareMatrix& values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(i, j);
  }
  // Incoming payments sum_i p_ij for firm j.
  double incoming(std::size_t j) const { return values_.column_sum(j); }
  // Outgoing payments p_i = sum_j p_ij.
  double outgoing(std::size_t i) const { return values_.row_sum(i); }

  bool operator==(const PaymentMatrix&) const = default;

 private:
  SquareMatrix values_;
};

struct FirmMetrics {
  double total_liability = 0.0;  // L_i
  double total_assets = 0.0;     // a_i = e_i + incoming payments
  double equity = 0.0;           // max{0, a_i - L_i}
  bool solvent = true;           // a_i >= L_i - solvency_tolerance
};

std::vector<FirmMetrics> firm_metrics(const CreditNetwork& network,
                                      const PaymentMatrix& payments,
                                      double solvency_tolerance = kAmountTolerance);

// System objective sum_i a_i.
double total_assets(const std::vector<FirmMetrics>& metrics);

// Partition by weak connectivity over positive liabilities. Isolated firms
// become singletons. Component order follows the smallest parent index;
// labels and assets are restrictions of the parent.
std::vector<CreditNetwork> weakly_connected_components(
    const CreditNetwork& network);

// Network file schema: {"labels": [...], "external_assets": [...],
// "liabilities": [[...], ...]}, row-major, unknown keys rejected.
nlohmann::ordered_json network_to_json(const CreditNetwork& network);
CreditNetwork network_from_json(const nlohmann::json& doc);

// Shortest decimal form that parses back to the same double.
std::string format_amount(double value);

}  // namespace creditnet
