#include "creditnet/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

namespace creditnet {

SquareMatrix SquareMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      fail(Errc::non_square_matrix,
           "row " + std::to_string(i) + " has " +
               std::to_string(rows[i].size()) + " entries, expected " +
               std::to_string(n));
    }
  }
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return m;
}

double SquareMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += values_[i * n_ + j];
  return s;
}

double SquareMatrix::column_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += values_[i * n_ + j];
  return s;
}

double SquareMatrix::max_abs_diff(const SquareMatrix& other) const {
  double d = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k)
    d = std::max(d, std::fabs(values_[k] - other.values_[k]));
  return d;
}

std::vector<std::vector<double>> SquareMatrix::to_rows() const {
  std::vector<std::vector<double>> rows(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) rows[i][j] = values_[i * n_ + j];
  return rows;
}

std::string display_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (const char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::string normalize_name(std::string_view raw) {
  std::string out = display_name(raw);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

CreditNetwork::CreditNetwork(std::vector<std::string> labels,
                             SquareMatrix liabilities,
                             std::vector<double> external_assets)
    : labels_(std::move(labels)),
      liabilities_(std::move(liabilities)),
      external_assets_(std::move(external_assets)) {
  const std::size_t n = labels_.size();
  if (liabilities_.size() != n) {
    fail(Errc::dimension_mismatch,
         "liability matrix is " + std::to_string(liabilities_.size()) +
             "x" + std::to_string(liabilities_.size()) + " but there are " +
             std::to_string(n) + " labels");
  }
  if (external_assets_.size() != n) {
    fail(Errc::dimension_mismatch,
         "external asset vector has " + std::to_string(external_assets_.size()) +
             " entries but there are " + std::to_string(n) + " labels");
  }
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto key = normalize_name(labels_[i]);
    if (key.empty()) fail(Errc::duplicate_label, "empty firm label");
    const auto [it, inserted] = seen.emplace(key, i);
    if (!inserted) {
      fail(Errc::duplicate_label, "labels " + std::to_string(it->second) +
                                      " and " + std::to_string(i) +
                                      " normalize to \"" + key + "\"");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(external_assets_[i] >= 0.0)) {
      fail(Errc::negative_amount,
           "external assets of firm " + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double l = liabilities_(i, j);
      if (!(l >= 0.0)) {
        fail(Errc::negative_amount, "liability (" + std::to_string(i) + "," +
                                        std::to_string(j) + ")");
      }
      if (i == j && l != 0.0) {
        fail(Errc::nonzero_diagonal, "firm " + std::to_string(i) +
                                         " owes itself " + format_amount(l));
      }
    }
  }
  total_liabilities_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    total_liabilities_[i] = liabilities_.row_sum(i);
}

std::optional<std::size_t> CreditNetwork::find_firm(
    std::string_view name) const {
  const auto key = normalize_name(name);
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (normalize_name(labels_[i]) == key) return i;
  return std::nullopt;
}

CreditNetwork CreditNetwork::with_liabilities(SquareMatrix liabilities) const {
  return CreditNetwork(labels_, std::move(liabilities), external_assets_);
}

CreditNetwork new_network(std::vector<std::string> labels,
                          const std::vector<std::vector<double>>& liabilities,
                          std::vector<double> external_assets) {
  return CreditNetwork(std::move(labels), SquareMatrix::from_rows(liabilities),
                       std::move(external_assets));
}

PaymentMatrix::PaymentMatrix(SquareMatrix values) : values_(std::move(values)) {
  const std::size_t n = values_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) {
      fail(Errc::nonzero_diagonal,
           "payment (" + std::to_string(i) + "," + std::to_string(i) + ")");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!(values_(i, j) >= 0.0)) {
        fail(Errc::negative_amount, "payment (" + std::to_string(i) + "," +
                                        std::to_string(j) + ")");
      }
    }
  }
}

std::vector<FirmMetrics> firm_metrics(const CreditNetwork& network,
                                      const PaymentMatrix& payments,
                                      double solvency_tolerance) {
  const std::size_t n = network.size();
  if (payments.size() != n) {
    fail(Errc::dimension_mismatch,
         "payments are " + std::to_string(payments.size()) + "x" +
             std::to_string(payments.size()) + " for a " + std::to_string(n) +
             "-firm network");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (payments(i, j) > network.liability(i, j) + kAmountTolerance) {
        fail(Errc::payment_exceeds_liability,
             "payment (" + std::to_string(i) + "," + std::to_string(j) +
                 ") = " + format_amount(payments(i, j)) + " exceeds liability " +
                 format_amount(network.liability(i, j)));
      }
    }
  }
  std::vector<FirmMetrics> metrics(n);
  for (std::size_t i = 0; i < n; ++i) {
    FirmMetrics& m = metrics[i];
    m.total_liability = network.total_liability(i);
    m.total_assets = network.external_asset(i) + payments.incoming(i);
    m.solvent = m.total_assets >= m.total_liability - solvency_tolerance;
    m.equity = std::max(0.0, m.total_assets - m.total_liability);
  }
  return metrics;
}

double total_assets(const std::vector<FirmMetrics>& metrics) {
  double s = 0.0;
  for (const auto& m : metrics) s += m.total_assets;
  return s;
}

std::vector<CreditNetwork> weakly_connected_components(
    const CreditNetwork& network) {
  const std::size_t n = network.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (network.liability(i, j) > 0.0) unite(i, j);

  // Component order and member order both follow parent indices.
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

  std::vector<CreditNetwork> components;
  components.reserve(groups.size());
  for (const auto& [root, members] : groups) {
    (void)root;
    const std::size_t k = members.size();
    std::vector<std::string> labels(k);
    std::vector<double> assets(k);
    SquareMatrix sub(k);
    for (std::size_t a = 0; a < k; ++a) {
      labels[a] = network.labels()[members[a]];
      assets[a] = network.external_asset(members[a]);
      for (std::size_t b = 0; b < k; ++b)
        sub(a, b) = network.liability(members[a], members[b]);
    }
    components.emplace_back(std::move(labels), std::move(sub),
                            std::move(assets));
  }
  return components;
}

nlohmann::ordered_json network_to_json(const CreditNetwork& network) {
  nlohmann::ordered_json doc;
  doc["labels"] = network.labels();
  doc["external_assets"] = network.external_assets();
  doc["liabilities"] = network.liabilities().to_rows();
  return doc;
}

namespace {

[[noreturn]] void schema_fail(const std::string& what) {
  fail(Errc::schema_error, what);
}

}  // namespace

CreditNetwork network_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) schema_fail("network document must be an object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "labels" && key != "external_assets" && key != "liabilities")
      schema_fail("unknown key \"" + key + "\"");
  }
  if (!doc.contains("labels") || !doc.contains("external_assets") ||
      !doc.contains("liabilities")) {
    schema_fail("required keys: labels, external_assets, liabilities");
  }
  const auto& labels_doc = doc.at("labels");
  const auto& assets_doc = doc.at("external_assets");
  const auto& matrix_doc = doc.at("liabilities");
  if (!labels_doc.is_array() || !assets_doc.is_array() ||
      !matrix_doc.is_array()) {
    schema_fail("labels, external_assets and liabilities must be arrays");
  }
  std::vector<std::string> labels;
  for (const auto& item : labels_doc) {
    if (!item.is_string()) schema_fail("labels must be strings");
    labels.push_back(item.get<std::string>());
  }
  std::vector<double> assets;
  for (const auto& item : assets_doc) {
    if (!item.is_number()) schema_fail("external_assets must be numbers");
    assets.push_back(item.get<double>());
  }
  std::vector<std::vector<double>> rows;
  for (const auto& row : matrix_doc) {
    if (!row.is_array()) schema_fail("liabilities must be an array of rows");
    std::vector<double> r;
    for (const auto& item : row) {
      if (!item.is_number()) schema_fail("liability entries must be numbers");
      r.push_back(item.get<double>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return new_network(std::move(labels), rows, std::move(assets));
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::non_square_matrix:
      case Errc::dimension_mismatch:
        schema_fail(e.what());
      default:
        fail(Errc::invariant_violation, e.what());
    }
  }
}

std::string format_amount(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) fail(Errc::io_error, "amount formatting failed");
  return std::string(buf, end);
}

}  // namespace creditnet
