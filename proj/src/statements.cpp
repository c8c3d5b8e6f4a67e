#include "creditnet/statements.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "creditnet/rng.hpp"

namespace creditnet {

namespace {

bool valid_name_text(const std::string& name) {
  if (display_name(name).empty()) return false;
  for (const char c : name)
    if (c == '"' || c == '\n' || c == '\r') return false;
  return true;
}

}  // namespace

void ExtractionRecord::validate() const {
  if (!valid_name_text(firm))
    fail(Errc::invariant_violation, "reporting firm name is empty or quoted");
  if (!(external_assets >= 0.0))
    fail(Errc::invariant_violation, "external assets are negative");
  const std::string self = normalize_name(firm);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& claim : liabilities) {
    if (!valid_name_text(claim.borrower) || !valid_name_text(claim.lender))
      fail(Errc::invariant_violation, "claim names must be nonempty plain text");
    if (!(claim.amount >= 0.0))
      fail(Errc::invariant_violation, "claim amount from " + claim.borrower +
                                          " to " + claim.lender +
                                          " is negative");
    const std::string b = normalize_name(claim.borrower);
    const std::string l = normalize_name(claim.lender);
    if (b == l)
      fail(Errc::invariant_violation,
           "claim from " + claim.borrower + " to itself");
    if (b != self && l != self)
      fail(Errc::invariant_violation,
           "claim (" + claim.borrower + ", " + claim.lender +
               ") does not involve the reporting firm");
    if (!pairs.emplace(b, l).second)
      fail(Errc::invariant_violation, "duplicate claim (" + claim.borrower +
                                          ", " + claim.lender + ")");
  }
}

// ---------------------------------------------------------------------------
// Record grammar

namespace {

class RecordCursor {
 public:
  explicit RecordCursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      advance();
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  [[noreturn]] void fail_here(const std::string& what) const {
    fail(Errc::malformed_record, "line " + std::to_string(line_) +
                                     ", column " + std::to_string(col_) +
                                     ": " + what);
  }

  void expect_keyword(std::string_view keyword) {
    skip_ws();
    if (text_.substr(pos_, keyword.size()) != keyword)
      fail_here("expected \"" + std::string(keyword) + "\"");
    for (std::size_t k = 0; k < keyword.size(); ++k) advance();
    // Keywords are whole identifiers.
    if (pos_ < text_.size() &&
        (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
         text_[pos_] == '_'))
      fail_here("expected \"" + std::string(keyword) + "\"");
  }

  void expect_char(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail_here(std::string("expected '") + c + "'");
    advance();
  }

  bool try_char(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      advance();
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::string parse_quoted_string() {
    expect_char('"');
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\n') fail_here("newline inside a quoted name");
      out.push_back(text_[pos_]);
      advance();
    }
    if (pos_ >= text_.size()) fail_here("unterminated quoted name");
    advance();  // closing quote
    return out;
  }

  double parse_number() {
    skip_ws();
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail_here("expected a number");
    while (text_.data() + pos_ != ptr) advance();
    return value;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// Drops one surrounding ``` fence (with optional language tag) when present.
std::string_view strip_fence(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return text;
  const auto last = text.find_last_not_of(" \t\r\n");
  std::string_view body = text.substr(first, last - first + 1);
  if (body.substr(0, 3) != "```") return text;
  const auto open_end = body.find('\n');
  if (open_end == std::string_view::npos) return text;
  if (body.size() < open_end + 4 || body.substr(body.size() - 3) != "```")
    return text;
  const auto close_start = body.rfind('\n', body.size() - 4);
  if (close_start == std::string_view::npos || close_start < open_end)
    return text;
  return body.substr(open_end + 1, close_start - open_end - 1);
}

}  // namespace

ExtractionRecord parse_extraction_record(std::string_view text) {
  RecordCursor cursor(strip_fence(text));
  ExtractionRecord record;

  cursor.expect_keyword("firm");
  cursor.expect_char('=');
  record.firm = cursor.parse_quoted_string();

  cursor.expect_keyword("external_assets");
  cursor.expect_char('=');
  record.external_assets = cursor.parse_number();

  cursor.expect_keyword("liabilities");
  cursor.expect_char('=');
  cursor.expect_char('[');
  if (!cursor.try_char(']')) {
    for (;;) {
      cursor.expect_char('(');
      LiabilityClaim claim;
      claim.borrower = cursor.parse_quoted_string();
      cursor.expect_char(',');
      claim.lender = cursor.parse_quoted_string();
      cursor.expect_char(',');
      claim.amount = cursor.parse_number();
      cursor.expect_char(')');
      record.liabilities.push_back(std::move(claim));
      if (cursor.try_char(']')) break;
      cursor.expect_char(',');
      // A trailing comma before the closing bracket is tolerated.
      if (cursor.try_char(']')) break;
    }
  }
  if (!cursor.at_end()) cursor.fail_here("unexpected text after liabilities");

  record.validate();
  return record;
}

std::string render_extraction_record(const ExtractionRecord& record) {
  record.validate();
  std::string out = "firm = \"" + record.firm + "\"\n";
  out += "external_assets = " + format_amount(record.external_assets) + "\n";
  out += "liabilities = [";
  for (std::size_t k = 0; k < record.liabilities.size(); ++k) {
    const auto& claim = record.liabilities[k];
    if (k) out += ", ";
    out += "(\"" + claim.borrower + "\", \"" + claim.lender + "\", " +
           format_amount(claim.amount) + ")";
  }
  out += "]\n";
  return out;
}

// ---------------------------------------------------------------------------
// Statement rendering

namespace {

std::string money(double amount) {
  return "$" + format_amount(amount) + " million";
}

std::string payable_sentence(std::size_t variant, const std::string& lender,
                             double amount) {
  switch (variant % 3) {
    case 0:
      return "The firm has entered into a revolving credit facility with " +
             lender + ", carrying an outstanding balance of " + money(amount) +
             ".";
    case 1:
      return "A term loan agreement with " + lender +
             " requires repayment of " + money(amount) + ".";
    default:
      return "Trade financing arrangements with " + lender +
             " have resulted in " + money(amount) + " of accounts payable.";
  }
}

std::string receivable_sentence(std::size_t variant,
                                const std::string& borrower, double amount) {
  switch (variant % 3) {
    case 0:
      return borrower + " has executed a promissory note to the firm for " +
             money(amount) + ", though payment timelines remain subject to " +
             "performance milestones.";
    case 1:
      return borrower + " acknowledges an outstanding " + money(amount) +
             " trade receivable owed to the firm.";
    default:
      return "An intercompany loan of " + money(amount) +
             " remains due from " + borrower + ".";
  }
}

// Encumbered slice presented alongside the gross figure in template 1; the
// usable amount is gross minus this.
double encumbered_portion(double assets) {
  const double quarter = std::floor(assets * 0.15 * 4.0) / 4.0;
  return std::max(0.25, quarter);
}

}  // namespace

std::string render_statement(const ExtractionRecord& record,
                             std::size_t template_id, std::uint64_t seed) {
  record.validate();
  if (template_id >= kStatementTemplateCount)
    fail(Errc::unknown_template,
         "statement template " + std::to_string(template_id));

  SplitMix64 rng(derive_seed(seed, "statement"));
  const std::string self = normalize_name(record.firm);
  std::vector<std::string> payables, receivables;
  for (const auto& claim : record.liabilities) {
    if (normalize_name(claim.borrower) == self)
      payables.push_back(payable_sentence(
          static_cast<std::size_t>(rng.next_below(3)), claim.lender,
          claim.amount));
    else
      receivables.push_back(receivable_sentence(
          static_cast<std::size_t>(rng.next_below(3)), claim.borrower,
          claim.amount));
  }

  std::string text;
  switch (template_id) {
    case 0: {
      text = record.firm + " - Annual Financial Disclosure (2024)\n\n";
      text += "As of December 31, 2024, " + record.firm + " maintains " +
              money(record.external_assets) +
              " in liquid assets, primarily held across cash deposits and "
              "short-term Treasury securities.\n";
      break;
    }
    case 1: {
      const double encumbered = encumbered_portion(record.external_assets);
      const double gross = record.external_assets + encumbered;
      text = record.firm + " - Annual Financial Disclosure (2024)\n\n";
      text += "As of December 31, 2024, " + record.firm + " maintains " +
              money(gross) +
              " in liquid assets, primarily held across cash deposits and "
              "short-term Treasury securities. However, " + money(encumbered) +
              " of the cash reserves are currently encumbered as collateral "
              "for a standby letter of credit and are unavailable for "
              "general use.\n";
      break;
    }
    default: {
      text = record.firm + " - Statement of Financial Position (2024)\n\n";
      text += record.firm + " reports external holdings of " +
              money(record.external_assets) +
              ", comprising deposits at commercial banks and government "
              "bonds.\n";
      break;
    }
  }

  if (!payables.empty()) {
    text += "\nIn terms of liabilities:\n";
    for (const auto& sentence : payables) text += sentence + "\n";
  }
  if (!receivables.empty()) {
    text += "\nOn the receivables side:\n";
    for (const auto& sentence : receivables) text += sentence + "\n";
  }
  if (record.liabilities.empty())
    text += "\nThe firm reports no outstanding obligations to or from other "
            "firms in the network.\n";
  return text;
}

// ---------------------------------------------------------------------------
// Aggregation

const char* anomaly_kind_name(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::amount_conflict: return "amount_conflict";
    case AnomalyKind::duplicate_reporter: return "duplicate_reporter";
    case AnomalyKind::negative_amount: return "negative_amount";
    case AnomalyKind::self_loop: return "self_loop";
    case AnomalyKind::malformed_record: return "malformed_record";
  }
  return "malformed_record";
}

std::size_t AggregationState::intern(const std::string& name) {
  const std::string key = normalize_name(name);
  const auto it = name_index_.find(key);
  if (it != name_index_.end()) return it->second;
  const std::size_t index = display_names_.size();
  display_names_.push_back(display_name(name));
  name_index_.emplace(key, index);
  return index;
}

std::optional<Anomaly> AggregationState::detect(const ExtractionRecord& record,
                                                double tolerance) const {
  const std::size_t id = records_seen_;
  Anomaly anomaly;
  anomaly.record_id = id;

  if (!valid_name_text(record.firm)) {
    anomaly.kind = AnomalyKind::malformed_record;
    anomaly.message = "record " + std::to_string(id) + " has no firm name";
    return anomaly;
  }
  const std::string self = normalize_name(record.firm);
  if (!(record.external_assets >= 0.0)) {
    anomaly.kind = AnomalyKind::negative_amount;
    anomaly.message = record.firm + " reports negative external assets";
    return anomaly;
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& claim : record.liabilities) {
    anomaly.borrower = display_name(claim.borrower);
    anomaly.lender = display_name(claim.lender);
    if (!valid_name_text(claim.borrower) || !valid_name_text(claim.lender)) {
      anomaly.kind = AnomalyKind::malformed_record;
      anomaly.message = record.firm + " lists a claim with an empty name";
      return anomaly;
    }
    const std::string b = normalize_name(claim.borrower);
    const std::string l = normalize_name(claim.lender);
    if (!(claim.amount >= 0.0)) {
      anomaly.kind = AnomalyKind::negative_amount;
      anomaly.first_amount = claim.amount;
      anomaly.message = record.firm + " claims a negative amount from " +
                        claim.borrower + " to " + claim.lender;
      return anomaly;
    }
    if (b == l) {
      anomaly.kind = AnomalyKind::self_loop;
      anomaly.message = record.firm + " claims " + claim.borrower +
                        " owes itself";
      return anomaly;
    }
    if (b != self && l != self) {
      anomaly.kind = AnomalyKind::malformed_record;
      anomaly.message = record.firm + " claims a debt between third parties " +
                        claim.borrower + " and " + claim.lender;
      return anomaly;
    }
    if (!pairs.emplace(b, l).second) {
      anomaly.kind = AnomalyKind::malformed_record;
      anomaly.message = record.firm + " repeats the claim (" + claim.borrower +
                        ", " + claim.lender + ")";
      return anomaly;
    }
  }

  if (reporters_.count(self)) {
    anomaly.kind = AnomalyKind::duplicate_reporter;
    anomaly.borrower.clear();
    anomaly.lender.clear();
    const auto it = known_assets_.find(self);
    if (it != known_assets_.end()) anomaly.prior_record_id = it->second.record_id;
    anomaly.message = record.firm + " already filed a statement";
    return anomaly;
  }

  for (const auto& claim : record.liabilities) {
    const std::string b = normalize_name(claim.borrower);
    const std::string l = normalize_name(claim.lender);
    const auto it = known_edges_.find({b, l});
    if (it == known_edges_.end()) continue;
    const double diff = std::fabs(it->second.amount - claim.amount);
    if (diff <= tolerance) continue;  // corroborating re-report
    anomaly.kind = AnomalyKind::amount_conflict;
    anomaly.prior_record_id = it->second.record_id;
    anomaly.borrower = display_name(claim.borrower);
    anomaly.lender = display_name(claim.lender);
    anomaly.first_amount = it->second.amount;
    anomaly.second_amount = claim.amount;
    anomaly.difference = diff;
    anomaly.message = "record " + std::to_string(it->second.record_id) +
                      " puts the debt " + anomaly.borrower + " -> " +
                      anomaly.lender + " at " +
                      format_amount(it->second.amount) + " but " + record.firm +
                      " claims " + format_amount(claim.amount) +
                      " (difference " + format_amount(diff) + ")";
    return anomaly;
  }
  return std::nullopt;
}

bool AggregationState::integrate(const ExtractionRecord& record,
                                 double tolerance) {
  const auto anomaly = detect(record, tolerance);
  const std::size_t id = records_seen_++;
  if (anomaly) {
    anomalies_.push_back(*anomaly);
    return false;
  }
  const std::string self = normalize_name(record.firm);
  intern(record.firm);
  reporters_.insert(self);
  known_assets_[self] = Claim{record.external_assets, id};
  for (const auto& claim : record.liabilities) {
    intern(claim.borrower);
    intern(claim.lender);
    const std::pair<std::string, std::string> key{
        normalize_name(claim.borrower), normalize_name(claim.lender)};
    // First claim wins; later matching re-reports corroborate silently.
    known_edges_.try_emplace(key, Claim{claim.amount, id});
  }
  return true;
}

void AggregationState::scan_only(const ExtractionRecord& record,
                                 double tolerance) {
  const auto anomaly = detect(record, tolerance);
  ++records_seen_;
  if (anomaly) anomalies_.push_back(*anomaly);
}

std::set<std::string> AggregationState::counterparty_only() const {
  std::set<std::string> out;
  for (const auto& [key, index] : name_index_)
    if (!reporters_.count(key)) out.insert(display_names_[index]);
  return out;
}

std::vector<CreditNetwork> AggregationState::materialize() const {
  const std::size_t n = display_names_.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  struct Edge {
    std::size_t borrower, lender;
    double amount;
  };
  std::vector<Edge> edges;
  edges.reserve(known_edges_.size());
  for (const auto& [key, claim] : known_edges_) {
    const std::size_t b = name_index_.at(key.first);
    const std::size_t l = name_index_.at(key.second);
    edges.push_back({b, l, claim.amount});
    const std::size_t rb = find(b), rl = find(l);
    if (rb != rl) parent[std::max(rb, rl)] = std::min(rb, rl);
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::map<std::size_t, std::size_t> component_of_root;
  std::vector<std::vector<std::size_t>> members;
  for (const auto& [root, group] : groups) {
    component_of_root[root] = members.size();
    members.push_back(group);
  }

  std::vector<std::size_t> local_index(n, 0);
  for (const auto& group : members)
    for (std::size_t k = 0; k < group.size(); ++k) local_index[group[k]] = k;

  std::vector<std::vector<std::string>> labels(members.size());
  std::vector<std::vector<double>> assets(members.size());
  std::vector<SquareMatrix> matrices;
  matrices.reserve(members.size());
  for (const auto& group : members) {
    auto& l = labels[matrices.size()];
    auto& a = assets[matrices.size()];
    for (const std::size_t firm : group) {
      l.push_back(display_names_[firm]);
      const auto it = known_assets_.find(normalize_name(display_names_[firm]));
      a.push_back(it == known_assets_.end() ? 0.0 : it->second.amount);
    }
    matrices.emplace_back(group.size());
  }
  for (const auto& edge : edges) {
    const std::size_t comp = component_of_root.at(find(edge.borrower));
    matrices[comp](local_index[edge.borrower], local_index[edge.lender]) =
        edge.amount;
  }

  std::vector<CreditNetwork> components;
  components.reserve(members.size());
  for (std::size_t c = 0; c < members.size(); ++c)
    components.emplace_back(std::move(labels[c]), std::move(matrices[c]),
                            std::move(assets[c]));
  return components;
}

bool integrate_record(AggregationState& state, const ExtractionRecord& record,
                      double tolerance) {
  return state.integrate(record, tolerance);
}

AggregationResult aggregate_statements(
    const std::vector<ExtractionRecord>& records, double tolerance,
    AggregationMode mode) {
  AggregationState state;
  AggregationResult result;
  for (std::size_t index = 0; index < records.size(); ++index) {
    if (result.halted_at) {
      state.scan_only(records[index], tolerance);
      continue;
    }
    if (!state.integrate(records[index], tolerance)) {
      result.halted_at = index;
      if (mode == AggregationMode::halt_on_anomaly) break;
    }
  }
  result.components = state.materialize();
  result.assets_unknown = state.counterparty_only();
  result.anomalies = state.anomalies();
  return result;
}

// ---------------------------------------------------------------------------
// Prompts

namespace {

constexpr const char* kNetworkIntro =
    "You are given a credit network represented in adjacency matrix L, where "
    "L[i][j] represents the amount that firm i owes firm j.\n"
    "An external asset vector e, where e[i] is the amount of external "
    "(non-network) assets held by firm i.\n"
    "\n"
    "Here is an example:\n"
    "\n"
    "L = [[0, 5, 0, 0],\n"
    "[0, 0, 4, 0],\n"
    "[4, 0, 0, 5],\n"
    "[9, 0, 0, 0]]\n"
    "\n"
    "e = [3, 4, 5, 6]\n";

constexpr const char* kExtractionInstructions =
    "You are a financial data extraction assistant for constructing a credit "
    "network model.\n"
    "\n"
    "Given a financial statement, extract:\n"
    "1. The reporting firm's name;\n"
    "2. The reporting firm's external assets (in millions). External assets "
    "are assets held by the reporting firm that originate from entities "
    "outside the network, such as deposits at commercial banks, government "
    "bonds, real estate, etc;\n"
    "3. A list of all liabilities, specifying:\n"
    "   - borrower name;\n"
    "   - lender name;\n"
    "   - amount (in millions).\n"
    "\n"
    "The reporting firm can be either a borrower or a lender. List all "
    "relationships explicitly.\n"
    "\n"
    "Output Python code in the following format:\n"
    "1. firm = \"<reporting firm name>\"\n"
    "2. external_assets = <amount>\n"
    "3. liabilities = [(<borrower>, <lender>, <amount>), ...]\n"
    "\n"
    "Here is the financial statement:\n"
    "\n";

std::string render_matrix(const CreditNetwork& network) {
  std::string out = "L = [";
  for (std::size_t i = 0; i < network.size(); ++i) {
    if (i) out += ",\n";
    out += "[";
    for (std::size_t j = 0; j < network.size(); ++j) {
      if (j) out += ", ";
      out += format_amount(network.liability(i, j));
    }
    out += "]";
  }
  out += "]\n\ne = [";
  for (std::size_t i = 0; i < network.size(); ++i) {
    if (i) out += ", ";
    out += format_amount(network.external_asset(i));
  }
  out += "]\n";
  return out;
}

std::string operation_description(OperationKind kind) {
  if (kind == OperationKind::compression) {
    return "Portfolio compression reduces every liability along a directed "
           "debt cycle by the cycle's minimum liability, eliminating at "
           "least one edge of the cycle. When several cycles are compressed "
           "they are applied sequentially, cycles involving the most firms "
           "first.\n";
  }
  return "Debt removal eliminates an existing edge (i, j) from the network, "
         "forgiving the full liability that firm i owes firm j. Removing "
         "several debts zeroes each listed edge.\n";
}

}  // namespace

std::string build_translation_prompt(const std::string& statement) {
  if (statement.empty())
    fail(Errc::invariant_violation, "cannot build a prompt for an empty "
                                    "statement");
  return std::string(kNetworkIntro) + "\n" + kExtractionInstructions +
         statement + "\n";
}

std::string default_clearing_source() {
  return
      "def clear(L, e, alpha=0.5, tol=1e-9, max_iter=100000):\n"
      "    n = len(L)\n"
      "    total = [sum(row) for row in L]\n"
      "    P = [row[:] for row in L]\n"
      "    for _ in range(max_iter):\n"
      "        a = [e[i] + sum(P[j][i] for j in range(n)) for i in range(n)]\n"
      "        nxt = [None] * n\n"
      "        for i in range(n):\n"
      "            if total[i] <= 0 or a[i] >= total[i] - tol:\n"
      "                nxt[i] = L[i][:]\n"
      "            else:\n"
      "                s = alpha * a[i] / total[i]\n"
      "                nxt[i] = [s * x for x in L[i]]\n"
      "        if max(abs(nxt[i][j] - P[i][j]) for i in range(n)\n"
      "               for j in range(n)) <= tol:\n"
      "            return P\n"
      "        P = nxt\n"
      "    raise RuntimeError('no fixed point')\n";
}

std::string default_objective_text() {
  return "Maximize the sum of total assets over all firms after clearing, "
         "where a firm's total assets are its external assets plus its "
         "incoming payments.\n";
}

std::string default_task_text(OperationKind kind) {
  if (kind == OperationKind::compression) {
    return "Identify the execution strategy: which debt cycles to compress "
           "so that the objective is maximized after clearing. Explain your "
           "reasoning, then end the reply with a fenced code block "
           "containing exactly one assignment of the form\n"
           "cycles = [[i, j, ...], ...]\n"
           "listing every chosen cycle as firm indices in cycle order. Use "
           "cycles = [] to compress nothing.\n";
  }
  return "Identify the execution strategy: which debts to remove so that "
         "the objective is maximized after clearing. Explain your "
         "reasoning, then end the reply with a fenced code block containing "
         "exactly one assignment of the form\n"
         "remove = [(i, j), ...]\n"
         "listing every removed edge as a (borrower, lender) index pair. "
         "Use remove = [] to remove nothing.\n";
}

std::string build_execution_prompt(const CreditNetwork& network,
                                   OperationKind kind,
                                   const std::string& clearing_source,
                                   const std::string& objective,
                                   const std::string& task) {
  std::string out = "## Credit network instance\n\n";
  out += "A credit network of " + std::to_string(network.size()) +
         " firms. L[i][j] is the amount firm i owes firm j; e[i] is the "
         "amount of external (non-network) assets held by firm i. Firms are "
         "indexed from 0 in this order: ";
  for (std::size_t i = 0; i < network.size(); ++i) {
    if (i) out += ", ";
    out += network.labels()[i];
  }
  out += ".\n\n" + render_matrix(network);
  out += "\n## Financial operation\n\n" + operation_description(kind);
  out += "\n## Clearing algorithm\n\n" + clearing_source;
  out += "\n## Optimization objective\n\n" + objective;
  out += "\n## Task\n\n" + task;
  return out;
}

// ---------------------------------------------------------------------------
// Plan replies

namespace {

struct FencedBlock {
  std::size_t outer_begin = 0;  // offset of the opening fence
  std::size_t outer_end = 0;    // one past the closing fence
  std::string content;
};

std::vector<FencedBlock> fenced_blocks(std::string_view text) {
  std::vector<FencedBlock> blocks;
  std::size_t pos = 0;
  std::optional<std::size_t> open;       // offset of the opening fence line
  std::optional<std::size_t> body_start;  // first byte after that line
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    const auto first = line.find_first_not_of(" \t\r");
    const bool fence =
        first != std::string_view::npos && line.substr(first, 3) == "```";
    if (fence) {
      if (!open) {
        open = pos;
        body_start = eol + 1;
      } else {
        FencedBlock block;
        block.outer_begin = *open;
        block.outer_end = std::min(eol + 1, text.size());
        if (*body_start < pos)
          block.content = std::string(text.substr(*body_start, pos - *body_start));
        blocks.push_back(std::move(block));
        open.reset();
      }
    }
    if (eol >= text.size()) break;
    pos = eol + 1;
  }
  if (open && *body_start <= text.size()) {
    FencedBlock block;
    block.outer_begin = *open;
    block.outer_end = text.size();
    block.content = std::string(text.substr(*body_start));
    blocks.push_back(std::move(block));
  }
  return blocks;
}

// Position of the last `keyword =` assignment inside `content`, if any.
std::optional<std::size_t> find_assignment(const std::string& content,
                                           std::string_view keyword) {
  std::optional<std::size_t> found;
  std::size_t pos = 0;
  while ((pos = content.find(keyword, pos)) != std::string::npos) {
    const bool boundary_before =
        pos == 0 || (!std::isalnum(static_cast<unsigned char>(content[pos - 1])) &&
                     content[pos - 1] != '_');
    std::size_t after = pos + keyword.size();
    while (after < content.size() &&
           std::isspace(static_cast<unsigned char>(content[after])))
      ++after;
    if (boundary_before && after < content.size() && content[after] == '=')
      found = pos;
    pos += keyword.size();
  }
  return found;
}

class PlanCursor {
 public:
  explicit PlanCursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  [[noreturn]] void fail_here(const std::string& what) const {
    fail(Errc::malformed_plan, what + " at offset " + std::to_string(pos_));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail_here(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool try_one(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::size_t parse_index() {
    skip_ws();
    std::size_t value = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail_here("expected a firm index");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

// Lists may be bracketed or parenthesized; the closer must match the opener.
char matching_closer(PlanCursor& cursor) {
  if (cursor.try_one('[')) return ']';
  if (cursor.try_one('(')) return ')';
  cursor.fail_here("expected '[' or '('");
}

}  // namespace

ExecutionPlan parse_plan_reply(std::string_view text, OperationKind kind) {
  const std::string_view keyword =
      kind == OperationKind::compression ? "cycles" : "remove";

  auto blocks = fenced_blocks(text);
  std::optional<std::size_t> chosen;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    if (find_assignment(blocks[k].content, keyword)) chosen = k;

  std::string content;
  std::string rationale;
  if (chosen) {
    content = blocks[*chosen].content;
    rationale = std::string(text.substr(0, blocks[*chosen].outer_begin)) +
                std::string(text.substr(blocks[*chosen].outer_end));
  } else if (blocks.empty() &&
             find_assignment(std::string(text), keyword)) {
    content = std::string(text);
  } else {
    fail(Errc::malformed_plan, std::string("no fenced block assigns \"") +
                                   std::string(keyword) + "\"");
  }

  const auto start = find_assignment(content, keyword);
  PlanCursor cursor(std::string_view(content).substr(*start + keyword.size()));
  cursor.expect('=');

  ExecutionPlan plan;
  plan.kind = kind == OperationKind::compression ? PlanKind::compression
                                                 : PlanKind::removal;
  plan.provenance = Provenance::llm;
  cursor.expect('[');
  if (!cursor.try_one(']')) {
    for (;;) {
      const char closer = matching_closer(cursor);
      if (kind == OperationKind::compression) {
        DebtCycle cycle;
        if (cursor.peek() != closer) {
          for (;;) {
            cycle.firms.push_back(cursor.parse_index());
            if (!cursor.try_one(',')) break;
          }
        }
        cursor.expect(closer);
        plan.cycles.push_back(std::move(cycle));
      } else {
        DebtEdge edge;
        edge.borrower = cursor.parse_index();
        cursor.expect(',');
        edge.lender = cursor.parse_index();
        cursor.expect(closer);
        plan.edges.push_back(edge);
      }
      if (cursor.try_one(']')) break;
      cursor.expect(',');
      if (cursor.try_one(']')) break;
    }
  }
  if (!cursor.at_end()) cursor.fail_here("unexpected text after the plan");

  // Trim the rationale.
  const auto begin = rationale.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    rationale.clear();
  } else {
    const auto end = rationale.find_last_not_of(" \t\r\n");
    rationale = rationale.substr(begin, end - begin + 1);
  }
  plan.rationale = std::move(rationale);
  return plan;
}

std::string render_plan_reply(const ExecutionPlan& plan) {
  std::string out;
  if (!plan.rationale.empty()) out += plan.rationale + "\n\n";
  out += "```plan\n";
  if (plan.kind == PlanKind::removal) {
    out += "remove = [";
    for (std::size_t k = 0; k < plan.edges.size(); ++k) {
      if (k) out += ", ";
      out += "(" + std::to_string(plan.edges[k].borrower) + ", " +
             std::to_string(plan.edges[k].lender) + ")";
    }
    out += "]\n";
  } else {
    out += "cycles = [";
    for (std::size_t k = 0; k < plan.cycles.size(); ++k) {
      if (k) out += ", ";
      out += "[";
      for (std::size_t f = 0; f < plan.cycles[k].firms.size(); ++f) {
        if (f) out += ", ";
        out += std::to_string(plan.cycles[k].firms[f]);
      }
      out += "]";
    }
    out += "]\n";
  }
  out += "```\n";
  return out;
}

ExtractionRecord llm_translate(LlmClient& client,
                               const std::string& statement) {
  const std::string reply = client.complete(build_translation_prompt(statement));
  return parse_extraction_record(reply);
}

ExecutionPlan llm_suggest(LlmClient& client, const CreditNetwork& network,
                          OperationKind kind, const ClearingConfig& config,
                          std::uint64_t order_seed) {
  (void)config;
  const std::string prompt = build_execution_prompt(
      network, kind, default_clearing_source(), default_objective_text(),
      default_task_text(kind));
  const std::string reply = client.complete(prompt);
  ExecutionPlan plan = parse_plan_reply(reply, kind);
  plan.seed = order_seed;

  if (plan.kind == PlanKind::compression) {
    std::vector<DebtCycle> validated;
    validated.reserve(plan.cycles.size());
    for (const auto& cycle : plan.cycles)
      validated.push_back(make_cycle(network, cycle.firms));
    plan.cycles = std::move(validated);
  } else {
    std::set<DebtEdge> seen;
    for (const auto& edge : plan.edges) {
      if (edge.borrower >= network.size() || edge.lender >= network.size())
        fail(Errc::invalid_plan,
             "edge (" + std::to_string(edge.borrower) + "," +
                 std::to_string(edge.lender) + ") is outside the network");
      if (!(network.liability(edge.borrower, edge.lender) > 0.0))
        fail(Errc::invalid_plan,
             "edge (" + std::to_string(edge.borrower) + "," +
                 std::to_string(edge.lender) + ") has no debt");
      if (!seen.insert(edge).second)
        fail(Errc::invalid_plan,
             "edge (" + std::to_string(edge.borrower) + "," +
                 std::to_string(edge.lender) + ") listed twice");
    }
  }
  return plan;
}

PlanMockClient::PlanMockClient(CreditNetwork network, OperationKind kind,
                               Provenance strategy, ClearingConfig config,
                               BruteForceCaps caps, std::uint64_t order_seed)
    : network_(std::move(network)),
      kind_(kind),
      strategy_(strategy),
      config_(std::move(config)),
      caps_(caps),
      order_seed_(order_seed) {}

std::string PlanMockClient::complete(const std::string&) {
  ExecutionPlan plan;
  switch (strategy_) {
    case Provenance::greedy:
      plan = kind_ == OperationKind::compression
                 ? plan_greedy_compression(network_, 3, order_seed_)
                 : plan_greedy_removal(network_, config_);
      break;
    case Provenance::oracle:
      plan = plan_brute_force(network_, kind_, config_, caps_, order_seed_);
      break;
    case Provenance::random:
      plan = plan_random(network_, kind_, order_seed_, order_seed_);
      break;
    default:
      plan.kind = kind_ == OperationKind::compression ? PlanKind::compression
                                                      : PlanKind::removal;
      break;
  }
  // Removal plans of kind none render as empty lists of the requested kind.
  plan.kind = kind_ == OperationKind::compression ? PlanKind::compression
                                                  : PlanKind::removal;
  plan.rationale = std::string("deterministic ") +
                   provenance_name(strategy_) + " delegate";
  return render_plan_reply(plan);
}

// ---------------------------------------------------------------------------
// Corpus helpers

std::vector<ExtractionRecord> records_from_network(
    const CreditNetwork& network) {
  std::vector<ExtractionRecord> records;
  records.reserve(network.size());
  for (std::size_t i = 0; i < network.size(); ++i) {
    ExtractionRecord record;
    record.firm = network.labels()[i];
    record.external_assets = network.external_asset(i);
    for (std::size_t j = 0; j < network.size(); ++j)
      if (network.liability(i, j) > 0.0)
        record.liabilities.push_back({network.labels()[i],
                                      network.labels()[j],
                                      network.liability(i, j)});
    for (std::size_t j = 0; j < network.size(); ++j)
      if (network.liability(j, i) > 0.0)
        record.liabilities.push_back({network.labels()[j],
                                      network.labels()[i],
                                      network.liability(j, i)});
    record.validate();
    records.push_back(std::move(record));
  }
  return records;
}

InjectionInfo inject_amount_conflict(std::vector<ExtractionRecord>& records,
                                     std::uint64_t seed, double delta) {
  // Candidates are claims whose edge some earlier record already reports;
  // perturbing one makes integration halt exactly at that record.
  struct Candidate {
    std::size_t record_index;
    std::size_t claim_index;
  };
  std::vector<Candidate> candidates;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 0; r < records.size(); ++r) {
    std::vector<std::pair<std::string, std::string>> own;
    for (std::size_t c = 0; c < records[r].liabilities.size(); ++c) {
      const auto& claim = records[r].liabilities[c];
      const std::pair<std::string, std::string> key{
          normalize_name(claim.borrower), normalize_name(claim.lender)};
      if (seen.count(key)) candidates.push_back({r, c});
      own.push_back(key);
    }
    for (const auto& key : own) seen.insert(key);
  }
  if (candidates.empty())
    fail(Errc::invariant_violation,
         "corpus has no dual-reported edge to perturb");

  SplitMix64 rng(derive_seed(seed, "inject"));
  const Candidate pick =
      candidates[static_cast<std::size_t>(rng.next_below(candidates.size()))];
  LiabilityClaim& claim = records[pick.record_index].liabilities[pick.claim_index];

  InjectionInfo info;
  info.record_index = pick.record_index;
  info.borrower = claim.borrower;
  info.lender = claim.lender;
  info.original = claim.amount;
  claim.amount += delta;
  info.perturbed = claim.amount;
  return info;
}

std::vector<MockScriptEntry> make_translation_script(
    const std::vector<std::string>& expect_substrings,
    const std::vector<ExtractionRecord>& records) {
  if (expect_substrings.size() != records.size())
    fail(Errc::dimension_mismatch,
         "need one expected substring per record");
  std::vector<MockScriptEntry> script;
  script.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k)
    script.push_back(
        {expect_substrings[k], render_extraction_record(records[k])});
  return script;
}

}  // namespace creditnet
