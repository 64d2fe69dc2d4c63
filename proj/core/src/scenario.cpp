#include "cpce/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cpce/errors.hpp"

namespace cpce {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Input iterator that publishes how far the parser has read, so SAX events can be
// mapped to source lines.
struct TrackingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  const char** mark = nullptr;

  reference operator*() const { return *p; }
  TrackingIterator& operator++() {
    ++p;
    *mark = p;
    return *this;
  }
  TrackingIterator operator++(int) {
    TrackingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const TrackingIterator& o) const { return p == o.p; }
  bool operator!=(const TrackingIterator& o) const { return p != o.p; }
};

// Records the starting line of every value, keyed by its dotted path
// ("bids[2].terms[0].coef").
class LineRecorder : public nlohmann::json_sax<json> {
 public:
  LineRecorder(std::string_view text, const char** mark) : text_(text), mark_(mark) {}

  std::map<std::string, int> lines;
  std::string error;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override { return open(false); }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_array() override { return close(); }
  bool key(string_t& k) override {
    stack_.back().key = k;
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) override {
    error = ex.what();
    return false;
  }

 private:
  struct Frame {
    bool array = false;
    std::size_t index = 0;
    std::string key;
    std::string path;
  };

  int current_line() {
    const std::size_t offset = static_cast<std::size_t>(*mark_ - text_.data());
    const std::size_t upto = offset == 0 ? 0 : offset - 1;  // the lexer reads one char ahead
    while (counted_ < upto && counted_ < text_.size()) {
      if (text_[counted_] == '\n') ++line_;
      ++counted_;
    }
    return line_;
  }

  std::string next_path() {
    if (stack_.empty()) return "";
    Frame& f = stack_.back();
    if (f.array) return f.path + "[" + std::to_string(f.index++) + "]";
    return f.path.empty() ? f.key : f.path + "." + f.key;
  }

  bool value() {
    lines.emplace(next_path(), current_line());
    return true;
  }
  bool open(bool array) {
    std::string path = next_path();
    lines.emplace(path, current_line());
    stack_.push_back(Frame{array, 0, {}, std::move(path)});
    return true;
  }
  bool close() {
    stack_.pop_back();
    return true;
  }

  std::string_view text_;
  const char** mark_;
  std::vector<Frame> stack_;
  std::size_t counted_ = 0;
  int line_ = 1;
};

struct Context {
  std::string source;
  std::map<std::string, int> lines;

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    std::ostringstream out;
    out << source;
    std::string probe = path;
    // Fall back to the nearest enclosing value for missing fields.
    while (true) {
      auto it = lines.find(probe);
      if (it != lines.end()) {
        out << ":" << it->second;
        break;
      }
      const auto cut = probe.find_last_of(".[");
      if (cut == std::string::npos) break;
      probe.erase(cut);
    }
    out << ": " << (path.empty() ? "<root>" : path) << ": " << message;
    throw ValidationError(out.str());
  }
};

class Node {
 public:
  Node(const json* value, std::string path, const Context* ctx)
      : value_(value), path_(std::move(path)), ctx_(ctx) {}

  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& message) const { ctx_->fail(path_, message); }

  bool has(const char* key) const { return value_->contains(key); }

  Node operator[](const char* key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    const std::string child = path_.empty() ? key : path_ + "." + key;
    if (it == value_->end()) ctx_->fail(child, "required field is missing");
    return Node(&*it, child, ctx_);
  }

  Node operator[](std::size_t i) const {
    return Node(&value_->at(i), path_ + "[" + std::to_string(i) + "]", ctx_);
  }

  std::size_t array_size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
  }

  void allow_keys(std::initializer_list<const char*> keys) const {
    if (!value_->is_object()) fail("expected an object");
    for (auto it = value_->begin(); it != value_->end(); ++it) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
        ctx_->fail(path_.empty() ? it.key() : path_ + "." + it.key(), "unknown field");
      }
    }
  }

  double number() const {
    if (!value_->is_number()) fail("expected a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long long integer() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    if (value_->is_number_unsigned() && value_->get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      fail("integer out of range");
    }
    return value_->get<long long>();
  }

  long long integer(long long lo, long long hi) const {
    const long long v = integer();
    if (v < lo || v > hi) {
      fail("expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
           std::to_string(v));
    }
    return v;
  }

  std::uint64_t unsigned_integer() const {
    if (!value_->is_number_unsigned()) fail("expected a non-negative integer");
    return value_->get<std::uint64_t>();
  }

  std::string string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }

  bool boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
  }

  bool is_array() const { return value_->is_array(); }

 private:
  const json* value_;
  std::string path_;
  const Context* ctx_;
};

Marginal read_marginal(const Node& n) {
  const std::string kind = n["kind"].string();
  try {
    if (kind == "normal") {
      n.allow_keys({"kind", "mean", "std"});
      return Marginal::normal(n["mean"].number(), n["std"].number());
    }
    if (kind == "beta") {
      n.allow_keys({"kind", "alpha", "beta", "lower", "upper"});
      const double lower = n.has("lower") ? n["lower"].number() : 0.0;
      const double upper = n.has("upper") ? n["upper"].number() : 1.0;
      return Marginal::beta(n["alpha"].number(), n["beta"].number(), lower, upper);
    }
    if (kind == "uniform") {
      n.allow_keys({"kind", "lower", "upper"});
      return Marginal::uniform(n["lower"].number(), n["upper"].number());
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    n.fail(e.what());
  }
  n["kind"].fail("unknown marginal kind '" + kind + "' (expected normal, beta or uniform)");
}

Eigen::MatrixXd read_correlation(const Node& n, std::size_t d) {
  const std::size_t rows = n.array_size();
  Eigen::MatrixXd sigma(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const auto di = static_cast<Eigen::Index>(d);
  if (rows == d * d && !n[std::size_t{0}].is_array()) {
    for (std::size_t i = 0; i < rows; ++i) {
      sigma(static_cast<Eigen::Index>(i) / di, static_cast<Eigen::Index>(i) % di) = n[i].number();
    }
  } else if (rows == d) {
    for (std::size_t r = 0; r < d; ++r) {
      const Node row = n[r];
      if (row.array_size() != d) row.fail("expected " + std::to_string(d) + " entries");
      for (std::size_t c = 0; c < d; ++c) {
        sigma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].number();
      }
    }
  } else {
    n.fail("expected " + std::to_string(d) + " rows of " + std::to_string(d) +
           " entries or a flat list of " + std::to_string(d * d));
  }
  try {
    GaussianCopula check(sigma);
  } catch (const Error& e) {
    n.fail(e.what());
  }
  return sigma;
}

std::vector<Index> read_index_list(const Node& n, std::size_t d) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < n.array_size(); ++i) {
    out.push_back(static_cast<Index>(n[i].integer(0, static_cast<long long>(d) - 1)));
  }
  return out;
}

MonomialConfig read_monomials(const Node& n, std::size_t d) {
  n.allow_keys({"max_degree", "groups", "keep_cross_terms", "whitelist"});
  MonomialConfig cfg;
  cfg.max_degree = static_cast<int>(n["max_degree"].integer(1, 16));
  if (n.has("groups")) {
    const Node groups = n["groups"];
    std::set<Index> seen;
    for (std::size_t g = 0; g < groups.array_size(); ++g) {
      auto group = read_index_list(groups[g], d);
      for (std::size_t i = 0; i < group.size(); ++i) {
        if (!seen.insert(group[i]).second) {
          groups[g][i].fail("variable " + std::to_string(group[i]) + " appears in more than one group");
        }
      }
      cfg.groups.push_back(std::move(group));
    }
  }
  if (n.has("keep_cross_terms")) cfg.keep_cross_terms = n["keep_cross_terms"].boolean();
  if (n.has("whitelist")) {
    const Node wl = n["whitelist"];
    for (std::size_t w = 0; w < wl.array_size(); ++w) {
      const Node e = wl[w];
      if (e.array_size() != d) e.fail("expected an exponent vector of length " + std::to_string(d));
      Exponents exps(d);
      for (std::size_t i = 0; i < d; ++i) exps[i] = static_cast<int>(e[i].integer(0, 64));
      cfg.whitelist.push_back(std::move(exps));
    }
  }
  return cfg;
}

BidFunction read_bid(const Node& n, std::size_t d) {
  n.allow_keys({"id", "zone", "cost", "terms"});
  const std::string id = n["id"].string();
  if (id.empty()) n["id"].fail("bid id must not be empty");
  const std::string zone_text = n["zone"].string();
  if (zone_text != "X" && zone_text != "Y") n["zone"].fail("expected \"X\" or \"Y\"");
  const double cost = n["cost"].number();
  if (cost < 0.0) n["cost"].fail("cost must be >= 0");

  const Node terms = n["terms"];
  if (terms.array_size() == 0) terms.fail("a bid needs at least one term");
  std::vector<PolyTerm> out;
  for (std::size_t t = 0; t < terms.array_size(); ++t) {
    const Node term = terms[t];
    term.allow_keys({"coef", "powers"});
    PolyTerm pt;
    pt.coef = term["coef"].number();
    if (term.has("powers")) {
      const Node powers = term["powers"];
      std::set<Index> used;
      for (std::size_t p = 0; p < powers.array_size(); ++p) {
        const Node pair = powers[p];
        if (pair.array_size() != 2) pair.fail("expected [variable index, power]");
        const auto idx = static_cast<Index>(pair[std::size_t{0}].integer(0, static_cast<long long>(d) - 1));
        const int pw = static_cast<int>(pair[std::size_t{1}].integer(1, 64));
        if (!used.insert(idx).second) pair.fail("variable " + std::to_string(idx) + " listed twice");
        pt.powers.emplace_back(idx, pw);
      }
    }
    out.push_back(std::move(pt));
  }
  try {
    return BidFunction(id, std::move(out), zone_text == "X" ? Zone::X : Zone::Y, cost);
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

void read_procurement(const Node& n, Scenario& s) {
  n.allow_keys({"reserve_x", "reserve_y", "tie_xy", "tie_yx", "epsilon"});
  ProcurementSpec& p = s.procurement;
  p.reserve_x = n["reserve_x"].number();
  p.reserve_y = n["reserve_y"].number();
  p.tie_xy = n["tie_xy"].number();
  p.tie_yx = n["tie_yx"].number();
  if (n.has("epsilon")) p.epsilon = n["epsilon"].number();
  try {
    p.check();
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

void fill_bid_layout(Scenario& s) {
  s.procurement.n_x = static_cast<std::size_t>(
      std::count_if(s.bids.begin(), s.bids.end(), [](const BidFunction& b) { return b.zone() == Zone::X; }));
  s.procurement.n_y = s.bids.size() - s.procurement.n_x;
  s.procurement.costs.resize(static_cast<Eigen::Index>(s.bids.size()));
  for (std::size_t i = 0; i < s.bids.size(); ++i) {
    s.procurement.costs[static_cast<Eigen::Index>(i)] = s.bids[i].cost();
  }
}

Scenario read_scenario(const Node& root) {
  root.allow_keys({"schema_version", "name", "description", "dimension", "marginals", "correlation",
                   "monomials", "quadrature", "bids", "procurement", "validation"});
  const long long version = root["schema_version"].integer();
  if (version != kScenarioSchemaVersion) {
    root["schema_version"].fail("unsupported schema version " + std::to_string(version) + " (expected " +
                                std::to_string(kScenarioSchemaVersion) + ")");
  }
  Scenario s;
  s.name = root["name"].string();
  if (root.has("description")) root["description"].string();
  s.dimension = static_cast<std::size_t>(root["dimension"].integer(1, 64));
  const std::size_t d = s.dimension;

  const Node marginals = root["marginals"];
  if (marginals.array_size() != d) {
    marginals.fail("expected " + std::to_string(d) + " marginals, got " + std::to_string(marginals.array_size()));
  }
  for (std::size_t i = 0; i < d; ++i) s.marginals.push_back(read_marginal(marginals[i]));

  s.correlation = root.has("correlation") ? read_correlation(root["correlation"], d)
                                          : Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                                      static_cast<Eigen::Index>(d));
  if (root.has("monomials")) s.monomials = read_monomials(root["monomials"], d);

  if (root.has("quadrature")) {
    const Node q = root["quadrature"];
    q.allow_keys({"k", "node_budget"});
    if (q.has("k")) s.quadrature.k = static_cast<int>(q["k"].integer(1, kMaxRuleOrder));
    if (q.has("node_budget")) {
      s.quadrature.node_budget = q["node_budget"].unsigned_integer();
      if (s.quadrature.node_budget == 0) q["node_budget"].fail("node budget must be positive");
    }
  }

  const Node bids = root["bids"];
  if (bids.array_size() == 0) bids.fail("at least one bid is required");
  std::set<std::string> ids;
  bool seen_y = false;
  for (std::size_t i = 0; i < bids.array_size(); ++i) {
    BidFunction bid = read_bid(bids[i], d);
    if (!ids.insert(bid.id()).second) bids[i]["id"].fail("duplicate bid id '" + bid.id() + "'");
    if (bid.zone() == Zone::Y) seen_y = true;
    if (bid.zone() == Zone::X && seen_y) bids[i]["zone"].fail("zone X bids must precede zone Y bids");
    s.bids.push_back(std::move(bid));
  }

  fill_bid_layout(s);
  read_procurement(root["procurement"], s);

  if (root.has("validation")) {
    const Node v = root["validation"];
    v.allow_keys({"samples", "seed", "bins"});
    if (v.has("samples")) s.validation.samples = static_cast<std::size_t>(v["samples"].integer(1, 100'000'000));
    if (v.has("seed")) s.validation.seed = v["seed"].unsigned_integer();
    if (v.has("bins")) s.validation.bins = static_cast<std::size_t>(v["bins"].integer(1, 100'000));
  }
  return s;
}

ordered_json marginal_json(const Marginal& m) {
  ordered_json j;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, NormalParams>) {
          j["kind"] = "normal";
          j["mean"] = p.mean;
          j["std"] = p.stddev;
        } else if constexpr (std::is_same_v<P, BetaParams>) {
          j["kind"] = "beta";
          j["alpha"] = p.alpha;
          j["beta"] = p.beta;
          j["lower"] = p.lower;
          j["upper"] = p.upper;
        } else {
          j["kind"] = "uniform";
          j["lower"] = p.lower;
          j["upper"] = p.upper;
        }
      },
      m.params());
  return j;
}

// ---- canonical scenarios ---------------------------------------------------

PolyTerm term(double coef, std::vector<std::pair<Index, int>> powers = {}) {
  return PolyTerm{coef, std::move(powers)};
}

// Four locations with an irradiance (2l) and a temperature (2l + 1) variable;
// locations 0 and 1 form zone X, 2 and 3 zone Y.
Eigen::MatrixXd four_location_correlation() {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(8, 8);
  for (int l = 0; l < 4; ++l) {
    sigma(2 * l, 2 * l + 1) = sigma(2 * l + 1, 2 * l) = 0.6;
    for (int m = 0; m < 4; ++m) {
      if (m != l) sigma(2 * l, 2 * m) = 0.25;
    }
  }
  return sigma;
}

std::vector<std::vector<Index>> location_groups() {
  return {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
}

Scenario normal8() {
  Scenario s;
  s.name = "normal8";
  s.dimension = 8;
  for (int i = 0; i < 8; ++i) s.marginals.push_back(Marginal::normal(30.0 + 2.0 * i, 3.0 + 0.5 * i));
  s.correlation = four_location_correlation();
  s.monomials.max_degree = 1;
  s.quadrature.k = 8;
  for (Index l = 0; l < 4; ++l) {
    const Zone zone = l < 2 ? Zone::X : Zone::Y;
    const Index g = 2 * l;
    const Index t = 2 * l + 1;
    s.bids.emplace_back("pv" + std::to_string(l), std::vector<PolyTerm>{term(5.0), term(1.5, {{g, 1}}), term(-0.3, {{t, 1}})},
                        zone, 1.0);
    s.bids.emplace_back("wind" + std::to_string(l),
                        std::vector<PolyTerm>{term(10.0), term(0.8, {{g, 1}}), term(0.1, {{t, 1}})}, zone, 1.0);
  }
  s.procurement.reserve_x = s.procurement.reserve_y = 100.0;
  s.procurement.tie_xy = s.procurement.tie_yx = 100.0;
  s.procurement.epsilon = 0.01;
  s.validation = {100000, 20240611, 60};
  fill_bid_layout(s);
  return s;
}

Scenario beta8() {
  Scenario s;
  s.name = "beta8";
  s.dimension = 8;
  for (int l = 0; l < 4; ++l) {
    s.marginals.push_back(Marginal::beta(2.0, 2.0, 0.0, 1.2));    // irradiance, kW/m^2
    s.marginals.push_back(Marginal::beta(5.0, 2.0, -10.0, 40.0));  // module temperature, deg C
  }
  s.correlation = four_location_correlation();
  s.monomials.max_degree = 2;
  s.monomials.groups = location_groups();
  s.monomials.keep_cross_terms = true;
  s.quadrature.k = 15;
  for (Index l = 0; l < 4; ++l) {
    const Zone zone = l < 2 ? Zone::X : Zone::Y;
    const Index g = 2 * l;
    const Index t = 2 * l + 1;
    // PV plant: quadratic irradiance response with temperature derating.
    s.bids.emplace_back("pv" + std::to_string(l),
                        std::vector<PolyTerm>{term(150.0), term(900.0, {{g, 1}}), term(-250.0, {{g, 2}}),
                                              term(-6.0, {{g, 1}, {t, 1}})},
                        zone, 1.0);
    // Storage-backed plant: flatter response, mild temperature dependence.
    s.bids.emplace_back("hybrid" + std::to_string(l),
                        std::vector<PolyTerm>{term(300.0), term(400.0, {{g, 1}}), term(150.0, {{g, 2}}),
                                              term(2.0, {{g, 1}, {t, 1}})},
                        zone, 1.0);
  }
  s.procurement.reserve_x = s.procurement.reserve_y = 1000.0;
  s.procurement.tie_xy = s.procurement.tie_yx = 500.0;
  s.procurement.epsilon = 0.01;
  s.validation = {100000, 20240611, 60};
  fill_bid_layout(s);
  return s;
}

Scenario toy1d() {
  Scenario s;
  s.name = "toy1d";
  s.dimension = 1;
  s.marginals.push_back(Marginal::normal(10.0, 2.0));
  s.correlation = Eigen::MatrixXd::Identity(1, 1);
  s.monomials.max_degree = 2;
  s.bids.emplace_back("x0", std::vector<PolyTerm>{term(20.0), term(1.0, {{0, 1}})}, Zone::X, 1.0);
  s.bids.emplace_back("y0", std::vector<PolyTerm>{term(15.0), term(0.5, {{0, 1}}), term(0.05, {{0, 2}})}, Zone::Y,
                      2.0);
  s.procurement.reserve_x = 5.0;
  s.procurement.reserve_y = 5.0;
  s.procurement.tie_xy = s.procurement.tie_yx = 10.0;
  s.validation = {20000, 7, 40};
  fill_bid_layout(s);
  return s;
}

}  // namespace

JointModel Scenario::model() const { return JointModel(GaussianCopula(correlation), marginals); }

MonomialFilter Scenario::filter() const {
  return MonomialFilter{monomials.groups, monomials.keep_cross_terms, monomials.whitelist};
}

int Scenario::quadrature_order() const {
  if (quadrature.k) return *quadrature.k;
  int degree = monomials.max_degree;
  for (const auto& b : bids) degree = std::max(degree, b.degree());
  return std::min(default_projection_order(degree, monomials.max_degree), kMaxRuleOrder);
}

IntegrationOptions Scenario::integration(unsigned threads) const {
  return IntegrationOptions{quadrature.node_budget, threads};
}

Scenario parse_scenario(std::string_view text, std::string_view source) {
  Context ctx;
  ctx.source = std::string(source);

  const char* mark = text.data();
  LineRecorder recorder(text, &mark);
  const TrackingIterator first{text.data(), &mark};
  const TrackingIterator last{text.data() + text.size(), &mark};
  if (!json::sax_parse(first, last, &recorder) || !recorder.error.empty()) {
    std::string msg = recorder.error.empty() ? "malformed JSON" : recorder.error;
    // "[json.exception.parse_error.101] parse error at line 3, column 5: ..."
    const auto pos = msg.find("] ");
    if (pos != std::string::npos) msg = msg.substr(pos + 2);
    throw ValidationError(ctx.source + ": " + msg);
  }
  ctx.lines = std::move(recorder.lines);

  const json doc = json::parse(text.begin(), text.end());
  return read_scenario(Node(&doc, "", &ctx));
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open scenario file");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text, path.string());
}

std::string to_json(const Scenario& s) {
  ordered_json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = s.name;
  j["dimension"] = s.dimension;
  j["marginals"] = ordered_json::array();
  for (const auto& m : s.marginals) j["marginals"].push_back(marginal_json(m));
  j["correlation"] = ordered_json::array();
  for (Eigen::Index r = 0; r < s.correlation.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < s.correlation.cols(); ++c) row.push_back(s.correlation(r, c));
    j["correlation"].push_back(row);
  }
  ordered_json mono;
  mono["max_degree"] = s.monomials.max_degree;
  mono["groups"] = s.monomials.groups;
  mono["keep_cross_terms"] = s.monomials.keep_cross_terms;
  mono["whitelist"] = s.monomials.whitelist;
  j["monomials"] = mono;
  ordered_json quad;
  if (s.quadrature.k) quad["k"] = *s.quadrature.k;
  quad["node_budget"] = s.quadrature.node_budget;
  j["quadrature"] = quad;
  j["bids"] = ordered_json::array();
  for (const auto& b : s.bids) {
    ordered_json bj;
    bj["id"] = b.id();
    bj["zone"] = to_string(b.zone());
    bj["cost"] = b.cost();
    bj["terms"] = ordered_json::array();
    for (const auto& t : b.terms()) {
      ordered_json tj;
      tj["coef"] = t.coef;
      tj["powers"] = ordered_json::array();
      for (const auto& [idx, pw] : t.powers) tj["powers"].push_back({idx, pw});
      bj["terms"].push_back(tj);
    }
    j["bids"].push_back(bj);
  }
  ordered_json proc;
  proc["reserve_x"] = s.procurement.reserve_x;
  proc["reserve_y"] = s.procurement.reserve_y;
  proc["tie_xy"] = s.procurement.tie_xy;
  proc["tie_yx"] = s.procurement.tie_yx;
  proc["epsilon"] = s.procurement.epsilon;
  j["procurement"] = proc;
  ordered_json val;
  val["samples"] = s.validation.samples;
  val["seed"] = s.validation.seed;
  val["bins"] = s.validation.bins;
  j["validation"] = val;
  return j.dump(2) + "\n";
}

Scenario canonical_scenario(std::string_view name) {
  if (name == "normal8") return normal8();
  if (name == "beta8") return beta8();
  if (name == "toy1d") return toy1d();
  throw ParameterError("unknown canonical scenario '" + std::string(name) + "'");
}

std::vector<std::string> canonical_scenario_names() { return {"normal8", "beta8", "toy1d"}; }

}  // namespace cpce
