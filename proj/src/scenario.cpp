#include "cournot/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cournot/error.hpp"

namespace cournot {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::ParseError, path + ": " + reason);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double number_field(const json& obj, const char* key, const std::string& path) {
  return number(field(obj, key, path), path + "." + key);
}

std::vector<double> number_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

std::string id_of(const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  fail(path, "expected a string or integer id");
}

PriceSpec parse_price(const json& v, const std::string& path, bool integral) {
  const json& kind_v = field(v, "kind", path);
  if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();
  const json& p = field(v, "params", path);
  const std::string pp = path + ".params";
  try {
    if (kind == "linear") return PriceFunction::linear(number_field(p, "alpha", pp), number_field(p, "beta", pp));
    if (kind == "quadratic") {
      return PriceFunction::quadratic(number_field(p, "a", pp), number_field(p, "b", pp), number_field(p, "c", pp));
    }
    if (kind == "cubic") {
      return PriceFunction::cubic(number_field(p, "a", pp), number_field(p, "b", pp), number_field(p, "c", pp),
                                  number_field(p, "d", pp));
    }
    if (kind == "entropy") return PriceFunction::entropy(number_field(p, "a", pp), number_field(p, "b", pp));
    if (kind == "power") {
      return PriceFunction::power(number_field(p, "a", pp), number_field(p, "b", pp), number_field(p, "k", pp));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(pp, e.what());
  }
  if (kind == "table") {
    if (!integral) fail(path + ".kind", "table prices require \"integral\": true");
    std::vector<double> values = number_array(field(p, "values", pp), pp + ".values");
    if (values.empty()) fail(pp + ".values", "table is empty");
    return values;
  }
  fail(path + ".kind", "unknown price kind '" + kind + "'");
}

CostFunction parse_cost(const json& v, const std::string& path) {
  const json& kind_v = field(v, "kind", path);
  if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();
  const json& p = field(v, "params", path);
  const std::string pp = path + ".params";
  try {
    if (kind == "quadratic_total") return CostFunction::quadratic_total(number_field(p, "lambda", pp));
    if (kind == "separable_quadratic") {
      return CostFunction::separable_quadratic(number_array(field(p, "lambda", pp), pp + ".lambda"),
                                               number_array(field(p, "mu", pp), pp + ".mu"));
    }
    if (kind == "quadratic_form") {
      const json& rows = field(p, "A", pp);
      if (!rows.is_array()) fail(pp + ".A", "expected an array of rows");
      const auto d = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd A(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        const std::string rp = pp + ".A[" + std::to_string(r) + "]";
        const std::vector<double> row = number_array(rows[static_cast<std::size_t>(r)], rp);
        if (static_cast<Eigen::Index>(row.size()) != d) fail(rp, "matrix must be square");
        for (Eigen::Index c = 0; c < d; ++c) A(r, c) = row[static_cast<std::size_t>(c)];
      }
      const std::vector<double> b = number_array(field(p, "b", pp), pp + ".b");
      if (static_cast<Eigen::Index>(b.size()) != d) fail(pp + ".b", "length must match A");
      return CostFunction::quadratic_form(A, Eigen::Map<const Eigen::VectorXd>(b.data(), d));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(pp, e.what());
  }
  fail(path + ".kind", "unknown cost kind '" + kind + "'");
}

json price_to_json(const PriceSpec& spec) {
  if (const auto* table = std::get_if<std::vector<double>>(&spec)) {
    return {{"kind", "table"}, {"params", {{"values", *table}}}};
  }
  const auto& price = std::get<PriceFunction>(spec);
  json params;
  std::visit(
      [&params](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PriceFunction::Linear>) {
          params = {{"alpha", p.alpha}, {"beta", p.beta}};
        } else if constexpr (std::is_same_v<T, PriceFunction::Quadratic>) {
          params = {{"a", p.a}, {"b", p.b}, {"c", p.c}};
        } else if constexpr (std::is_same_v<T, PriceFunction::Cubic>) {
          params = {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}};
        } else if constexpr (std::is_same_v<T, PriceFunction::Entropy>) {
          params = {{"a", p.a}, {"b", p.b}};
        } else {
          params = {{"a", p.a}, {"b", p.b}, {"k", p.k}};
        }
      },
      price.params());
  return {{"kind", price.kind()}, {"params", params}};
}

json cost_to_json(const CostFunction& cost) {
  json params;
  std::visit(
      [&params](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CostFunction::QuadraticTotal>) {
          params = {{"lambda", p.lambda}};
        } else if constexpr (std::is_same_v<T, CostFunction::SeparableQuadratic>) {
          params = {{"lambda", p.lambda}, {"mu", p.mu}};
        } else {
          json rows = json::array();
          for (Eigen::Index r = 0; r < p.A.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < p.A.cols(); ++c) row.push_back(p.A(r, c));
            rows.push_back(row);
          }
          params = {{"A", rows}, {"b", std::vector<double>(p.b.data(), p.b.data() + p.b.size())}};
        }
      },
      cost.params());
  return {{"kind", cost.kind()}, {"params", params}};
}

NetworkOptions names_of(const ScenarioFile& s) {
  NetworkOptions opt;
  opt.market_names = s.market_ids;
  opt.firm_names = s.firm_ids;
  return opt;
}

// Structure and cost checks for table-priced scenarios, which cannot be
// expressed as a continuous network: placeholder prices stand in.
MarketNetwork skeleton(const ScenarioFile& s) {
  std::vector<PriceFunction> prices(s.prices.size(), PriceFunction::linear(1.0, 1.0));
  return build_network(s.firm_ids.size(), s.market_ids.size(), s.edges, std::move(prices), s.costs, names_of(s));
}

}  // namespace

bool ScenarioFile::has_table_price() const {
  for (const auto& p : prices) {
    if (std::holds_alternative<std::vector<double>>(p)) return true;
  }
  return false;
}

MarketNetwork ScenarioFile::network() const {
  if (has_table_price()) {
    throw Error(ErrorCode::MethodInapplicable, "table prices are only usable by the integral oligopoly method");
  }
  std::vector<PriceFunction> fs;
  for (const auto& p : prices) fs.push_back(std::get<PriceFunction>(p));
  return build_network(firm_ids.size(), market_ids.size(), edges, std::move(fs), costs, names_of(*this));
}

ScenarioFile parse_scenario(const json& doc) {
  if (!doc.is_object()) fail("$", "expected a JSON object");
  ScenarioFile s;
  const json& version = field(doc, "schema_version", "$");
  if (!version.is_number_integer() || version.get<int>() != 1) fail("$.schema_version", "only version 1 is supported");

  if (auto it = doc.find("integral"); it != doc.end()) {
    if (!it->is_boolean()) fail("$.integral", "expected true or false");
    s.integral = it->get<bool>();
  }
  if (auto it = doc.find("q_cap"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) fail("$.q_cap", "expected a positive integer");
    s.q_cap = it->get<Quantity>();
  }

  std::map<std::string, std::size_t> market_index;
  const json& markets = field(doc, "markets", "$");
  if (!markets.is_array() || markets.empty()) fail("$.markets", "expected a nonempty array");
  for (std::size_t i = 0; i < markets.size(); ++i) {
    const std::string path = "$.markets[" + std::to_string(i) + "]";
    std::string id = id_of(field(markets[i], "id", path), path + ".id");
    if (!market_index.emplace(id, i).second) fail(path + ".id", "duplicate market id '" + id + "'");
    s.market_ids.push_back(std::move(id));
    s.prices.push_back(parse_price(field(markets[i], "price", path), path + ".price", s.integral));
  }

  std::map<std::string, std::size_t> firm_index;
  const json& firms = field(doc, "firms", "$");
  if (!firms.is_array() || firms.empty()) fail("$.firms", "expected a nonempty array");
  for (std::size_t j = 0; j < firms.size(); ++j) {
    const std::string path = "$.firms[" + std::to_string(j) + "]";
    std::string id = id_of(field(firms[j], "id", path), path + ".id");
    if (!firm_index.emplace(id, j).second) fail(path + ".id", "duplicate firm id '" + id + "'");
    s.firm_ids.push_back(std::move(id));
    s.costs.push_back(parse_cost(field(firms[j], "cost", path), path + ".cost"));
  }

  const json& edges = field(doc, "edges", "$");
  if (!edges.is_array() || edges.empty()) fail("$.edges", "expected a nonempty array");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string path = "$.edges[" + std::to_string(k) + "]";
    if (!edges[k].is_array() || edges[k].size() != 2) fail(path, "expected [market_id, firm_id]");
    const std::string mid = id_of(edges[k][0], path + "[0]");
    const std::string fid = id_of(edges[k][1], path + "[1]");
    auto mi = market_index.find(mid);
    if (mi == market_index.end()) fail(path + "[0]", "unknown market id '" + mid + "'");
    auto fi = firm_index.find(fid);
    if (fi == firm_index.end()) fail(path + "[1]", "unknown firm id '" + fid + "'");
    s.edges.push_back(Edge{mi->second, fi->second});
  }
  std::sort(s.edges.begin(), s.edges.end());

  // Surface structural, price and cost errors now rather than at solve time.
  if (s.has_table_price()) {
    (void)skeleton(s);
  } else {
    (void)s.network();
  }
  return s;
}

ScenarioFile parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("$: invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_text(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

json scenario_to_json(const ScenarioFile& s) {
  json doc;
  doc["schema_version"] = s.schema_version;
  json markets = json::array();
  for (std::size_t i = 0; i < s.market_ids.size(); ++i) {
    markets.push_back({{"id", s.market_ids[i]}, {"price", price_to_json(s.prices[i])}});
  }
  json firms = json::array();
  for (std::size_t j = 0; j < s.firm_ids.size(); ++j) {
    firms.push_back({{"id", s.firm_ids[j]}, {"cost", cost_to_json(s.costs[j])}});
  }
  json edges = json::array();
  for (const Edge& e : s.edges) edges.push_back({s.market_ids[e.market], s.firm_ids[e.firm]});
  doc["markets"] = markets;
  doc["firms"] = firms;
  doc["edges"] = edges;
  if (s.integral) doc["integral"] = true;
  if (s.q_cap) doc["q_cap"] = *s.q_cap;
  return doc;
}

std::string write_scenario(const ScenarioFile& s) { return scenario_to_json(s).dump(2) + "\n"; }

bool is_separable(const ScenarioFile& s) {
  std::vector<std::size_t> degree(s.firm_ids.size(), 0);
  for (const Edge& e : s.edges) ++degree[e.firm];
  for (std::size_t j = 0; j < s.costs.size(); ++j) {
    if (!s.costs[j].separable_terms(degree[j])) return false;
  }
  return true;
}

std::vector<MarketOligopoly> scenario_oligopolies(const ScenarioFile& s) {
  const Quantity cap = s.q_cap.value_or(0);
  if (!s.has_table_price()) return decompose_separable(s.network(), cap);
  std::vector<MarketOligopoly> out = decompose_separable(skeleton(s), cap);
  for (auto& mo : out) {
    IntegerPrice price = std::visit(
        [](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, PriceFunction>) {
            return IntegerPrice(p);
          } else {
            return IntegerPrice(IntegerPrice::Table(p));
          }
        },
        s.prices[mo.market]);
    mo.oligopoly = make_oligopoly(std::move(price), mo.oligopoly.costs, cap);
  }
  return out;
}

double round_sig12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace cournot
