#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cournot/network.hpp"
#include "cournot/oligopoly.hpp"

namespace cournot {

/// Market price as written in a scenario: analytic, or a table P(0), P(1), ...
/// (tables only make sense for integral scenarios).
using PriceSpec = std::variant<PriceFunction, std::vector<double>>;

/// In-memory form of a scenario file (schema_version 1).
///
/// Edges are held in canonical (market index, firm index) order, where the
/// indices are positions in the markets/firms arrays.
struct ScenarioFile {
  int schema_version = 1;
  std::vector<std::string> market_ids;
  std::vector<PriceSpec> prices;
  std::vector<std::string> firm_ids;
  std::vector<CostFunction> costs;
  std::vector<Edge> edges;
  bool integral = false;
  std::optional<Quantity> q_cap;

  bool has_table_price() const;
  /// Throws MethodInapplicable when a market price is a table.
  MarketNetwork network() const;
};

/// Throws Error(ParseError) naming the offending field path, or the
/// network validation error for structurally invalid instances.
ScenarioFile parse_scenario(const nlohmann::ordered_json& doc);
ScenarioFile parse_scenario_text(const std::string& text);
ScenarioFile load_scenario(const std::string& path);

nlohmann::ordered_json scenario_to_json(const ScenarioFile& s);
std::string write_scenario(const ScenarioFile& s);

/// True when every firm's cost splits into per-market terms.
bool is_separable(const ScenarioFile& s);

/// One integral oligopoly per market. Throws NotSeparable.
std::vector<MarketOligopoly> scenario_oligopolies(const ScenarioFile& s);

/// x rounded to 12 significant digits (machine output).
double round_sig12(double x);

}  // namespace cournot
