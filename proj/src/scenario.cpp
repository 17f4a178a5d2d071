#include "kellygame/scenario.hpp"

#include <fstream>
#include <sstream>

namespace kelly {

namespace {

using nlohmann::json;

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) throw ScenarioError(where, "expected a number");
  return j.get<double>();
}

Vector<double> vector_at(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where, "expected an array of numbers");
  Vector<double> v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_at(j[i], where + "/" + std::to_string(i));
  return v;
}

Matrix<double> matrix_at(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix<double> m(rows, rows);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector<double> row = vector_at(j[i], where + "/" + std::to_string(i));
    if (row.size() != rows) throw ScenarioError(where + "/" + std::to_string(i), "row length differs from row count");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

const json& require(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(std::string("/") + key, "missing field");
  return *it;
}

std::string field_for(Errc code) {
  switch (code) {
    case Errc::non_positive_volatility: return "/sigma";
    case Errc::invalid_correlation:
    case Errc::singular_covariance: return "/rho";
    default: return "/";
  }
}

std::int64_t integer_at(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ScenarioError(where, "expected an integer");
  return j.get<std::int64_t>();
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(line_column(text, e.byte == 0 ? 0 : e.byte - 1), "malformed JSON");
  }
  if (!doc.is_object()) throw ScenarioError("/", "scenario must be a JSON object");

  const double r = number_at(require(doc, "r"), "/r");
  Vector<double> mu = vector_at(require(doc, "mu"), "/mu");
  Vector<double> sigma = vector_at(require(doc, "sigma"), "/sigma");
  Matrix<double> rho = matrix_at(require(doc, "rho"), "/rho");
  if (sigma.size() != mu.size()) throw ScenarioError("/sigma", "length differs from /mu");
  if (rho.rows() != mu.size()) throw ScenarioError("/rho", "dimension differs from /mu");

  std::optional<Market> market;
  try {
    market = build_market(r, std::move(mu), std::move(sigma), std::move(rho));
  } catch (const Error& e) {
    throw ScenarioError(field_for(e.code()), e.what());
  }
  Scenario s{*std::move(market), std::nullopt, std::nullopt, std::nullopt};

  for (const char* key : {"b", "c"}) {
    if (!doc.contains(key)) continue;
    const std::string where = std::string("/") + key;
    Rule rule(vector_at(doc[key], where));
    if (rule.size() != s.market.dimension()) throw ScenarioError(where, "length differs from /mu");
    (key[0] == 'b' ? s.b : s.c) = std::move(rule);
  }

  if (doc.contains("sim")) {
    const json& sim = doc["sim"];
    if (!sim.is_object()) throw ScenarioError("/sim", "expected an object");
    SimConfig cfg;
    if (sim.contains("T")) cfg.horizon = number_at(sim["T"], "/sim/T");
    if (sim.contains("steps")) cfg.steps = integer_at(sim["steps"], "/sim/steps");
    if (sim.contains("paths")) cfg.paths = integer_at(sim["paths"], "/sim/paths");
    if (sim.contains("seed")) {
      if (!sim["seed"].is_number_unsigned()) throw ScenarioError("/sim/seed", "expected an unsigned integer");
      cfg.seed = sim["seed"].get<std::uint64_t>();
    }
    try {
      cfg.validate();
    } catch (const Error& e) {
      throw ScenarioError("/sim", e.what());
    }
    s.sim = cfg;
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioIoError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ":" + e.where(), e.detail());
  }
}

nlohmann::json to_json(const Market& m) {
  json rho = json::array();
  for (Eigen::Index i = 0; i < m.dimension(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.dimension(); ++j) row.push_back(m.correlation()(i, j));
    rho.push_back(std::move(row));
  }
  return {{"r", m.rate()},
          {"mu", std::vector<double>(m.drift().begin(), m.drift().end())},
          {"sigma", std::vector<double>(m.volatility().begin(), m.volatility().end())},
          {"rho", std::move(rho)}};
}

nlohmann::json to_json(const Rule& rule) {
  return std::vector<double>(rule.weights.begin(), rule.weights.end());
}

nlohmann::json to_json(const Estimate& e) {
  return {{"estimate", e.estimate}, {"std_error", e.std_error}, {"paths", e.samples}, {"seed", e.seed}};
}

nlohmann::json to_json(const SimConfig& cfg) {
  return {{"T", cfg.horizon}, {"steps", cfg.steps}, {"paths", cfg.paths}, {"seed", cfg.seed}};
}

}  // namespace kelly
