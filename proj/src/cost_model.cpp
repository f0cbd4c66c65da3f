#include "tsschema/cost_model.hpp"

#include "tsschema/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <istream>
#include <sstream>

namespace tss {

void CostModel::validate() const {
  auto check = [](const Eigen::VectorXd& v, const char* name) {
    for (Eigen::Index i = 1; i < v.size(); ++i)
      if (!(v[i] >= 0)) throw ValidationError(name, "slope coefficients must be non-negative");
    if (!(v[0] >= 0)) throw ValidationError(name, "intercept must be non-negative");
  };
  check(query, "query");
  check(update, "update");
  check(extract, "extract");
  check(load, "load");
  if (!(range_selectivity > 0 && range_selectivity <= 1))
    throw ValidationError("range_selectivity", "must lie in (0, 1]");
}

namespace {

template <int N>
Eigen::Matrix<double, N, 1> read_vector(const nlohmann::json& doc, const char* key, const Eigen::Matrix<double, N, 1>& fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_array() || v.size() != static_cast<std::size_t>(N))
    throw ValidationError(key, "expected " + std::to_string(N) + " coefficients");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) throw ValidationError(key, "coefficients must be numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

template <class V>
nlohmann::json vector_json(const V& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

} // namespace

CostModel cost_model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("cost_model", "expected an object");
  CostModel m;
  m.query = read_vector<4>(doc, "query", m.query);
  m.update = read_vector<2>(doc, "update", m.update);
  m.extract = read_vector<2>(doc, "extract", m.extract);
  m.load = read_vector<2>(doc, "load", m.load);
  if (doc.contains("range_selectivity")) m.range_selectivity = doc.at("range_selectivity").get<double>();
  m.validate();
  return m;
}

nlohmann::json to_json(const CostModel& m) {
  return {{"query", vector_json(m.query)},
          {"update", vector_json(m.update)},
          {"extract", vector_json(m.extract)},
          {"load", vector_json(m.load)},
          {"range_selectivity", m.range_selectivity}};
}

std::vector<std::string> feature_names(Regression kind) {
  switch (kind) {
  case Regression::query: return {"n", "w", "s"};
  case Regression::update: return {"w"};
  case Regression::extract:
  case Regression::load: return {"s"};
  }
  return {};
}

Profile read_profile_csv(std::istream& in, Regression kind) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(0, cell.find_first_not_of(" \t\r"));
      cell.erase(cell.find_last_not_of(" \t\r") + 1);
      cells.push_back(cell);
    }
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("profile", "empty profile");
  const auto header = split(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError("profile", "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto names = feature_names(kind);
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(column(n));
  const std::size_t lat = column("latency");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    std::vector<double> row;
    for (std::size_t c : cols) {
      if (c >= cells.size()) throw ValidationError("profile:" + std::to_string(line_no), "short row");
      row.push_back(std::stod(cells[c]));
    }
    if (lat >= cells.size()) throw ValidationError("profile:" + std::to_string(line_no), "short row");
    const double latency = std::stod(cells[lat]);
    if (!(latency > 0)) throw ValidationError("profile:" + std::to_string(line_no), "latency must be positive");
    row.push_back(latency);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("profile", "no data rows");
  Profile p;
  p.kind = kind;
  p.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  p.latency.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c)
      p.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    p.latency[static_cast<Eigen::Index>(r)] = rows[r].back();
  }
  return p;
}

FitResult fit_ols(const Profile& profile) {
  const Eigen::Index rows = profile.features.rows();
  const Eigen::Index k = profile.features.cols() + 1;
  if (rows != profile.latency.size()) throw Error("profile feature and latency row counts differ");
  Eigen::MatrixXd X(rows, k);
  X.col(0).setOnes();
  X.rightCols(k - 1) = profile.features;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (rows < k || qr.rank() < k)
    throw Error("rank-deficient profile: " + std::to_string(qr.rank()) + " independent rows for " + std::to_string(k) +
                " coefficients");
  FitResult out;
  out.coefficients = qr.solve(profile.latency);
  for (Eigen::Index i = 1; i < k; ++i) {
    if (out.coefficients[i] < 0) {
      out.warnings.push_back("negative slope " + std::to_string(out.coefficients[i]) + " for '" +
                             feature_names(profile.kind)[static_cast<std::size_t>(i - 1)] + "' clamped to 0");
      out.coefficients[i] = 0;
    }
  }
  out.residual_norm = (X * out.coefficients - profile.latency).norm();
  return out;
}

double chain_rows(const std::vector<std::string>& path, const EntityGraph& g) {
  double rows = 1;
  for (const auto& e : path) rows *= static_cast<double>(g.entity(e).record_count);
  for (std::size_t i = 1; i < path.size(); ++i) {
    auto edge = g.edge_between(path[i - 1], path[i]);
    if (!edge) throw ValidationError("from", "'" + path[i - 1] + "' and '" + path[i] + "' are not adjacent");
    rows /= static_cast<double>(g.attribute(g.join_key(*edge)).cardinality);
  }
  return rows;
}

double estimate_cardinality(const QueryAst& q, const EntityGraph& g, double range_selectivity) {
  double w = chain_rows(q.from_path, g);
  for (const auto& p : q.where)
    w *= p.is_equality() ? 1.0 / static_cast<double>(g.attribute(p.attr).cardinality) : range_selectivity;
  if (!q.group_by.empty()) {
    double groups = 1;
    for (const auto& a : q.group_by) groups *= static_cast<double>(g.attribute(a).cardinality);
    w = std::min(w, groups);
  }
  return std::max(w, 1.0);
}

double maintenance_cost(double update_frequency_prev, double update_unit_cost, double load_cost, double interval) {
  return update_frequency_prev * update_unit_cost * load_cost / interval;
}

} // namespace tss
