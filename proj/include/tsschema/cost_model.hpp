#pragma once

#include "tsschema/domain.hpp"
#include "tsschema/query.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace tss {

/// Affine latency regressions. Coefficient vectors hold the intercept first.
struct CostModel {
  Eigen::Vector4d query{0.5, 0.2, 0.01, 1e-5};  // c0, c_n, c_w, c_s
  Eigen::Vector2d update{0.5, 0.05};            // d0, d_w
  Eigen::Vector2d extract{1.0, 2e-7};           // e0, e_s
  Eigen::Vector2d load{1.0, 4e-7};              // l0, l_s
  double range_selectivity = 0.1;

  double query_time(double n, double w, double s) const { return query.dot(Eigen::Vector4d(1.0, n, w, s)); }
  double update_time(double w) const { return update.dot(Eigen::Vector2d(1.0, w)); }
  double extract_time(double bytes) const { return extract.dot(Eigen::Vector2d(1.0, bytes)); }
  double load_time(double bytes) const { return load.dot(Eigen::Vector2d(1.0, bytes)); }

  /// Throws ValidationError on negative slopes or selectivity outside (0, 1].
  void validate() const;
};

CostModel cost_model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const CostModel& m);

enum class Regression { query, update, extract, load };

/// Training rows for one regression: features exclude the intercept column.
struct Profile {
  Regression kind = Regression::query;
  Eigen::MatrixXd features;
  Eigen::VectorXd latency;
};

std::vector<std::string> feature_names(Regression kind);
Profile read_profile_csv(std::istream& in, Regression kind);

struct FitResult {
  Eigen::VectorXd coefficients;
  double residual_norm = 0;
  std::vector<std::string> warnings;
};

/// Throws Error on rank deficiency.
FitResult fit_ols(const Profile& profile);

/// Product of record counts along the path over the join-key cardinalities.
double chain_rows(const std::vector<std::string>& path, const EntityGraph& g);
double estimate_cardinality(const QueryAst& q, const EntityGraph& g, double range_selectivity);

/// C^U for a target created for step t, given the update frequency at t-1.
double maintenance_cost(double update_frequency_prev, double update_unit_cost, double load_cost, double interval);

} // namespace tss
