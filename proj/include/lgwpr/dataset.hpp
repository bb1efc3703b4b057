#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lgwpr {

/// Spatial count data. Row i carries a count y(i) observed at coords.row(i)
/// with exposure offset(i) and design row X.row(i); X.col(0) is the
/// intercept column of ones.
struct Dataset {
  Eigen::MatrixX2d coords;
  Eigen::VectorXd y;
  Eigen::VectorXd offset;
  Eigen::MatrixXd X;
  std::vector<std::string> covariate_names;  // k + 1 labels, "(Intercept)" first
  std::vector<std::string> ids;              // optional; empty means 1..n
  bool standardized = false;

  Eigen::Index n() const { return y.size(); }
  /// Number of covariates excluding the intercept.
  Eigen::Index k() const { return X.cols() - 1; }
  Eigen::Index p() const { return X.cols(); }

  std::string id(Eigen::Index i) const;
};

/// Builds a dataset from raw columns and validates it. `covariates` holds the
/// k non-intercept columns; an empty `offset` means all ones.
Dataset make_dataset(Eigen::MatrixX2d coords, Eigen::VectorXd y,
                     Eigen::VectorXd offset, const Eigen::MatrixXd& covariates,
                     std::vector<std::string> covariate_names = {});

/// Throws ValidationError naming the first offending row.
void validate(const Dataset& data);

/// Centers and scales every non-intercept column to unit sample SD.
/// Constant columns are left centred only.
Dataset standardize(Dataset data);

/// Column mapping for CSV ingestion.
struct Schema {
  std::string x_column = "x";
  std::string y_column = "y";
  std::string count_column = "count";
  std::optional<std::string> offset_column;
  std::optional<std::string> id_column;
  /// Empty: every remaining column becomes a covariate, in file order.
  std::vector<std::string> covariates;
  bool standardize = false;
};

Dataset read_dataset(const std::filesystem::path& path, const Schema& schema);

/// Writes columns id, x, y, count, offset, then the covariates. Reading the
/// result back with the default Schema plus offset_column = "offset" and
/// id_column = "id" reproduces the dataset to 17 significant digits.
void write_dataset(const Dataset& data, const std::filesystem::path& path);

}  // namespace lgwpr
