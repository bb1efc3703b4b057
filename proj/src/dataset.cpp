#include "lgwpr/dataset.hpp"

#include <cmath>
#include <sstream>

#include "lgwpr/csv.hpp"
#include "lgwpr/error.hpp"

namespace lgwpr {

std::string Dataset::id(Eigen::Index i) const {
  if (!ids.empty()) return ids[static_cast<std::size_t>(i)];
  return std::to_string(i + 1);
}

std::string IdentificationReport::describe() const {
  std::ostringstream os;
  os << "identification: " << n_positive << " positive counts, design rank "
     << design_rank_on_positive << " of " << n_parameters
     << " on the positive subsample ("
     << (identifiable_necessary ? "necessary condition holds"
                                : "necessary condition violated")
     << ")";
  return os.str();
}

void validate(const Dataset& data) {
  const Eigen::Index n = data.y.size();
  if (n == 0) throw ValidationError("dataset has no rows");
  if (data.offset.size() != n || data.X.rows() != n || data.coords.rows() != n)
    throw ValidationError("dataset columns have inconsistent lengths");
  if (data.X.cols() < 1) throw ValidationError("design matrix has no columns");
  if (static_cast<Eigen::Index>(data.covariate_names.size()) != data.X.cols())
    throw ValidationError("covariate name count does not match design width");
  if (!data.ids.empty() && static_cast<Eigen::Index>(data.ids.size()) != n)
    throw ValidationError("id count does not match row count");
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    const double yi = data.y(i);
    if (!std::isfinite(yi) || yi < 0 || yi != std::floor(yi))
      throw ValidationError("row " + std::to_string(i + 1) +
                                ": count must be a non-negative integer",
                            row);
    if (!(data.offset(i) > 0) || !std::isfinite(data.offset(i)))
      throw ValidationError(
          "row " + std::to_string(i + 1) + ": offset must be positive", row);
    if (!data.coords.row(i).allFinite())
      throw ValidationError(
          "row " + std::to_string(i + 1) + ": coordinates must be finite", row);
    if (data.X(i, 0) != 1.0)
      throw ValidationError(
          "row " + std::to_string(i + 1) + ": intercept column must be 1", row);
    if (!data.X.row(i).allFinite())
      throw ValidationError(
          "row " + std::to_string(i + 1) + ": covariates must be finite", row);
  }
}

Dataset make_dataset(Eigen::MatrixX2d coords, Eigen::VectorXd y,
                     Eigen::VectorXd offset, const Eigen::MatrixXd& covariates,
                     std::vector<std::string> covariate_names) {
  const Eigen::Index n = y.size();
  if (covariates.rows() != n)
    throw ValidationError("covariate rows do not match count length");
  Dataset data;
  data.coords = std::move(coords);
  data.y = std::move(y);
  data.offset = offset.size() == 0 ? Eigen::VectorXd::Ones(n) : std::move(offset);
  data.X.resize(n, covariates.cols() + 1);
  data.X.col(0).setOnes();
  data.X.rightCols(covariates.cols()) = covariates;
  if (covariate_names.empty()) {
    for (Eigen::Index c = 0; c < covariates.cols(); ++c)
      covariate_names.push_back("x" + std::to_string(c + 1));
  }
  if (static_cast<Eigen::Index>(covariate_names.size()) != covariates.cols())
    throw ValidationError("covariate name count does not match columns");
  data.covariate_names.push_back("(Intercept)");
  for (auto& name : covariate_names) data.covariate_names.push_back(name);
  validate(data);
  return data;
}

Dataset standardize(Dataset data) {
  const double n = static_cast<double>(data.n());
  for (Eigen::Index c = 1; c < data.X.cols(); ++c) {
    auto col = data.X.col(c);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = n > 1 ? std::sqrt(col.squaredNorm() / (n - 1)) : 0.0;
    if (sd > 0) col /= sd;
  }
  data.standardized = true;
  return data;
}

Dataset read_dataset(const std::filesystem::path& path, const Schema& schema) {
  const csv::Table table = csv::read(path);
  const std::size_t cx = table.column(schema.x_column);
  const std::size_t cy = table.column(schema.y_column);
  const std::size_t cc = table.column(schema.count_column);
  std::optional<std::size_t> co, cid;
  if (schema.offset_column) co = table.column(*schema.offset_column);
  if (schema.id_column) cid = table.column(*schema.id_column);

  std::vector<std::size_t> cov_cols;
  std::vector<std::string> cov_names;
  if (schema.covariates.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == cx || c == cy || c == cc || (co && c == *co) ||
          (cid && c == *cid))
        continue;
      cov_cols.push_back(c);
      cov_names.push_back(table.header[c]);
    }
  } else {
    for (const auto& name : schema.covariates) {
      cov_cols.push_back(table.column(name));
      cov_names.push_back(name);
    }
  }

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  Eigen::MatrixX2d coords(n, 2);
  Eigen::VectorXd y(n), offset = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd cov(n, static_cast<Eigen::Index>(cov_cols.size()));
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = table.rows[static_cast<std::size_t>(i)];
    const std::size_t line = static_cast<std::size_t>(i) + 2;
    coords(i, 0) = csv::to_double(r[cx], line, cx + 1);
    coords(i, 1) = csv::to_double(r[cy], line, cy + 1);
    y(i) = csv::to_double(r[cc], line, cc + 1);
    if (co) offset(i) = csv::to_double(r[*co], line, *co + 1);
    for (std::size_t c = 0; c < cov_cols.size(); ++c)
      cov(i, static_cast<Eigen::Index>(c)) =
          csv::to_double(r[cov_cols[c]], line, cov_cols[c] + 1);
    if (cid) ids.push_back(r[*cid]);
  }
  Dataset data = make_dataset(std::move(coords), std::move(y),
                              std::move(offset), cov, std::move(cov_names));
  data.ids = std::move(ids);
  if (schema.standardize) data = standardize(std::move(data));
  return data;
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  csv::Writer out(path);
  std::vector<std::string> header{"id", "x", "y", "count", "offset"};
  for (std::size_t c = 1; c < data.covariate_names.size(); ++c)
    header.push_back(data.covariate_names[c]);
  out.row(header);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    std::vector<std::string> row{data.id(i), csv::format_exact(data.coords(i, 0)),
                                 csv::format_exact(data.coords(i, 1)),
                                 csv::format_exact(data.y(i)),
                                 csv::format_exact(data.offset(i))};
    for (Eigen::Index c = 1; c < data.p(); ++c)
      row.push_back(csv::format_exact(data.X(i, c)));
    out.row(row);
  }
  out.close();
}

}  // namespace lgwpr
