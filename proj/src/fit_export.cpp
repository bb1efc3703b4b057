#include "lgwpr/fit_export.hpp"

#include <limits>

#include "lgwpr/csv.hpp"
#include "lgwpr/error.hpp"

namespace lgwpr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string row_id(const ModelFit& fit, const Dataset& data, std::size_t row) {
  if (fit.global) return "global";
  return data.id(fit.locals[row].focal);
}

void check_names(const ModelFit& fit, const Dataset& data) {
  if (!fit.locals.empty() &&
      fit.locals.front().beta.size() != static_cast<Eigen::Index>(data.covariate_names.size()))
    throw InvalidArgument("fit and dataset disagree on the number of coefficients");
}

}  // namespace

void write_fit(const ModelFit& fit, const Dataset& data,
               const SignificanceTable& sig, const std::filesystem::path& path) {
  check_names(fit, data);
  csv::Writer w(path);
  std::vector<std::string> header{"id", "cx", "cy"};
  for (const auto& name : data.covariate_names) {
    header.push_back("beta_" + name);
    header.push_back("se_" + name);
    header.push_back("z_" + name);
  }
  header.push_back("pflag");
  w.row(header);
  for (std::size_t r = 0; r < fit.locals.size(); ++r) {
    const LocalFit& lf = fit.locals[r];
    const auto ri = static_cast<Eigen::Index>(r);
    std::vector<std::string> f{row_id(fit, data, r)};
    f.push_back(csv::format(fit.global ? kNaN : data.coords(lf.focal, 0)));
    f.push_back(csv::format(fit.global ? kNaN : data.coords(lf.focal, 1)));
    std::string flags;
    for (Eigen::Index c = 0; c < lf.beta.size(); ++c) {
      f.push_back(csv::format(lf.beta(c)));
      f.push_back(csv::format(sig.se(ri, c)));
      f.push_back(csv::format(sig.z(ri, c)));
      flags += sig.significant(ri, c) ? 'T' : 'F';
    }
    f.push_back(flags);
    w.row(f);
  }
  w.close();
}

FitTable read_fit(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  if (t.header.size() < 4 || (t.header.size() - 4) % 3 != 0 ||
      t.header.front() != "id" || t.header.back() != "pflag")
    throw ValidationError("'" + path.string() + "' is not a fit export");
  const std::size_t p = (t.header.size() - 4) / 3;
  const auto rows = static_cast<Eigen::Index>(t.rows.size());
  FitTable out;
  for (std::size_t c = 0; c < p; ++c) out.names.push_back(t.header[3 + 3 * c].substr(5));
  out.coords.resize(rows, 2);
  out.beta.resize(rows, static_cast<Eigen::Index>(p));
  out.se.resizeLike(out.beta);
  out.z.resizeLike(out.beta);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = t.rows[static_cast<std::size_t>(r)];
    const std::size_t file_row = static_cast<std::size_t>(r) + 2;
    out.ids.push_back(row[0]);
    out.coords(r, 0) = csv::to_double(row[1], file_row, 2);
    out.coords(r, 1) = csv::to_double(row[2], file_row, 3);
    for (std::size_t c = 0; c < p; ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      out.beta(r, ci) = csv::to_double(row[3 + 3 * c], file_row, 4 + 3 * c);
      out.se(r, ci) = csv::to_double(row[4 + 3 * c], file_row, 5 + 3 * c);
      out.z(r, ci) = csv::to_double(row[5 + 3 * c], file_row, 6 + 3 * c);
    }
    out.pflag.push_back(row.back());
  }
  return out;
}

void write_summary(const ModelFit& fit, const Dataset& data,
                   const SignificanceTable& sig,
                   const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"model", "kernel", "bandwidth", "delta", "dispersion", "n_enp",
         "deviance", "null_deviance", "pseudo_r2", "criterion", "n",
         "standardized", "quasi", "psi_fallbacks", "corrected_alpha", "seconds"});
  w.row({fit.tag, fit.global ? "NA" : to_string(fit.kernel.family),
         csv::format(fit.bandwidth), csv::format(fit.delta),
         csv::format(fit.dispersion), csv::format(fit.n_enp),
         csv::format(fit.deviance), csv::format(fit.null_deviance),
         csv::format(fit.pseudo_r2), fit.criterion.empty() ? "NA" : fit.criterion,
         std::to_string(data.n()), data.standardized ? "1" : "0",
         fit.quasi ? "1" : "0", std::to_string(fit.psi_fallbacks),
         csv::format(sig.corrected_alpha), csv::format(fit.seconds)});
  w.close();
}

void write_significance(const ModelFit& fit, const Dataset& data,
                        const SignificanceTable& sig,
                        const std::filesystem::path& path) {
  check_names(fit, data);
  csv::Writer w(path);
  w.row({"id", "coefficient", "estimate", "se", "z", "p", "alpha",
         "corrected_alpha", "significant", "degenerate", "method"});
  for (std::size_t r = 0; r < fit.locals.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const std::string id = row_id(fit, data, r);
    for (Eigen::Index c = 0; c < sig.z.cols(); ++c)
      w.row({id, data.covariate_names[static_cast<std::size_t>(c)],
             csv::format(fit.locals[r].beta(c)), csv::format(sig.se(ri, c)),
             csv::format(sig.z(ri, c)), csv::format(sig.p(ri, c)),
             csv::format(sig.alpha), csv::format(sig.corrected_alpha),
             sig.significant(ri, c) ? "1" : "0", sig.degenerate(ri, c) ? "1" : "0",
             sig.method});
  }
  w.close();
}

void write_coefficient_summary(const ModelFit& fit, const Dataset& data,
                               const std::filesystem::path& path) {
  check_names(fit, data);
  const CoefficientSummary s = coefficient_summary(fit);
  csv::Writer w(path);
  w.row({"coefficient", "min", "q1", "median", "q3", "max"});
  for (Eigen::Index c = 0; c < s.table.rows(); ++c) {
    std::vector<std::string> f{data.covariate_names[static_cast<std::size_t>(c)]};
    for (Eigen::Index q = 0; q < 5; ++q) f.push_back(csv::format(s.table(c, q)));
    w.row(f);
  }
  w.close();
}

void write_trace(const ModelFit& fit, const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"delta", "bandwidth", "criterion", "feasible", "n_enp", "deviance", "note"});
  for (const auto& t : fit.trace)
    w.row({csv::format(t.delta), csv::format(t.bandwidth), csv::format(t.criterion),
           t.feasible ? "1" : "0", csv::format(t.n_enp), csv::format(t.deviance),
           t.note});
  w.close();
}

}  // namespace lgwpr
