#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lgwpr/dataset.hpp"
#include "lgwpr/glm.hpp"
#include "lgwpr/kernel.hpp"
#include "lgwpr/lgwpr.hpp"
#include "lgwpr/model.hpp"

namespace lgwpr::test {

/// Small Poisson dataset with k standard-normal covariates, coordinates on
/// [0, 1]^2, offsets in [0.5, 2] and log-mean mu + 0.4 x1 - 0.3 x2 ...
inline Dataset random_dataset(std::uint64_t seed, Eigen::Index n, int k = 2,
                              double mu = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixX2d coords(n, 2);
  Eigen::MatrixXd cov(n, k);
  Eigen::VectorXd offset(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    coords(i, 0) = unit(rng);
    coords(i, 1) = unit(rng);
    offset(i) = 0.5 + 1.5 * unit(rng);
    double eta = mu + 0.3 * coords(i, 0);
    for (int j = 0; j < k; ++j) {
      cov(i, j) = normal(rng);
      eta += (j % 2 == 0 ? 0.4 : -0.3) * cov(i, j);
    }
    std::poisson_distribution<int> pois(offset(i) * std::exp(eta));
    y(i) = pois(rng);
  }
  return make_dataset(coords, y, offset, cov);
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// (X'A W X + δI)^{-1} X'A W z by a dense solve of the full weighted system.
inline Eigen::VectorXd dense_stage1(const Dataset& data, const KernelSpec& kernel,
                                    Eigen::Index focal, double delta,
                                    const LinearizedResponse& r, bool exclude_self) {
  const Eigen::Index n = data.n();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = std::hypot(data.coords(j, 0) - data.coords(focal, 0),
                                data.coords(j, 1) - data.coords(focal, 1));
    D(j, j) = r.weights(j) * kernel.weight(d);
  }
  if (exclude_self) D(focal, focal) = 0.0;
  Eigen::MatrixXd M = data.X.transpose() * D * data.X;
  M += delta * Eigen::MatrixXd::Identity(data.p(), data.p());
  return M.colPivHouseholderQr().solve(data.X.transpose() * D * r.z);
}

/// Local weighted Poisson log-likelihood sum_j w_j (y_j eta_j - o_j e^eta_j).
inline double local_loglik(const Dataset& data, const Eigen::VectorXd& w,
                           const Eigen::VectorXd& beta) {
  double ll = 0.0;
  for (Eigen::Index j = 0; j < data.n(); ++j) {
    const double eta = data.X.row(j).dot(beta);
    ll += w(j) * (data.y(j) * eta - data.offset(j) * std::exp(eta));
  }
  return ll;
}

/// Maximiser of a concave two-parameter likelihood by repeated grid zooming:
/// a 41 x 41 grid, recentred on its best node and shrunk 4x per round.
inline Eigen::Vector2d grid_maximise(const Dataset& data, const Eigen::VectorXd& w,
                                     Eigen::Vector2d centre, double half_width) {
  for (int round = 0; round < 30; ++round) {
    Eigen::Vector2d best = centre;
    double best_ll = local_loglik(data, w, centre);
    for (int a = -20; a <= 20; ++a)
      for (int b = -20; b <= 20; ++b) {
        const Eigen::Vector2d beta =
            centre + Eigen::Vector2d(a, b) * (half_width / 20.0);
        const double ll = local_loglik(data, w, beta);
        if (ll > best_ll) {
          best_ll = ll;
          best = beta;
        }
      }
    centre = best;
    half_width /= 4.0;
  }
  return centre;
}

/// Sum of hat diagonals rebuilt from the full hat matrix of every local fit,
/// H_i = X (X'C_iX + δI)^{-1} X'C_i with C_i = diag(λ_i w_i).
inline double explicit_enp(const Dataset& data, const KernelSpec& kernel,
                           const std::vector<Eigen::VectorXd>& lambdas, double delta) {
  const Eigen::Index n = data.n();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = std::hypot(data.coords(j, 0) - data.coords(i, 0),
                                  data.coords(j, 1) - data.coords(i, 1));
      C(j, j) = lambdas[static_cast<std::size_t>(i)](j) * kernel.weight(d);
    }
    Eigen::MatrixXd M = data.X.transpose() * C * data.X;
    M += delta * Eigen::MatrixXd::Identity(data.p(), data.p());
    const Eigen::MatrixXd H = data.X * M.inverse() * data.X.transpose() * C;
    total += H(i, i);
  }
  return total;
}

/// Local means λ_j = o_j exp(x_j' β) evaluated at each location's coefficients.
inline std::vector<Eigen::VectorXd> local_means(const Dataset& data,
                                                const Eigen::MatrixXd& betas) {
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index i = 0; i < betas.rows(); ++i)
    out.push_back((data.offset.array() *
                   (data.X * betas.row(i).transpose()).array().exp())
                      .matrix());
  return out;
}

inline bool is_psd(const Eigen::MatrixXd& m, double tol = 1e-10) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * (1.0 + m.cwiseAbs().maxCoeff()))
    return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().minCoeff() >= -tol * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());
}

/// Dataset with rows reordered by perm (new row i = old row perm[i]).
inline Dataset permuted(const Dataset& data, const std::vector<Eigen::Index>& perm) {
  Dataset out = data;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.coords.row(r) = data.coords.row(perm[i]);
    out.y(r) = data.y(perm[i]);
    out.offset(r) = data.offset(perm[i]);
    out.X.row(r) = data.X.row(perm[i]);
  }
  out.ids.clear();
  return out;
}

}  // namespace lgwpr::test
