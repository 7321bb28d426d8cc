#pragma once
// Test-only reference computations. Nothing here calls into the solver path;
// kernels are rebuilt from dense coordinates and the QP optimum comes from an
// accelerated projected-gradient method.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fwsvm/dataset.hpp"
#include "fwsvm/kernel.hpp"

namespace oracle {

inline std::vector<double> densify(const fwsvm::SparseRow& r, std::size_t dim) {
  std::vector<double> d(dim, 0.0);
  for (std::size_t k = 0; k < r.nnz(); ++k) d[r.indices[k]] = r.values[k];
  return d;
}

// K from its definition, using dense coordinates.
inline Eigen::MatrixXd dense_kernel(const fwsvm::SparseDataset& ds, const fwsvm::KernelSpec& spec) {
  const std::size_t m = ds.size();
  const std::size_t dim = std::max<std::size_t>(ds.dim(), 1);
  std::vector<std::vector<double>> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = densify(ds.row(i), dim);
  Eigen::MatrixXd K(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double d2 = 0.0;
      for (std::size_t t = 0; t < dim; ++t) d2 += (x[i][t] - x[j][t]) * (x[i][t] - x[j][t]);
      const double k = std::exp(-spec.gamma * d2);
      if (spec.mode == fwsvm::KernelMode::raw_gaussian) {
        K(i, j) = k;
      } else {
        K(i, j) = ds.label(i) * ds.label(j) * (k + 1.0) + (i == j ? 1.0 / spec.c : 0.0);
      }
    }
  }
  return K;
}

// Euclidean projection onto the unit simplex (sort-based).
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

struct QpOptimum {
  Eigen::VectorXd alpha;
  double f = 0.0;
};

// min 1/2 a'Ka over the simplex by FISTA with gradient restarts.
inline QpOptimum simplex_qp_optimum(const Eigen::MatrixXd& K, int max_iters = 200000) {
  const Eigen::Index m = K.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  const double L = eig.eigenvalues().maxCoeff();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd y = x, x_prev = x;
  double t = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    x_prev = x;
    x = project_simplex(y - (K * y) / L);
    if ((K * y).dot(x - x_prev) > 0.0) {  // restart
      t = 1.0;
      y = x;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    if ((x - x_prev).lpNorm<Eigen::Infinity>() < 1e-16 && it > 10) break;
  }
  return {x, 0.5 * x.dot(K * x)};
}

// Random instance with dense Gaussian coordinates and random labels.
inline fwsvm::SparseDataset random_dataset(std::size_t m, std::size_t dim, std::uint64_t seed,
                                           double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<fwsvm::SparseRow> rows(m);
  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    labels[i] = (gen() & 1) ? 1 : -1;
    for (std::size_t d = 0; d < dim; ++d) {
      rows[i].indices.push_back(static_cast<std::uint32_t>(d));
      rows[i].values.push_back(normal(gen) + 0.5 * labels[i]);
    }
  }
  return fwsvm::SparseDataset(std::move(rows), std::move(labels));
}

// Two points far apart in raw-gaussian mode give K = I exactly.
inline fwsvm::SparseDataset identity_pair() {
  fwsvm::SparseRow a{{0}, {0.0}}, b{{0}, {100.0}};
  return fwsvm::SparseDataset({a, b}, {1, 1});
}

inline fwsvm::KernelSpec raw_spec(double gamma = 1.0) {
  return {gamma, 1.0, fwsvm::KernelMode::raw_gaussian};
}

}  // namespace oracle
