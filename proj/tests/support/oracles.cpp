#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

effdyn::TransitionModel random_reversible(Rng& rng, std::size_t n) {
  Matrix W = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = i; j < W.cols(); ++j) {
      // Roughly a third of the off-path pairs are absent.
      const double w = uniform(rng) < 0.35 ? 0.0 : uniform(rng, 0.05, 1.0);
      W(i, j) = W(j, i) = w;
    }
  }
  for (Eigen::Index i = 0; i + 1 < W.rows(); ++i) {
    const double w = uniform(rng, 0.1, 1.0);
    W(i, i + 1) = W(i + 1, i) = w;
  }
  Vector rows = W.rowwise().sum();
  Matrix P = rows.cwiseInverse().asDiagonal() * W;
  return effdyn::TransitionModel::from_matrix_and_mu(P, rows / rows.sum());
}

effdyn::TransitionModel random_nonreversible(Rng& rng, std::size_t n) {
  Matrix W(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = uniform(rng, 0.01, 1.0);
  }
  Matrix P = W.rowwise().sum().cwiseInverse().asDiagonal() * W;
  return effdyn::TransitionModel::from_matrix(P);
}

effdyn::CVAssignment random_cv(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    labels[order[i]] = i < k ? i : std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
  }
  return effdyn::CVAssignment(labels, k);
}

effdyn::SetPair random_sets(Rng& rng, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t a = std::uniform_int_distribution<std::size_t>(1, (n - 1) / 2)(rng);
  const std::size_t b = std::uniform_int_distribution<std::size_t>(1, n - 1 - a)(rng);
  effdyn::SetPair sets;
  sets.A.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(a));
  sets.B.assign(order.begin() + static_cast<std::ptrdiff_t>(a), order.begin() + static_cast<std::ptrdiff_t>(a + b));
  std::sort(sets.A.begin(), sets.A.end());
  std::sort(sets.B.begin(), sets.B.end());
  return sets;
}

Matrix random_constrained_tuple(Rng& rng, const Vector& mu, std::size_t m) {
  const auto n = mu.size();
  std::normal_distribution<double> gauss;
  Matrix basis(n, static_cast<Eigen::Index>(m) + 1);
  basis.col(0).setOnes();
  for (Eigen::Index c = 1; c < basis.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) basis(i, c) = gauss(rng);
  }
  // Modified Gram-Schmidt in the mu inner product, twice for stability.
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      for (Eigen::Index p = 0; p < c; ++p) {
        const double proj = (mu.array() * basis.col(c).array() * basis.col(p).array()).sum();
        basis.col(c) -= proj * basis.col(p);
      }
      basis.col(c) /= std::sqrt((mu.array() * basis.col(c).array().square()).sum());
    }
  }
  return basis.rightCols(static_cast<Eigen::Index>(m));
}

effdyn::FactorizedDensity random_candidate(Rng& rng, const effdyn::CVAssignment& cv) {
  const auto k = static_cast<Eigen::Index>(cv.k());
  effdyn::FactorizedDensity g;
  g.reduced.resize(k, k);
  for (Eigen::Index z = 0; z < k; ++z) {
    for (Eigen::Index w = 0; w < k; ++w) g.reduced(z, w) = uniform(rng, 0.01, 1.0);
    g.reduced.row(z) /= g.reduced.row(z).sum();
  }
  for (std::size_t z = 0; z < cv.k(); ++z) {
    Vector c(static_cast<Eigen::Index>(cv.fiber(z).size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = uniform(rng, 0.01, 1.0);
    g.conditionals.push_back(c / c.sum());
  }
  return g;
}

Vector stationary(const Matrix& P) {
  const auto n = P.rows();
  Matrix A(n + 1, n);
  A.topRows(n) = P.transpose() - Matrix::Identity(n, n);
  A.row(n).setOnes();
  Vector b = Vector::Zero(n + 1);
  b(n) = 1.0;
  return A.colPivHouseholderQr().solve(b);
}

Vector eigenvalues(const Matrix& P) {
  Eigen::EigenSolver<Matrix> solver(P, false);
  Vector values = solver.eigenvalues().real();
  std::sort(values.data(), values.data() + values.size(), std::greater<>());
  return values;
}

Vector committor_iteration(const Matrix& P, const effdyn::SetPair& sets) {
  const auto n = P.rows();
  std::vector<int> role(static_cast<std::size_t>(n), 0);
  for (auto a : sets.A) role[a] = 1;
  for (auto b : sets.B) role[b] = 2;
  Vector q = Vector::Zero(n);
  for (auto b : sets.B) q(static_cast<Eigen::Index>(b)) = 1.0;
  for (int sweep = 0; sweep < 2000000; ++sweep) {
    double change = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) {
      if (role[static_cast<std::size_t>(x)] != 0) continue;
      // Solve the x-th equation for q(x), keeping the self-loop on the left.
      double rhs = 0.0;
      for (Eigen::Index y = 0; y < n; ++y) {
        if (y != x) rhs += P(x, y) * q(y);
      }
      const double updated = rhs / (1.0 - P(x, x));
      change = std::max(change, std::abs(updated - q(x)));
      q(x) = updated;
    }
    if (change < 1e-15) break;
  }
  return q;
}

double energy(const Matrix& P, const Vector& mu, const Vector& f) {
  double total = 0.0;
  for (Eigen::Index x = 0; x < P.rows(); ++x) {
    for (Eigen::Index y = 0; y < P.cols(); ++y) {
      const double d = f(y) - f(x);
      total += mu(x) * P(x, y) * d * d;
    }
  }
  return 0.5 * total;
}

double mutual_information(const Matrix& joint) {
  const Vector row = joint.rowwise().sum();
  const Vector col = joint.colwise().sum().transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      if (joint(i, j) > 0.0) total += joint(i, j) * std::log(joint(i, j) / (row(i) * col(j)));
    }
  }
  return total;
}

double kl_score(const effdyn::TransitionModel& model, const effdyn::CVAssignment& cv) {
  const Matrix joint = model.mu().asDiagonal() * model.P();
  const auto k = static_cast<Eigen::Index>(cv.k());
  Matrix reduced = Matrix::Zero(k, k);
  for (Eigen::Index x = 0; x < joint.rows(); ++x) {
    for (Eigen::Index y = 0; y < joint.cols(); ++y) {
      reduced(static_cast<Eigen::Index>(cv(static_cast<std::size_t>(x))),
              static_cast<Eigen::Index>(cv(static_cast<std::size_t>(y)))) += joint(x, y);
    }
  }
  return mutual_information(joint) - mutual_information(reduced);
}

MeanSE mean_se(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace oracle
