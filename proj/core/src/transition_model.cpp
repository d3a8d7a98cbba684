#include "effdyn/transition_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "effdyn/error.hpp"
#include "effdyn/rng.hpp"

namespace effdyn {

std::string to_string(ModelSource source) {
  switch (source) {
    case ModelSource::Analytic: return "analytic";
    case ModelSource::Counts: return "counts";
    case ModelSource::Fixture: return "fixture";
    case ModelSource::Effective: return "effective";
    case ModelSource::Derived: return "derived";
  }
  return "derived";
}

ModelSource model_source_from_string(const std::string& name) {
  if (name == "analytic") return ModelSource::Analytic;
  if (name == "counts") return ModelSource::Counts;
  if (name == "fixture") return ModelSource::Fixture;
  if (name == "effective") return ModelSource::Effective;
  if (name == "derived") return ModelSource::Derived;
  throw InputError("unknown model source '" + name + "'");
}

namespace {

void check_stochastic(const Matrix& P) {
  const Eigen::Index n = P.rows();
  if (n == 0 || P.cols() != n) throw InputError("transition matrix must be square and nonempty");
  if (!P.allFinite()) throw InputError("transition matrix has non-finite entries");
  if (P.minCoeff() < 0.0) throw InputError("transition matrix has negative entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = P.row(i).sum();
    if (std::abs(s - 1.0) > tolerance::kRowSum) {
      std::ostringstream msg;
      msg << "row " << i << " of the transition matrix sums to " << s;
      throw InputError(msg.str());
    }
  }
}

}  // namespace

TransitionModel TransitionModel::from_matrix(Matrix P, double lag, ModelSource source,
                                             std::optional<StateMap> states) {
  check_stochastic(P);
  Vector mu = stationary_distribution(P);
  return from_matrix_and_mu(std::move(P), std::move(mu), lag, source, std::move(states));
}

TransitionModel TransitionModel::from_matrix_and_mu(Matrix P, Vector mu, double lag,
                                                    ModelSource source,
                                                    std::optional<StateMap> states) {
  TransitionModel m;
  m.P_ = std::move(P);
  m.mu_ = std::move(mu);
  m.lag_ = lag;
  m.source_ = source;
  m.states_ = std::move(states);
  m.validate();
  return m;
}

TransitionModel TransitionModel::with_counts(Matrix counts) const {
  if (counts.rows() != P_.rows() || counts.cols() != P_.cols()) {
    throw InputError("count matrix shape does not match the model");
  }
  TransitionModel copy = *this;
  copy.counts_ = std::move(counts);
  return copy;
}

void TransitionModel::validate() const {
  check_stochastic(P_);
  const Eigen::Index n = P_.rows();
  if (mu_.size() != n) throw InputError("stationary vector length does not match P");
  if (!(lag_ > 0.0) || !std::isfinite(lag_)) throw InputError("lag must be positive");
  if (!mu_.allFinite()) throw InputError("stationary vector has non-finite entries");
  if (mu_.minCoeff() <= 0.0) throw InvariantFailure("stationary distribution has non-positive mass");
  if (std::abs(mu_.sum() - 1.0) > tolerance::kMuSum) {
    throw InvariantFailure("stationary distribution does not sum to one");
  }
  const double drift = (P_.transpose() * mu_ - mu_).lpNorm<Eigen::Infinity>();
  if (drift > tolerance::kStationarity) {
    std::ostringstream msg;
    msg << "mu is not stationary for P (|mu^T P - mu^T|_inf = " << drift << ")";
    throw InvariantFailure(msg.str());
  }
  if (states_) {
    if (states_->labels.size() != static_cast<std::size_t>(n)) {
      throw InputError("state map size does not match the model");
    }
    if (states_->grid) {
      for (auto c : states_->labels) {
        if (c >= states_->grid->size()) {
          throw InputError("state map references a cell outside the grid");
        }
      }
    }
  }
}

namespace {

Vector gth_stationary(const Matrix& P) {
  const Eigen::Index n = P.rows();
  Matrix A = P;
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    const double s = A.row(k).head(k).sum();
    if (!(s > 0.0)) {
      throw DisconnectedStateError("transition matrix is reducible (state " + std::to_string(k) +
                                   " cannot reach lower-numbered states)");
    }
    A.col(k).head(k) /= s;
    A.topLeftCorner(k, k).noalias() += A.col(k).head(k) * A.row(k).head(k);
  }
  Vector pi(n);
  pi(0) = 1.0;
  for (Eigen::Index k = 1; k < n; ++k) pi(k) = pi.head(k).dot(A.col(k).head(k));
  pi /= pi.sum();
  if (!(pi.minCoeff() > 0.0)) {
    throw DisconnectedStateError("transition matrix is reducible (zero stationary mass)");
  }
  return pi;
}

Vector power_stationary(const Matrix& P) {
  const Eigen::Index n = P.rows();
  Vector pi = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const Matrix Pt = P.transpose();
  for (int iter = 0; iter < 100000; ++iter) {
    // Lazy chain (I + P) / 2 has the same stationary vector and no periodicity.
    Vector next = 0.5 * (pi + Pt * pi);
    next /= next.sum();
    const double change = (next - pi).lpNorm<Eigen::Infinity>();
    pi.swap(next);
    if (change < 1e-15) break;
  }
  if (!(pi.minCoeff() > 0.0)) throw DisconnectedStateError("transition matrix is reducible");
  return pi;
}

}  // namespace

Vector stationary_distribution(const Matrix& P) {
  if (P.rows() == 0 || P.rows() != P.cols()) throw InputError("transition matrix must be square");
  if (P.rows() == 1) return Vector::Ones(1);
  return P.rows() <= 5000 ? gth_stationary(P) : power_stationary(P);
}

Matrix adjoint(const TransitionModel& model) {
  const Vector& mu = model.mu();
  return mu.cwiseInverse().asDiagonal() * model.P().transpose() * mu.asDiagonal();
}

TransitionModel adjoint_model(const TransitionModel& model) {
  Matrix Pstar = adjoint(model);
  // Row sums equal (mu^T P)_x / mu_x, exact up to the stationarity residual.
  for (Eigen::Index i = 0; i < Pstar.rows(); ++i) Pstar.row(i) /= Pstar.row(i).sum();
  return TransitionModel::from_matrix_and_mu(std::move(Pstar), model.mu(), model.lag(),
                                             ModelSource::Derived, model.states());
}

Decomposition decompose(const TransitionModel& model) {
  const Matrix Pstar = adjoint(model);
  return {0.5 * (model.P() + Pstar), 0.5 * (model.P() - Pstar)};
}

TransitionModel reversible_part(const TransitionModel& model) {
  Matrix R = decompose(model).reversible;
  for (Eigen::Index i = 0; i < R.rows(); ++i) R.row(i) /= R.row(i).sum();
  return TransitionModel::from_matrix_and_mu(std::move(R), model.mu(), model.lag(),
                                             ModelSource::Derived, model.states());
}

double detailed_balance_residual(const TransitionModel& model) {
  const Matrix flux = model.mu().asDiagonal() * model.P();
  return (flux - flux.transpose()).cwiseAbs().maxCoeff();
}

bool is_reversible(const TransitionModel& model, double tol) {
  return detailed_balance_residual(model) < tol;
}

Matrix symmetrize(const Matrix& M, const Vector& mu) {
  const Vector s = mu.cwiseSqrt();
  Matrix S = s.asDiagonal() * M * s.cwiseInverse().asDiagonal();
  return 0.5 * (S + S.transpose());
}

NonnegativityResult nonnegativity_check(const TransitionModel& model) {
  const Matrix S = symmetrize(decompose(model).reversible, model.mu());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  NonnegativityResult r;
  r.min_eigenvalue = solver.eigenvalues().minCoeff();
  r.nonnegative = r.min_eigenvalue >= -1e-10;
  r.within_spectral_bound = r.min_eigenvalue > -1.0 + 1e-12;
  return r;
}

std::vector<std::size_t> simulate_chain(const TransitionModel& model, std::size_t start,
                                        std::size_t n_steps, std::uint64_t seed) {
  const std::size_t n = model.size();
  if (start >= n) throw InputError("simulate_chain: start state out of range");
  std::vector<std::vector<double>> cdf(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += model.P()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      cdf[i][j] = acc;
    }
  }
  Philox4x32 rng(seed);
  std::vector<std::size_t> chain(n_steps + 1);
  chain[0] = start;
  std::size_t state = start;
  for (std::size_t t = 1; t <= n_steps; ++t) {
    const auto& row = cdf[state];
    const double u = rng.uniform() * row.back();
    auto it = std::upper_bound(row.begin(), row.end(), u);
    std::size_t next = static_cast<std::size_t>(it - row.begin());
    if (next >= n) next = n - 1;
    state = next;
    chain[t] = state;
  }
  return chain;
}

}  // namespace effdyn
