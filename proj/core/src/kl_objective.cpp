#include "effdyn/kl_objective.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "effdyn/effective.hpp"
#include "effdyn/error.hpp"

namespace effdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// p ln(p / q) with the 0 ln 0 = 0 convention.
inline double kl_term(double p, double q) {
  if (p == 0.0) return 0.0;
  if (q == 0.0) return kInf;
  return p * std::log(p / q);
}

double clamp_roundoff(double value, const char* what) {
  if (value < 0.0) {
    if (value > -1e-12) return 0.0;
    std::ostringstream msg;
    msg << what << " came out negative (" << value << ")";
    throw InvariantFailure(msg.str());
  }
  return value;
}

}  // namespace

void FactorizedDensity::validate(const CVAssignment& cv) const {
  const auto k = static_cast<Eigen::Index>(cv.k());
  if (reduced.rows() != k || reduced.cols() != k) throw InputError("reduced kernel must be k x k");
  if (conditionals.size() != cv.k()) throw InputError("one conditional vector per bin required");
  if (reduced.minCoeff() < 0.0) throw InputError("reduced kernel has negative entries");
  for (Eigen::Index z = 0; z < k; ++z) {
    if (std::abs(reduced.row(z).sum() - 1.0) > 1e-12) throw InputError("reduced kernel rows must sum to 1");
    const Vector& c = conditionals[static_cast<std::size_t>(z)];
    if (c.size() != static_cast<Eigen::Index>(cv.fiber(static_cast<std::size_t>(z)).size())) {
      throw InputError("conditional vector length does not match its fiber");
    }
    if (c.size() > 0 && c.minCoeff() < 0.0) throw InputError("conditional vector has negative entries");
    if (std::abs(c.sum() - 1.0) > 1e-12) throw InputError("conditional vectors must sum to 1");
  }
}

double FactorizedDensity::operator()(const CVAssignment& cv, std::size_t x, std::size_t y) const {
  const std::size_t zy = cv(y);
  return reduced(static_cast<Eigen::Index>(cv(x)), static_cast<Eigen::Index>(zy)) *
         conditionals[zy](static_cast<Eigen::Index>(cv.position_in_fiber(y)));
}

double kl_divergence(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw InputError("kl_divergence: length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) total += kl_term(p(i), q(i));
  return total;
}

FactorizedDensity optimal_factorization(const TransitionModel& model, const CVAssignment& cv) {
  auto eff = build_effective(model, cv);
  return {eff.reduced.P(), std::move(eff.conditionals)};
}

namespace {

double expected_kl(const TransitionModel& model, const CVAssignment& cv, const FactorizedDensity& g) {
  const Matrix& P = model.P();
  const auto n = static_cast<Eigen::Index>(model.size());
  double total = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    double row = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      row += kl_term(P(x, y), g(cv, static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
    }
    total += model.mu()(x) * row;
  }
  return total;
}

}  // namespace

double kl_score(const TransitionModel& model, const CVAssignment& cv) {
  if (cv.n() != model.size()) throw AssignmentError("CV and model sizes differ");
  return clamp_roundoff(expected_kl(model, cv, optimal_factorization(model, cv)), "kl_score");
}

double mutual_information(const TransitionModel& model) {
  const Matrix& P = model.P();
  const Vector& mu = model.mu();
  double total = 0.0;
  for (Eigen::Index x = 0; x < P.rows(); ++x) {
    double row = 0.0;
    for (Eigen::Index y = 0; y < P.cols(); ++y) row += kl_term(P(x, y), mu(y));
    total += mu(x) * row;
  }
  return clamp_roundoff(total, "mutual information");
}

CandidateKL kl_of_candidate(const TransitionModel& model, const CVAssignment& cv,
                            const FactorizedDensity& candidate) {
  if (cv.n() != model.size()) throw AssignmentError("CV and model sizes differ");
  candidate.validate(cv);
  const auto eff = build_effective(model, cv);

  CandidateKL out;
  out.value = expected_kl(model, cv, candidate);
  out.optimum = kl_score(model, cv);
  for (std::size_t z = 0; z < cv.k(); ++z) {
    const auto zi = static_cast<Eigen::Index>(z);
    const double weight = eff.reduced.mu()(zi);
    out.reduced_term += weight * kl_divergence(eff.reduced.P().row(zi).transpose(),
                                               candidate.reduced.row(zi).transpose());
    out.conditional_term += weight * kl_divergence(eff.conditionals[z], candidate.conditionals[z]);
  }
  const double predicted = out.optimum + out.reduced_term + out.conditional_term;
  if (std::isfinite(out.value) && std::abs(out.value - predicted) > 1e-10) {
    std::ostringstream msg;
    msg << "KL decomposition broken: direct " << out.value << " vs " << predicted;
    throw InvariantFailure(msg.str());
  }
  return out;
}

Vector empirical_histogram(std::span<const std::size_t> bins, std::size_t k) {
  if (bins.size() < 2) throw InputError("empirical_histogram: need at least two entries");
  Vector h = Vector::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t t = 0; t + 1 < bins.size(); ++t) {
    if (bins[t] >= k) throw InputError("empirical_histogram: bin out of range");
    h(static_cast<Eigen::Index>(bins[t])) += 1.0;
  }
  return h / static_cast<double>(bins.size() - 1);
}

double mean_log_likelihood(std::span<const std::size_t> bins, const Vector& histogram) {
  if (bins.size() < 2) throw InputError("mean_log_likelihood: need at least two entries");
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < bins.size(); ++t) {
    total += std::log(histogram(static_cast<Eigen::Index>(bins[t])));
  }
  return total / static_cast<double>(bins.size() - 1);
}

TrajectoryLosses trajectory_losses(std::span<const std::size_t> chain, const CVAssignment& cv,
                                   double alpha) {
  if (chain.size() < 2) throw InputError("trajectory_losses: chain needs at least one transition");
  if (!(alpha >= 0.0)) throw InputError("trajectory_losses: smoothing must be non-negative");
  for (auto s : chain) {
    if (s >= cv.n()) throw InputError("trajectory_losses: state outside the CV domain");
  }
  const std::size_t N = chain.size() - 1;
  const auto k = static_cast<Eigen::Index>(cv.k());
  const auto bins = project_chain(chain, cv);

  Matrix reduced_counts = Matrix::Zero(k, k);
  Vector target_counts = Vector::Zero(static_cast<Eigen::Index>(cv.n()));
  for (std::size_t t = 0; t < N; ++t) {
    reduced_counts(static_cast<Eigen::Index>(bins[t]), static_cast<Eigen::Index>(bins[t + 1])) += 1.0;
    target_counts(static_cast<Eigen::Index>(chain[t + 1])) += 1.0;
  }
  Matrix g_reduced(k, k);
  for (Eigen::Index z = 0; z < k; ++z) {
    const double row = reduced_counts.row(z).sum();
    for (Eigen::Index w = 0; w < k; ++w) {
      g_reduced(z, w) = (reduced_counts(z, w) + alpha) / (row + alpha * static_cast<double>(k));
    }
  }
  Vector g_fiber(static_cast<Eigen::Index>(cv.n()));
  for (std::size_t z = 0; z < cv.k(); ++z) {
    const auto& fiber = cv.fiber(z);
    double total = 0.0;
    for (auto y : fiber) total += target_counts(static_cast<Eigen::Index>(y));
    for (auto y : fiber) {
      g_fiber(static_cast<Eigen::Index>(y)) = (target_counts(static_cast<Eigen::Index>(y)) + alpha) /
                                               (total + alpha * static_cast<double>(fiber.size()));
    }
  }
  const Vector histogram = empirical_histogram(bins, cv.k());

  std::vector<double> full(N), reduced(N), marginal(N);
  for (std::size_t t = 0; t < N; ++t) {
    const double lg = std::log(g_reduced(static_cast<Eigen::Index>(bins[t]), static_cast<Eigen::Index>(bins[t + 1])));
    reduced[t] = -lg;
    full[t] = -lg - std::log(g_fiber(static_cast<Eigen::Index>(chain[t + 1])));
    marginal[t] = std::log(histogram(static_cast<Eigen::Index>(bins[t])));
  }
  TrajectoryLosses out;
  out.full = batch_means(full);
  out.reduced_transition = batch_means(reduced);
  out.marginal = batch_means(marginal);
  return out;
}

}  // namespace effdyn
