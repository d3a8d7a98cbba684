#include "effdyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "effdyn/error.hpp"
#include "effdyn/estimators.hpp"
#include "effdyn/io_util.hpp"

namespace effdyn {

ObjectiveWeights::ObjectiveWeights(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("objective weights must be nonempty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw InputError("objective weights must be positive");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw InputError("objective weights must be non-increasing");
    }
  }
}

ObjectiveWeights ObjectiveWeights::uniform(std::size_t m) {
  return ObjectiveWeights(std::vector<double>(m, 1.0));
}

double ObjectiveWeights::sum() const noexcept {
  double s = 0.0;
  for (double w : values_) s += w;
  return s;
}

SpectralResult solve_spectrum(const TransitionModel& model, std::size_t m) {
  const auto n = static_cast<Eigen::Index>(model.size());
  if (static_cast<Eigen::Index>(m) >= n) {
    throw InputError("solve_spectrum: m must be smaller than the number of states");
  }
  const double residual = detailed_balance_residual(model);
  if (!(residual < 1e-8)) {
    std::ostringstream msg;
    msg << "solve_spectrum needs a reversible model (detailed-balance residual " << residual
        << "); use decompose() for the reversible part";
    throw ReversibilityRequired(msg.str());
  }

  const Vector& mu = model.mu();
  const Vector sqrt_mu = mu.cwiseSqrt();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(model.P(), mu));
  if (solver.info() != Eigen::Success) throw InvariantFailure("symmetric eigensolver failed");

  // Descending order.
  Vector values = solver.eigenvalues().reverse();
  Matrix vectors = solver.eigenvectors().rowwise().reverse();

  // The unit eigenvalue's eigenspace may be degenerate; pin sqrt(mu) as its
  // first basis vector and orthonormalize the rest against it.
  Eigen::Index cluster = 1;
  while (cluster < n && values(cluster) >= 1.0 - 1e-10) ++cluster;
  if (cluster > 1) {
    Matrix rest = vectors.leftCols(cluster);
    rest -= sqrt_mu * (sqrt_mu.transpose() * rest);
    Eigen::ColPivHouseholderQR<Matrix> qr(rest);
    Matrix q = qr.householderQ() * Matrix::Identity(n, cluster - 1);
    vectors.block(0, 1, n, cluster - 1) = q;
  }
  vectors.col(0) = sqrt_mu;

  SpectralResult result;
  const auto count = static_cast<Eigen::Index>(m) + 1;
  result.eigenvalues = values.head(count);
  result.eigenvectors = sqrt_mu.cwiseInverse().asDiagonal() * vectors.leftCols(count);
  result.mu = mu;
  for (Eigen::Index i = 0; i < count; ++i) {
    Eigen::Index arg = 0;
    result.eigenvectors.col(i).cwiseAbs().maxCoeff(&arg);
    if (result.eigenvectors(arg, i) < 0.0) result.eigenvectors.col(i) *= -1.0;
  }
  return result;
}

double mu_inner(const Vector& mu, const Vector& f, const Vector& h) {
  return (mu.array() * f.array() * h.array()).sum();
}

double dirichlet_form_operator(const TransitionModel& model, const Vector& f, const Vector& h) {
  const Vector& mu = model.mu();
  const Vector Pf = model.P() * f;
  const Vector Ph = model.P() * h;
  // <T_rev f, h>_mu = (<Pf, h>_mu + <f, Ph>_mu) / 2
  return mu_inner(mu, f, h) - 0.5 * (mu_inner(mu, Pf, h) + mu_inner(mu, f, Ph));
}

double dirichlet_form(const TransitionModel& model, const Vector& f, const Vector& h) {
  const auto n = static_cast<Eigen::Index>(model.size());
  if (f.size() != n || h.size() != n) throw InputError("dirichlet_form: function length mismatch");
  const Matrix& P = model.P();
  const Vector& mu = model.mu();
  double total = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    double row = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) row += P(x, y) * (f(y) - f(x)) * (h(y) - h(x));
    total += mu(x) * row;
  }
  total *= 0.5;

  const double other = dirichlet_form_operator(model, f, h);
  const double scale = std::max(1.0, f.lpNorm<Eigen::Infinity>() * h.lpNorm<Eigen::Infinity>());
  if (std::abs(total - other) > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "Dirichlet form edge sum " << total << " disagrees with operator form " << other;
    throw InvariantFailure(msg.str());
  }
  return total;
}

double dirichlet_energy(const TransitionModel& model, const Vector& f) {
  return dirichlet_form(model, f, f);
}

void check_constraints(const TransitionModel& model, const Matrix& fs, double tol) {
  const auto n = static_cast<Eigen::Index>(model.size());
  if (fs.rows() != n) throw InputError("function tuple has the wrong number of states");
  const Vector& mu = model.mu();
  const Matrix gram = fs.transpose() * mu.asDiagonal() * fs;
  const Vector means = fs.transpose() * mu;
  std::ostringstream bad;
  int offenders = 0;
  for (Eigen::Index i = 0; i < fs.cols(); ++i) {
    if (std::abs(means(i)) > tol) {
      bad << " mean[" << i << "]=" << means(i);
      ++offenders;
    }
    for (Eigen::Index j = 0; j < fs.cols(); ++j) {
      const double target = i == j ? 1.0 : 0.0;
      if (std::abs(gram(i, j) - target) > tol) {
        bad << " gram[" << i << "," << j << "]=" << gram(i, j);
        ++offenders;
      }
    }
  }
  if (offenders > 0) throw ConstraintError("function tuple violates constraints:" + bad.str());
}

double variational_score(const TransitionModel& model, const Matrix& fs,
                         const ObjectiveWeights& weights) {
  if (static_cast<std::size_t>(fs.cols()) != weights.size()) {
    throw InputError("variational_score: one weight per function required");
  }
  check_constraints(model, fs);
  double score = 0.0;
  for (Eigen::Index i = 0; i < fs.cols(); ++i) {
    score += weights[static_cast<std::size_t>(i)] * dirichlet_energy(model, fs.col(i));
  }
  return score;
}

double vamp1_score(const TransitionModel& model, const Matrix& fs, const ObjectiveWeights& weights) {
  if (static_cast<std::size_t>(fs.cols()) != weights.size()) {
    throw InputError("vamp1_score: one weight per function required");
  }
  check_constraints(model, fs);
  const Matrix Pf = model.P() * fs;
  double score = 0.0;
  for (Eigen::Index i = 0; i < fs.cols(); ++i) {
    score += weights[static_cast<std::size_t>(i)] * mu_inner(model.mu(), fs.col(i), Pf.col(i));
  }
  return score;
}

namespace {

std::vector<double> half_squared_increments(std::span<const std::size_t> chain, const Matrix& fs,
                                            const std::vector<double>& weights) {
  if (chain.size() < 2) throw InputError("ergodic_energy: chain needs at least two states");
  std::vector<double> inc(chain.size() - 1);
  for (std::size_t t = 0; t + 1 < chain.size(); ++t) {
    const auto a = static_cast<Eigen::Index>(chain[t]);
    const auto b = static_cast<Eigen::Index>(chain[t + 1]);
    if (chain[t] >= static_cast<std::size_t>(fs.rows()) ||
        chain[t + 1] >= static_cast<std::size_t>(fs.rows())) {
      throw InputError("ergodic_energy: chain state outside the function domain");
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < fs.cols(); ++i) {
      const double d = fs(b, i) - fs(a, i);
      s += weights[static_cast<std::size_t>(i)] * d * d;
    }
    inc[t] = 0.5 * s;
  }
  return inc;
}

}  // namespace

Estimate ergodic_energy(std::span<const std::size_t> chain, const Vector& f) {
  return batch_means(half_squared_increments(chain, f, {1.0}));
}

Estimate ergodic_energy(std::span<const std::size_t> chain, const Matrix& fs,
                        const ObjectiveWeights& weights) {
  if (static_cast<std::size_t>(fs.cols()) != weights.size()) {
    throw InputError("ergodic_energy: one weight per function required");
  }
  return batch_means(half_squared_increments(chain, fs, weights.values()));
}

Estimate ergodic_energy(const Trajectory& traj, const Grid& grid, const Vector& f) {
  const auto cells = discretize(traj, grid);
  for (auto c : cells) {
    if (c == kOutsideGrid) throw InputError("ergodic_energy: trajectory leaves the grid");
  }
  return ergodic_energy(cells, f);
}

namespace {
// Eigenvalues this close to zero are rounding noise around an exact zero.
constexpr double kZeroEigenvalue = 1e-12;
}  // namespace

std::optional<double> implied_timescale(double lambda, double lag) {
  if (!(lambda > kZeroEigenvalue) || !(lambda < 1.0)) return std::nullopt;
  return -lag / std::log(lambda);
}

std::vector<std::optional<double>> implied_timescales(const SpectralResult& result, double lag) {
  std::vector<std::optional<double>> out;
  out.reserve(static_cast<std::size_t>(result.eigenvalues.size()));
  for (double l : result.eigenvalues) out.push_back(implied_timescale(l, lag));
  return out;
}

std::string spectrum_csv(const SpectralResult& result, double lag) {
  std::string out = "index,eigenvalue,timescale\n";
  const auto ts = implied_timescales(result, lag);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out += std::to_string(i) + ',' + io::format_double(result.eigenvalues(static_cast<Eigen::Index>(i))) + ',';
    if (ts[i]) out += io::format_double(*ts[i]);
    out += '\n';
  }
  return out;
}

nlohmann::json spectrum_json(const SpectralResult& result, double lag) {
  nlohmann::json j;
  j["lag"] = lag;
  j["eigenvalues"] = std::vector<double>(result.eigenvalues.data(),
                                         result.eigenvalues.data() + result.eigenvalues.size());
  nlohmann::json ts = nlohmann::json::array();
  for (const auto& t : implied_timescales(result, lag)) {
    ts.push_back(t ? nlohmann::json(*t) : nlohmann::json(nullptr));
  }
  j["timescales"] = ts;
  nlohmann::json vecs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < result.eigenvectors.cols(); ++i) {
    const Vector v = result.eigenvectors.col(i);
    vecs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  }
  j["eigenvectors"] = vecs;
  return j;
}

}  // namespace effdyn
