#include "effdyn/effective.hpp"

#include <cmath>
#include <limits>

#include "effdyn/error.hpp"
#include "effdyn/spectral.hpp"

namespace effdyn {

EffectiveModel build_effective(const TransitionModel& model, const CVAssignment& cv) {
  if (cv.n() != model.size()) {
    throw AssignmentError("CV is defined on " + std::to_string(cv.n()) + " states, model has " +
                          std::to_string(model.size()));
  }
  const std::size_t k = cv.k();
  const Matrix& P = model.P();
  const Vector& mu = model.mu();

  Vector mu_bins = Vector::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t z = 0; z < k; ++z) {
    for (auto x : cv.fiber(z)) mu_bins(static_cast<Eigen::Index>(z)) += mu(static_cast<Eigen::Index>(x));
  }

  std::vector<Vector> conditionals(k);
  Matrix reduced = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  Vector into_bins(static_cast<Eigen::Index>(k));
  for (std::size_t z = 0; z < k; ++z) {
    const auto& fiber = cv.fiber(z);
    Vector& cond = conditionals[z];
    cond.resize(static_cast<Eigen::Index>(fiber.size()));
    for (std::size_t i = 0; i < fiber.size(); ++i) {
      const auto x = static_cast<Eigen::Index>(fiber[i]);
      cond(static_cast<Eigen::Index>(i)) = mu(x) / mu_bins(static_cast<Eigen::Index>(z));
      into_bins.setZero();
      for (Eigen::Index y = 0; y < P.cols(); ++y) {
        into_bins(static_cast<Eigen::Index>(cv(static_cast<std::size_t>(y)))) += P(x, y);
      }
      reduced.row(static_cast<Eigen::Index>(z)) += cond(static_cast<Eigen::Index>(i)) * into_bins.transpose();
    }
  }

  auto reduced_model = TransitionModel::from_matrix_and_mu(std::move(reduced), std::move(mu_bins),
                                                           model.lag(), ModelSource::Effective);
  return {std::move(reduced_model), std::move(conditionals), cv};
}

Vector lift(const CVAssignment& cv, const Vector& bin_function) {
  if (bin_function.size() != static_cast<Eigen::Index>(cv.k())) {
    throw InputError("lift: bin function length does not match the CV");
  }
  Vector f(static_cast<Eigen::Index>(cv.n()));
  for (std::size_t x = 0; x < cv.n(); ++x) {
    f(static_cast<Eigen::Index>(x)) = bin_function(static_cast<Eigen::Index>(cv(x)));
  }
  return f;
}

Vector project(const EffectiveModel& eff, const Vector& state_function) {
  if (state_function.size() != static_cast<Eigen::Index>(eff.cv.n())) {
    throw InputError("project: state function length does not match the CV");
  }
  Vector out = Vector::Zero(static_cast<Eigen::Index>(eff.cv.k()));
  for (std::size_t z = 0; z < eff.cv.k(); ++z) {
    const auto& fiber = eff.cv.fiber(z);
    for (std::size_t i = 0; i < fiber.size(); ++i) {
      out(static_cast<Eigen::Index>(z)) +=
          eff.conditionals[z](static_cast<Eigen::Index>(i)) * state_function(static_cast<Eigen::Index>(fiber[i]));
    }
  }
  return out;
}

LiftResiduals lift_identity_check(const TransitionModel& model, const EffectiveModel& eff,
                                    const Vector& f_bins, const Vector& h_bins) {
  const Vector f = lift(eff.cv, f_bins);
  const Vector h = lift(eff.cv, h_bins);
  const Vector reduced_f = eff.reduced.P() * f_bins;
  const Vector full_f = model.P() * f;

  LiftResiduals r;
  r.transfer = (reduced_f - project(eff, full_f)).lpNorm<Eigen::Infinity>();
  r.inner_product = std::abs(mu_inner(eff.reduced.mu(), reduced_f, h_bins) - mu_inner(model.mu(), full_f, h));
  r.energy = std::abs(dirichlet_energy(eff.reduced, f_bins) - dirichlet_energy(model, f));
  return r;
}

Matrix effective_adjoint(const TransitionModel& model, const CVAssignment& cv) {
  return adjoint(build_effective(model, cv).reduced);
}

double effective_adjoint_route_gap(const TransitionModel& model, const CVAssignment& cv) {
  const Matrix formula = effective_adjoint(model, cv);
  const Matrix via_process = build_effective(adjoint_model(model), cv).reduced.P();
  return (formula - via_process).cwiseAbs().maxCoeff();
}

double compose_check(const TransitionModel& model, const CVAssignment& fine, const CVAssignment& coarse) {
  const auto direct = build_effective(model, compose(coarse, fine));
  const auto staged = build_effective(build_effective(model, fine).reduced, coarse);
  const double p_gap = (direct.reduced.P() - staged.reduced.P()).cwiseAbs().maxCoeff();
  const double mu_gap = (direct.reduced.mu() - staged.reduced.mu()).cwiseAbs().maxCoeff();
  return std::max(p_gap, mu_gap);
}

std::vector<std::size_t> project_chain(std::span<const std::size_t> chain, const CVAssignment& cv) {
  std::vector<std::size_t> out(chain.size());
  for (std::size_t t = 0; t < chain.size(); ++t) out[t] = cv(chain[t]);
  return out;
}

double two_step_markov_zscore(std::span<const std::size_t> bin_chain, const EffectiveModel& eff) {
  const auto k = static_cast<Eigen::Index>(eff.cv.k());
  if (bin_chain.size() < 3) throw InputError("two_step_markov_zscore: chain too short");
  Matrix counts = Matrix::Zero(k, k);
  for (std::size_t t = 0; t + 2 < bin_chain.size(); ++t) {
    if (bin_chain[t] >= eff.cv.k() || bin_chain[t + 2] >= eff.cv.k()) {
      throw InputError("two_step_markov_zscore: bin index out of range");
    }
    counts(static_cast<Eigen::Index>(bin_chain[t]), static_cast<Eigen::Index>(bin_chain[t + 2])) += 1.0;
  }
  const Matrix predicted = eff.reduced.P() * eff.reduced.P();
  double worst = 0.0;
  for (Eigen::Index z = 0; z < k; ++z) {
    const double visits = counts.row(z).sum();
    if (visits == 0.0) continue;
    for (Eigen::Index w = 0; w < k; ++w) {
      const double p = predicted(z, w);
      const double diff = counts(z, w) / visits - p;
      const double se = std::sqrt(p * (1.0 - p) / visits);
      const double score = se > 0.0 ? std::abs(diff) / se
                                     : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      worst = std::max(worst, score);
    }
  }
  return worst;
}

nlohmann::json effective_json(const EffectiveModel& eff) {
  const auto& r = eff.reduced;
  nlohmann::json j;
  j["k"] = eff.cv.k();
  j["lag"] = r.lag();
  j["mu"] = std::vector<double>(r.mu().data(), r.mu().data() + r.mu().size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index z = 0; z < r.P().rows(); ++z) {
    const Vector row = r.P().row(z);
    rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  j["P"] = rows;
  j["cv"] = eff.cv.to_json();
  nlohmann::json cond = nlohmann::json::array();
  for (std::size_t z = 0; z < eff.conditionals.size(); ++z) {
    cond.push_back({{"bin", z},
                    {"states", eff.cv.fiber(z)},
                    {"mu_z", std::vector<double>(eff.conditionals[z].data(),
                                                 eff.conditionals[z].data() + eff.conditionals[z].size())}});
  }
  j["conditionals"] = cond;
  return j;
}

}  // namespace effdyn
