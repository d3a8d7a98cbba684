#include "suite.hpp"

#include <algorithm>
#include <cmath>

#include "effdyn/cv_search.hpp"
#include "effdyn/effective.hpp"
#include "effdyn/fixtures.hpp"
#include "effdyn/kl_objective.hpp"
#include "effdyn/model_io.hpp"
#include "effdyn/rng.hpp"
#include "effdyn/spectral.hpp"
#include "effdyn/tpt.hpp"

namespace effdyn::cli {
namespace {

Vector random_vector(Philox4x32& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 2.0 * rng.uniform() - 1.0;
  return v;
}

// Mean-zero, mu-orthonormal columns from Gaussian draws (two Gram-Schmidt passes).
Matrix random_constrained(Philox4x32& rng, const Vector& mu, Eigen::Index m) {
  const Eigen::Index n = mu.size();
  Matrix fs(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.gaussian();
    for (int pass = 0; pass < 2; ++pass) {
      v.array() -= mu.dot(v);
      for (Eigen::Index k = 0; k < j; ++k) v -= mu_inner(mu, v, fs.col(k)) * fs.col(k);
    }
    fs.col(j) = v / std::sqrt(mu_inner(mu, v, v));
  }
  return fs;
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

FactorizedDensity random_candidate(Philox4x32& rng, const CVAssignment& cv) {
  const auto k = static_cast<Eigen::Index>(cv.k());
  FactorizedDensity g;
  g.reduced = Matrix(k, k);
  for (Eigen::Index z = 0; z < k; ++z) {
    for (Eigen::Index w = 0; w < k; ++w) g.reduced(z, w) = 0.05 + rng.uniform();
    g.reduced.row(z) /= g.reduced.row(z).sum();
  }
  for (std::size_t z = 0; z < cv.k(); ++z) {
    Vector c(static_cast<Eigen::Index>(cv.fiber(z).size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = 0.05 + rng.uniform();
    g.conditionals.push_back(c / c.sum());
  }
  return g;
}

void model_checks(Artifacts& a, const TransitionModel& model) {
  const auto& P = model.P();
  const auto& mu = model.mu();
  a.add("model.row_sum", max_abs(P.rowwise().sum().array() - 1.0), tolerance::kRowSum);
  a.add("model.stationarity", max_abs(P.transpose() * mu - mu), tolerance::kStationarity);
  a.add_flag("model.mu_positive", mu.minCoeff() > 0.0);

  const auto encoded = encode_model(model, "model.bin");
  const auto decoded = decode_model(encoded.header, encoded.matrix_bytes);
  const auto again = encode_model(decoded, "model.bin");
  a.add_flag("model.round_trip", dump_json(again.header) == dump_json(encoded.header) &&
                                     again.matrix_bytes == encoded.matrix_bytes);
}

void spectral_checks(Artifacts& a, const TransitionModel& rev, std::size_t m, Philox4x32& rng) {
  const auto spec = solve_spectrum(rev, m);
  const auto& phi = spec.eigenvectors;
  const auto& lambda = spec.eigenvalues;
  const Eigen::Index cols = phi.cols();
  a.add("spectrum.eigen_equation", eigen_residual(rev, spec), 1e-10);
  const Matrix gram = phi.transpose() * rev.mu().asDiagonal() * phi - Matrix::Identity(cols, cols);
  a.add("spectrum.mu_orthonormal", gram.cwiseAbs().maxCoeff(), 1e-10);
  double rise = 0.0;
  for (Eigen::Index i = 1; i < cols; ++i) rise = std::max(rise, lambda(i) - lambda(i - 1));
  a.add("spectrum.descending", rise, 1e-14);
  if (cols < 2) return;

  const Eigen::Index mm = cols - 1;
  const auto weights = ObjectiveWeights::uniform(static_cast<std::size_t>(mm));
  double bound = 0.0;
  for (Eigen::Index i = 1; i <= mm; ++i) bound += 1.0 - lambda(i);
  const Matrix top = phi.rightCols(mm);
  const double attained = variational_score(rev, top, weights);
  a.add("variational.attained", std::abs(attained - bound), 1e-10);
  a.add("variational.vamp_complement",
        std::abs(attained + vamp1_score(rev, top, weights) - weights.sum()), 1e-8);
  double worst = -INFINITY;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix fs = random_constrained(rng, rev.mu(), mm);
    worst = std::max(worst, bound - variational_score(rev, fs, weights));
  }
  a.add("variational.lower_bound", std::max(worst, 0.0), 1e-8);
}

void tpt_checks(Artifacts& a, const TransitionModel& model, const SetPair& sets, Philox4x32& rng) {
  const auto r = analyze_tpt(model, sets);
  a.add("tpt.flux_A_vs_energy", std::abs(r.k_flux_A - r.k_energy), 1e-10);
  a.add("tpt.flux_B_vs_energy", std::abs(r.k_flux_B - r.k_energy), 1e-10);
  const auto labels = sets.labels(model.size());
  const Vector Pq = model.P() * r.q;
  double harmonic = 0.0;
  for (std::size_t x = 0; x < labels.size(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    if (labels[x] == 0) harmonic = std::max(harmonic, std::abs(Pq(i) - r.q(i)));
  }
  a.add("tpt.committor_harmonic", harmonic, 1e-10);
  if (is_reversible(model)) {
    Vector f = r.q;
    for (std::size_t x = 0; x < labels.size(); ++x) {
      if (labels[x] == 0) f(static_cast<Eigen::Index>(x)) += 0.5 * (2.0 * rng.uniform() - 1.0);
    }
    const auto d = energy_decomposition(model, sets, f);
    a.add("tpt.energy_decomposition", std::abs(d.energy_f - d.rate - d.energy_f_minus_q), 1e-10);
  }
}

void effective_checks(Artifacts& a, const TransitionModel& model, const CVAssignment& cv,
                      Philox4x32& rng) {
  const auto eff = build_effective(model, cv);
  const auto& red = eff.reduced;
  a.add("effective.mu_invariance", max_abs(red.P().transpose() * red.mu() - red.mu()), 1e-12);
  if (is_reversible(model)) a.add("effective.reversibility", detailed_balance_residual(red), 1e-12);
  const auto k = static_cast<Eigen::Index>(cv.k());
  const auto lift_res = lift_identity_check(model, eff, random_vector(rng, k), random_vector(rng, k));
  a.add("effective.lift_transfer", lift_res.transfer, 1e-10);
  a.add("effective.lift_inner_product", lift_res.inner_product, 1e-10);
  a.add("effective.lift_energy", lift_res.energy, 1e-10);
  a.add("effective.adjoint_routes", effective_adjoint_route_gap(model, cv), 1e-12);
  a.add("effective.compose_single_bin", compose_check(model, cv, CVAssignment::single_bin(cv.k())), 1e-12);
  if (cv.k() >= 2) {
    std::vector<std::size_t> halves(cv.k());
    for (std::size_t z = 0; z < cv.k(); ++z) halves[z] = z % 2;
    a.add("effective.compose_parity", compose_check(model, cv, CVAssignment(halves, 2)), 1e-12);
  }

  const double score = kl_score(model, cv);
  a.add_flag("kl.nonnegative", score >= 0.0);
  a.add("kl.mutual_information_gap",
        std::abs(score - (mutual_information(model) - mutual_information(red))), 1e-10);
  a.add("kl.identity_cv", kl_score(model, CVAssignment::identity(model.size())), 1e-12);
  double deficit = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = kl_of_candidate(model, cv, random_candidate(rng, cv));
    deficit = std::max(deficit, c.optimum - c.value);
  }
  a.add("kl.candidate_optimality", deficit, 1e-12);
}

void comparison_checks(Artifacts& a, const TransitionModel& model, const CVAssignment& cv,
                       std::size_t m, const std::optional<SetPair>& reduced_sets) {
  const auto cmp = eigen_comparison(model, cv, m);
  a.add_flag("compare.eigen_ordering", cmp.ordered);
  a.add("compare.error_identity", cmp.max_residual, 1e-8);
  if (reduced_sets) {
    const auto rates = rate_comparison(model, cv, *reduced_sets);
    a.add("compare.rate_identity", rates.identity_residual, 1e-10);
    a.add_flag("compare.rate_ordering", rates.k_eff >= rates.k_full - 1e-12);
  }
}

void sampled_checks(Artifacts& a, const TransitionModel& model, const RunConfig& config,
                    const Seeds& seeds, Philox4x32& rng) {
  const auto n = static_cast<Eigen::Index>(model.size());
  const auto chain = simulate_chain(model, 0, config.counting_steps, seeds.chain);
  const Vector f = random_vector(rng, n);
  const auto est = ergodic_energy(chain, f);
  const double exact = dirichlet_energy(model, f);
  a.add("sampled.ergodic_energy", std::abs(est.value - exact), 4.0 * est.std_error);
  if (config.sets) {
    const auto r = analyze_tpt(model, *config.sets);
    const auto counted = rate_count(chain, *config.sets, config.counting_steps);
    a.add("sampled.reactive_rate", std::abs(counted.rate - r.k_energy), 4.0 * counted.std_error);
  }
}

}  // namespace

double eigen_residual(const TransitionModel& model, const SpectralResult& spec) {
  const Matrix r = model.P() * spec.eigenvectors - spec.eigenvectors * spec.eigenvalues.asDiagonal();
  // Eigenvectors blow up where mu is tiny, so the plain max-norm is meaningless there.
  return (model.mu().asDiagonal() * r.cwiseAbs2()).colwise().sum().cwiseSqrt().maxCoeff();
}

Artifacts invariant_suite(const TransitionModel& model, const RunConfig& config, const Seeds& seeds) {
  Artifacts a;
  Philox4x32 rng(seeds.probes);
  model_checks(a, model);
  const auto rev = reversible_view(model);
  if (!is_reversible(model)) a.notes.push_back("spectral checks use the reversible part");
  const std::size_t m = std::min(config.spectrum_m.value_or(3), model.size() - 1);
  if (model.size() >= 2) spectral_checks(a, rev, m, rng);
  if (config.sets) tpt_checks(a, model, *config.sets, rng);
  if (config.cv) {
    const auto cv = config.cv->build(model);
    effective_checks(a, model, cv, rng);
    comparison_checks(a, model, cv, m, config.reduced_sets);
  }
  if (config.counting_steps > 0) sampled_checks(a, model, config, seeds, rng);
  return a;
}

Artifacts fixture_suite() {
  Artifacts a;
  const auto two = fixture("2st");
  a.add("fixture.2st_mu", max_abs(two.mu() - Vector{{2.0 / 3.0, 1.0 / 3.0}}), 1e-15);

  const auto bd3 = solve_spectrum(fixture("bd3"), 2);
  a.add("fixture.bd3_spectrum", max_abs(bd3.eigenvalues - Vector{{1.0, 0.5, 0.0}}), 1e-12);

  const auto bd4 = fixture("bd4");
  const SetPair ends{{0}, {3}};
  const auto r = analyze_tpt(bd4, ends);
  a.add("fixture.bd4_committor", max_abs(r.q - Vector{{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}}), 1e-12);
  a.add("fixture.bd4_rate", std::abs(r.k_energy - 1.0 / 48.0), 1e-12);

  const CVAssignment merge_middle({0, 1, 1, 2}, 3);
  const auto cmp = rate_comparison(bd4, merge_middle, {{0}, {2}});
  a.add("fixture.bd4_effective_committor", max_abs(cmp.q_eff - Vector{{0.0, 0.5, 1.0}}), 1e-12);
  a.add("fixture.bd4_effective_rate", std::abs(cmp.k_eff - 1.0 / 32.0), 1e-12);
  a.add("fixture.bd4_rate_gap", std::abs(cmp.gap - 1.0 / 96.0), 1e-12);
  a.add("fixture.bd4_rate_identity", std::abs(cmp.k_eff - cmp.k_full - cmp.gap), 1e-12);
  return a;
}

}  // namespace effdyn::cli
