#include "effdyn/cv_search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "effdyn/effective.hpp"
#include "effdyn/error.hpp"
#include "effdyn/io_util.hpp"
#include "effdyn/kl_objective.hpp"
#include "effdyn/parallel.hpp"

namespace effdyn {

namespace {
constexpr double kTieTolerance = 1e-12;
}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::LinearAngle2d: return "linear-angle-2d";
    case FamilyKind::Coordinate: return "coordinate";
    case FamilyKind::ExplicitList: return "explicit-list";
  }
  return "unknown";
}

FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "linear-angle-2d") return FamilyKind::LinearAngle2d;
  if (name == "coordinate") return FamilyKind::Coordinate;
  if (name == "explicit-list") return FamilyKind::ExplicitList;
  throw ConfigError("unknown CV family kind '" + name + "'");
}

CVFamily CVFamily::linear_angle(std::size_t count, std::size_t bins) {
  if (count == 0) throw ConfigError("linear-angle family needs at least one angle");
  CVFamily family;
  family.kind = FamilyKind::LinearAngle2d;
  family.bins = bins;
  for (std::size_t j = 0; j < count; ++j) {
    family.params.push_back(std::numbers::pi * static_cast<double>(j) / static_cast<double>(count));
  }
  return family;
}

CVFamily CVFamily::coordinates(std::size_t dim, std::size_t bins) {
  CVFamily family;
  family.kind = FamilyKind::Coordinate;
  family.bins = bins;
  for (std::size_t a = 0; a < dim; ++a) family.params.push_back(static_cast<double>(a));
  return family;
}

CVFamily CVFamily::explicit_list(std::vector<CVAssignment> cvs) {
  CVFamily family;
  family.kind = FamilyKind::ExplicitList;
  family.list = std::move(cvs);
  for (std::size_t i = 0; i < family.list.size(); ++i) family.params.push_back(static_cast<double>(i));
  return family;
}

CVAssignment CVFamily::assignment(std::size_t index, const TransitionModel& model) const {
  if (index >= params.size()) throw InputError("CV family index out of range");
  if (kind == FamilyKind::ExplicitList) {
    const auto& cv = list.at(index);
    if (cv.n() != model.size()) throw AssignmentError("listed CV does not match the model size");
    return cv;
  }
  if (!model.states() || !model.states()->grid) {
    throw ConfigError(to_string(kind) + " family needs a grid-backed model");
  }
  const auto& states = *model.states();
  if (kind == FamilyKind::LinearAngle2d) {
    return CVAssignment::linear_angle(*states.grid, states.labels, params[index], bins);
  }
  return CVAssignment::coordinate(*states.grid, states.labels, static_cast<std::size_t>(params[index]), bins);
}

TransitionModel reversible_view(const TransitionModel& model) {
  return is_reversible(model) ? model : reversible_part(model);
}

TimescaleObjective timescale_objective(const TransitionModel& model, const CVAssignment& cv,
                                       const ObjectiveWeights& weights, bool verify) {
  if (cv.n() != model.size()) throw AssignmentError("CV and model sizes differ");
  const std::size_t m = weights.size();
  TimescaleObjective out;
  out.used_reversible_part = !is_reversible(model);
  const TransitionModel work = reversible_view(model);
  const auto eff = build_effective(work, cv);
  const std::size_t available = std::min(m, cv.k() - 1);
  out.missing = m - available;
  out.lambda_eff = Vector::Zero(static_cast<Eigen::Index>(m));

  std::optional<SpectralResult> spec;
  if (available > 0) {
    spec = solve_spectrum(eff.reduced, available);
    for (std::size_t i = 0; i < available; ++i) {
      out.lambda_eff(static_cast<Eigen::Index>(i)) = spec->eigenvalues(static_cast<Eigen::Index>(i + 1));
    }
  }
  for (std::size_t i = 0; i < m; ++i) out.value += weights[i] * (1.0 - out.lambda_eff(static_cast<Eigen::Index>(i)));

  if (verify) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i < available) {
        const Vector lifted = lift(cv, spec->eigenvectors.col(static_cast<Eigen::Index>(i + 1)));
        total += weights[i] * dirichlet_energy(work, lifted);
      } else {
        total += weights[i];
      }
    }
    out.variational = total;
    if (std::abs(total - out.value) > 1e-10) {
      std::ostringstream msg;
      msg << "timescale objective " << out.value << " disagrees with lifted-eigenvector energy " << total;
      throw InvariantFailure(msg.str());
    }
  }
  return out;
}

EigenComparison eigen_comparison(const TransitionModel& model, const CVAssignment& cv, std::size_t m) {
  if (cv.n() != model.size()) throw AssignmentError("CV and model sizes differ");
  if (m == 0) throw InputError("eigen_comparison: m must be positive");
  EigenComparison out;
  out.used_reversible_part = !is_reversible(model);
  const TransitionModel work = reversible_view(model);
  const auto eff = build_effective(work, cv);
  const auto full = solve_spectrum(work, m);
  const std::size_t available = std::min(m, cv.k() - 1);
  const auto reduced = solve_spectrum(eff.reduced, available);

  for (std::size_t i = 1; i <= m; ++i) {
    EigenRow row;
    row.index = i;
    row.lambda = full.eigenvalues(static_cast<Eigen::Index>(i));
    row.missing = i > available;
    row.lambda_eff = row.missing ? 0.0 : reduced.eigenvalues(static_cast<Eigen::Index>(i));
    row.gap = row.lambda - row.lambda_eff;
    if (!row.missing && row.lambda_eff > row.lambda + 1e-10) out.ordered = false;
    out.rows.push_back(row);
  }

  const auto mu = work.mu();
  out.residual = Matrix::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(available + 1));
  for (Eigen::Index i = 0; i <= static_cast<Eigen::Index>(m); ++i) {
    const Vector phi = full.eigenvectors.col(i);
    const double lambda = full.eigenvalues(i);
    for (Eigen::Index j = 0; j <= static_cast<Eigen::Index>(available); ++j) {
      const Vector diff = lift(cv, reduced.eigenvectors.col(j)) - phi;
      const double rhs = dirichlet_energy(work, diff) - (1.0 - lambda) * mu_inner(mu, diff, diff);
      const double r = std::abs((lambda - reduced.eigenvalues(j)) - rhs);
      out.residual(i, j) = r;
      out.max_residual = std::max(out.max_residual, r);
    }
  }
  return out;
}

RateComparison rate_comparison(const TransitionModel& model, const CVAssignment& cv,
                               const SetPair& reduced_sets) {
  if (cv.n() != model.size()) throw AssignmentError("CV and model sizes differ");
  reduced_sets.validate(cv.k());
  SetPair full_sets;
  for (auto z : reduced_sets.A) full_sets.A.insert(full_sets.A.end(), cv.fiber(z).begin(), cv.fiber(z).end());
  for (auto z : reduced_sets.B) full_sets.B.insert(full_sets.B.end(), cv.fiber(z).begin(), cv.fiber(z).end());
  std::sort(full_sets.A.begin(), full_sets.A.end());
  std::sort(full_sets.B.begin(), full_sets.B.end());

  RateComparison out;
  out.used_reversible_part = !is_reversible(model);
  const TransitionModel work = reversible_view(model);
  const auto eff = build_effective(work, cv);
  const auto full = analyze_tpt(work, full_sets);
  const auto reduced = analyze_tpt(eff.reduced, reduced_sets);

  out.q = full.q;
  out.q_eff = reduced.q;
  out.k_full = full.k_energy;
  out.k_eff = reduced.k_energy;
  out.k_eff_flux = reduced.k_flux_A;
  out.gap = dirichlet_energy(work, full.q - lift(cv, reduced.q));
  out.identity_residual = std::abs(out.k_eff - (out.k_full + out.gap));
  if (out.identity_residual > 1e-10) {
    std::ostringstream msg;
    msg << "rate identity broken: k_eff " << out.k_eff << " vs k + gap " << out.k_full + out.gap;
    throw InvariantFailure(msg.str());
  }
  return out;
}

std::string to_string(ScanObjective objective) {
  return objective == ScanObjective::Timescale ? "timescale" : "kl";
}

ScanObjective scan_objective_from_string(const std::string& name) {
  if (name == "timescale") return ScanObjective::Timescale;
  if (name == "kl") return ScanObjective::KL;
  throw ConfigError("unknown scan objective '" + name + "'");
}

ScanResult scan(const TransitionModel& model, const CVFamily& family, const ScanConfig& config) {
  if (family.size() == 0) throw ConfigError("CV family has no members");
  ScanResult result;
  result.objective = config.objective;
  result.m = config.weights.size();
  result.points.resize(family.size());

  // Shared by every scan point; computed once up front.
  const TransitionModel work = reversible_view(model);

  parallel_for(family.size(), resolve_threads(config.threads), [&](std::size_t index) {
    const CVAssignment cv = family.assignment(index, model);
    ScanPoint& point = result.points[index];
    point.param = family.params[index];
    point.k = cv.k();
    const auto ts = timescale_objective(work, cv, config.weights);
    point.lambda_eff = ts.lambda_eff;
    point.missing = ts.missing;
    point.objective = config.objective == ScanObjective::Timescale ? ts.value : kl_score(model, cv);
    if (config.rates && cv.k() >= 3) {
      const auto rates = rate_comparison(work, cv, SetPair{{0}, {cv.k() - 1}});
      point.k_full = rates.k_full;
      point.k_eff = rates.k_eff;
      point.gap = rates.gap;
    }
  });

  if (std::none_of(result.points.begin(), result.points.end(), [](const ScanPoint& p) { return p.k >= 2; })) {
    throw DegenerateFamilyError("every family member collapses to a single bin");
  }

  std::vector<std::size_t> order(result.points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.points[a].param < result.points[b].param;
  });
  // Objectives within roundoff of each other count as ties.
  result.argmin = order.front();
  for (auto i : order) {
    const double best = result.points[result.argmin].objective;
    if (result.points[i].objective < best - kTieTolerance * std::max(1.0, std::abs(best))) result.argmin = i;
  }
  return result;
}

namespace {

std::string optional_cell(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string{};
}

}  // namespace

std::string scan_csv(const ScanResult& result) {
  std::ostringstream out;
  out << "param,objective";
  for (std::size_t i = 1; i <= result.m; ++i) out << ",lambda_" << i;
  out << ",k_full,k_eff,gap\n";
  for (const auto& p : result.points) {
    out << io::format_double(p.param) << ',' << io::format_double(p.objective);
    for (Eigen::Index i = 0; i < p.lambda_eff.size(); ++i) out << ',' << io::format_double(p.lambda_eff(i));
    out << ',' << optional_cell(p.k_full) << ',' << optional_cell(p.k_eff) << ',' << optional_cell(p.gap) << '\n';
  }
  return out.str();
}

nlohmann::json scan_json(const ScanResult& result) {
  const auto& best = result.points.at(result.argmin);
  std::size_t missing = 0;
  for (const auto& p : result.points) missing = std::max(missing, p.missing);
  return {{"objective", to_string(result.objective)},
          {"m", result.m},
          {"points", result.points.size()},
          {"argmin_index", result.argmin},
          {"argmin_param", best.param},
          {"argmin_objective", best.objective},
          {"argmin_bins", best.k},
          {"max_missing_eigenvalues", missing}};
}

std::string eigen_comparison_csv(const EigenComparison& report) {
  std::ostringstream out;
  out << "index,lambda,lambda_eff,gap,missing,max_identity_residual\n";
  for (const auto& row : report.rows) {
    const auto i = static_cast<Eigen::Index>(row.index);
    const double worst = i < report.residual.rows() ? report.residual.row(i).maxCoeff() : 0.0;
    out << row.index << ',' << io::format_double(row.lambda) << ',' << io::format_double(row.lambda_eff) << ','
        << io::format_double(row.gap) << ',' << (row.missing ? 1 : 0) << ',' << io::format_double(worst) << '\n';
  }
  return out.str();
}

nlohmann::json eigen_comparison_json(const EigenComparison& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"index", row.index},
                    {"lambda", row.lambda},
                    {"lambda_eff", row.lambda_eff},
                    {"gap", row.gap},
                    {"missing", row.missing}});
  }
  nlohmann::json residual = nlohmann::json::array();
  for (Eigen::Index i = 0; i < report.residual.rows(); ++i) {
    nlohmann::json line = nlohmann::json::array();
    for (Eigen::Index j = 0; j < report.residual.cols(); ++j) line.push_back(report.residual(i, j));
    residual.push_back(std::move(line));
  }
  return {{"rows", rows},
          {"identity_residual", residual},
          {"max_identity_residual", report.max_residual},
          {"ordered", report.ordered},
          {"used_reversible_part", report.used_reversible_part}};
}

nlohmann::json rate_comparison_json(const RateComparison& report) {
  return {{"k_full", report.k_full},
          {"k_eff", report.k_eff},
          {"k_eff_flux", report.k_eff_flux},
          {"gap", report.gap},
          {"identity_residual", report.identity_residual},
          {"q_eff", std::vector<double>(report.q_eff.data(), report.q_eff.data() + report.q_eff.size())},
          {"used_reversible_part", report.used_reversible_part}};
}

}  // namespace effdyn
