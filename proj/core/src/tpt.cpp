#include "effdyn/tpt.hpp"

#include <cmath>
#include <sstream>

#include "effdyn/error.hpp"
#include "effdyn/io_util.hpp"
#include "effdyn/spectral.hpp"

namespace effdyn {

void SetPair::validate(std::size_t n, bool require_interior) const {
  if (A.empty() || B.empty()) throw InputError("sets A and B must be nonempty");
  std::vector<int> seen(n, 0);
  for (auto a : A) {
    if (a >= n) throw InputError("set A references state " + std::to_string(a) + " out of range");
    seen[a] |= 1;
  }
  for (auto b : B) {
    if (b >= n) throw InputError("set B references state " + std::to_string(b) + " out of range");
    if (seen[b] & 1) throw InputError("sets A and B overlap at state " + std::to_string(b));
    seen[b] |= 2;
  }
  bool interior = false;
  for (auto s : seen) interior = interior || s == 0;
  if (require_interior && !interior) throw InputError("the complement of A and B is empty");
}

std::vector<int> SetPair::labels(std::size_t n) const {
  validate(n);
  std::vector<int> out(n, 0);
  for (auto a : A) out[a] = -1;
  for (auto b : B) out[b] = 1;
  return out;
}

Vector committor(const TransitionModel& model, const SetPair& sets) {
  const std::size_t n = model.size();
  const auto label = sets.labels(n);
  std::vector<Eigen::Index> interior;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] == 0) interior.push_back(static_cast<Eigen::Index>(s));
  }
  const auto m = static_cast<Eigen::Index>(interior.size());
  const Matrix& P = model.P();

  Matrix system(m, m);
  Vector rhs = Vector::Zero(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      system(a, b) = (a == b ? 1.0 : 0.0) - P(interior[a], interior[b]);
    }
    for (auto s : sets.B) rhs(a) += P(interior[a], static_cast<Eigen::Index>(s));
  }

  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw ConnectivityError("committor system is singular: some interior states cannot reach A or B");
  }
  const Vector qi = lu.solve(rhs);

  Vector q = Vector::Zero(static_cast<Eigen::Index>(n));
  for (auto s : sets.B) q(static_cast<Eigen::Index>(s)) = 1.0;
  for (Eigen::Index a = 0; a < m; ++a) q(interior[a]) = qi(a);

  const Vector residual = P * q - q;
  double worst = 0.0;
  for (auto i : interior) worst = std::max(worst, std::abs(residual(i)));
  if (!(worst < 1e-10)) {
    std::ostringstream msg;
    msg << "committor residual " << worst << " exceeds 1e-10 (ill-conditioned interior)";
    throw ConnectivityError(msg.str());
  }
  return q;
}

FluxRates rate_flux(const TransitionModel& model, const SetPair& sets, const Vector& q) {
  sets.validate(model.size(), false);
  if (q.size() != static_cast<Eigen::Index>(model.size())) throw InputError("committor length does not match the model");
  const Vector Pq = model.P() * q;
  FluxRates r;
  for (auto a : sets.A) {
    const auto i = static_cast<Eigen::Index>(a);
    r.via_A += model.mu()(i) * Pq(i);
  }
  for (auto b : sets.B) {
    const auto i = static_cast<Eigen::Index>(b);
    r.via_B += model.mu()(i) * (1.0 - Pq(i));
  }
  return r;
}

double rate_energy(const TransitionModel& model, const Vector& q) { return dirichlet_energy(model, q); }

CountedRate rate_count(std::span<const std::size_t> chain, const SetPair& sets, std::size_t N) {
  if (N == 0) throw InputError("rate_count: N must be positive");
  if (chain.size() < N) throw InputError("rate_count: chain shorter than N");
  std::size_t n_states = 0;
  for (auto s : chain) n_states = std::max(n_states, s + 1);
  for (auto s : sets.A) n_states = std::max(n_states, s + 1);
  for (auto s : sets.B) n_states = std::max(n_states, s + 1);
  std::vector<int> label(n_states, 0);
  for (auto a : sets.A) label[a] = -1;
  for (auto b : sets.B) {
    if (label[b] == -1) throw InputError("sets A and B overlap");
    label[b] = 1;
  }

  constexpr std::size_t kBatches = 20;
  std::vector<double> per_step(N, 0.0);  // 1 at the start step of each counted segment
  CountedRate out;
  bool armed = false;
  std::size_t start = 0;
  for (std::size_t t = 0; t < chain.size(); ++t) {
    const int l = label[chain[t]];
    if (l == -1) {
      out.visited_A = true;
      armed = true;
      start = t;
      if (t >= N) break;  // any later segment would start at or after N
    } else if (l == 1 && armed) {
      armed = false;
      if (start < N) {
        per_step[start] = 1.0;
        ++out.segments;
      }
    }
  }
  out.rate = static_cast<double>(out.segments) / static_cast<double>(N);
  out.std_error = N >= kBatches ? batch_means(per_step, kBatches).std_error : 0.0;
  return out;
}

EnergyDecomposition energy_decomposition(const TransitionModel& model, const SetPair& sets,
                                         const Vector& f) {
  if (f.size() != static_cast<Eigen::Index>(model.size())) {
    throw InputError("energy_decomposition: function length mismatch");
  }
  sets.validate(model.size());
  for (auto a : sets.A) {
    if (std::abs(f(static_cast<Eigen::Index>(a))) > 1e-12) throw ConstraintError("f must vanish on A");
  }
  for (auto b : sets.B) {
    if (std::abs(f(static_cast<Eigen::Index>(b)) - 1.0) > 1e-12) {
      throw ConstraintError("f must equal 1 on B");
    }
  }
  if (!is_reversible(model)) {
    throw ReversibilityRequired("energy_decomposition needs a reversible model");
  }
  const Vector q = committor(model, sets);
  EnergyDecomposition d{dirichlet_energy(model, f), rate_energy(model, q),
                        dirichlet_energy(model, f - q)};
  if (std::abs(d.energy_f - d.rate - d.energy_f_minus_q) > 1e-10) {
    std::ostringstream msg;
    msg << "energy decomposition broken: E(f)=" << d.energy_f << " k=" << d.rate
        << " E(f-q)=" << d.energy_f_minus_q;
    throw InvariantFailure(msg.str());
  }
  return d;
}

TPTResult analyze_tpt(const TransitionModel& model, const SetPair& sets) {
  TPTResult r;
  r.q = committor(model, sets);
  const auto flux = rate_flux(model, sets, r.q);
  r.k_flux_A = flux.via_A;
  r.k_flux_B = flux.via_B;
  r.k_energy = rate_energy(model, r.q);
  const double spread = std::max({std::abs(r.k_flux_A - r.k_flux_B), std::abs(r.k_flux_A - r.k_energy),
                                  std::abs(r.k_flux_B - r.k_energy)});
  if (spread > 1e-10) {
    std::ostringstream msg;
    msg << "transition rates disagree: flux-A " << r.k_flux_A << ", flux-B " << r.k_flux_B
        << ", energy " << r.k_energy;
    throw InvariantFailure(msg.str());
  }
  return r;
}

nlohmann::json tpt_json(const TPTResult& result) {
  nlohmann::json j;
  j["q"] = std::vector<double>(result.q.data(), result.q.data() + result.q.size());
  j["k_flux_A"] = result.k_flux_A;
  j["k_flux_B"] = result.k_flux_B;
  j["k_energy"] = result.k_energy;
  if (result.k_count) {
    j["k_count"] = result.k_count->rate;
    j["k_count_stderr"] = result.k_count->std_error;
    j["reactive_segments"] = result.k_count->segments;
  }
  return j;
}

std::string committor_csv(const TPTResult& result) {
  std::string out = "state,q\n";
  for (Eigen::Index i = 0; i < result.q.size(); ++i) {
    out += std::to_string(i) + ',' + io::format_double(result.q(i)) + '\n';
  }
  return out;
}

std::string tpt_rates_csv(const TPTResult& result) {
  std::string out = "method,rate,stderr\n";
  out += "flux_A," + io::format_double(result.k_flux_A) + ",\n";
  out += "flux_B," + io::format_double(result.k_flux_B) + ",\n";
  out += "energy," + io::format_double(result.k_energy) + ",\n";
  if (result.k_count) {
    out += "count," + io::format_double(result.k_count->rate) + ',' +
           io::format_double(result.k_count->std_error) + '\n';
  }
  return out;
}

}  // namespace effdyn
