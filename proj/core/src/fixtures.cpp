#include "effdyn/fixtures.hpp"

#include "effdyn/error.hpp"
#include "effdyn/estimators.hpp"

namespace effdyn {

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
  Matrix M(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : values) {
    Eigen::Index j = 0;
    for (double v : row) M(i, j++) = v;
    ++i;
  }
  return M;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

DoubleWellSetup double_well_setup() { return {}; }

std::vector<std::string> fixture_names() {
  return {"2st", "bd3", "bd4", "dup4", "cycle3", "cycle3-biased", "double-well-2d"};
}

TransitionModel fixture(const std::string& name) {
  if (name == "2st") {
    return TransitionModel::from_matrix_and_mu(rows({{0.9, 0.1}, {0.2, 0.8}}), vec({2.0 / 3.0, 1.0 / 3.0}),
                                               1.0, ModelSource::Fixture);
  }
  if (name == "bd3") {
    return TransitionModel::from_matrix_and_mu(
        rows({{0.5, 0.5, 0.0}, {0.25, 0.5, 0.25}, {0.0, 0.5, 0.5}}), vec({0.25, 0.5, 0.25}), 1.0,
        ModelSource::Fixture);
  }
  if (name == "bd4") {
    return TransitionModel::from_matrix_and_mu(
        rows({{0.75, 0.25, 0.0, 0.0}, {0.25, 0.5, 0.25, 0.0}, {0.0, 0.25, 0.5, 0.25}, {0.0, 0.0, 0.25, 0.75}}),
        vec({0.25, 0.25, 0.25, 0.25}), 1.0, ModelSource::Fixture);
  }
  if (name == "dup4") {
    // States 1 and 2 are interchangeable, so the committor from 0 to 3 is
    // constant on {1, 2}.
    return TransitionModel::from_matrix_and_mu(
        rows({{0.5, 0.25, 0.25, 0.0}, {0.25, 0.5, 0.0, 0.25}, {0.25, 0.0, 0.5, 0.25}, {0.0, 0.25, 0.25, 0.5}}),
        vec({0.25, 0.25, 0.25, 0.25}), 1.0, ModelSource::Fixture);
  }
  if (name == "cycle3") {
    return TransitionModel::from_matrix_and_mu(rows({{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}),
                                               vec({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}), 1.0,
                                               ModelSource::Fixture);
  }
  if (name == "cycle3-biased") {
    return TransitionModel::from_matrix_and_mu(rows({{0.1, 0.6, 0.3}, {0.3, 0.1, 0.6}, {0.6, 0.3, 0.1}}),
                                               vec({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}), 1.0,
                                               ModelSource::Fixture);
  }
  if (name == "double-well-2d") {
    const auto setup = double_well_setup();
    return build_analytic_em(setup.potential, setup.beta, setup.dt, setup.grid);
  }
  throw ConfigError("unknown fixture '" + name + "'");
}

}  // namespace effdyn
