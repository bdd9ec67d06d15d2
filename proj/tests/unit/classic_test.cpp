#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "l2go/classic.hpp"
#include "l2go/functions.hpp"
#include "l2go/presets.hpp"
#include "l2go/rng.hpp"

using namespace l2go;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ObjectivePtr quadratic_form(const Matrix& a) {
  return std::make_shared<FunctionObjective>(
      static_cast<int>(a.rows()),
      [a](const Vector& x) { return 0.5 * x.dot(a * x); },
      [a](const Vector& x) { return Vector(a * x); });
}

// SPD matrix with eigenvalues in [1, 10]; keeps the exact step within the
// line search interval [0, 1].
Matrix random_spd(std::mt19937_64& rng, int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gaussian_vector(rng, 1)[0];
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Vector eigs(n);
  std::uniform_real_distribution<double> dist(1.0, 10.0);
  for (int i = 0; i < n; ++i) eigs[i] = dist(rng);
  Matrix a = q * eigs.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

bool monotone(const RunTrace& trace, double tol = 1e-12) {
  for (std::size_t i = 1; i < trace.criteria.size(); ++i) {
    if (trace.criteria[i] > trace.criteria[i - 1] + tol) return false;
  }
  return true;
}

// Replays the inverse-Hessian recursion from the iterate/gradient history;
// an independent route used to check what bfgs() maintains internally.
Matrix replay_bfgs_h(const Objective& f, const RunTrace& trace) {
  const int n = static_cast<int>(trace.iterates[0].size());
  Matrix h = Matrix::Identity(n, n);
  for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
    const Vector s = trace.iterates[k] - trace.iterates[k - 1];
    const Vector y = f.gradient(trace.iterates[k]) - f.gradient(trace.iterates[k - 1]);
    const double sy = s.dot(y);
    if (sy <= 1e-12) continue;
    const double rho = 1.0 / sy;
    const Matrix v = Matrix::Identity(n, n) - rho * s * y.transpose();
    h = v * h * v.transpose() + rho * s * s.transpose();
  }
  return h;
}

}  // namespace

TEST_SUITE("classic") {

TEST_CASE("steepest descent solves the isotropic quadratic in one step") {
  auto f = quadratic_form(Matrix::Identity(2, 2));
  const RunTrace trace = steepest_gd(*f, vec2(3, 4), 1e-10, 50);
  CHECK(trace.status == RunStatus::converged);
  CHECK(trace.iterations() == 1);
  CHECK(trace.final_x().norm() < 1e-9);
}

TEST_CASE("steepest descent zig-zags on an anisotropic quadratic") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 10.0;
  auto f = quadratic_form(a);
  const RunTrace trace = steepest_gd(*f, vec2(10, 1), 1e-6, 500);
  CHECK(trace.status == RunStatus::converged);
  CHECK(trace.iterations() > 10);
  CHECK(monotone(trace));
}

TEST_CASE("conjugate gradient terminates on quadratics") {
  auto rng = make_rng(21, 0);
  {
    auto f = quadratic_form(random_spd(rng, 2));
    const RunTrace trace = conjugate_gd(*f, vec2(4, -3), 1e-6, 50);
    CHECK(trace.status == RunStatus::converged);
    CHECK(trace.iterations() <= 2);
  }
  {
    auto f = quadratic_form(random_spd(rng, 5));
    const RunTrace trace = conjugate_gd(*f, gaussian_vector(rng, 5, 3.0), 1e-6, 50);
    CHECK(trace.status == RunStatus::converged);
    CHECK(trace.iterations() <= 5);
  }
}

TEST_CASE("conjugate gradient restarts on a degenerate denominator") {
  // Constant gradient makes y = 0 every iteration, forcing the restart
  // branch; the run must stay monotone.
  FunctionObjective linear(
      2, [](const Vector& x) { return x[0]; },
      [](const Vector&) { return vec2(1, 0); });
  const RunTrace trace = conjugate_gd(linear, vec2(0, 0), 1e-8, 5);
  CHECK(trace.status == RunStatus::max_iter);
  CHECK(monotone(trace));
  for (double c : trace.criteria) CHECK(std::isfinite(c));
}

TEST_CASE("bfgs solves the isotropic quadratic in one step") {
  auto f = quadratic_form(Matrix::Identity(2, 2));
  const RunTrace trace = bfgs(*f, vec2(3, 4), 1e-10, 50);
  CHECK(trace.status == RunStatus::converged);
  CHECK(trace.iterations() == 1);
}

TEST_CASE("bfgs reaches the inverse Hessian on quadratics") {
  auto rng = make_rng(22, 0);
  const Matrix a = random_spd(rng, 4);
  auto f = quadratic_form(a);
  const Vector x0 = gaussian_vector(rng, 4, 3.0);
  const RunTrace trace = bfgs(*f, x0, 1e-9, 50);
  CHECK(trace.status == RunStatus::converged);
  CHECK(trace.iterations() <= 5);  // n + 1

  const Matrix h = replay_bfgs_h(*f, trace);
  CHECK((h - a.inverse()).norm() < 1e-5 * a.inverse().norm());
  CHECK((h - h.transpose()).norm() < 1e-12);
}

TEST_CASE("bfgs lands on one of the three-hump minimizers") {
  auto f = three_hump();
  const RunTrace trace = bfgs(*f, vec2(1, 1), 1e-6, 200);
  CHECK(trace.status == RunStatus::converged);
  const Vector x = trace.final_x();
  const bool near_known = (x - vec2(0, 0)).norm() < 0.05 ||
                          (x - vec2(1.7476, 0.8738)).norm() < 0.05 ||
                          (x - vec2(-1.7476, -0.8738)).norm() < 0.05;
  CHECK(near_known);
}

TEST_CASE("deterministic baselines are monotone on the zoo") {
  auto rng = make_rng(23, 0);
  std::vector<ObjectivePtr> zoo = {gaussian_mixture(appendix_d_test_config(2)),
                                   three_hump(),
                                   sample_gaussian_family(rng, 2, 2.0, 100.0)};
  for (const auto& f : zoo) {
    const Vector x0 = gaussian_vector(rng, f->dim(), 1.5);
    CHECK(monotone(steepest_gd(*f, x0, 1e-6, 100)));
    CHECK(monotone(conjugate_gd(*f, x0, 1e-6, 100)));
    CHECK(monotone(bfgs(*f, x0, 1e-6, 100)));
  }
}

TEST_CASE("adam leaves iterates fixed on a zero gradient stream") {
  FunctionObjective constant(
      3, [](const Vector&) { return 1.0; },
      [](const Vector&) { return Vector::Zero(3); });
  AdamConfig config;
  config.steps = 20;
  const Vector x0 = Vector::Ones(3);
  const RunTrace trace = adam(constant, x0, config);
  for (const auto& x : trace.iterates) CHECK((x - x0).norm() == 0.0);
}

TEST_CASE("adam trains the small classifier") {
  auto f = make_preset("small_classifier", 5);
  auto rng = make_rng(5, 2);
  const Vector theta0 = gaussian_vector(rng, 5, 0.5);
  AdamConfig config;
  config.steps = 1000;
  const RunTrace trace = adam(*f, theta0, config);
  CHECK(trace.final_f() < trace.criteria.front());

  const RunTrace again = adam(*f, theta0, config);
  CHECK(trace.criteria == again.criteria);
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    CHECK(trace.iterates[i] == again.iterates[i]);
  }
}

}  // TEST_SUITE
