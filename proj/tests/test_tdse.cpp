#include "ecs/errors.hpp"
#include "ecs/spectral.hpp"
#include "ecs/tdse.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace ecs;

namespace {

AssembledSystem hydrogen(double xi) {
  const auto grid = ElementGrid::uniform(0, 30, 15);
  return assemble_central(grid, BasisSpec{6, true, true},
                          snap_path(grid, ScalingPath{10.0, xi, false}), 1.0, 0.05,
                          ChannelSet::fixed_m(0, 3));
}

Eigen::VectorXcd ground_state(const AssembledSystem& sys) {
  SparseMatrix h = sys.H_static;
  auto r = solve_generalized(h, sys.S, true);
  select_resonance(r, -0.5);
  return normalize_state(sys, r.vectors->col(r.selected));
}

} // namespace

TEST_CASE("field envelope", "[tdse]") {
  const FieldEnvelope f{0.1, 10.0};
  CHECK(f(-1.0) == 0.0);
  CHECK(f(0.0) == 0.0);
  CHECK(f(5.0) == Catch::Approx(0.05));
  CHECK(f(10.0) == 0.1);
  CHECK(f(30.0) == 0.1);
  for (double t = 0.0; t < 10.0; t += 0.5)
    CHECK(f(t + 0.5) >= f(t));
}

TEST_CASE("RK4 converges at fourth order on a two-level system", "[tdse]") {
  // one element with both ends clamped leaves the two interior functions
  const auto grid = ElementGrid::uniform(-1, 1, 1);
  const auto sys = assemble_1d(grid, BasisSpec{4, true, true}, ScalingPath{1.0, 0.0, true}, 0.0);
  REQUIRE(sys.size() == 2);
  const Eigen::MatrixXcd S(sys.S), H(sys.H_static);
  const Eigen::MatrixXcd A = S.inverse() * H;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
  const double T = 2.0;
  Eigen::VectorXcd c0(2);
  c0 << 1.0, cplx(0.3, 0.2);
  const Eigen::VectorXcd exp_diag =
      (es.eigenvalues() * cplx(0.0, -T)).array().exp().matrix();
  const Eigen::VectorXcd exact =
      es.eigenvectors() * exp_diag.asDiagonal() * es.eigenvectors().inverse() * c0;
  // pick steps resolving the fastest frequency
  const double wmax = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<double> err;
  for (int k = 0; k < 3; ++k) {
    const double dt = 0.2 / wmax / (1 << k);
    const Propagator prop(sys);
    Eigen::VectorXcd c = c0;
    const long n = std::lround(T / dt);
    const double h = T / n;
    for (long s = 0; s < n; ++s)
      prop.step(c, s * h, h, FieldEnvelope{});
    err.push_back((c - exact).norm());
  }
  for (int k = 0; k < 2; ++k) {
    const double ratio = err[k] / err[k + 1];
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.5);
  }
}

TEST_CASE("norm is conserved without scaling", "[tdse]") {
  const auto sys = hydrogen(0.0);
  const Propagator prop(sys);
  PropagationOptions o;
  o.dt = 0.002;
  o.store_every = 0.5;
  const auto tr = prop.propagate(FieldEnvelope{0.05, 1.0}, ground_state(sys), 3.0, o);
  REQUIRE(tr.times.size() == 7);
  for (double p : tr.norm)
    CHECK(std::abs(p - 1.0) < 1e-7);
  // populations add up to the full norm
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    double sum = 0.0;
    for (double x : tr.populations[k])
      sum += x;
    CHECK(std::abs(sum - tr.norm[k]) < 1e-12);
  }
  CHECK(tr.l_values == std::vector<int>{0, 1, 2});
  // the field starts mixing in p waves
  CHECK(tr.populations.back()[1] > 1e-8);
}

TEST_CASE("normalized states", "[tdse]") {
  const auto sys = hydrogen(0.5);
  const auto c = ground_state(sys);
  CHECK(std::abs(truncated_norm(sys, c, sys.grid.x_max()) - 1.0) < 1e-13);
  Eigen::Index imax = 0;
  c.cwiseAbs().maxCoeff(&imax);
  CHECK(c[imax].imag() == Catch::Approx(0.0).margin(1e-15));
  CHECK(c[imax].real() > 0.0);
  CHECK_THROWS_AS(normalize_state(sys, Eigen::VectorXcd::Zero(sys.size())), NumericalError);
  // the bound state lives well inside 20 au
  CHECK(truncated_norm(sys, c, 20.0) > 1.0 - 1e-6);
}

TEST_CASE("decay fit on synthetic data", "[tdse]") {
  std::vector<double> t, p;
  for (int k = 0; k <= 400; ++k) {
    t.push_back(0.05 * k);
    p.push_back(0.8 * std::exp(-0.015 * (t.back() - 5.0)));
  }
  const auto f = fit_decay(t, p, 5.0);
  CHECK(std::abs(f.gamma - 0.015) < 1e-12);
  CHECK(std::abs(f.amplitude - 0.8) < 1e-12);
  CHECK(f.samples == 301);
  // noisy data: the interval brackets the truth
  std::mt19937 rng(1);
  std::normal_distribution<double> g(0.0, 1e-3);
  for (auto& x : p)
    x *= std::exp(g(rng));
  const auto n = fit_decay(t, p, 5.0);
  CHECK(n.gamma_lo < 0.015);
  CHECK(n.gamma_hi > 0.015);
  CHECK(n.gamma_hi - n.gamma_lo < 1e-3);
  CHECK_THROWS_AS(fit_decay(t, p, 19.8), ConfigError);
  CHECK_THROWS_AS(fit_decay(t, std::vector<double>(3, 1.0), 0.0), ConfigError);
  const auto sweep = t_fall_sweep(t, p, 10.0, 5.0, 5);
  CHECK(sweep.size() == 11);
  for (const auto& s : sweep)
    CHECK(std::abs(s.gamma - 0.015) < 1e-3);
}

TEST_CASE("zero or negative samples are trimmed from the fit", "[tdse]") {
  std::vector<double> t, p;
  for (int k = 0; k < 40; ++k) {
    t.push_back(k);
    p.push_back(k % 7 == 3 ? 0.0 : std::exp(-0.1 * k));
  }
  const auto f = fit_decay(t, p, 0.0);
  CHECK(f.trimmed);
  CHECK(std::abs(f.gamma - 0.1) < 1e-12);
}

TEST_CASE("unstable steps raise a divergence error", "[tdse]") {
  const auto sys = hydrogen(0.0);
  const Propagator prop(sys);
  PropagationOptions o;
  o.dt = 1.0;
  o.store_every = 1.0;
  CHECK_THROWS_AS(prop.propagate(FieldEnvelope{}, ground_state(sys) + Eigen::VectorXcd::Constant(sys.size(), 1e-3),
                                 2000.0, o),
                  DivergenceError);
}

TEST_CASE("profile slice of the ground state", "[tdse]") {
  const auto sys = hydrogen(0.0);
  const auto c = ground_state(sys);
  const auto prof = profile_slice(sys, c, 0.0, {0.0, 1.0, 2.0, 40.0});
  // |u(r) Y00|^2 with u = 2 r e^-r, coarse basis so wavefunction errors ~1e-3
  for (int k = 1; k <= 2; ++k) {
    const double r = k;
    const double ref = 4 * r * r * std::exp(-2 * r) / (4 * std::numbers::pi);
    CHECK(prof[k] == Catch::Approx(ref).epsilon(2e-3));
  }
  CHECK(prof[0] < 1e-20);
  CHECK(prof[3] == 0.0);
}
