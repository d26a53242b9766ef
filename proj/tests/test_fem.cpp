#include "ecs/assembly.hpp"
#include "ecs/errors.hpp"
#include "ecs/fem.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

using namespace ecs;

namespace {

// h_1 = 1, h_k = u^{k-1}/(k-1) evaluated exactly at u = 0 and u = 1
Rational h_at(int k, int u) {
  if (k == 1)
    return 1;
  return u == 0 ? Rational(0) : Rational(1, k - 1);
}

} // namespace

TEST_CASE("W maps the monomial boundary rows onto (1, 0)", "[fem]") {
  for (int M = 3; M <= 14; ++M) {
    const auto W = build_w_matrix(M, false);
    REQUIRE(static_cast<int>(W.size()) == M);
    for (int row = 0; row < 2; ++row)
      for (int f = 0; f < M; ++f) {
        Rational s = 0;
        for (int h = 0; h < M; ++h)
          s += h_at(h + 1, row) * W[h][f];
        const Rational want = (f == row) ? 1 : 0;
        INFO("M=" << M << " row=" << row << " f=" << f);
        CHECK(s == want);
      }
  }
}

TEST_CASE("W* drops the function that is nonzero at the origin", "[fem]") {
  const auto W = build_w_matrix(6, true);
  for (int h = 0; h < 6; ++h)
    CHECK(W[h][0] == Rational(0));
  const auto Wfull = build_w_matrix(6, false);
  for (int h = 0; h < 6; ++h)
    for (int f = 1; f < 6; ++f)
      CHECK(W[h][f] == Wfull[h][f]);
}

TEST_CASE("local functions have the boundary pattern", "[fem]") {
  const LocalBasis b(8);
  CHECK(b.value(1, 0.0) == 1.0);
  CHECK(std::abs(b.value(1, 1.0)) < 1e-15);
  CHECK(std::abs(b.value(2, 0.0)) < 1e-15);
  CHECK(std::abs(b.value(2, 1.0) - 1.0) < 1e-15);
  for (int m = 3; m <= 8; ++m) {
    CHECK(std::abs(b.value(m, 0.0)) < 1e-15);
    CHECK(std::abs(b.value(m, 1.0)) < 1e-14);
  }
  for (double u : {0.1, 0.37, 0.9})
    CHECK(std::abs(b.value(1, u) + b.value(2, u) - 1.0) < 1e-14);
  // derivative against a central difference
  for (int m = 1; m <= 8; ++m)
    for (double u : {0.2, 0.55, 0.8}) {
      const double h = 1e-6;
      const double fd = (b.value(m, u + h) - b.value(m, u - h)) / (2 * h);
      CHECK(std::abs(b.du(m, u) - fd) < 1e-7);
    }
  const LocalBasis z(8, true);
  CHECK(z.suppressed(1));
  CHECK(z.value(1, 0.3) == 0.0);
}

TEST_CASE("global basis evaluation respects element support", "[fem]") {
  const auto g = ElementGrid::uniform(0.0, 4.0, 4);
  BasisSpec s;
  s.order = 5;
  CHECK(evaluate_basis(g, s, 1, 1, 0.5) == 0.0);  // outside element 1
  CHECK(evaluate_basis(g, s, 1, 1, 1.0) == Catch::Approx(1.0));
  CHECK(evaluate_basis(g, s, 1, 2, 2.0) == Catch::Approx(1.0));
  CHECK(evaluate_basis_derivative(g, s, 1, 2, 1.5) == Catch::Approx(1.0)); // slope 1/width
  s.zero_at_domain_start = true;
  CHECK(evaluate_basis(g, s, 0, 1, 0.0) == 0.0);
}

TEST_CASE("closed-form local integrals", "[fem]") {
  QuadratureRule rule;
  const auto unit = ElementGrid::uniform(0.0, 1.0, 1);
  BasisSpec s;
  s.order = 6;
  const ScalingPath none{100.0, 0.0, false};
  // integral of (1-u)^2 on [0,1]
  CHECK(std::abs(radial_matrix_element(RadialKind::Overlap, unit, s, 0, 1, 1, none, rule) -
                 1.0 / 3.0) < 1e-14);
  const double delta = 2.5;
  const auto wide = ElementGrid::uniform(3.0, 3.0 + delta, 1);
  // (1/2) int (-1/delta)(1/delta) dx over the element
  CHECK(std::abs(radial_matrix_element(RadialKind::Kinetic, wide, s, 0, 1, 2, none, rule) +
                 0.5 / delta) < 1e-13);
}

TEST_CASE("outside the scaling radius the overlap picks up the Jacobian", "[fem]") {
  const auto g = ElementGrid::uniform(0.0, 20.0, 10);
  BasisSpec s;
  s.order = 7;
  const ScalingPath off{10.0, 0.0, false}, on{10.0, 0.6, false};
  for (int m = 1; m <= 7; ++m)
    for (int mp = 1; mp <= 7; ++mp) {
      const cplx a = radial_matrix_element(RadialKind::Overlap, g, s, 7, m, mp, off);
      const cplx b = radial_matrix_element(RadialKind::Overlap, g, s, 7, m, mp, on);
      CHECK(std::abs(b - std::polar(1.0, 0.6) * a) < 1e-14);
    }
}

TEST_CASE("scaling path geometry", "[fem]") {
  const ScalingPath p{10.0, 0.5, false};
  CHECK(p.jacobian(9.99) == cplx(1.0));
  CHECK(std::abs(p.jacobian(10.01) - std::polar(1.0, 0.5)) < 1e-15);
  CHECK(std::abs(p.map(10.0) - 10.0) < 1e-15); // continuous at r0
  CHECK(std::abs(p.map(12.0) - (std::polar(1.0, 0.5) * 2.0 + 10.0)) < 1e-15);
  CHECK(p.classify(8.0, 10.0) == Region::Inside);
  CHECK(p.classify(10.0, 11.0) == Region::Right);
  CHECK_THROWS_AS(p.classify(9.5, 10.5), ConfigError);

  const ScalingPath two{9.8, 0.5, true, 5.0};
  CHECK(two.classify(-6.0, -5.0) == Region::Left);
  CHECK(std::abs(two.map(-7.0) - (std::polar(1.0, 0.5) * -2.0 - 5.0)) < 1e-15);

  ScalingPath bad{10.0, 2.0, false};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.xi = std::numbers::pi / 2;
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("scaling points snap to breakpoints", "[fem]") {
  const auto g = ElementGrid::uniform(-10.0, 100.0, 100);
  const ScalingPath p = snap_path(g, ScalingPath{9.75, 0.5, true});
  CHECK(std::abs(p.r0 - 9.8) < 1e-12);
  CHECK(std::abs(p.left_point() - 10.0) < 1e-12); // -9.75 snaps to the domain edge
}

TEST_CASE("grids reject bad breakpoints and accept inserted ones", "[fem]") {
  ElementGrid bad;
  bad.breakpoints = {0.0, 1.0, 1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  const auto g = ElementGrid::uniform(0.0, 20.0, 20).with_breakpoints({1.814, 5.0, 25.0});
  CHECK(g.n_elements() == 21);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("dof map shares boundary coefficients and counts removals", "[fem]") {
  const auto g = ElementGrid::uniform(0.0, 10.0, 5);
  BasisSpec s;
  s.order = 6;
  s.zero_at_domain_start = true;
  s.zero_at_domain_end = true;
  const DofMap d = build_dof_map(g, s, 3);
  CHECK(d.per_channel() == 5 * 5 + 1 - 2);
  CHECK(d.total() == 3 * d.per_channel());
  std::set<int> seen;
  for (int ch = 0; ch < 3; ++ch)
    for (int i = 0; i < 5; ++i) {
      if (i + 1 < 5)
        CHECK(d.global(i, 2, ch) == d.global(i + 1, 1, ch));
      for (int m = 1; m <= 6; ++m) {
        const int k = d.global(i, m, ch);
        if (k >= 0)
          seen.insert(k);
      }
    }
  CHECK(static_cast<int>(seen.size()) == d.total());
  CHECK(d.global(0, 1, 0) == -1);
  CHECK(d.global(4, 2, 2) == -1);
}
