#include "ecs/angular.hpp"
#include "ecs/errors.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace ecs;

namespace {

double fact(int n) { return std::tgamma(n + 1.0); }

// closed form for (l1 l2 l3; 0 0 0)
double three_j_zero(int l1, int l2, int l3) {
  const int J = l1 + l2 + l3;
  if (J % 2 || l3 < std::abs(l1 - l2) || l3 > l1 + l2)
    return 0.0;
  const int g = J / 2;
  const double sign = (g % 2) ? -1.0 : 1.0;
  return sign * std::sqrt(fact(J - 2 * l1) * fact(J - 2 * l2) * fact(J - 2 * l3) / fact(J + 1)) *
         fact(g) / (fact(g - l1) * fact(g - l2) * fact(g - l3));
}

} // namespace

TEST_CASE("3j symbols match tabulated values", "[angular]") {
  CHECK(wigner3j(1, 1, 0, 0, 0, 0) == Catch::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(wigner3j(1, 1, 2, 0, 0, 0) == Catch::Approx(std::sqrt(2.0 / 15.0)).epsilon(1e-14));
  CHECK(wigner3j(2, 2, 2, 0, 0, 0) == Catch::Approx(-std::sqrt(2.0 / 35.0)).epsilon(1e-14));
  CHECK(wigner3j(1, 1, 1, 1, -1, 0) == Catch::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
}

TEST_CASE("3j with zero projections agree with the closed form for l <= 6", "[angular]") {
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b)
      for (int c = 0; c <= 6; ++c)
        CHECK(std::abs(wigner3j(a, b, c, 0, 0, 0) - three_j_zero(a, b, c)) < 1e-12);
}

TEST_CASE("3j selection rules", "[angular]") {
  CHECK(wigner3j(2, 1, 1, 1, 0, 0) == 0.0);  // m sum
  CHECK(wigner3j(4, 1, 1, 0, 0, 0) == 0.0);  // triangle
  CHECK(wigner3j(1, 1, 1, 0, 0, 0) == 0.0);  // odd l sum with zero m
  CHECK(wigner3j(1, 1, 2, 2, -2, 0) == 0.0); // |m| > l
}

TEST_CASE("3j orthogonality for l <= 6", "[angular]") {
  for (int l1 = 0; l1 <= 6; ++l1)
    for (int l2 = 0; l2 <= 6; ++l2)
      for (int l3 = std::abs(l1 - l2); l3 <= std::min(6, l1 + l2); ++l3)
        for (int l3p = std::abs(l1 - l2); l3p <= std::min(6, l1 + l2); ++l3p)
          for (int m3 = -std::min(l3, l3p); m3 <= std::min(l3, l3p); ++m3) {
            double s = 0.0;
            for (int m1 = -l1; m1 <= l1; ++m1) {
              const int m2 = -m1 - m3;
              if (std::abs(m2) > l2)
                continue;
              s += wigner3j(l1, l2, l3, m1, m2, m3) * wigner3j(l1, l2, l3p, m1, m2, m3);
            }
            const double want = l3 == l3p ? 1.0 / (2 * l3 + 1) : 0.0;
            CHECK(std::abs(s - want) < 1e-12);
          }
}

TEST_CASE("3j symmetry under column swap and sign flip", "[angular]") {
  for (int l1 = 0; l1 <= 4; ++l1)
    for (int l2 = 0; l2 <= 4; ++l2)
      for (int l3 = std::abs(l1 - l2); l3 <= l1 + l2; ++l3)
        for (int m1 = -l1; m1 <= l1; ++m1)
          for (int m2 = -l2; m2 <= l2; ++m2) {
            const int m3 = -m1 - m2;
            if (std::abs(m3) > l3)
              continue;
            const double sgn = ((l1 + l2 + l3) % 2) ? -1.0 : 1.0;
            const double w = wigner3j(l1, l2, l3, m1, m2, m3);
            CHECK(std::abs(wigner3j(l2, l1, l3, m2, m1, m3) - sgn * w) < 1e-13);
            CHECK(std::abs(wigner3j(l1, l2, l3, -m1, -m2, -m3) - sgn * w) < 1e-13);
          }
}

TEST_CASE("Legendre triple integrals match Gauss-Legendre", "[angular]") {
  const auto gl = gauss_legendre(30);
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b)
      for (int c = 0; c <= 5; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < gl.x.size(); ++k)
          s += gl.w[k] * legendre_p(a, gl.x[k]) * legendre_p(b, gl.x[k]) * legendre_p(c, gl.x[k]);
        // over the sphere: 2 pi times the cos(theta) integral
        CHECK(std::abs(legendre_triple_integral(a, b, c) - 2 * std::numbers::pi * s) < 1e-12);
      }
}

TEST_CASE("Gauss-Legendre is exact to degree 2n-1", "[angular]") {
  for (int n : {1, 2, 5, 12, 40}) {
    const auto gl = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += gl.w[k] * std::pow(gl.x[k], d);
      const double want = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(std::abs(s - want) < 1e-13);
    }
  }
}

TEST_CASE("harmonics follow the Condon-Shortley convention", "[angular]") {
  const double th = 0.7, ph = 1.3;
  CHECK(std::abs(spherical_harmonic(0, 0, th, ph) - 1.0 / std::sqrt(4 * std::numbers::pi)) <
        1e-15);
  CHECK(std::abs(spherical_harmonic(1, 0, th, ph) -
                 std::sqrt(3 / (4 * std::numbers::pi)) * std::cos(th)) < 1e-15);
  const cplx y11 = -std::sqrt(3 / (8 * std::numbers::pi)) * std::sin(th) * std::polar(1.0, ph);
  CHECK(std::abs(spherical_harmonic(1, 1, th, ph) - y11) < 1e-15);
  // Y_{l,-m} = (-1)^m conj(Y_lm)
  for (int l = 0; l <= 5; ++l)
    for (int m = 0; m <= l; ++m) {
      const double s = m % 2 ? -1.0 : 1.0;
      CHECK(std::abs(spherical_harmonic(l, -m, th, ph) -
                     s * std::conj(spherical_harmonic(l, m, th, ph))) < 1e-14);
    }
}

TEST_CASE("sphere quadrature reproduces harmonic orthonormality", "[angular]") {
  const SphereQuadrature q; // 40 x 80, good for l_max = 3 products up to l = 6
  for (int l = 0; l <= 6; ++l)
    for (int m = -l; m <= l; ++m)
      for (int lp = 0; lp <= 6; ++lp)
        for (int mp = -lp; mp <= lp; ++mp) {
          const cplx v = sphere_integrate(
              [&](double t, double p) {
                return std::conj(spherical_harmonic(l, m, t, p)) * spherical_harmonic(lp, mp, t, p);
              },
              q);
          const double want = (l == lp && m == mp) ? 1.0 : 0.0;
          CHECK(std::abs(v - want) < 1e-12);
        }
}

TEST_CASE("angular factors agree with direct quadrature", "[angular]") {
  const SphereQuadrature q;
  const auto chans = ChannelSet::full(3);
  for (const auto& a : chans.channels())
    for (const auto& b : chans.channels()) {
      const cplx one = sphere_integrate(
          [&](double t, double p) {
            return std::conj(spherical_harmonic(a.l, a.n, t, p)) * spherical_harmonic(b.l, b.n, t, p);
          },
          q);
      const cplx cz = sphere_integrate(
          [&](double t, double p) {
            return std::conj(spherical_harmonic(a.l, a.n, t, p)) * std::cos(t) *
                   spherical_harmonic(b.l, b.n, t, p);
          },
          q);
      CHECK(std::abs(angular_factor(AngularKind::P0, a, b) - one) < 1e-12);
      CHECK(std::abs(angular_factor(AngularKind::P1, a, b) - cz) < 1e-12);
    }
  // <l n| cos | l+1 n> = sqrt(((l+1)^2 - n^2) / ((2l+1)(2l+3)))
  for (int l = 0; l < 5; ++l)
    for (int n = -l; n <= l; ++n) {
      const double want = std::sqrt(((l + 1.0) * (l + 1) - n * n) / ((2 * l + 1.0) * (2 * l + 3)));
      CHECK(std::abs(angular_factor(AngularKind::P1, {l, n}, {l + 1, n}) - want) < 1e-13);
    }
}

TEST_CASE("channel sets", "[angular]") {
  const auto f = ChannelSet::fixed_m(1, 5);
  REQUIRE(f.size() == 5);
  CHECK(f[0] == Channel{1, 1});
  CHECK(f[4] == Channel{5, 1});
  const auto full = ChannelSet::full(2);
  REQUIRE(full.size() == 9);
  CHECK(full[1] == Channel{1, -1});
  CHECK(full.index_of(2, 2) == 8);
  CHECK(full.index_of(3, 0) == -1);
  CHECK(full.l_max() == 2);
}

TEST_CASE("sphere quadrature validation", "[angular]") {
  SphereQuadrature q{6, 80};
  CHECK_THROWS_AS(q.validate(3), ConfigError);
  q = {40, 10};
  CHECK_THROWS_AS(q.validate(3), ConfigError);
  CHECK_NOTHROW(SphereQuadrature{}.validate(3));
}
