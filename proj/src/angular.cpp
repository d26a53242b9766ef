#include "ecs/angular.hpp"

#include "ecs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ecs {

ChannelSet::ChannelSet(std::vector<Channel> ch) : ch_(std::move(ch)) {
  for (const auto& c : ch_)
    if (c.l < 0 || std::abs(c.n) > c.l)
      throw ConfigError("channel requires |n| <= l");
}

ChannelSet ChannelSet::fixed_m(int m, int count) {
  if (count < 1)
    throw ConfigError("channel count must be >= 1");
  std::vector<Channel> v;
  for (int k = 0; k < count; ++k)
    v.push_back({std::abs(m) + k, m});
  return ChannelSet(std::move(v));
}

ChannelSet ChannelSet::full(int l_max) {
  if (l_max < 0)
    throw ConfigError("l_max must be >= 0");
  std::vector<Channel> v;
  for (int l = 0; l <= l_max; ++l)
    for (int n = -l; n <= l; ++n)
      v.push_back({l, n});
  return ChannelSet(std::move(v));
}

int ChannelSet::l_max() const {
  int l = 0;
  for (const auto& c : ch_)
    l = std::max(l, c.l);
  return l;
}

int ChannelSet::index_of(int l, int n) const {
  for (int i = 0; i < size(); ++i)
    if (ch_[i].l == l && ch_[i].n == n)
      return i;
  return -1;
}

namespace {

double log_fact(int n) { return std::lgamma(n + 1.0); }

} // namespace

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (j1 < 0 || j2 < 0 || j3 < 0)
    return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3)
    return 0.0;
  if (m1 + m2 + m3 != 0)
    return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2)
    return 0.0;
  if (m1 == 0 && m2 == 0 && m3 == 0 && (j1 + j2 + j3) % 2 != 0)
    return 0.0;

  const double tri = log_fact(j1 + j2 - j3) + log_fact(j1 - j2 + j3) + log_fact(-j1 + j2 + j3) -
                     log_fact(j1 + j2 + j3 + 1);
  const double pre = 0.5 * (tri + log_fact(j1 + m1) + log_fact(j1 - m1) + log_fact(j2 + m2) +
                            log_fact(j2 - m2) + log_fact(j3 + m3) + log_fact(j3 - m3));
  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double d = log_fact(k) + log_fact(j1 + j2 - j3 - k) + log_fact(j1 - m1 - k) +
                     log_fact(j2 + m2 - k) + log_fact(j3 - j2 + m1 + k) +
                     log_fact(j3 - j1 - m2 + k);
    const double term = std::exp(pre - d);
    sum += (k % 2 ? -term : term);
  }
  const int phase = j1 - j2 - m3;
  return (phase % 2 ? -sum : sum);
}

double legendre_triple_integral(int l1, int l2, int l3) {
  const double w = wigner3j(l1, l2, l3, 0, 0, 0);
  return 4.0 * std::numbers::pi * w * w;
}

double harmonic_triple_integral(int l2, int m2, int l3, int m3, AngularKind kind) {
  const int l1 = kind == AngularKind::P0 ? 0 : 1;
  return std::sqrt((2.0 * l2 + 1) * (2.0 * l3 + 1)) * wigner3j(l1, l2, l3, 0, m2, m3) *
         wigner3j(l1, l2, l3, 0, 0, 0);
}

double angular_factor(AngularKind kind, const Channel& bra, const Channel& ket) {
  // Y*_{l n} = (-1)^n Y_{l,-n}
  const double s = (bra.n % 2) ? -1.0 : 1.0;
  return s * harmonic_triple_integral(bra.l, -bra.n, ket.l, ket.n, kind);
}

double legendre_p(int l, double x) {
  if (l == 0)
    return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double assoc_legendre_normalized(int l, int m, double x) {
  const int am = std::abs(m);
  if (am > l)
    return 0.0;
  // recurrence on the normalized functions, stable for moderate l
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  for (int k = 1; k <= am; ++k)
    pmm *= -std::sqrt((2.0 * k + 1) / (2.0 * k)) * s;
  double val;
  if (l == am) {
    val = pmm;
  } else {
    double pm1 = x * std::sqrt(2.0 * am + 3) * pmm;
    if (l == am + 1) {
      val = pm1;
    } else {
      double a = pmm, b = pm1;
      for (int k = am + 2; k <= l; ++k) {
        const double c1 = std::sqrt((4.0 * k * k - 1) / (double(k * k) - am * am));
        const double c2 =
            std::sqrt(((k - 1.0) * (k - 1.0) - am * am) / (4.0 * (k - 1.0) * (k - 1.0) - 1));
        const double c = c1 * (x * b - c2 * a);
        a = b;
        b = c;
      }
      val = b;
    }
  }
  if (m < 0 && (am % 2))
    val = -val;
  return val;
}

cplx spherical_harmonic(int l, int m, double theta, double phi) {
  return assoc_legendre_normalized(l, m, std::cos(theta)) * std::polar(1.0, m * phi);
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1)
    throw ConfigError("Gauss-Legendre order must be >= 1");
  // returns P_n(z) and P_n'(z)
  auto legendre_pair = [n](double z) {
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1)
      p0 = 1.0;
    return std::pair{p1, n * (z * p1 - p0) / (z * z - 1.0)};
  };
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_pair(z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    const double dp = legendre_pair(z).second;
    g.x[i] = -z;
    g.x[n - 1 - i] = z;
    g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return g;
}

void SphereQuadrature::validate(int l_max) const {
  if (n_theta < 2 * l_max + 2 || n_phi < 4 * l_max + 2 || n_theta < 1 || n_phi < 1) {
    std::ostringstream os;
    os << "sphere quadrature " << n_theta << "x" << n_phi << " too coarse for l_max = " << l_max;
    throw ConfigError(os.str());
  }
}

SphereGrid sphere_grid(const SphereQuadrature& q) {
  q.validate();
  const auto gl = gauss_legendre(q.n_theta);
  const double dphi = 2.0 * std::numbers::pi / q.n_phi;
  SphereGrid g;
  for (int i = 0; i < q.n_theta; ++i)
    for (int k = 0; k < q.n_phi; ++k) {
      g.theta.push_back(std::acos(gl.x[i]));
      g.phi.push_back((k + 0.5) * dphi);
      g.weight.push_back(gl.w[i] * dphi);
    }
  return g;
}

cplx sphere_integrate(const std::function<cplx(double, double)>& g, const SphereQuadrature& q) {
  const auto grid = sphere_grid(q);
  cplx total = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const cplx v = g(grid.theta[j], grid.phi[j]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "non-finite sphere sample at theta = " << grid.theta[j] << ", phi = " << grid.phi[j];
      throw EvaluationError(os.str());
    }
    total += grid.weight[j] * v;
  }
  return total;
}

} // namespace ecs
