#include "ecs/chebfft.hpp"

#include "ecs/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ecs {

namespace {

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void check_finite(cplx v, std::size_t j, double x) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "non-finite integrand sample at node " << j << " (x = " << x << ")";
    throw EvaluationError(os.str());
  }
}

} // namespace

void QuadratureRule::validate() const {
  if (node_count < 4)
    throw ConfigError("quadrature node_count must be >= 4");
  if (!(singularity_offset >= 0.0))
    throw ConfigError("quadrature singularity_offset must be >= 0");
}

QuadratureRule QuadratureRule::refined() const {
  QuadratureRule r = *this;
  r.node_count = 2 * (node_count - 1) + 1;
  r.auto_refine = false;
  return r;
}

void fft(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  if (!is_pow2(n))
    throw ConfigError("fft size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1)
      j ^= bit;
    j ^= bit;
    if (i < j)
      std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // twiddles computed directly, avoids drift of repeated products
        const cplx w = std::polar(1.0, ang * static_cast<double>(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<double> chebyshev_nodes(double a, double b, const QuadratureRule& rule) {
  rule.validate();
  const int n = rule.node_count;
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j)
    x[j] = half * std::cos(std::numbers::pi * j / (n - 1)) + mid;
  x.front() = b;
  x.back() = a;
  return x;
}

std::vector<cplx> chebyshev_coefficients_from_samples(std::span<const cplx> f) {
  const std::size_t n = f.size();
  if (n < 4)
    throw ConfigError("need at least 4 Chebyshev samples");
  const std::size_t m = n - 1;
  std::vector<cplx> c(n);
  if (is_pow2(m)) {
    // DCT-I through the even extension of length 2m
    std::vector<cplx> y(2 * m);
    for (std::size_t j = 0; j < n; ++j)
      y[j] = f[j];
    for (std::size_t j = 1; j < m; ++j)
      y[2 * m - j] = f[j];
    fft(y);
    for (std::size_t k = 0; k < n; ++k)
      c[k] = y[k] / static_cast<double>(m);
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      cplx s = 0.5 * (f[0] + ((k % 2) ? -f[m] : f[m]));
      for (std::size_t j = 1; j < m; ++j)
        s += f[j] * std::cos(std::numbers::pi * static_cast<double>(k * j % (2 * m)) /
                             static_cast<double>(m));
      c[k] = 2.0 * s / static_cast<double>(m);
    }
  }
  c[m] *= 0.5;
  return c;
}

std::vector<cplx> chebyshev_coefficients(const ScalarFn& f, double a, double b,
                                         const QuadratureRule& rule) {
  if (!(a < b))
    throw ConfigError("integration interval must satisfy a < b");
  const auto x = chebyshev_nodes(a, b, rule);
  const std::size_t last = x.size() - 1;
  std::vector<cplx> s(x.size());
  for (std::size_t j = 0; j <= last; ++j) {
    double xj = x[j];
    bool ok = false;
    try {
      s[j] = f(xj);
      ok = std::isfinite(s[j].real()) && std::isfinite(s[j].imag());
    } catch (const EvaluationError&) {
      if (!(j == 0 || j == last) || rule.singularity_offset == 0.0)
        throw;
    }
    if (!ok && (j == 0 || j == last) && rule.singularity_offset > 0.0) {
      // endpoint singularity: sample a little inside instead
      xj = j == 0 ? b - rule.singularity_offset : a + rule.singularity_offset;
      s[j] = f(xj);
    }
    check_finite(s[j], j, xj);
  }
  return chebyshev_coefficients_from_samples(s);
}

cplx integrate_coefficients(std::span<const cplx> c, double a, double b) {
  cplx s = c[0];
  for (std::size_t k = 2; k < c.size(); k += 2)
    s += c[k] * (2.0 / (1.0 - static_cast<double>(k * k)));
  return 0.5 * (b - a) * s;
}

double tail_fraction(std::span<const cplx> c) {
  double total = 0.0, tail = 0.0;
  const std::size_t start = c.size() - c.size() / 4;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double v = std::abs(c[k]);
    total += v;
    if (k >= start)
      tail += v;
  }
  return total > 0.0 ? tail / total : 0.0;
}

cplx integrate_samples(std::span<const cplx> samples, double a, double b) {
  const auto c = chebyshev_coefficients_from_samples(samples);
  return integrate_coefficients(c, a, b);
}

cplx integrate(const ScalarFn& f, double a, double b, const QuadratureRule& rule) {
  auto c = chebyshev_coefficients(f, a, b, rule);
  if (rule.auto_refine && tail_fraction(c) > rule.tail_threshold)
    c = chebyshev_coefficients(f, a, b, rule.refined());
  return integrate_coefficients(c, a, b);
}

} // namespace ecs
