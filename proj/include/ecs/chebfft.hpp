#pragma once
// Chebyshev (cosine series) quadrature on a finite interval.
//
// Samples are taken at x_j = ((b-a)/2) cos(rho_j) + (b+a)/2 with
// rho_j = pi j / (N-1), j = 0..N-1. An end sample that cannot be evaluated
// (non-finite or an evaluation error) is retaken a singularity offset inside
// the interval, so integrands like 1/x survive on elements touching a pole.
// Moving every end sample would cost exactness at the 1e-12 level for high
// degree polynomials.
//
// Coefficients follow the convention f = C_0/2 + sum_{n>=1} C_n T_n, with the
// last coefficient already halved so the expansion interpolates the samples.
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace ecs {

using cplx = std::complex<double>;
using ScalarFn = std::function<cplx(double)>;

struct QuadratureRule {
  int node_count = 65;
  double singularity_offset = 1e-10;
  // refine (once) when the coefficient tail holds too much mass
  bool auto_refine = true;
  double tail_threshold = 1e-12;

  void validate() const;
  // rule on 2(N-1)+1 nodes; contains the current nodes at even positions
  QuadratureRule refined() const;
};

// In-place radix-2 FFT (forward: exp(-2 pi i k j / n)). Size must be a power of two.
void fft(std::vector<cplx>& data);

std::vector<double> chebyshev_nodes(double a, double b, const QuadratureRule& rule);

// Coefficients from samples taken at chebyshev_nodes order.
std::vector<cplx> chebyshev_coefficients_from_samples(std::span<const cplx> samples);

std::vector<cplx> chebyshev_coefficients(const ScalarFn& f, double a, double b,
                                         const QuadratureRule& rule);

cplx integrate_coefficients(std::span<const cplx> coeffs, double a, double b);

// fraction of l1 mass in the last quarter of the spectrum
double tail_fraction(std::span<const cplx> coeffs);

cplx integrate_samples(std::span<const cplx> samples, double a, double b);

cplx integrate(const ScalarFn& f, double a, double b, const QuadratureRule& rule = {});

} // namespace ecs
