#pragma once
// Angular momentum algebra: 3j symbols, Legendre / spherical harmonics,
// coupled-channel angular factors and tensor-product sphere quadrature.
#include <complex>
#include <functional>
#include <vector>

namespace ecs {

using cplx = std::complex<double>;

struct Channel {
  int l = 0;
  int n = 0;
  bool operator==(const Channel&) const = default;
};

class ChannelSet {
public:
  ChannelSet() = default;
  explicit ChannelSet(std::vector<Channel> ch);

  // count channels l = |m|, |m|+1, ... sharing magnetic number m
  static ChannelSet fixed_m(int m, int count);
  // every (l, n) with l <= l_max, ordered (0,0),(1,-1),(1,0),(1,1),...
  static ChannelSet full(int l_max);

  int size() const { return static_cast<int>(ch_.size()); }
  const Channel& operator[](int i) const { return ch_[i]; }
  const std::vector<Channel>& channels() const { return ch_; }
  int l_max() const;
  int index_of(int l, int n) const; // -1 if absent

private:
  std::vector<Channel> ch_;
};

double wigner3j(int l1, int l2, int l3, int m1, int m2, int m3);

// integral of P_l1 P_l2 P_l3 over the sphere
double legendre_triple_integral(int l1, int l2, int l3);

enum class AngularKind { P0, P1 };

// sqrt((2l2+1)(2l3+1)) 3j(l1,l2,l3;0,m2,m3) 3j(l1,l2,l3;0,0,0), l1 = 0 or 1 by kind
double harmonic_triple_integral(int l2, int m2, int l3, int m3, AngularKind kind);

// <Y_bra | 1 or cos(theta) | Y_ket> for normalized complex harmonics
double angular_factor(AngularKind kind, const Channel& bra, const Channel& ket);

double legendre_p(int l, double x);
// normalized associated Legendre with Condon-Shortley phase:
// Y_lm(theta,phi) = assoc_legendre_normalized(l,m,cos theta) e^{i m phi}
double assoc_legendre_normalized(int l, int m, double x);
cplx spherical_harmonic(int l, int m, double theta, double phi);

struct GaussLegendre {
  std::vector<double> x, w;
};
GaussLegendre gauss_legendre(int n);

struct SphereQuadrature {
  int n_theta = 40;
  int n_phi = 80;
  void validate(int l_max = 0) const;
};

// flattened product grid: weights already include dphi and the cos(theta) weights
struct SphereGrid {
  std::vector<double> theta, phi, weight;
  std::size_t size() const { return weight.size(); }
};
SphereGrid sphere_grid(const SphereQuadrature& quad);

cplx sphere_integrate(const std::function<cplx(double, double)>& g, const SphereQuadrature& quad);

} // namespace ecs
