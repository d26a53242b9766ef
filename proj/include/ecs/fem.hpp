#pragma once
// Finite-element radial / 1D basis, dof bookkeeping and the complex scaling path.
//
// Element indices are 0-based. Local orders m are 1-based as in the usual
// f_{i,m} notation: f_{i,1} is 1 at the left end of element i, f_{i,2} is 1 at
// the right end, and f_{i,m>2} vanish at both ends.
#include <boost/rational.hpp>

#include <complex>
#include <cstdint>
#include <vector>

namespace ecs {

using cplx = std::complex<double>;
using Rational = boost::rational<std::int64_t>;

struct ElementGrid {
  std::vector<double> breakpoints;

  static ElementGrid uniform(double x_min, double x_max, int n_elements);
  // same grid with extra breakpoints inserted (duplicates / out-of-range ignored)
  ElementGrid with_breakpoints(const std::vector<double>& extra) const;

  void validate() const;
  int n_elements() const { return static_cast<int>(breakpoints.size()) - 1; }
  double x_min() const { return breakpoints.front(); }
  double x_max() const { return breakpoints.back(); }
  double left(int i) const { return breakpoints[i]; }
  double right(int i) const { return breakpoints[i + 1]; }
  double width(int i) const { return breakpoints[i + 1] - breakpoints[i]; }
  double nearest_breakpoint(double x) const;
};

struct BasisSpec {
  int order = 8; // M
  bool zero_at_domain_start = false;
  bool zero_at_domain_end = false;
  void validate() const;
};

// W[h][f]: coefficients of f-basis functions in the monomial h-basis
// h_1 = 1, h_k = u^{k-1}/(k-1).
std::vector<std::vector<Rational>> build_w_matrix(int order, bool zero_at_start);

// Polynomial form of the M local functions on u in [0,1].
class LocalBasis {
public:
  explicit LocalBasis(int order, bool zero_first = false);
  int order() const { return order_; }
  double value(int m, double u) const;
  double du(int m, double u) const;
  // true if f_m was suppressed (identically zero)
  bool suppressed(int m) const { return zero_first_ && m == 1; }

private:
  int order_;
  bool zero_first_;
  std::vector<std::vector<double>> coeff_; // coeff_[m-1][k] multiplies u^k
};

double evaluate_basis(const ElementGrid& grid, const BasisSpec& spec, int i, int m, double x);
double evaluate_basis_derivative(const ElementGrid& grid, const BasisSpec& spec, int i, int m,
                                 double x);

enum class Region { Inside, Right, Left };

// Exterior scaling path. Outside r0 (and below -left_r0 when two-sided)
// the coordinate is rotated by xi into the complex plane.
struct ScalingPath {
  double r0 = 0.0;
  double xi = 0.0;
  bool two_sided = false;
  double left_r0 = -1.0; // magnitude of the left scaling point; < 0 means r0

  void validate() const;
  double left_point() const { return left_r0 < 0.0 ? r0 : left_r0; }
  cplx map(double x) const;
  cplx jacobian(double x) const;
  // region of an element [a,b]; throws if it straddles a scaling point
  Region classify(double a, double b) const;
  cplx jacobian_of(Region reg) const;
};

// Move r0 (and the left point) to the nearest grid breakpoints.
ScalingPath snap_path(const ElementGrid& grid, const ScalingPath& path);

struct DofMap {
  int n_channels = 1;
  int n_elements = 0;
  int order = 0;
  bool drop_first = false;
  bool drop_last = false;

  int per_channel() const {
    return n_elements * (order - 1) + 1 - (drop_first ? 1 : 0) - (drop_last ? 1 : 0);
  }
  int total() const { return n_channels * per_channel(); }
  // radial index inside a channel block, -1 if the function was removed
  int radial_index(int i, int m) const;
  int global(int i, int m, int channel) const;
};

DofMap build_dof_map(const ElementGrid& grid, const BasisSpec& spec, int n_channels);

} // namespace ecs
