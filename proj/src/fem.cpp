#include "ecs/fem.hpp"

#include "ecs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ecs {

ElementGrid ElementGrid::uniform(double x_min, double x_max, int n) {
  if (n < 1)
    throw ConfigError("grid needs at least one element");
  if (!(x_min < x_max))
    throw ConfigError("grid requires x_min < x_max");
  ElementGrid g;
  g.breakpoints.resize(n + 1);
  for (int i = 0; i <= n; ++i)
    g.breakpoints[i] = x_min + (x_max - x_min) * i / n;
  g.breakpoints.back() = x_max;
  return g;
}

ElementGrid ElementGrid::with_breakpoints(const std::vector<double>& extra) const {
  ElementGrid g = *this;
  const double tol = 1e-9 * (x_max() - x_min());
  for (double x : extra) {
    if (x <= x_min() + tol || x >= x_max() - tol)
      continue;
    if (std::abs(nearest_breakpoint(x) - x) <= tol)
      continue;
    g.breakpoints.insert(std::upper_bound(g.breakpoints.begin(), g.breakpoints.end(), x), x);
  }
  return g;
}

void ElementGrid::validate() const {
  if (breakpoints.size() < 2)
    throw ConfigError("grid needs at least two breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw ConfigError("grid breakpoints must be strictly increasing");
}

double ElementGrid::nearest_breakpoint(double x) const {
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
  if (it == breakpoints.end())
    return breakpoints.back();
  if (it == breakpoints.begin())
    return *it;
  const double hi = *it, lo = *(it - 1);
  return (x - lo <= hi - x) ? lo : hi;
}

void BasisSpec::validate() const {
  if (order < 3)
    throw ConfigError("basis order M must be >= 3");
}

std::vector<std::vector<Rational>> build_w_matrix(int M, bool zero_at_start) {
  if (M < 3)
    throw ConfigError("basis order M must be >= 3");
  // B_h = [P Q]: h evaluated at u=0 (row 0) and u=1 (row 1)
  std::vector<std::vector<Rational>> bh(2, std::vector<Rational>(M, Rational(0)));
  bh[0][0] = 1;
  for (int k = 0; k < M; ++k)
    bh[1][k] = k == 0 ? Rational(1) : Rational(1, k);
  const Rational det = bh[0][0] * bh[1][1] - bh[0][1] * bh[1][0];
  const Rational pinv[2][2] = {{bh[1][1] / det, -bh[0][1] / det},
                               {-bh[1][0] / det, bh[0][0] / det}};

  std::vector<std::vector<Rational>> w(M, std::vector<Rational>(M, Rational(0)));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      w[r][c] = pinv[r][c];
  for (int r = 0; r < 2; ++r)
    for (int c = 2; c < M; ++c)
      w[r][c] = -(pinv[r][0] * bh[0][c] + pinv[r][1] * bh[1][c]);
  for (int k = 2; k < M; ++k)
    w[k][k] = 1;
  if (zero_at_start) {
    w[0][0] = 0;
    w[1][0] = 0;
  }
  return w;
}

LocalBasis::LocalBasis(int order, bool zero_first)
    : order_(order), zero_first_(zero_first), coeff_(order, std::vector<double>(order, 0.0)) {
  const auto w = build_w_matrix(order, zero_first);
  for (int m = 0; m < order; ++m)
    for (int k = 0; k < order; ++k) {
      const double hk = k == 0 ? 1.0 : 1.0 / k;
      coeff_[m][k] = boost::rational_cast<double>(w[k][m]) * hk;
    }
}

double LocalBasis::value(int m, double u) const {
  const auto& c = coeff_[m - 1];
  double s = 0.0;
  for (int k = order_ - 1; k >= 0; --k)
    s = s * u + c[k];
  return s;
}

double LocalBasis::du(int m, double u) const {
  const auto& c = coeff_[m - 1];
  double s = 0.0;
  for (int k = order_ - 1; k >= 1; --k)
    s = s * u + k * c[k];
  return s;
}

namespace {

bool in_element(const ElementGrid& g, int i, double x) {
  return i >= 0 && i < g.n_elements() && x >= g.left(i) && x <= g.right(i);
}

} // namespace

double evaluate_basis(const ElementGrid& grid, const BasisSpec& spec, int i, int m, double x) {
  if (!in_element(grid, i, x))
    return 0.0;
  const bool drop = (spec.zero_at_domain_start && i == 0 && m == 1) ||
                    (spec.zero_at_domain_end && i == grid.n_elements() - 1 && m == 2);
  if (drop)
    return 0.0;
  LocalBasis b(spec.order);
  return b.value(m, (x - grid.left(i)) / grid.width(i));
}

double evaluate_basis_derivative(const ElementGrid& grid, const BasisSpec& spec, int i, int m,
                                 double x) {
  if (!in_element(grid, i, x))
    return 0.0;
  const bool drop = (spec.zero_at_domain_start && i == 0 && m == 1) ||
                    (spec.zero_at_domain_end && i == grid.n_elements() - 1 && m == 2);
  if (drop)
    return 0.0;
  LocalBasis b(spec.order);
  return b.du(m, (x - grid.left(i)) / grid.width(i)) / grid.width(i);
}

void ScalingPath::validate() const {
  if (!(xi >= 0.0 && xi <= std::numbers::pi / 2 + 1e-15)) {
    std::ostringstream os;
    os << "scaling angle xi = " << xi << " outside [0, pi/2]";
    throw ConfigError(os.str());
  }
}

cplx ScalingPath::map(double x) const {
  const cplx e = std::polar(1.0, xi);
  if (x > r0)
    return e * (x - r0) + r0;
  const double lp = left_point();
  if (two_sided && x < -lp)
    return e * (x + lp) - lp;
  return x;
}

cplx ScalingPath::jacobian(double x) const {
  if (x > r0 || (two_sided && x < -left_point()))
    return std::polar(1.0, xi);
  return 1.0;
}

Region ScalingPath::classify(double a, double b) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(r0));
  if (a >= r0 - tol)
    return Region::Right;
  if (b > r0 + tol) {
    std::ostringstream os;
    os << "element [" << a << ", " << b << "] straddles the scaling radius " << r0;
    throw ConfigError(os.str());
  }
  if (two_sided) {
    const double lp = -left_point();
    if (b <= lp + tol)
      return Region::Left;
    if (a < lp - tol) {
      std::ostringstream os;
      os << "element [" << a << ", " << b << "] straddles the scaling point " << lp;
      throw ConfigError(os.str());
    }
  }
  return Region::Inside;
}

cplx ScalingPath::jacobian_of(Region reg) const {
  return reg == Region::Inside ? cplx(1.0) : std::polar(1.0, xi);
}

ScalingPath snap_path(const ElementGrid& grid, const ScalingPath& path) {
  ScalingPath p = path;
  p.r0 = grid.nearest_breakpoint(path.r0);
  if (path.two_sided)
    p.left_r0 = -grid.nearest_breakpoint(-path.left_point());
  return p;
}

int DofMap::radial_index(int i, int m) const {
  if (drop_first && i == 0 && m == 1)
    return -1;
  if (drop_last && i == n_elements - 1 && m == 2)
    return -1;
  const int pos = m == 1 ? 0 : (m == 2 ? order - 1 : m - 2);
  return i * (order - 1) + pos - (drop_first ? 1 : 0);
}

int DofMap::global(int i, int m, int channel) const {
  const int r = radial_index(i, m);
  return r < 0 ? -1 : channel * per_channel() + r;
}

DofMap build_dof_map(const ElementGrid& grid, const BasisSpec& spec, int n_channels) {
  grid.validate();
  spec.validate();
  DofMap d;
  d.n_channels = n_channels;
  d.n_elements = grid.n_elements();
  d.order = spec.order;
  d.drop_first = spec.zero_at_domain_start;
  d.drop_last = spec.zero_at_domain_end;
  return d;
}

} // namespace ecs
