#include "ecs/potentials.hpp"

#include "ecs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ecs {

double SoftCore1D::value(double x) const { return -1.0 / std::sqrt(1.0 + x * x); }

void WaterPotentialParams::validate() const {
  if (!(alpha_o > 0 && alpha_h > 0))
    throw ConfigError("water screening exponents alpha_o, alpha_h must be positive");
  if (!(r_oh > 0))
    throw ConfigError("water r_oh must be positive");
  if (!(n_o >= 0 && n_o <= 8 && n_h >= 0 && n_h <= 1))
    throw ConfigError("water screening populations out of range (0<=n_o<=8, 0<=n_h<=1)");
}

double WaterPotentialParams::asymptotic_charge() const {
  return (8.0 - n_o) + (include_hydrogens ? 2.0 * (1.0 - n_h) : 0.0);
}

namespace {

double screened(double charge, double pop, double alpha, double d) {
  return (charge - pop) + pop * (1.0 + alpha * d) * std::exp(-2.0 * alpha * d);
}

} // namespace

double water_potential(const WaterPotentialParams& p, double r, double theta, double phi) {
  constexpr double tiny = 1e-8;
  if (!(r > 0.0))
    throw SingularPointError("water potential evaluated at the oxygen nucleus");
  double v = -screened(8.0, p.n_o, p.alpha_o, r) / r;
  if (!p.include_hydrogens)
    return v;
  const double st = std::sin(theta);
  const double x = r * st * std::cos(phi), y = r * st * std::sin(phi), z = r * std::cos(theta);
  const double half = 0.5 * p.hoh_angle;
  const double hx = p.r_oh * std::cos(half), hy = p.r_oh * std::sin(half);
  for (double sy : {1.0, -1.0}) {
    const double dx = x - hx, dy = y - sy * hy;
    const double d = std::sqrt(dx * dx + dy * dy + z * z);
    if (d < tiny) {
      std::ostringstream os;
      os << "water potential evaluated within " << tiny << " au of a proton (r = " << r
         << ", theta = " << theta << ", phi = " << phi << ")";
      throw SingularPointError(os.str());
    }
    v -= screened(1.0, p.n_h, p.alpha_h, d) / d;
  }
  return v;
}

void DcField::validate() const {
  if (!(F0 >= 0.0))
    throw ConfigError("field strength F0 must be >= 0");
}

namespace {

enum class Side { Inside, Right, Left };

Side side_of(const ScalingPath& path, double x) {
  if (path.xi == 0.0)
    return Side::Inside;
  if (x > path.r0)
    return Side::Right;
  if (path.two_sided && x < -path.left_point())
    return Side::Left;
  return Side::Inside;
}

} // namespace

cplx scaled_potential_value(const SoftCore1D& m, const ScalingPath& path, double x) {
  const Side s = side_of(path, x);
  return scaled_potential_value(m, path, x,
                                s == Side::Right  ? Region::Right
                                : s == Side::Left ? Region::Left
                                                  : Region::Inside);
}

cplx scaled_potential_value(const SoftCore1D& m, const ScalingPath& path, double x, Region region) {
  if (path.xi == 0.0)
    return m.value(x);
  switch (region) {
  case Region::Right:
    return -1.0 / path.map(x);
  case Region::Left:
    return 1.0 / path.map(x);
  default:
    return m.value(x);
  }
}

cplx scaled_potential_value(const CentralCoulomb& m, const ScalingPath& path, double r) {
  if (side_of(path, r) == Side::Inside)
    return m.value(r);
  return -m.Z / path.map(r);
}

cplx scaled_potential_value(const WaterPotentialParams& m, const ScalingPath& path, double r,
                            double theta, double phi) {
  if (side_of(path, r) == Side::Inside)
    return water_potential(m, r, theta, phi);
  return -1.0 / path.map(r);
}

Barrier barrier_maximum(const std::function<double(double)>& v, double F0) {
  if (!(F0 > 0.0))
    throw ConfigError("barrier search needs F0 > 0");
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double r) { return v(r) - F0 * r; };
  double a = 1e-10, b = 10.0 / std::sqrt(F0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 300 && (b - a) > 1e-13 * b; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double r = 0.5 * (a + b);
  return {r, f(r)};
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw ConfigError("monotone cubic needs >= 2 matching points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw ConfigError("monotone cubic abscissae must increase strictly");
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  d_.assign(n, 0.0);
  d_[0] = delta[0];
  d_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    d_[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      d_[i] = d_[i + 1] = 0.0;
      continue;
    }
    const double a = d_[i] / delta[i], b = d_[i + 1] / delta[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      d_[i] = t * a * delta[i];
      d_[i + 1] = t * b * delta[i];
    }
  }
}

double MonotoneCubic::operator()(double t) const {
  const std::size_t n = x_.size();
  std::size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double barrier_and_fcrit(const std::function<double(double)>& v,
                         const std::vector<std::pair<double, double>>& table) {
  if (table.size() < 3)
    throw ConfigError("F_crit needs at least 3 (F0, Re E) points");
  std::vector<double> f, e;
  for (const auto& [a, b] : table) {
    f.push_back(a);
    e.push_back(b);
  }
  const MonotoneCubic energy(f, e);
  auto gap = [&](double F) { return energy(F) - barrier_maximum(v, F).height; };

  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    g[i] = gap(f[i]);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    if (g[i] == 0.0)
      return f[i];
    if ((g[i] < 0.0) != (g[i + 1] < 0.0)) {
      double lo = f[i], hi = f[i + 1], glo = g[i];
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = gap(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  if (g.back() == 0.0)
    return f.back();
  std::ostringstream os;
  os << "no barrier crossing bracketed; sign pattern of Re E - H:";
  for (double x : g)
    os << (x < 0 ? " -" : " +");
  throw NotFoundError(os.str());
}

} // namespace ecs
