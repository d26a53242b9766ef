#include "ecs/tdse.hpp"

#include "ecs/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace ecs {

double FieldEnvelope::operator()(double t) const {
  if (t <= 0.0)
    return 0.0;
  if (t >= t_on)
    return F0;
  const double s = std::sin(std::numbers::pi * t / (2.0 * t_on));
  return F0 * s * s;
}

Propagator::Propagator(const AssembledSystem& sys) : sys_(sys) {
  SparseMatrix s = sys.S;
  s.makeCompressed();
  lu_.compute(s);
  if (lu_.info() != Eigen::Success)
    throw NumericalError("overlap factorization failed: " + lu_.lastErrorMessage());
  s_real_ = unscaled_overlap(sys, sys.grid.x_max());
}

Eigen::VectorXcd Propagator::rhs(const Eigen::VectorXcd& c, double f) const {
  Eigen::VectorXcd hc = sys_.H_static * c;
  if (f != 0.0)
    hc += f * (sys_.H_dc * c);
  Eigen::VectorXcd y = lu_.solve(hc);
  return cplx(0.0, -1.0) * y;
}

void Propagator::step(Eigen::VectorXcd& c, double t, double dt, const FieldEnvelope& field) const {
  const double fa = field(t), fm = field(t + 0.5 * dt), fb = field(t + dt);
  const Eigen::VectorXcd k1 = rhs(c, fa);
  const Eigen::VectorXcd k2 = rhs(c + 0.5 * dt * k1, fm);
  const Eigen::VectorXcd k3 = rhs(c + 0.5 * dt * k2, fm);
  const Eigen::VectorXcd k4 = rhs(c + dt * k3, fb);
  c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory Propagator::propagate(
    const FieldEnvelope& field, Eigen::VectorXcd c, double t_end, const PropagationOptions& o,
    const std::function<void(double, const Eigen::VectorXcd&)>& observer) const {
  if (!(o.dt > 0.0))
    throw ConfigError("time step dt must be positive");
  if (c.size() != sys_.size())
    throw ConfigError("initial vector size does not match the system");
  const long n_steps = std::lround(t_end / o.dt);
  const long every = std::max(1L, std::lround(o.store_every / o.dt));
  const double r_cut = o.r_cut < 0.0 ? sys_.grid.x_max() : o.r_cut;
  const SparseMatrix s_cut = unscaled_overlap(sys_, r_cut);

  Trajectory tr;
  auto record = [&](long k) {
    const double t = k * o.dt;
    const double p = c.dot(s_cut * c).real();
    if (!std::isfinite(p)) {
      std::ostringstream os;
      os << "propagation diverged at step " << k << " (t = " << t << ")";
      throw DivergenceError(os.str());
    }
    tr.times.push_back(t);
    tr.norm.push_back(p);
    if (o.store_populations)
      tr.populations.push_back(l_populations(sys_, c, tr.l_values.empty() ? &tr.l_values : nullptr));
    if (o.store_coefficients)
      tr.coefficients.push_back(c);
    if (observer)
      observer(t, c);
  };
  record(0);
  for (long k = 0; k < n_steps; ++k) {
    step(c, k * o.dt, o.dt, field);
    if ((k + 1) % every == 0 || k + 1 == n_steps)
      record(k + 1);
  }
  return tr;
}

double truncated_norm(const AssembledSystem& sys, const Eigen::VectorXcd& c, double r_cut) {
  const SparseMatrix s = unscaled_overlap(sys, r_cut);
  return c.dot(s * c).real();
}

std::vector<double> l_populations(const AssembledSystem& sys, const Eigen::VectorXcd& c,
                                  std::vector<int>* l_values) {
  const SparseMatrix s = unscaled_overlap(sys, sys.grid.x_max());
  const Eigen::VectorXcd sc = s * c;
  const int per = sys.dofs.per_channel();
  std::map<int, double> pop;
  for (int ch = 0; ch < sys.channels.size(); ++ch) {
    const int l = sys.channels[ch].l;
    pop[l] += c.segment(ch * per, per).dot(sc.segment(ch * per, per)).real();
  }
  std::vector<double> out;
  if (l_values)
    l_values->clear();
  for (const auto& [l, p] : pop) {
    out.push_back(p);
    if (l_values)
      l_values->push_back(l);
  }
  return out;
}

std::vector<double> profile_slice(const AssembledSystem& sys, const Eigen::VectorXcd& c,
                                  double theta, const std::vector<double>& radii) {
  const auto& g = sys.grid;
  const LocalBasis basis(sys.spec.order);
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    auto it = std::upper_bound(g.breakpoints.begin(), g.breakpoints.end(), r);
    int i = static_cast<int>(it - g.breakpoints.begin()) - 1;
    i = std::clamp(i, 0, g.n_elements() - 1);
    if (r < g.x_min() || r > g.x_max()) {
      out.push_back(0.0);
      continue;
    }
    const double u = (r - g.left(i)) / g.width(i);
    cplx psi = 0.0;
    for (int ch = 0; ch < sys.channels.size(); ++ch) {
      const auto& chan = sys.channels[ch];
      const cplx y = sys.family == Family::Hydrogenic || sys.family == Family::Water
                         ? spherical_harmonic(chan.l, chan.n, theta, 0.0)
                         : cplx(1.0);
      for (int m = 1; m <= sys.spec.order; ++m) {
        const int gi = sys.dofs.global(i, m, ch);
        if (gi >= 0)
          psi += c[gi] * basis.value(m, u) * y;
      }
    }
    out.push_back(std::norm(psi));
  }
  return out;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& p, double t_fall) {
  if (t.size() != p.size())
    throw ConfigError("fit_decay: time and value series differ in length");
  DecayFit f;
  f.t_fall = t_fall;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_fall - 1e-12)
      continue;
    if (!(p[i] > 0.0)) {
      f.trimmed = true;
      continue;
    }
    x.push_back(t[i] - t_fall);
    y.push_back(std::log(p[i]));
  }
  const std::size_t n = x.size();
  if (n < 10) {
    std::ostringstream os;
    os << "fit window from t_fall = " << t_fall << " holds only " << n << " usable samples";
    throw ConfigError(os.str());
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (icpt + slope * x[i]);
    ssr += e * e;
  }
  const double se = std::sqrt(ssr / (n - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(n - 2));
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.gamma = -slope;
  f.amplitude = std::exp(icpt);
  f.gamma_lo = f.gamma - q * se;
  f.gamma_hi = f.gamma + q * se;
  f.samples = static_cast<int>(n);
  return f;
}

std::vector<DecayFit> t_fall_sweep(const std::vector<double>& t, const std::vector<double>& p,
                                   double t_fall, double half_width, int n) {
  std::vector<DecayFit> out;
  for (int k = -n; k <= n; ++k) {
    const double tf = t_fall + half_width * k / std::max(1, n);
    try {
      out.push_back(fit_decay(t, p, tf));
    } catch (const ConfigError&) {
      // window too short at this end of the sweep
    }
  }
  return out;
}

Eigen::VectorXcd normalize_state(const AssembledSystem& sys, const Eigen::VectorXcd& c) {
  const double nrm = truncated_norm(sys, c, sys.grid.x_max());
  if (!(nrm > 0.0))
    throw NumericalError("cannot normalize a zero state");
  Eigen::VectorXcd out = c / std::sqrt(nrm);
  // fix the global phase: largest component real positive
  Eigen::Index imax = 0;
  out.cwiseAbs().maxCoeff(&imax);
  const cplx ph = out[imax] / std::abs(out[imax]);
  return out / ph;
}

} // namespace ecs
