#include "ecs/assembly.hpp"

#include "ecs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

namespace ecs {

std::string to_string(Family f) {
  switch (f) {
  case Family::Model1D:
    return "model1d";
  case Family::Hydrogenic:
    return "hydrogenic";
  case Family::Water:
    return "water";
  case Family::Oscillator:
    return "oscillator";
  }
  return "unknown";
}

SparseMatrix AssembledSystem::H() const {
  if (F0 == 0.0)
    return H_static;
  SparseMatrix h = H_static + cplx(F0) * H_dc;
  h.makeCompressed();
  return h;
}

namespace {

using Local = Eigen::MatrixXcd;
using Triplet = Eigen::Triplet<cplx>;

// Basis values on the quadrature nodes of one element. When refinement is
// enabled the samples live on the refined node set and the base rule uses
// every other node.
class ElementIntegrator {
public:
  ElementIntegrator(const LocalBasis& basis, double a, double b, const QuadratureRule& rule)
      : basis_(basis), a_(a), b_(b), rule_(rule), refine_(rule.auto_refine) {
    nodes_ = chebyshev_nodes(a, b, refine_ ? rule.refined() : rule);
    // the radial origin is the only place the weights blow up
    if (a == 0.0)
      nodes_.back() = a + rule.singularity_offset;
    if (b == 0.0)
      nodes_.front() = b - rule.singularity_offset;
    const int M = basis.order();
    const std::size_t n = nodes_.size();
    val_.assign(M, std::vector<double>(n));
    der_.assign(M, std::vector<double>(n));
    const double h = b - a;
    for (int m = 1; m <= M; ++m)
      for (std::size_t j = 0; j < n; ++j) {
        const double u = (nodes_[j] - a) / h;
        val_[m - 1][j] = basis.value(m, u);
        der_[m - 1][j] = basis.du(m, u) / h;
      }
  }

  const std::vector<double>& nodes() const { return nodes_; }

  // M x M matrix of integrals g_m g_mp w, g = f or f'
  Local products(const std::vector<cplx>& w, bool derivative) const {
    const int M = basis_.order();
    const auto& g = derivative ? der_ : val_;
    const std::size_t stride = refine_ ? 2 : 1;
    const std::size_t nb = (nodes_.size() - 1) / stride + 1;
    Local out = Local::Zero(M, M);
    std::vector<cplx> s(nb), fine;
    for (int m = 0; m < M; ++m) {
      if (basis_.suppressed(m + 1))
        continue;
      for (int mp = m; mp < M; ++mp) {
        if (basis_.suppressed(mp + 1))
          continue;
        for (std::size_t k = 0; k < nb; ++k) {
          const std::size_t j = k * stride;
          s[k] = g[m][j] * g[mp][j] * w[j];
        }
        auto c = chebyshev_coefficients_from_samples(s);
        if (refine_ && tail_fraction(c) > rule_.tail_threshold) {
          fine.resize(nodes_.size());
          for (std::size_t j = 0; j < nodes_.size(); ++j)
            fine[j] = g[m][j] * g[mp][j] * w[j];
          c = chebyshev_coefficients_from_samples(fine);
        }
        const cplx v = integrate_coefficients(c, a_, b_);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw EvaluationError("non-finite element integral");
        out(m, mp) = v;
        out(mp, m) = v;
      }
    }
    return out;
  }

  template <class F> std::vector<cplx> sample(F&& f) const {
    std::vector<cplx> w(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      w[j] = f(nodes_[j]);
      if (!std::isfinite(w[j].real()) || !std::isfinite(w[j].imag()))
        throw EvaluationError("non-finite weight sample at x = " + std::to_string(nodes_[j]));
    }
    return w;
  }

private:
  const LocalBasis& basis_;
  double a_, b_;
  QuadratureRule rule_;
  bool refine_;
  std::vector<double> nodes_;
  std::vector<std::vector<double>> val_, der_;
};

struct LocalBlocks {
  Local S, K, V, C, D;
  bool has_v = false, has_c = false, has_d = false;
  std::vector<Local> v_pair; // water potential inside r0, row-major channel pairs
};

template <class F> void parallel_for(int n, int threads, F&& fn) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads)
          fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err)
          err = std::current_exception();
      }
    });
  for (auto& th : pool)
    th.join();
  if (err)
    std::rethrow_exception(err);
}

double snap_zero(double v) { return std::abs(v) < 1e-14 ? 0.0 : v; }

struct Builder {
  AssembledSystem* sys;
  bool one_dimensional;
  AssemblyOptions opts;

  template <class LocalFn> void run(LocalFn&& local) {
    auto& s = *sys;
    s.grid.validate();
    s.spec.validate();
    s.path.validate();
    opts.quadrature.validate();
    const int ne = s.grid.n_elements();
    const int nc = s.channels.size();
    const int M = s.spec.order;
    s.dofs = build_dof_map(s.grid, s.spec, nc);

    // angular factors per channel pair
    std::vector<double> p0(nc * nc), p1(nc * nc);
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b) {
        if (one_dimensional) {
          p0[a * nc + b] = p1[a * nc + b] = 1.0;
        } else {
          p0[a * nc + b] = snap_zero(angular_factor(AngularKind::P0, s.channels[a], s.channels[b]));
          p1[a * nc + b] = snap_zero(angular_factor(AngularKind::P1, s.channels[a], s.channels[b]));
        }
      }

    std::vector<std::vector<Triplet>> th(ne), td(ne), ts(ne);
    parallel_for(ne, opts.threads, [&](int i) {
      const LocalBlocks L = local(i);
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) {
          const double f0 = p0[a * nc + b], f1 = p1[a * nc + b];
          const int lb = s.channels[b].l;
          const bool pair = !L.v_pair.empty();
          if (f0 == 0.0 && f1 == 0.0 && !pair)
            continue;
          for (int m = 1; m <= M; ++m) {
            const int ga = s.dofs.global(i, m, a);
            if (ga < 0)
              continue;
            for (int mp = 1; mp <= M; ++mp) {
              const int gb = s.dofs.global(i, mp, b);
              if (gb < 0)
                continue;
              const int r = m - 1, c = mp - 1;
              if (f0 != 0.0) {
                ts[i].emplace_back(ga, gb, f0 * L.S(r, c));
                cplx h = L.K(r, c);
                if (L.has_v)
                  h += L.V(r, c);
                if (L.has_c)
                  h += double(lb * (lb + 1)) * L.C(r, c);
                th[i].emplace_back(ga, gb, f0 * h);
              }
              if (pair)
                th[i].emplace_back(ga, gb, L.v_pair[a * nc + b](r, c));
              if (f1 != 0.0 && L.has_d) {
                cplx d = -f1 * L.D(r, c);
                if (opts.inject_dc_sign_error && ga < gb)
                  d = -d;
                td[i].emplace_back(ga, gb, d);
              }
            }
          }
        }
    });

    const int n = s.dofs.total();
    auto merge = [&](std::vector<std::vector<Triplet>>& parts, SparseMatrix& out) {
      std::vector<Triplet> all;
      for (auto& p : parts)
        all.insert(all.end(), p.begin(), p.end());
      out.resize(n, n);
      out.setFromTriplets(all.begin(), all.end());
      out.makeCompressed();
    };
    merge(th, s.H_static);
    merge(td, s.H_dc);
    merge(ts, s.S);
  }
};

// Blocks common to every family: overlap and kinetic energy with the path Jacobian.
LocalBlocks common_blocks(const ElementIntegrator& q, cplx J) {
  LocalBlocks L;
  const auto one = q.sample([](double) { return cplx(1.0); });
  L.S = J * q.products(one, false);
  L.K = (0.5 / J) * q.products(one, true);
  return L;
}

} // namespace

AssembledSystem assemble_1d(const ElementGrid& grid, const BasisSpec& spec,
                            const ScalingPath& path_in, double F0, const AssemblyOptions& opts) {
  AssembledSystem sys;
  sys.family = Family::Model1D;
  sys.grid = grid;
  sys.spec = spec;
  sys.path = path_in;
  sys.channels = ChannelSet({{0, 0}});
  sys.F0 = F0;
  DcField{F0}.validate();
  const LocalBasis basis(spec.order, spec.zero_at_domain_start);
  const LocalBasis basis_plain(spec.order, false);
  const SoftCore1D model;
  Builder{&sys, true, opts}.run([&](int i) {
    const double a = grid.left(i), b = grid.right(i);
    const Region reg = sys.path.classify(a, b);
    const cplx J = sys.path.jacobian_of(reg);
    const ElementIntegrator q(i == 0 ? basis : basis_plain, a, b, opts.quadrature);
    LocalBlocks L = common_blocks(q, J);
    const auto& path = sys.path;
    L.V = J * q.products(q.sample([&](double x) { return scaled_potential_value(model, path, x, reg); }),
                         false);
    L.D = J * q.products(q.sample([&](double x) { return path.map(x); }), false);
    L.has_v = L.has_d = true;
    return L;
  });
  return sys;
}

AssembledSystem assemble_oscillator(const ElementGrid& grid, const BasisSpec& spec,
                                    const AssemblyOptions& opts) {
  AssembledSystem sys;
  sys.family = Family::Oscillator;
  sys.grid = grid;
  sys.spec = spec;
  sys.path = ScalingPath{grid.x_max(), 0.0, false};
  sys.channels = ChannelSet({{0, 0}});
  const LocalBasis basis(spec.order, spec.zero_at_domain_start);
  const LocalBasis basis_plain(spec.order, false);
  Builder{&sys, true, opts}.run([&](int i) {
    const ElementIntegrator q(i == 0 ? basis : basis_plain, grid.left(i), grid.right(i),
                              opts.quadrature);
    LocalBlocks L = common_blocks(q, 1.0);
    L.V = q.products(q.sample([](double x) { return cplx(0.5 * x * x); }), false);
    L.has_v = true;
    return L;
  });
  return sys;
}

AssembledSystem assemble_central(const ElementGrid& grid, const BasisSpec& spec,
                                 const ScalingPath& path, double Z, double F0,
                                 const ChannelSet& channels, const AssemblyOptions& opts) {
  if (!spec.zero_at_domain_start)
    throw ConfigError("radial problems require zero_at_domain_start");
  if (!(Z > 0))
    throw ConfigError("nuclear charge Z must be positive");
  DcField{F0}.validate();
  AssembledSystem sys;
  sys.family = Family::Hydrogenic;
  sys.grid = grid;
  sys.spec = spec;
  sys.path = path;
  sys.path.two_sided = false;
  sys.channels = channels;
  sys.F0 = F0;
  const LocalBasis basis(spec.order, true);
  const LocalBasis basis_plain(spec.order, false);
  const CentralCoulomb model{Z};
  Builder{&sys, false, opts}.run([&](int i) {
    const double a = grid.left(i), b = grid.right(i);
    const Region reg = sys.path.classify(a, b);
    const cplx J = sys.path.jacobian_of(reg);
    const ElementIntegrator q(i == 0 ? basis : basis_plain, a, b, opts.quadrature);
    LocalBlocks L = common_blocks(q, J);
    const auto& p = sys.path;
    L.V = J * q.products(q.sample([&](double r) { return scaled_potential_value(model, p, r); }),
                         false);
    L.C = J * q.products(q.sample([&](double r) {
      const cplx rt = p.map(r);
      return 0.5 / (rt * rt);
    }),
                         false);
    L.D = J * q.products(q.sample([&](double r) { return p.map(r); }), false);
    L.has_v = L.has_c = L.has_d = true;
    return L;
  });
  return sys;
}

std::vector<cplx> water_channel_potential(const WaterPotentialParams& params,
                                          const ChannelSet& channels, const SphereGrid& g,
                                          double r) {
  const int nc = channels.size();
  const std::size_t nq = g.size();
  std::vector<double> v(nq);
  for (std::size_t q = 0; q < nq; ++q)
    v[q] = water_potential(params, r, g.theta[q], g.phi[q]) * g.weight[q];
  std::vector<cplx> y(nc * nq);
  for (int a = 0; a < nc; ++a)
    for (std::size_t q = 0; q < nq; ++q)
      y[a * nq + q] = spherical_harmonic(channels[a].l, channels[a].n, g.theta[q], g.phi[q]);
  std::vector<cplx> out(nc * nc);
  for (int a = 0; a < nc; ++a)
    for (int b = a; b < nc; ++b) {
      cplx s = 0.0;
      for (std::size_t q = 0; q < nq; ++q)
        s += std::conj(y[a * nq + q]) * v[q] * y[b * nq + q];
      out[a * nc + b] = s;
      out[b * nc + a] = std::conj(s);
    }
  return out;
}

AssembledSystem assemble_water(const ElementGrid& grid, const BasisSpec& spec,
                               const ScalingPath& path, const WaterPotentialParams& params,
                               double F0, int l_max, const AssemblyOptions& opts) {
  if (!spec.zero_at_domain_start)
    throw ConfigError("radial problems require zero_at_domain_start");
  params.validate();
  DcField{F0}.validate();
  opts.sphere.validate(l_max);
  AssembledSystem sys;
  sys.family = Family::Water;
  sys.grid = grid;
  sys.spec = spec;
  sys.path = path;
  sys.path.two_sided = false;
  sys.channels = ChannelSet::full(l_max);
  sys.F0 = F0;
  const int nc = sys.channels.size();
  const LocalBasis basis(spec.order, true);
  const LocalBasis basis_plain(spec.order, false);
  const SphereGrid sg = sphere_grid(opts.sphere);
  Builder{&sys, false, opts}.run([&](int i) {
    const double a = grid.left(i), b = grid.right(i);
    const auto& p = sys.path;
    const Region reg = p.classify(a, b);
    const cplx J = p.jacobian_of(reg);
    const ElementIntegrator q(i == 0 ? basis : basis_plain, a, b, opts.quadrature);
    LocalBlocks L = common_blocks(q, J);
    L.C = J * q.products(q.sample([&](double r) {
      const cplx rt = p.map(r);
      return 0.5 / (rt * rt);
    }),
                         false);
    L.D = J * q.products(q.sample([&](double r) { return p.map(r); }), false);
    L.has_c = L.has_d = true;
    if (reg == Region::Inside || p.xi == 0.0) {
      const auto& x = q.nodes();
      std::vector<std::vector<cplx>> g(x.size());
      for (std::size_t j = 0; j < x.size(); ++j)
        g[j] = water_channel_potential(params, sys.channels, sg, x[j]);
      L.v_pair.resize(nc * nc);
      std::vector<cplx> w(x.size());
      for (int ca = 0; ca < nc; ++ca)
        for (int cb = 0; cb < nc; ++cb) {
          for (std::size_t j = 0; j < x.size(); ++j)
            w[j] = g[j][ca * nc + cb];
          L.v_pair[ca * nc + cb] = q.products(w, false);
        }
    } else {
      L.V = J * q.products(q.sample([&](double r) { return -1.0 / p.map(r); }), false);
      L.has_v = true;
    }
    return L;
  });
  return sys;
}

cplx radial_matrix_element(RadialKind kind, const ElementGrid& grid, const BasisSpec& spec, int i,
                           int m, int mp, const ScalingPath& path, const QuadratureRule& rule,
                           const std::function<cplx(cplx)>& weight) {
  const double a = grid.left(i), b = grid.right(i);
  const cplx J = path.jacobian_of(path.classify(a, b));
  const bool drop = spec.zero_at_domain_start && i == 0;
  const LocalBasis basis(spec.order, drop);
  const ElementIntegrator q(basis, a, b, rule);
  std::function<cplx(double)> w;
  switch (kind) {
  case RadialKind::Overlap:
  case RadialKind::Kinetic:
    w = [](double) { return cplx(1.0); };
    break;
  case RadialKind::R:
    w = [&](double x) { return path.map(x); };
    break;
  case RadialKind::InvR:
    w = [&](double x) { return 1.0 / path.map(x); };
    break;
  case RadialKind::InvR2:
    w = [&](double x) {
      const cplx t = path.map(x);
      return 1.0 / (t * t);
    };
    break;
  case RadialKind::Custom:
    if (!weight)
      throw ConfigError("custom radial element needs a weight function");
    w = [&](double x) { return weight(path.map(x)); };
    break;
  }
  const bool deriv = kind == RadialKind::Kinetic;
  const Local P = q.products(q.sample(w), deriv);
  const cplx v = P(m - 1, mp - 1);
  return deriv ? 0.5 * v / J : J * v;
}

SparseMatrix unscaled_overlap(const AssembledSystem& sys, double r_cut) {
  const auto& g = sys.grid;
  const int M = sys.spec.order;
  const int nc = sys.channels.size();
  const LocalBasis first(M, sys.spec.zero_at_domain_start);
  const LocalBasis plain(M, false);
  QuadratureRule rule;
  rule.auto_refine = false;
  std::vector<Triplet> t;
  for (int i = 0; i < g.n_elements(); ++i) {
    const double a = g.left(i);
    if (a >= r_cut)
      break;
    const double b = std::min(g.right(i), r_cut);
    const LocalBasis& basis = i == 0 ? first : plain;
    const auto x = chebyshev_nodes(a, b, rule);
    Local loc = Local::Zero(M, M);
    std::vector<cplx> s(x.size());
    for (int m = 1; m <= M; ++m)
      for (int mp = m; mp <= M; ++mp) {
        for (std::size_t j = 0; j < x.size(); ++j) {
          const double u = (x[j] - a) / g.width(i);
          s[j] = basis.value(m, u) * basis.value(mp, u);
        }
        loc(m - 1, mp - 1) = loc(mp - 1, m - 1) = integrate_samples(s, a, b);
      }
    for (int ch = 0; ch < nc; ++ch)
      for (int m = 1; m <= M; ++m) {
        const int ga = sys.dofs.global(i, m, ch);
        if (ga < 0)
          continue;
        for (int mp = 1; mp <= M; ++mp) {
          const int gb = sys.dofs.global(i, mp, ch);
          if (gb >= 0)
            t.emplace_back(ga, gb, loc(m - 1, mp - 1));
        }
      }
  }
  SparseMatrix out(sys.size(), sys.size());
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

void dump_matrix(const SparseMatrix& m, std::ostream& os) {
  char buf[128];
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.15e %.15e\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value().real(), it.value().imag());
      os << buf;
    }
}

double max_asymmetry(const SparseMatrix& m) {
  const SparseMatrix t = m.transpose();
  const SparseMatrix d = m - t;
  double mx = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it)
      mx = std::max(mx, std::abs(it.value()));
  return mx;
}

} // namespace ecs
