#pragma once
// RK4 propagation of i S dc/dt = (H_static + F(t) H_dc) c and derived observables.
#include "ecs/assembly.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <functional>
#include <vector>

namespace ecs {

struct FieldEnvelope {
  double F0 = 0.0;
  double t_on = 10.0;
  double operator()(double t) const;
};

struct PropagationOptions {
  double dt = 0.002;
  double store_every = 0.05;
  double r_cut = -1.0; // < 0: whole domain
  bool store_coefficients = false;
  bool store_populations = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> norm;                      // truncated norm P(t)
  std::vector<std::vector<double>> populations;  // per l, full domain
  std::vector<Eigen::VectorXcd> coefficients;    // only if requested
  std::vector<int> l_values;                     // l label of each population column
};

class Propagator {
public:
  explicit Propagator(const AssembledSystem& sys);

  // one classic RK4 step from t to t + dt
  void step(Eigen::VectorXcd& c, double t, double dt, const FieldEnvelope& field) const;

  Trajectory propagate(const FieldEnvelope& field, Eigen::VectorXcd c0, double t_end,
                       const PropagationOptions& opts,
                       const std::function<void(double, const Eigen::VectorXcd&)>& observer =
                           {}) const;

  const SparseMatrix& norm_overlap() const { return s_real_; }

private:
  const AssembledSystem& sys_;
  Eigen::SparseLU<SparseMatrix> lu_;
  SparseMatrix s_real_;
  Eigen::VectorXcd rhs(const Eigen::VectorXcd& c, double f) const;
};

// <psi|psi> over radii below r_cut with real basis functions and no Jacobian
double truncated_norm(const AssembledSystem& sys, const Eigen::VectorXcd& c, double r_cut);

// per distinct l (ascending): sum over channels with that l of c_l^H S_l c_l
std::vector<double> l_populations(const AssembledSystem& sys, const Eigen::VectorXcd& c,
                                  std::vector<int>* l_values = nullptr);

// |sum c f(r) Y_{l n}(theta, 0)|^2 on the given radii
std::vector<double> profile_slice(const AssembledSystem& sys, const Eigen::VectorXcd& c,
                                  double theta, const std::vector<double>& radii);

struct DecayFit {
  double t_fall = 0.0;
  double gamma = 0.0;
  double amplitude = 0.0;
  double gamma_lo = 0.0, gamma_hi = 0.0; // 95% regression interval
  int samples = 0;
  bool trimmed = false;
};

// least squares of ln P = ln A - Gamma (t - t_fall) over t >= t_fall
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& p, double t_fall);

// fits at t_fall + k*step for k in [-n, n]
std::vector<DecayFit> t_fall_sweep(const std::vector<double>& t, const std::vector<double>& p,
                                   double t_fall, double half_width = 5.0, int n = 5);

// normalize a coefficient vector so the unscaled full-domain norm is 1
Eigen::VectorXcd normalize_state(const AssembledSystem& sys, const Eigen::VectorXcd& c);

} // namespace ecs
