#pragma once
// Model potentials, their continuation along the scaling path, the DC field
// and barrier-crossing field estimates.
#include "ecs/fem.hpp"

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace ecs {

// -1/sqrt(1+x^2); continued as -1/|x~| beyond the scaling points
struct SoftCore1D {
  double value(double x) const;
};

struct CentralCoulomb {
  double Z = 1.0;
  double value(double r) const { return -Z / r; }
};

// three-centre screened Coulomb model with the oxygen at the origin and both
// protons in the theta = pi/2 plane at phi = +-hoh_angle/2
struct WaterPotentialParams {
  double alpha_o = 1.6025;
  double alpha_h = 0.617;
  double n_o = 7.185;
  double n_h = 0.9075;
  double r_oh = 1.8140;
  double hoh_angle = 1.8238691;
  bool include_hydrogens = true;

  void validate() const;
  // lim r V(r) as r -> infinity, with the sign flipped
  double asymptotic_charge() const;
};

double water_potential(const WaterPotentialParams& p, double r, double theta, double phi);

struct DcField {
  double F0 = 0.0;
  void validate() const;
};

cplx scaled_potential_value(const SoftCore1D& m, const ScalingPath& path, double x);
// branch taken from the element region, so samples sitting exactly on a
// scaling point use the formula of the element they belong to
cplx scaled_potential_value(const SoftCore1D& m, const ScalingPath& path, double x, Region region);
cplx scaled_potential_value(const CentralCoulomb& m, const ScalingPath& path, double r);
cplx scaled_potential_value(const WaterPotentialParams& m, const ScalingPath& path, double r,
                            double theta, double phi);

struct Barrier {
  double r_star = 0.0;
  double height = 0.0; // V(r*) - F0 r*
};

// maximum of V(r) - F0 r on (0, 10/sqrt(F0)] by golden-section search
Barrier barrier_maximum(const std::function<double(double)>& radial_potential, double F0);

// Fritsch-Carlson monotone piecewise cubic
class MonotoneCubic {
public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

private:
  std::vector<double> x_, y_, d_;
};

// F0 at which the interpolated state energy meets the barrier top.
// table: (F0, Re E) pairs, F0 strictly increasing.
double barrier_and_fcrit(const std::function<double(double)>& radial_potential,
                         const std::vector<std::pair<double, double>>& table);

} // namespace ecs
