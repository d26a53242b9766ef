#pragma once
// Hamiltonian / overlap assembly over the element x channel basis.
//
// Global matrices are complex symmetric. H is kept split as
// H_static + F0 * H_dc so time propagation can rescale the field term.
#include "ecs/angular.hpp"
#include "ecs/chebfft.hpp"
#include "ecs/fem.hpp"
#include "ecs/potentials.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <string>

namespace ecs {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

enum class Family { Model1D, Hydrogenic, Water, Oscillator };
std::string to_string(Family f);

struct AssemblyOptions {
  QuadratureRule quadrature;
  SphereQuadrature sphere;
  int threads = 1;
  // validation hook: flips the sign of the upper triangle of the field term
  bool inject_dc_sign_error = false;
};

struct AssembledSystem {
  Family family = Family::Model1D;
  ElementGrid grid;
  BasisSpec spec;
  ScalingPath path;
  ChannelSet channels;
  DofMap dofs;
  double F0 = 0.0;

  SparseMatrix H_static;
  SparseMatrix H_dc; // unit-field operator (-r cos theta or -x)
  SparseMatrix S;

  SparseMatrix H() const;
  int size() const { return dofs.total(); }
};

AssembledSystem assemble_1d(const ElementGrid& grid, const BasisSpec& spec,
                            const ScalingPath& path, double F0,
                            const AssemblyOptions& opts = {});

// V = x^2/2, no scaling, no field
AssembledSystem assemble_oscillator(const ElementGrid& grid, const BasisSpec& spec,
                                    const AssemblyOptions& opts = {});

AssembledSystem assemble_central(const ElementGrid& grid, const BasisSpec& spec,
                                 const ScalingPath& path, double Z, double F0,
                                 const ChannelSet& channels, const AssemblyOptions& opts = {});

AssembledSystem assemble_water(const ElementGrid& grid, const BasisSpec& spec,
                               const ScalingPath& path, const WaterPotentialParams& params,
                               double F0, int l_max, const AssemblyOptions& opts = {});

enum class RadialKind { Overlap, Kinetic, R, InvR, InvR2, Custom };

// Single local integral over element i between orders m and mp, with the
// path Jacobian applied. Custom uses `weight(x~)` evaluated on the path.
cplx radial_matrix_element(RadialKind kind, const ElementGrid& grid, const BasisSpec& spec, int i,
                           int m, int mp, const ScalingPath& path,
                           const QuadratureRule& rule = {},
                           const std::function<cplx(cplx)>& weight = {});

// Angular integrals <Y_a| V(r, .) |Y_b> for all channel pairs at radius r,
// row-major in (a, b).
std::vector<cplx> water_channel_potential(const WaterPotentialParams& params,
                                          const ChannelSet& channels, const SphereGrid& grid,
                                          double r);

// Real overlap (no Jacobian) for radii below r_cut; block diagonal in channels.
SparseMatrix unscaled_overlap(const AssembledSystem& sys, double r_cut);

// row col re im, one nonzero per line, 0-based indices
void dump_matrix(const SparseMatrix& m, std::ostream& os);

double max_asymmetry(const SparseMatrix& m);

} // namespace ecs
