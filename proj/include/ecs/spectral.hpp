#pragma once
// Generalized eigenproblem H c = E S c, resonance selection and scans.
#include "ecs/assembly.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ecs {

struct SpectralResult {
  std::vector<cplx> eigenvalues;            // sorted by real part
  std::optional<Eigen::MatrixXcd> vectors;  // columns match eigenvalues
  std::vector<double> residuals;            // |H v - E S v| / |v| when vectors exist
  int selected = -1;
  double E_r = 0.0;
  double Gamma = 0.0;
  std::string method;
  cplx shift = 0.0;

  cplx selected_energy() const { return eigenvalues.at(selected); }
};

// dense solve of the full pencil; symmetric / Hermitian pencils go to the
// specialised drivers unless exploit_symmetry is off (then always QZ)
SpectralResult solve_generalized(const SparseMatrix& H, const SparseMatrix& S, bool want_vectors,
                                 bool exploit_symmetry = true);
SpectralResult solve_generalized(const AssembledSystem& sys, bool want_vectors);

// Krylov-Schur iteration on (H - shift S)^-1 S; returns the n_eigs eigenvalues
// closest to the shift
SpectralResult solve_shift_invert(const SparseMatrix& H, const SparseMatrix& S, cplx shift,
                                  int n_eigs, bool want_vectors, double tol = 1e-13,
                                  int max_restarts = 500);

enum class SolverMode { Auto, Dense, ShiftInvert };

struct SolverOptions {
  SolverMode mode = SolverMode::Auto;
  bool want_vectors = false;
  int dense_limit = 1200; // Auto: dense up to this many dofs
  std::optional<double> shift;
  int n_eigs = 30;
  double tol = 1e-13;
};

SpectralResult solve(const AssembledSystem& sys, const SolverOptions& opts);

struct SelectionConstraints {
  double max_abs_im = std::numeric_limits<double>::infinity();
  double re_min = -std::numeric_limits<double>::infinity();
  double re_max = std::numeric_limits<double>::infinity();
  double im_ceiling = 1e-8; // candidates need Im E <= this
};

// index of the chosen eigenvalue; also stores it (and E_r, Gamma) in result
int select_resonance(SpectralResult& result, double reference_energy,
                     const SelectionConstraints& c = {});

double gamma_to_inverse_seconds(double gamma_au);
constexpr double kInverseTimeAu = 4.134e16;
constexpr double kWidthFloor = 1e-14;

enum class ScanAxis { F0, Xi, R0, Basis };
std::string to_string(ScanAxis a);
ScanAxis scan_axis_from_string(const std::string& s);

struct ScanRow {
  double axis_value = 0.0;
  cplx E = 0.0;
  double gamma = 0.0;
  bool converged = false;
  bool below_floor = false;
  std::string note;
};

struct ScanTable {
  ScanAxis axis = ScanAxis::F0;
  std::vector<ScanRow> rows;
  void write_csv(std::ostream& os) const;
};

// solve_row(value, reference) returns an unselected spectrum for one row
using RowSolver = std::function<SpectralResult(double value, double reference)>;

ScanTable scan(ScanAxis axis, const std::vector<double>& values, double reference,
               const SelectionConstraints& constraints, const RowSolver& solve_row);

} // namespace ecs
