#include "ecs/spectral.hpp"

#include "ecs/errors.hpp"

#define LAPACK_COMPLEX_CPP
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

namespace ecs {

namespace {

// Hermitian to rounding: |a_ij - conj(a_ji)| <= 1e-14 max|a|
bool is_hermitian(const SparseMatrix& a) {
  double amax = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      amax = std::max(amax, std::abs(it.value()));
  const SparseMatrix ah = a.adjoint();
  const SparseMatrix d = a - ah;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it)
      if (std::abs(it.value()) > 1e-14 * amax)
        return false;
  return true;
}

void sort_by_real(SpectralResult& r) {
  std::vector<int> idx(r.eigenvalues.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const cplx ea = r.eigenvalues[a], eb = r.eigenvalues[b];
    if (ea.real() != eb.real())
      return ea.real() < eb.real();
    return ea.imag() < eb.imag();
  });
  std::vector<cplx> e(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    e[i] = r.eigenvalues[idx[i]];
  r.eigenvalues = std::move(e);
  if (r.vectors) {
    Eigen::MatrixXcd v(r.vectors->rows(), r.vectors->cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
      v.col(i) = r.vectors->col(idx[i]);
    r.vectors = std::move(v);
  }
}

void fill_residuals(SpectralResult& r, const SparseMatrix& H, const SparseMatrix& S) {
  if (!r.vectors)
    return;
  r.residuals.resize(r.eigenvalues.size());
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const Eigen::VectorXcd v = r.vectors->col(i);
    const Eigen::VectorXcd res = H * v - r.eigenvalues[i] * (S * v);
    r.residuals[i] = res.norm() / v.norm();
  }
}

} // namespace

SpectralResult solve_generalized(const SparseMatrix& H, const SparseMatrix& S, bool want_vectors,
                                 bool exploit_symmetry) {
  const lapack_int n = static_cast<lapack_int>(H.rows());
  if (n == 0 || H.cols() != n || S.rows() != n || S.cols() != n)
    throw ConfigError("solve_generalized needs square matrices of equal size");
  SpectralResult r;
  // Real symmetric pencils take the Hermitian driver as well. The real
  // triangular kernels (dtrsm/dtrmm) of the OpenBLAS build installed here
  // return wrong results on AVX512 dispatch, the complex ones are sound.
  if (exploit_symmetry && is_hermitian(H) && is_hermitian(S)) {
    r.method = "dense-hermitian";
    Eigen::MatrixXcd a = 0.5 * (Eigen::MatrixXcd(H) + Eigen::MatrixXcd(H).adjoint());
    Eigen::MatrixXcd b = 0.5 * (Eigen::MatrixXcd(S) + Eigen::MatrixXcd(S).adjoint());
    std::vector<double> w(n);
    const lapack_int info = LAPACKE_zhegvd(LAPACK_COL_MAJOR, 1, want_vectors ? 'V' : 'N', 'U', n,
                                           a.data(), n, b.data(), n, w.data());
    if (info != 0) {
      std::ostringstream os;
      os << "zhegvd failed (info = " << info
         << (info > n ? "; overlap matrix not positive definite" : "") << ")";
      throw NumericalError(os.str());
    }
    r.eigenvalues.assign(w.begin(), w.end());
    if (want_vectors)
      r.vectors = a;
  } else {
    r.method = "dense-qz";
    Eigen::MatrixXcd a = H, b = S;
    std::vector<cplx> alpha(n), beta(n);
    Eigen::MatrixXcd vr;
    if (want_vectors)
      vr.resize(n, n);
    const lapack_int info =
        LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n, b.data(),
                      n, alpha.data(), beta.data(), nullptr, 1,
                      want_vectors ? vr.data() : nullptr, want_vectors ? n : 1);
    if (info != 0) {
      std::ostringstream os;
      os << "zggev failed (info = " << info << ")";
      throw NumericalError(os.str());
    }
    std::vector<int> keep;
    for (lapack_int i = 0; i < n; ++i)
      if (std::abs(beta[i]) > 1e-300 * std::abs(alpha[i]) && std::abs(beta[i]) > 0.0)
        keep.push_back(i);
    for (int i : keep)
      r.eigenvalues.push_back(alpha[i] / beta[i]);
    if (want_vectors) {
      Eigen::MatrixXcd v(n, keep.size());
      for (std::size_t j = 0; j < keep.size(); ++j)
        v.col(j) = vr.col(keep[j]);
      r.vectors = std::move(v);
    }
  }
  sort_by_real(r);
  fill_residuals(r, H, S);
  return r;
}

SpectralResult solve_generalized(const AssembledSystem& sys, bool want_vectors) {
  return solve_generalized(sys.H(), sys.S, want_vectors);
}

SpectralResult solve_shift_invert(const SparseMatrix& H, const SparseMatrix& S, cplx shift,
                                  int nev, bool want_vectors, double tol, int max_restarts) {
  const int n = static_cast<int>(H.rows());
  if (nev < 1)
    throw ConfigError("shift-invert needs n_eigs >= 1");
  nev = std::min(nev, n - 2);
  if (nev < 1 || n < 8) // tiny problems: dense is exact and cheap
    return solve_generalized(H, S, want_vectors);

  SparseMatrix A = H - shift * S;
  A.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw NumericalError("sparse LU of H - shift*S failed: " + lu.lastErrorMessage());

  const int m = std::min(n - 1, std::max(2 * nev + 20, nev + 40));
  Eigen::MatrixXcd V(n, m + 1);
  Eigen::MatrixXcd Hm = Eigen::MatrixXcd::Zero(m + 1, m);

  // deterministic start vector
  Eigen::VectorXcd v0(n);
  for (int i = 0; i < n; ++i)
    v0[i] = cplx(1.0 + 0.5 * std::sin(0.731 * i), 0.25 * std::cos(1.37 * i));
  V.col(0) = v0 / v0.norm();

  auto apply = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    Eigen::VectorXcd y = S * x;
    return lu.solve(y);
  };

  int k = 0;
  Eigen::MatrixXcd T, Q;
  std::vector<int> order;
  Eigen::VectorXcd theta;
  int converged = 0;
  int active = m;
  for (int restart = 0; restart <= max_restarts; ++restart) {
    for (int j = k; j < m; ++j) {
      Eigen::VectorXcd w = apply(V.col(j));
      // classical Gram-Schmidt with one reorthogonalization pass
      Eigen::VectorXcd h = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h;
      const Eigen::VectorXcd h2 = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h2;
      h += h2;
      Hm.col(j).head(j + 1) = h;
      const double beta = w.norm();
      Hm(j + 1, j) = beta;
      if (beta < 1e-300) {
        active = j + 1;
        break;
      }
      V.col(j + 1) = w / beta;
    }
    const Eigen::MatrixXcd small = Hm.topLeftCorner(active, active);
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(small);
    T = schur.matrixT();
    Q = schur.matrixU();
    theta = T.diagonal();
    order.resize(active);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });

    // residual estimates from the Ritz vectors of the projected matrix
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(small);
    const Eigen::VectorXcd ev = es.eigenvalues();
    const Eigen::MatrixXcd ey = es.eigenvectors();
    std::vector<int> eorder(active);
    std::iota(eorder.begin(), eorder.end(), 0);
    std::stable_sort(eorder.begin(), eorder.end(),
                     [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });
    converged = 0;
    const Eigen::RowVectorXcd brow = Hm.row(active).head(active);
    for (int i = 0; i < std::min(nev, active); ++i) {
      const int id = eorder[i];
      const double res = std::abs((brow * ey.col(id))(0)) / ey.col(id).norm();
      if (res <= tol * std::abs(ev[id]))
        ++converged;
      else
        break;
    }
    if (converged >= std::min(nev, active) || active < m || restart == max_restarts)
      break;

    // keep the leading Schur vectors of the wanted part
    const int keep = std::min(active - 1, nev + (m - nev) / 2);
    std::vector<lapack_int> select(active, 0);
    for (int i = 0; i < keep; ++i)
      select[order[i]] = 1;
    Eigen::MatrixXcd Tw = T, Qw = Q;
    std::vector<cplx> w(active);
    lapack_int msel = 0;
    const lapack_int info =
        LAPACKE_ztrsen(LAPACK_COL_MAJOR, 'N', 'V', select.data(), active, Tw.data(), active,
                       Qw.data(), active, w.data(), &msel, nullptr, nullptr);
    if (info != 0)
      throw NumericalError("Schur reordering failed in shift-invert iteration");
    const Eigen::MatrixXcd Qk = Qw.leftCols(keep);
    const Eigen::MatrixXcd Vk = V.leftCols(active) * Qk;
    const Eigen::VectorXcd vnext = V.col(active);
    const Eigen::RowVectorXcd bnew = brow * Qk;
    V.leftCols(keep) = Vk;
    V.col(keep) = vnext;
    Hm.setZero();
    Hm.topLeftCorner(keep, keep) = Tw.topLeftCorner(keep, keep);
    Hm.row(keep).head(keep) = bnew;
    k = keep;
    active = m;
  }
  if (converged < std::min(nev, active)) {
    std::ostringstream os;
    os << "shift-invert iteration converged only " << converged << " of " << nev
       << " eigenvalues";
    throw NumericalError(os.str());
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Hm.topLeftCorner(active, active));
  const Eigen::VectorXcd ev = es.eigenvalues();
  std::vector<int> eorder(active);
  std::iota(eorder.begin(), eorder.end(), 0);
  std::stable_sort(eorder.begin(), eorder.end(),
                   [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });
  SpectralResult r;
  r.method = "shift-invert";
  r.shift = shift;
  const int count = std::min(nev, active);
  Eigen::MatrixXcd vecs;
  if (want_vectors)
    vecs.resize(n, count);
  for (int i = 0; i < count; ++i) {
    const int id = eorder[i];
    r.eigenvalues.push_back(shift + 1.0 / ev[id]);
    if (want_vectors) {
      Eigen::VectorXcd x = V.leftCols(active) * es.eigenvectors().col(id);
      vecs.col(i) = x / x.norm();
    }
  }
  if (want_vectors)
    r.vectors = std::move(vecs);
  sort_by_real(r);
  fill_residuals(r, H, S);
  return r;
}

SpectralResult solve(const AssembledSystem& sys, const SolverOptions& o) {
  const bool dense = o.mode == SolverMode::Dense ||
                     (o.mode == SolverMode::Auto && (sys.size() <= o.dense_limit || !o.shift));
  if (dense)
    return solve_generalized(sys, o.want_vectors);
  if (!o.shift)
    throw ConfigError("shift-invert solver needs a shift (reference energy)");
  return solve_shift_invert(sys.H(), sys.S, *o.shift, o.n_eigs, o.want_vectors, o.tol);
}

int select_resonance(SpectralResult& r, double ref, const SelectionConstraints& c) {
  if (r.eigenvalues.empty())
    throw NotFoundError("empty spectrum");
  int best = -1;
  for (int i = 0; i < static_cast<int>(r.eigenvalues.size()); ++i) {
    const cplx e = r.eigenvalues[i];
    if (e.imag() > c.im_ceiling || std::abs(e.imag()) > c.max_abs_im || e.real() < c.re_min ||
        e.real() > c.re_max)
      continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const cplx b = r.eigenvalues[best];
    const double de = std::abs(e.real() - ref), db = std::abs(b.real() - ref);
    if (de < db - 1e-14 || (std::abs(de - db) <= 1e-14 && std::abs(e.imag()) < std::abs(b.imag())))
      best = i;
  }
  if (best < 0) {
    std::vector<int> idx(r.eigenvalues.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::abs(r.eigenvalues[a].real() - ref) < std::abs(r.eigenvalues[b].real() - ref);
    });
    std::ostringstream os;
    os << "no eigenvalue satisfies the selection constraints; nearest rejected:";
    for (std::size_t i = 0; i < std::min<std::size_t>(3, idx.size()); ++i)
      os << " (" << r.eigenvalues[idx[i]].real() << ", " << r.eigenvalues[idx[i]].imag() << ")";
    throw NotFoundError(os.str());
  }
  r.selected = best;
  r.E_r = r.eigenvalues[best].real();
  r.Gamma = -2.0 * r.eigenvalues[best].imag();
  return best;
}

double gamma_to_inverse_seconds(double g) { return g * kInverseTimeAu; }

std::string to_string(ScanAxis a) {
  switch (a) {
  case ScanAxis::F0:
    return "F0";
  case ScanAxis::Xi:
    return "xi";
  case ScanAxis::R0:
    return "r0";
  case ScanAxis::Basis:
    return "basis";
  }
  return "?";
}

ScanAxis scan_axis_from_string(const std::string& s) {
  if (s == "F0" || s == "f0")
    return ScanAxis::F0;
  if (s == "xi")
    return ScanAxis::Xi;
  if (s == "r0")
    return ScanAxis::R0;
  if (s == "basis" || s == "order")
    return ScanAxis::Basis;
  throw ConfigError("unknown scan axis '" + s + "' (expected F0, xi, r0 or basis)");
}

void ScanTable::write_csv(std::ostream& os) const {
  os << "axis_value,re_e,im_e,gamma_au,gamma_per_sec,converged\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g,%.15g,%d\n", r.axis_value,
                  r.E.real(), r.E.imag(), r.gamma, gamma_to_inverse_seconds(r.gamma),
                  r.converged ? 1 : 0);
    os << buf;
  }
}

ScanTable scan(ScanAxis axis, const std::vector<double>& values, double reference,
               const SelectionConstraints& constraints, const RowSolver& solve_row) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool up = values[1] > values[0];
    if ((values[i] > values[i - 1]) != up || values[i] == values[i - 1])
      throw ConfigError("scan values must be strictly monotone");
  }
  ScanTable t;
  t.axis = axis;
  double ref = reference;
  for (double v : values) {
    ScanRow row;
    row.axis_value = v;
    try {
      SpectralResult r = solve_row(v, ref);
      select_resonance(r, ref, constraints);
      row.E = r.selected_energy();
      row.gamma = r.Gamma;
      row.converged = true;
      row.below_floor = std::abs(r.Gamma) < kWidthFloor;
      if (row.below_floor)
        row.note = "below numerical floor";
      if (axis == ScanAxis::F0)
        ref = row.E.real();
    } catch (const Error& e) {
      row.converged = false;
      row.note = e.what();
    }
    t.rows.push_back(row);
  }
  return t;
}

} // namespace ecs
