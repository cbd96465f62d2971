#include "crdist/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "crdist/error.hpp"

namespace crdist {

namespace {

constexpr double kClampFloor = -1e-10;

Eigen::SelfAdjointEigenSolver<CMatrix> solve(const CMatrix& m, double tol, bool vectors) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "eigendecomposition needs a square matrix");
  }
  const double defect = hermiticity_defect(m);
  if (defect > tol) {
    throw Error(ErrorCode::NonHermitianInput,
                "symmetry defect " + std::to_string(defect) + " exceeds " + std::to_string(tol));
  }
  CMatrix h = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<CMatrix>(h, vectors ? Eigen::ComputeEigenvectors
                                                           : Eigen::EigenvaluesOnly);
}

}  // namespace

double hermiticity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Spectrum eig_hermitian(const CMatrix& m, double tol) {
  auto es = solve(m, tol, true);
  const Eigen::Index n = m.rows();
  Spectrum out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

RVector eigenvalues_hermitian(const CMatrix& m, double tol) {
  auto es = solve(m, tol, false);
  return es.eigenvalues().reverse();
}

double entropy_of_spectrum(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w > 0.0) total += w;
  }
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double w : weights) {
    if (w <= 0.0) continue;
    const double q = std::min(w / total, 1.0);
    h -= q * std::log2(q);
  }
  return std::max(h, 0.0);
}

double entropy_of_spectrum(const RVector& weights) {
  return entropy_of_spectrum(std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Keep keep) {
  if (dim_a <= 0 || dim_b <= 0 || m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b) {
    throw Error(ErrorCode::DimensionMismatch,
                "partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected " + std::to_string(dim_a * dim_b));
  }
  if (keep == Keep::A) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        out(i, j) = m.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_a; ++i) out += m.block(i * dim_b, i * dim_b, dim_b, dim_b);
  return out;
}

CMatrix reduce(const CMatrix& m, std::span<const int> dims, std::span<const int> keep) {
  const int nreg = static_cast<int>(dims.size());
  long total = 1;
  for (int d : dims) total *= d;
  if (m.rows() != total || m.cols() != total) {
    throw Error(ErrorCode::DimensionMismatch, "reduce: register dimensions do not match the matrix");
  }
  std::vector<bool> kept(nreg, false);
  for (int k : keep) {
    if (k < 0 || k >= nreg || kept[k]) throw Error(ErrorCode::BadPartition, "reduce: bad register index");
    kept[k] = true;
  }
  // Strides of each register in the full index.
  std::vector<long> stride(nreg, 1);
  for (int r = nreg - 2; r >= 0; --r) stride[r] = stride[r + 1] * dims[r + 1];

  long kdim = 1, tdim = 1;
  std::vector<int> kept_regs, traced_regs;
  for (int r = 0; r < nreg; ++r) {
    if (kept[r]) {
      kdim *= dims[r];
      kept_regs.push_back(r);
    } else {
      tdim *= dims[r];
      traced_regs.push_back(r);
    }
  }
  auto offsets = [&](const std::vector<int>& regs, long count) {
    std::vector<long> off(count, 0);
    for (long idx = 0; idx < count; ++idx) {
      long rem = idx, o = 0;
      for (int k = static_cast<int>(regs.size()) - 1; k >= 0; --k) {
        const int r = regs[k];
        o += (rem % dims[r]) * stride[r];
        rem /= dims[r];
      }
      off[idx] = o;
    }
    return off;
  };
  const auto koff = offsets(kept_regs, kdim);
  const auto toff = offsets(traced_regs, tdim);

  CMatrix out = CMatrix::Zero(kdim, kdim);
  for (long i = 0; i < kdim; ++i)
    for (long j = 0; j < kdim; ++j) {
      cplx acc = 0.0;
      for (long t = 0; t < tdim; ++t) acc += m(koff[i] + toff[t], koff[j] + toff[t]);
      out(i, j) = acc;
    }
  return out;
}

CMatrix permute_registers(const CMatrix& m, std::span<const int> dims, std::span<const int> perm) {
  const int nreg = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != nreg) throw Error(ErrorCode::BadPartition, "permute_registers: size");
  long total = 1;
  for (int d : dims) total *= d;
  if (m.rows() != total) throw Error(ErrorCode::DimensionMismatch, "permute_registers: dims");

  std::vector<long> in_stride(nreg, 1);
  for (int r = nreg - 2; r >= 0; --r) in_stride[r] = in_stride[r + 1] * dims[r + 1];
  // Map every output index to its input index.
  std::vector<long> map(total);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx, in = 0;
    for (int k = nreg - 1; k >= 0; --k) {
      const int src = perm[k];
      const long digit = rem % dims[src];
      rem /= dims[src];
      in += digit * in_stride[src];
    }
    map[idx] = in;
  }
  CMatrix out(total, total);
  for (long i = 0; i < total; ++i)
    for (long j = 0; j < total; ++j) out(i, j) = m(map[i], map[j]);
  return out;
}

CMatrix mat_sqrt_psd(const CMatrix& m) {
  const Spectrum s = eig_hermitian(m);
  RVector root(s.values.size());
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    if (s.values(k) < -1e-8) {
      throw Error(ErrorCode::NegativeEigenvalue, "eigenvalue " + std::to_string(s.values(k)));
    }
    root(k) = std::sqrt(std::max(s.values(k), 0.0));
  }
  return s.vectors * root.asDiagonal() * s.vectors.adjoint();
}

CMatrix inv_sqrt_psd(const CMatrix& m, double floor) {
  const Spectrum s = eig_hermitian(m);
  RVector w(s.values.size());
  for (Eigen::Index k = 0; k < s.values.size(); ++k) w(k) = s.values(k) > floor ? 1.0 / std::sqrt(s.values(k)) : 0.0;
  return s.vectors * w.asDiagonal() * s.vectors.adjoint();
}

CMatrix log2_psd(const CMatrix& m, double floor) {
  const Spectrum s = eig_hermitian(m);
  RVector w(s.values.size());
  for (Eigen::Index k = 0; k < s.values.size(); ++k) w(k) = std::log2(std::max(s.values(k), floor));
  return s.vectors * w.asDiagonal() * s.vectors.adjoint();
}

CMatrix projector(const CVector& v) {
  const double n2 = v.squaredNorm();
  if (n2 <= 0.0) throw Error(ErrorCode::InvalidState, "projector onto the zero vector");
  return v * v.adjoint() / n2;
}

double trace_product_real(const CMatrix& a, const CMatrix& b) {
  // Tr(ab) = sum_ij a_ij b_ji
  return (a.array() * b.transpose().array()).sum().real();
}

DensityMatrix::DensityMatrix(const CMatrix& m, double tol) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidState, "density matrix must be square and nonempty");
  }
  const double defect = hermiticity_defect(m);
  if (defect > tol) {
    throw Error(ErrorCode::InvalidState, "not Hermitian (defect " + std::to_string(defect) + ")");
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    throw Error(ErrorCode::InvalidState, "trace " + std::to_string(tr) + " is not 1");
  }
  m_ = 0.5 * (m + m.adjoint());
  const double lmin = eigenvalues_hermitian(m_).minCoeff();
  if (lmin < -tol) {
    throw Error(ErrorCode::InvalidState, "negative eigenvalue " + std::to_string(lmin));
  }
}

DensityMatrix DensityMatrix::from_ket(const CVector& ket) { return DensityMatrix(projector(ket)); }

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::basis_state(int dim, int index) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::normalized(const CMatrix& m, double tol) {
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorCode::InvalidState, "cannot normalize an operator with zero trace");
  return DensityMatrix(m / tr, tol);
}

double DensityMatrix::purity() const { return trace_product_real(m_, m_); }

double vn_entropy(const DensityMatrix& rho) { return vn_entropy_of(rho.matrix()); }

double vn_entropy_of(const CMatrix& m) {
  RVector w = eigenvalues_hermitian(m);
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) < 0.0 && w(k) >= kClampFloor) w(k) = 0.0;
  }
  return entropy_of_spectrum(w);
}

}  // namespace crdist
