#pragma once

// Dense complex-matrix kernel shared by every other module: Hermitian
// eigendecomposition, Kronecker products, partial traces over registers and
// entropies of spectra. All entropies are in bits.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace crdist {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-8;
inline constexpr double kStateTol = 1e-10;

/// Eigenvalues in descending order; columns of `vectors` are the matching
/// orthonormal eigenvectors.
struct Spectrum {
  RVector values;
  CMatrix vectors;
};

/// Largest entrywise |M - M^dagger|.
double hermiticity_defect(const CMatrix& m);

/// Full spectral decomposition of a Hermitian matrix. Throws
/// NonHermitianInput when the symmetry defect exceeds `tol`.
Spectrum eig_hermitian(const CMatrix& m, double tol = kHermitianTol);

/// Eigenvalues only (descending). Same precondition as eig_hermitian.
RVector eigenvalues_hermitian(const CMatrix& m, double tol = kHermitianTol);

/// Shannon entropy (bits) of a nonnegative weight vector after clamping tiny
/// negatives to zero and renormalizing to unit sum.
double entropy_of_spectrum(std::span<const double> weights);
double entropy_of_spectrum(const RVector& weights);

/// Kronecker product a (x) b.
CMatrix tensor(const CMatrix& a, const CMatrix& b);

enum class Keep { A, B };

/// Reduced operator of a (dim_a*dim_b)-square matrix on the kept factor.
CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Keep keep);

/// Reduced operator on an arbitrary subset of registers. `dims` lists the
/// register dimensions in tensor order; `keep` lists kept register indices
/// (ascending). An empty `keep` yields the 1x1 trace.
CMatrix reduce(const CMatrix& m, std::span<const int> dims, std::span<const int> keep);

/// Reorders tensor factors: output factor k is input factor perm[k].
CMatrix permute_registers(const CMatrix& m, std::span<const int> dims, std::span<const int> perm);

/// Hermitian PSD square root. Throws NegativeEigenvalue for an eigenvalue
/// below -1e-8.
CMatrix mat_sqrt_psd(const CMatrix& m);

/// Moore-Penrose inverse square root on the support (eigenvalues above
/// `floor` inverted, the rest dropped).
CMatrix inv_sqrt_psd(const CMatrix& m, double floor = 1e-14);

/// Base-2 matrix logarithm of a PSD matrix with eigenvalues floored at
/// `floor`.
CMatrix log2_psd(const CMatrix& m, double floor = 1e-300);

/// Projector |v><v| / <v|v>.
CMatrix projector(const CVector& v);

/// Real trace of a product Tr(a b) without forming the product.
double trace_product_real(const CMatrix& a, const CMatrix& b);

/// A unit-trace, Hermitian, positive semidefinite matrix. Construction
/// validates the invariants at 1e-10 and symmetrizes away round-off.
class DensityMatrix {
 public:
  explicit DensityMatrix(const CMatrix& m, double tol = kStateTol);

  static DensityMatrix from_ket(const CVector& ket);
  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix basis_state(int dim, int index);
  /// Normalizes a nonzero PSD operator to unit trace.
  static DensityMatrix normalized(const CMatrix& m, double tol = kStateTol);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const noexcept { return m_; }
  double purity() const;

 private:
  CMatrix m_;
};

/// Von Neumann entropy -Tr rho log2 rho in bits, within [0, log2 d].
double vn_entropy(const DensityMatrix& rho);

/// Entropy of a Hermitian PSD operator normalized by its trace. Used on
/// intermediate operators that are not wrapped as DensityMatrix.
double vn_entropy_of(const CMatrix& m);

}  // namespace crdist
