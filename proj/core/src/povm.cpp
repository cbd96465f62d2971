#include "crdist/povm.hpp"

#include <string>

#include "crdist/error.hpp"

namespace crdist {

Povm::Povm(int dim, std::vector<CMatrix> elements) : dim_(dim), elements_(std::move(elements)) {
  if (dim <= 0 || elements_.empty()) throw Error(ErrorCode::InvalidPovm, "empty measurement");
  for (auto& e : elements_) {
    if (e.rows() != dim || e.cols() != dim) throw Error(ErrorCode::InvalidPovm, "element has the wrong dimension");
    if (hermiticity_defect(e) > kHermitianTol) throw Error(ErrorCode::InvalidPovm, "element is not Hermitian");
    e = 0.5 * (e + e.adjoint()).eval();
    const double lmin = eigenvalues_hermitian(e).minCoeff();
    if (lmin < -1e-9) throw Error(ErrorCode::InvalidPovm, "element has eigenvalue " + std::to_string(lmin));
  }
  const double res = completeness_residual();
  if (res > 1e-8) throw Error(ErrorCode::InvalidPovm, "elements sum to identity only within " + std::to_string(res));
}

Povm Povm::from_basis(const CMatrix& unitary) {
  const int d = static_cast<int>(unitary.rows());
  std::vector<CMatrix> el;
  for (int k = 0; k < unitary.cols(); ++k) el.push_back(unitary.col(k) * unitary.col(k).adjoint());
  return Povm(d, std::move(el));
}

Povm Povm::computational(int dim) { return from_basis(CMatrix::Identity(dim, dim)); }

Povm Povm::trivial(int dim) { return Povm(dim, {CMatrix::Identity(dim, dim)}); }

double Povm::completeness_residual() const {
  CMatrix sum = -CMatrix::Identity(dim_, dim_);
  for (const auto& e : elements_) sum += e;
  return sum.cwiseAbs().maxCoeff();
}

Povm povm_from_kets(const std::vector<CVector>& kets) {
  if (kets.empty()) throw Error(ErrorCode::InvalidPovm, "no kets");
  const int d = static_cast<int>(kets.front().size());
  CMatrix s = CMatrix::Zero(d, d);
  for (const auto& v : kets) s += v * v.adjoint();
  const CMatrix t = inv_sqrt_psd(s, 1e-12);
  std::vector<CMatrix> el;
  el.reserve(kets.size());
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& v : kets) {
    const CVector w = t * v;
    el.push_back(w * w.adjoint());
    sum += el.back();
  }
  // Complement of the span (zero when the kets span the space).
  CMatrix rest = CMatrix::Identity(d, d) - sum;
  rest = 0.5 * (rest + rest.adjoint()).eval();
  if (rest.cwiseAbs().maxCoeff() > 1e-10) el.back() += rest;
  return Povm(d, std::move(el));
}

Povm tensor(const Povm& m1, const Povm& m2) {
  std::vector<CMatrix> el;
  el.reserve(m1.size() * m2.size());
  for (const auto& a : m1.elements())
    for (const auto& b : m2.elements()) el.push_back(tensor(a, b));
  return Povm(m1.dim() * m2.dim(), std::move(el));
}

}  // namespace crdist
