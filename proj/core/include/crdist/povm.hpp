#pragma once

#include <vector>

#include "crdist/linalg.hpp"

namespace crdist {

/// A generalized measurement: PSD elements (eigenvalues >= -1e-9) whose sum
/// is the identity within 1e-8 entrywise.
class Povm {
 public:
  Povm(int dim, std::vector<CMatrix> elements);

  /// Projectors onto the columns of a unitary.
  static Povm from_basis(const CMatrix& unitary);
  static Povm computational(int dim);
  static Povm trivial(int dim);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const std::vector<CMatrix>& elements() const noexcept { return elements_; }
  const CMatrix& operator[](std::size_t i) const { return elements_[i]; }

  /// max_ij |sum_x E_x - 1|_ij
  double completeness_residual() const;

 private:
  int dim_;
  std::vector<CMatrix> elements_;
};

/// Rank-one POVM from unnormalized kets: E_x = S^{-1/2}|v_x><v_x|S^{-1/2}
/// with S = sum_x |v_x><v_x|. When the kets do not span the space the
/// complement projector is added to the last element.
Povm povm_from_kets(const std::vector<CVector>& kets);

/// Tensor product measurement (outcome index x1 * |M2| + x2).
Povm tensor(const Povm& m1, const Povm& m2);

}  // namespace crdist
