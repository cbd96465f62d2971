#pragma once

// I(U;X) and I(U;Q) as functions of the channel matrix Q(u|x), with exact
// gradients. Both quantities are sums over channel columns, which the
// brute-force oracle exploits.

#include <vector>

#include <Eigen/Dense>

#include "crdist/ensembles.hpp"

namespace crdist {

struct MutualInfoPair {
  double iux;
  double iuq;
};

class ChannelObjective {
 public:
  enum class Path { Auto, Generic };

  explicit ChannelObjective(const CQEnsemble& e, Path path = Path::Auto);

  int in_size() const noexcept { return nx_; }
  const std::vector<double>& probs() const noexcept { return p_; }
  double entropy_avg() const noexcept { return h_avg_; }
  bool uses_qubit_path() const noexcept { return qubit_; }

  /// I(U;X) and I(U;Q) at q (rows x, columns u). H(avg state) is taken from
  /// the ensemble, so both functions are defined on all nonnegative
  /// matrices, not only on stochastic ones.
  MutualInfoPair evaluate(const Eigen::MatrixXd& q) const;

  /// Same, plus d/dQ(u|x) of both terms:
  ///   dI(U;X) = p(x) log2(Q(u|x) / p(u))
  ///   dI(U;Q) = p(x) Tr[rho_x log2 rho_u]
  MutualInfoPair evaluate(const Eigen::MatrixXd& q, Eigen::MatrixXd& grad_iux, Eigen::MatrixXd& grad_iuq) const;

  /// Contribution of one column c (c_x = Q(u|x)) to (I(U;X), I(U;Q)).
  MutualInfoPair column(const double* c) const;

  /// Posterior p(x|u) -> per-unit-weight (I(U;X), I(U;Q)) contributions:
  /// (D(pi||p), H(avg) - H(sum_x pi_x rho_x)).
  MutualInfoPair posterior_terms(const double* pi) const;

 private:
  double column_entropy(const double* weights, double mass, CMatrix* log_out, Eigen::Vector3d* bloch_dir,
                        double* log_a, double* log_c) const;

  int nx_;
  int dim_;
  bool qubit_;
  std::vector<double> p_;
  double h_avg_;
  std::vector<CMatrix> rho_;
  std::vector<Eigen::Vector3d> bloch_;
};

}  // namespace crdist
