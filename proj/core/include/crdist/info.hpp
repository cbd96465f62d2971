#pragma once

// Entropic functionals of classical-quantum systems, in bits.

#include <array>

#include "crdist/ensembles.hpp"

namespace crdist {

/// (C, R, D) with D = C - R exactly.
struct SwPoint {
  double cr_rate;
  double comm_rate;
  double distilled;
};

double shannon_entropy(const ProbVector& p);
double shannon_entropy(std::span<const double> p);

/// h2(p); throws DomainError outside [0, 1].
double binary_entropy(double p);

/// chi = H(sum p rho) - sum p H(rho)
double holevo_chi(const CQEnsemble& e);

/// H(X|Q) = H(X) - chi for a classical-quantum state.
double cond_entropy_x_given_q(const CQEnsemble& e);

/// Classical mutual information of p(x)Q(u|x).
double mutual_info_ux(const ProbVector& p, const AuxChannel& w);

/// I(U;Q) = H(avg) - sum_u p(u) H(rho_u), rho_u = sum_x p(x|u) rho_x.
double mutual_info_uq(const CQEnsemble& e, const AuxChannel& w);

/// I(A;B|C) on an EHS state. `partition` assigns each register to one of
/// the groups 0 = A, 1 = B, 2 = C, or -1 to trace it out. A and B must be
/// nonempty; C may be empty.
double cond_mutual_info(const EhsState& s, std::span<const int> partition);

/// I(A;B) on an EHS state with the same group convention (C ignored).
double mutual_info(const EhsState& s, std::span<const int> partition);

SwPoint sw_point(const CQEnsemble& e);

/// Entropy of the reduced state of a pure bipartite state; throws NotPure
/// when Tr rho^2 < 1 - 1e-8.
double entanglement_entropy(const BipartiteState& psi);

/// Classical mutual information of a joint distribution given as a matrix
/// p(x, y).
double classical_mutual_info(const Eigen::MatrixXd& joint);

/// Joint distribution of the ensemble label and the outcome of a POVM on
/// the quantum system: p(x, y) = p(x) Tr(rho_x E_y).
Eigen::MatrixXd outcome_joint(const CQEnsemble& e, const Povm& m);

}  // namespace crdist
