#pragma once

// Classical-quantum resources: ensembles {rho_x, p(x)}, auxiliary channels
// Q(u|x), bipartite states and block-diagonal ("enlarged Hilbert space")
// embeddings of classical registers.

#include <string>
#include <string_view>
#include <vector>

#include "crdist/linalg.hpp"
#include "crdist/povm.hpp"

namespace crdist {

/// Nonnegative weights summing to one within 1e-10.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(std::vector<double> probs, double tol = kStateTol);

  static ProbVector uniform(std::size_t n);
  /// Clamps negatives to zero and rescales to unit sum.
  static ProbVector normalized(std::vector<double> weights);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

class CQEnsemble {
 public:
  CQEnsemble(ProbVector probs, std::vector<DensityMatrix> states, std::string label = {});

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return probs_.size(); }
  const ProbVector& probs() const noexcept { return probs_; }
  const std::vector<DensityMatrix>& states() const noexcept { return states_; }
  const DensityMatrix& state(std::size_t x) const { return states_[x]; }
  const std::string& label() const noexcept { return label_; }

  /// sum_x p(x) rho_x
  CMatrix average_state() const;
  bool all_pure(double tol = 1e-8) const;

 private:
  int dim_;
  ProbVector probs_;
  std::vector<DensityMatrix> states_;
  std::string label_;
};

/// Row-stochastic matrix Q(u|x): rows indexed by x, columns by u.
class AuxChannel {
 public:
  explicit AuxChannel(Eigen::MatrixXd rows, double tol = 1e-9);

  static AuxChannel identity(int n);
  /// Identity on the first n outputs, remaining outputs unused.
  static AuxChannel identity_padded(int n, int out_size);
  static AuxChannel constant(int in_size, int out_size = 1);
  static AuxChannel binary_symmetric(double flip);

  int in_size() const noexcept { return static_cast<int>(m_.rows()); }
  int out_size() const noexcept { return static_cast<int>(m_.cols()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(int x, int u) const { return m_(x, u); }

 private:
  Eigen::MatrixXd m_;
};

struct BipartiteState {
  int dim_a;
  int dim_b;
  DensityMatrix state;

  BipartiteState(int dim_a, int dim_b, DensityMatrix state);
  static BipartiteState from_ket(int dim_a, int dim_b, const CVector& ket);

  CMatrix reduced_a() const;
  CMatrix reduced_b() const;
};

/// Block-diagonal state over classical registers followed by one quantum
/// register. Off-diagonal blocks between distinct classical tuples are zero
/// by construction.
struct EhsState {
  std::vector<int> classical_dims;
  int quantum_dim;
  DensityMatrix state;

  /// All register dimensions in tensor order (classical..., quantum).
  std::vector<int> register_dims() const;
  int register_count() const { return static_cast<int>(classical_dims.size()) + 1; }
};

/// sum_x p(x)|x><x| (x) rho_x
EhsState ehs_embed(const CQEnsemble& e);

/// sum_{x,u} p(x)Q(u|x) |u><u| (x) |x><x| (x) rho_x, registers (U, X, Q).
EhsState extend_with_channel(const CQEnsemble& e, const AuxChannel& w);

/// Bob's ensemble after Alice measures: p(x) = Tr rho(E_x (x) 1),
/// rho_x = Tr_A[(sqrt E_x (x) 1) rho (sqrt E_x (x) 1)] / p(x). Outcomes with
/// p(x) < 1e-12 are dropped and the rest renormalized.
CQEnsemble measure_ensemble(const BipartiteState& rho, const Povm& m);

/// Same as measure_ensemble but also reports which POVM outcome produced
/// each surviving symbol.
CQEnsemble measure_ensemble(const BipartiteState& rho, const Povm& m, std::vector<int>* kept_outcomes);

/// Product ensemble with alphabet X1 x X2 (index x1 * |X2| + x2).
CQEnsemble tensor_product(const CQEnsemble& e1, const CQEnsemble& e2);

/// rho (x) sigma with subsystems regrouped as (A A')(B B').
BipartiteState tensor_product(const BipartiteState& rho, const BipartiteState& sigma);

/// The EHS state of an ensemble viewed as a bipartite state with the
/// classical register on Alice's side.
BipartiteState ehs_bipartite(const CQEnsemble& e);

/// Roles swapped: Alice holds rho_x, Bob the classical label,
/// sum_x p(x) rho_x (x) |x><x|.
BipartiteState swapped_bipartite(const CQEnsemble& e);

/// Named ensembles from the standard examples:
///   two_state        {|0>, |+>} with p = (1/2, 1/2)
///   three_state      {|0>, |+>, |2>} in d = 3, p = 1/3 each
///   bb84             params {theta}: |0>, cos t|0>+sin t|1>, |1>, -sin t|0>+cos t|1>
///   uniform_sphere   params {N}: Fibonacci lattice on the Bloch sphere (default 64)
///   orthogonal_pair  {|0>, |1>} uniform
/// Throws UnknownName / BadParam. An out-of-range bb84 angle is accepted
/// and reported through `warnings` when given.
CQEnsemble named_ensemble(std::string_view name, const std::vector<double>& params = {},
                          std::vector<std::string>* warnings = nullptr);

std::vector<std::string> named_ensemble_ids();

}  // namespace crdist
