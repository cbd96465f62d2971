#pragma once

// Optimization over Alice's measurements: the one-letter distillable
// randomness D1(inf) = max_M I(X;Q) of a bipartite state, accessible
// information of an ensemble, the one-letter curve C1(R), and numerical
// checks of additivity for separable and pure states.

#include <cstdint>
#include <random>
#include <vector>

#include "crdist/ensemble_io.hpp"
#include "crdist/ensembles.hpp"
#include "crdist/povm.hpp"
#include "crdist/tradeoff.hpp"

namespace crdist {

struct MeasureConfig {
  std::uint64_t seed = 42;
  int starts = 8;          ///< random rank-one starts besides the structured ones
  int outcomes = 0;        ///< 0 means dim_a^2
  int max_iters = 3000;
  int stall_window = 50;
  double rel_tol = 1e-12;
  int threads = 1;
};

struct MeasurementReport {
  double value = 0.0;
  Povm povm = Povm::trivial(1);
  std::vector<CVector> kets;  ///< E_x = |k_x><k_x|
  int n_outcomes = 0;
  bool converged = false;
};

/// k-outcome random POVM from Haar-random kets, completed by
/// E_x = S^{-1/2}|v_x><v_x|S^{-1/2}. k = 1 gives the identity.
Povm random_povm(int dim, int k, std::mt19937_64& rng);

/// I(X;Q) of the ensemble induced on Bob's side by a rank-one POVM
/// parametrized by unnormalized kets, with its gradient with respect to
/// the kets (d/dRe v + i d/dIm v).
class PovmObjective {
 public:
  explicit PovmObjective(const BipartiteState& rho);

  int dim_a() const noexcept { return da_; }
  double value(const std::vector<CVector>& kets) const;
  double value_and_gradient(const std::vector<CVector>& kets, std::vector<CVector>& grad) const;

  /// I(X;Q) for an explicit POVM.
  double value(const Povm& m) const;

 private:
  double eval(const std::vector<CVector>& kets, std::vector<CVector>* grad) const;

  int da_, db_;
  CMatrix rho_;
  double h_b_;
};

MeasurementReport d1_infty(const BipartiteState& rho, const MeasureConfig& cfg = {},
                           const std::vector<std::vector<CVector>>& extra_starts = {});

/// Accessible information: D1(inf) of sum_x p(x) rho_x (x) |x><x| with
/// Alice holding the quantum system. Checked against the Holevo bound.
MeasurementReport accessible_info(const CQEnsemble& e, const MeasureConfig& cfg = {});

/// Independent qubit oracle: best I(X;Y) over projective measurements
/// {|n>, |-n>} on a (theta, phi) grid of the Bloch sphere, refined
/// locally. n_phi = 1 restricts to the real great circle.
double scan_accessible_info(const CQEnsemble& e, int n_theta = 721, int n_phi = 1);

struct C1Report {
  TradeoffCurve raw;           ///< pointwise max over the tried measurements
  TradeoffCurve hull;          ///< its upper concave envelope
  std::vector<int> measurement_of_point;
  std::vector<Povm> measurements;
};

/// L = 1 curve: outer search over measurements, inner D* curve of each
/// induced ensemble. `fixed` replaces the search by the given measurements.
C1Report c1_curve(const BipartiteState& rho, const RGrid& grid, const MeasureConfig& mcfg = {},
                  const SolverConfig& scfg = {}, const std::vector<Povm>& fixed = {});

struct AdditivityCheck {
  double first = 0.0;           ///< D1(inf) of the first state
  double second = 0.0;          ///< D1(inf) of the second
  double joint = 0.0;           ///< D1(inf) of the product state
  double product_witness = 0.0; ///< value of the product of the two witnesses
  double gap = 0.0;             ///< joint - (first + second)
  double entanglement = 0.0;    ///< entropy of entanglement (pure check only)
};

/// Product envelope: dim_a of the joint state <= 4.
AdditivityCheck check_separable_additivity(const SeparableDecomposition& rho, const BipartiteState& sigma,
                                           const MeasureConfig& cfg = {});
AdditivityCheck check_pure_additivity(const BipartiteState& psi, const BipartiteState& sigma,
                                      const MeasureConfig& cfg = {});

}  // namespace crdist
