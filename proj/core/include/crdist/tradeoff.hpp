#pragma once

// Distillable common randomness D*(R): the largest I(U;Q) over auxiliary
// channels U|X with I(U;X) - I(U;Q) <= R, plus curve tracing, the dual
// compression curve Q*(R) and the product-ensemble additivity check.
//
// Channels are optimized by mirror ascent on the Lagrangian
// G_s = (1+s) I(U;Q) - s I(U;X) with row-wise softmax parameters. Every
// local optimum contributes its posteriors p(x|u) to a pool, and a small
// linear program over the pool weights assembles the best channel at a
// fixed rate. Basic LP solutions use at most |X|+1 outputs.

#include <cstdint>
#include <string>
#include <vector>

#include "crdist/channel_objective.hpp"
#include "crdist/ensembles.hpp"
#include "crdist/info.hpp"

namespace crdist {

struct SolverConfig {
  std::uint64_t seed = 42;
  int starts = 32;          ///< Dirichlet(1) random starts per Lagrangian solve
  int max_iters = 20000;    ///< per start
  int stall_window = 50;    ///< iterations over which the relative change is measured
  double rel_tol = 1e-9;    ///< stop when the objective moves less than this over the window
  double feas_tol = 1e-9;   ///< slack on the rate constraint
  int threads = 1;
  int max_ladder = 96;      ///< cap on Lagrangian solves per curve
  int lp_max_alphabet = 32; ///< above this |X| curves use chords between Lagrangian points
};

struct RateGain {
  double rate;  ///< I(U;X) - I(U;Q)
  double gain;  ///< I(U;Q)
};

struct CurvePoint {
  double comm_rate = 0.0;     ///< requested R
  double distilled = 0.0;     ///< D
  double cr_rate = 0.0;       ///< C = R + D
  AuxChannel channel = AuxChannel::constant(1);
  double slope_param = 0.0;   ///< Lagrangian s of the supporting line (0 when not applicable)
  double witness_rate = 0.0;  ///< I(U;X) - I(U;Q) of the witness, <= R
  bool converged = true;
};

/// A maximizer of G_s.
struct LagrangePoint {
  double s;
  double rate;
  double gain;
  AuxChannel channel;
  bool converged;
};

struct TradeoffCurve {
  std::string ensemble_id;
  std::vector<CurvePoint> points;
  double chi = 0.0;
  SwPoint sw{0.0, 0.0, 0.0};
  std::vector<LagrangePoint> support;
  std::vector<std::string> flags;
};

struct RGrid {
  double min = 0.0;
  double max = 1.0;
  int count = 33;
  std::vector<double> values() const;
};

RateGain eval_pair(const CQEnsemble& e, const AuxChannel& w);

/// Multi-start maximization of G_s over channels with |U| = |X| + 1. When
/// `warm` is given it is used as an extra start.
LagrangePoint maximize_lagrangian(const CQEnsemble& e, double s, const SolverConfig& cfg, int point_index = 0,
                                  const AuxChannel* warm = nullptr);

CurvePoint solve_dstar(const CQEnsemble& e, double rate, const SolverConfig& cfg = {});

TradeoffCurve trace_curve(const CQEnsemble& e, const RGrid& grid, const SolverConfig& cfg = {});

/// Monotonicity / concavity / boundedness of a traced curve.
struct CurveReport {
  bool increasing_r = true;
  bool monotone = true;
  bool bounded = true;
  bool concave = true;
  double max_second_diff = 0.0;  ///< most positive second difference
  double max_abs_second_diff = 0.0;
};
CurveReport check_curve(const TradeoffCurve& c, double slack = 1e-4);

/// Exhaustive search over channels whose entries are multiples of 1/mesh
/// (|U| = |X|+1). Envelope |X| <= 3.
CurvePoint brute_dstar(const CQEnsemble& e, double rate, int mesh);

struct QStarPoint {
  double rate;    ///< I(U;X)
  double qstar;   ///< min H(Q|U)
  AuxChannel channel;
};

/// Q*(R) = min { H(Q|U) : I(U;X) = R } for a pure-state ensemble, computed by
/// an augmented Lagrangian with the equality enforced directly. Throws
/// NotPureEnsemble.
std::vector<QStarPoint> qstar_curve(const CQEnsemble& e, const std::vector<double>& rates, const SolverConfig& cfg = {});

struct DualityReport {
  std::vector<double> xs;
  std::vector<double> dstar;
  std::vector<double> qstar;
  std::vector<double> residual;
  double h_q = 0.0;
  double max_residual = 0.0;
};
DualityReport check_duality(const CQEnsemble& e, const std::vector<double>& xs, const SolverConfig& cfg = {});

struct AdditivityReport {
  double rate = 0.0;
  double joint = 0.0;   ///< D* of the product ensemble at R
  double split = 0.0;   ///< max over R1 + R2 = R of D1*(R1) + D2*(R2)
  double best_r1 = 0.0;
  double gap = 0.0;     ///< joint - split
};
/// Envelope |X1| |X2| <= 6.
AdditivityReport check_additivity(const CQEnsemble& e1, const CQEnsemble& e2, double rate, const SolverConfig& cfg = {});

/// Exact curve of the uniform ensemble of pure qubit states, parametrized
/// by lambda > 0. Throws DomainError for lambda <= 0.
std::vector<RateGain> uniform_curve_closed_form(const std::vector<double>& lambdas);

/// Upper concave envelope value at r of points sorted by rate, (0,0)
/// included by the caller when appropriate.
double concave_envelope_at(const std::vector<RateGain>& pts, double r);

}  // namespace crdist
