#pragma once

#include <map>
#include <string>
#include <vector>

#include "crdist/tradeoff.hpp"

namespace crdist::detail {

/// All local optima of one multi-start Lagrangian solve.
struct MultiStartResult {
  std::vector<Eigen::MatrixXd> optima;
  int best = 0;
  bool converged = true;
};

MultiStartResult run_lagrangian(const ChannelObjective& obj, double s, const SolverConfig& cfg, int point,
                                const Eigen::MatrixXd* warm);

/// Incrementally built description of one ensemble's D* curve: a ladder of
/// Lagrangian maximizers plus the pool of every posterior p(x|u) seen so
/// far. Queries at a fixed rate solve a linear program over the pool.
class CurveEngine {
 public:
  CurveEngine(const CQEnsemble& e, const SolverConfig& cfg);

  bool trivial() const noexcept { return chi_ < 1e-12; }
  double chi() const noexcept { return chi_; }
  double sw_rate() const noexcept { return sw_rate_; }

  const LagrangePoint& solve_s(double s);
  /// Bisects in s until the ladder brackets `rate` tightly.
  void bracket(double rate);
  /// Refines the ladder until consecutive maximizers are at most `spacing`
  /// apart in rate on [0, rmax].
  void sweep(double rmax, double spacing);

  CurvePoint at(double rate) const;

  std::vector<LagrangePoint> support() const;
  const std::vector<std::string>& flags() const noexcept { return flags_; }

 private:
  void pool_channel(const Eigen::MatrixXd& q);
  CurvePoint lp_point(double rate) const;
  CurvePoint chord_point(double rate) const;
  CurvePoint make_point(double rate, const AuxChannel& w, double s) const;
  double slope_near(double rate) const;

  CQEnsemble e_;
  SolverConfig cfg_;
  ChannelObjective obj_;
  int nx_;
  double chi_;
  double sw_rate_;
  int solves_ = 0;
  std::map<double, LagrangePoint> ladder_;
  std::vector<int> rows_;  // symbols with p(x) > 0
  std::vector<Eigen::VectorXd> post_;
  std::vector<double> post_rate_;
  std::vector<double> post_gain_;
  std::vector<std::string> flags_;
};

}  // namespace crdist::detail
