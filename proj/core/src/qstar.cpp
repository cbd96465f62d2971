// Q*(R) = min H(Q|U) subject to I(U;X) = R. The equality is imposed with
// an augmented Lagrangian (multiplier plus quadratic penalty) around the
// same mirror-ascent inner solver, independently of the D* machinery.

#include <algorithm>
#include <cmath>

#include "crdist/error.hpp"
#include "crdist/tradeoff.hpp"
#include "curve_engine.hpp"
#include "solver_internal.hpp"

namespace crdist {

namespace {

struct Constrained {
  Eigen::MatrixXd q;
  double iuq;
  double violation;
};

Constrained augmented_lagrangian(const ChannelObjective& obj, double target, Eigen::MatrixXd q, const SolverConfig& cfg) {
  double mult = 0.0, penalty = 20.0, last_violation = std::numeric_limits<double>::infinity();
  MutualInfoPair v = obj.evaluate(q);
  for (int outer = 0; outer < 40; ++outer) {
    const detail::ChannelFn f = [&](const Eigen::MatrixXd& m, Eigen::MatrixXd* grad) {
      Eigen::MatrixXd gx, gq;
      const MutualInfoPair t = obj.evaluate(m, gx, gq);
      const double c = t.iux - target;
      *grad = gq - (mult + penalty * c) * gx;
      return t.iuq - mult * c - 0.5 * penalty * c * c;
    };
    const int inner = std::max(200, cfg.max_iters / 10);
    q = detail::mirror_ascent(f, obj.probs(), std::move(q), inner, cfg.stall_window, cfg.rel_tol).q;
    v = obj.evaluate(q);
    const double c = v.iux - target;
    if (std::abs(c) < 1e-9) break;
    mult += penalty * c;
    if (std::abs(c) > 0.25 * last_violation) penalty = std::min(penalty * 4.0, 1e8);
    last_violation = std::abs(c);
  }
  return {q, v.iuq, std::abs(v.iux - target)};
}

}  // namespace

std::vector<QStarPoint> qstar_curve(const CQEnsemble& e, const std::vector<double>& rates, const SolverConfig& cfg) {
  if (!e.all_pure()) throw Error(ErrorCode::NotPureEnsemble, "Q*(R) is defined here for pure-state ensembles");
  const ChannelObjective obj(e);
  const int nx = static_cast<int>(e.size()), nu = nx + 1;
  const double hx = shannon_entropy(e.probs());
  const double hq = obj.entropy_avg();
  std::vector<QStarPoint> out;
  int point = 0;
  for (double r : rates) {
    if (!(r >= 0.0)) throw Error(ErrorCode::BadParam, "rate must be nonnegative");
    if (r >= hx - 1e-12) {
      out.push_back({r, 0.0, AuxChannel::identity_padded(nx, nu)});
      ++point;
      continue;
    }
    if (r <= 0.0) {
      out.push_back({r, hq, AuxChannel::constant(nx, nu)});
      ++point;
      continue;
    }
    std::vector<Eigen::MatrixXd> starts;
    // Time-sharing the identity with the constant channel meets the
    // constraint exactly and is a natural feasible start.
    const double lam = r / hx;
    starts.push_back(detail::time_share(AuxChannel::constant(nx, 1), AuxChannel::identity(nx), lam).matrix());
    for (int k = 0; k < cfg.starts; ++k) {
      auto rng = detail::stream_rng(cfg.seed ^ 0x5157u, static_cast<std::uint64_t>(point), static_cast<std::uint64_t>(k));
      starts.push_back(detail::dirichlet_channel(nx, nu, rng));
    }
    std::vector<Constrained> results(starts.size());
    detail::parallel_for(static_cast<int>(starts.size()), cfg.threads, [&](int k) {
      Eigen::MatrixXd q0 = detail::smooth_channel(detail::pad_outputs(starts[k], nu).matrix(), 1e-6);
      results[k] = augmented_lagrangian(obj, r, std::move(q0), cfg);
    });
    int best = -1;
    for (int k = 0; k < static_cast<int>(results.size()); ++k) {
      if (results[k].violation > 1e-6) continue;
      if (best < 0 || results[k].iuq > results[best].iuq) best = k;
    }
    if (best < 0) best = 0;
    out.push_back({r, std::max(hq - results[best].iuq, 0.0), AuxChannel(results[best].q)});
    ++point;
  }
  return out;
}

DualityReport check_duality(const CQEnsemble& e, const std::vector<double>& xs, const SolverConfig& cfg) {
  if (!e.all_pure()) throw Error(ErrorCode::NotPureEnsemble, "duality check needs a pure-state ensemble");
  DualityReport rep;
  rep.xs = xs;
  rep.h_q = vn_entropy_of(e.average_state());
  detail::CurveEngine engine(e, cfg);
  for (double x : xs) {
    engine.bracket(x);
    const double d = engine.at(x).distilled;
    const double q = qstar_curve(e, {d + x}, cfg).front().qstar;
    rep.dstar.push_back(d);
    rep.qstar.push_back(q);
    rep.residual.push_back(std::abs(d + q - rep.h_q));
    rep.max_residual = std::max(rep.max_residual, rep.residual.back());
  }
  return rep;
}

}  // namespace crdist
