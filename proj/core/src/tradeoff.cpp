#include "crdist/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "crdist/error.hpp"
#include "curve_engine.hpp"
#include "simplex.hpp"
#include "solver_internal.hpp"

namespace crdist {

namespace detail {

MultiStartResult run_lagrangian(const ChannelObjective& obj, double s, const SolverConfig& cfg, int point,
                                const Eigen::MatrixXd* warm) {
  const int nx = obj.in_size(), nu = nx + 1;
  const auto& p = obj.probs();
  const ChannelFn g = [&obj, s](const Eigen::MatrixXd& q, Eigen::MatrixXd* grad) {
    Eigen::MatrixXd gx, gq;
    const MutualInfoPair v = obj.evaluate(q, gx, gq);
    *grad = (1.0 + s) * gq - s * gx;
    return (1.0 + s) * v.iuq - s * v.iux;
  };
  auto value = [&obj, s](const Eigen::MatrixXd& q) {
    const MutualInfoPair v = obj.evaluate(q);
    return (1.0 + s) * v.iuq - s * v.iux;
  };

  const Eigen::MatrixXd ident = pad_outputs(Eigen::MatrixXd::Identity(nx, nx), nu).matrix();
  const Eigen::MatrixXd constant = AuxChannel::constant(nx, nu).matrix();

  // Start 0..k-1 are structured, the rest Dirichlet(1).
  std::vector<Eigen::MatrixXd> structured;
  if (warm) structured.push_back(*warm);
  structured.push_back(ident);
  structured.push_back(constant);
  const int ns = static_cast<int>(structured.size());
  const int total = ns + cfg.starts;

  std::vector<Eigen::MatrixXd> optima(static_cast<std::size_t>(total));
  std::vector<double> values(static_cast<std::size_t>(total));
  std::vector<char> conv(static_cast<std::size_t>(total));
  parallel_for(total, cfg.threads, [&](int i) {
    Eigen::MatrixXd q0;
    if (i < ns) {
      q0 = smooth_channel(structured[i]);
    } else {
      auto rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(point), static_cast<std::uint64_t>(i - ns));
      q0 = dirichlet_channel(nx, nu, rng);
    }
    AscentResult r = mirror_ascent(g, p, std::move(q0), cfg.max_iters, cfg.stall_window, cfg.rel_tol);
    Eigen::MatrixXd snapped = snap_channel(r.q);
    const double vs = value(snapped);
    if (vs >= r.value - 1e-12) {
      r.q = std::move(snapped);
      r.value = vs;
    }
    // The unsmoothed structured channel itself may be better than the
    // optimizer's end point (vertices are not reachable by mirror steps).
    if (i < ns) {
      const double v0 = value(structured[i]);
      if (v0 > r.value) {
        r.q = structured[i];
        r.value = v0;
      }
    }
    optima[i] = std::move(r.q);
    values[i] = r.value;
    conv[i] = r.converged;
  });

  MultiStartResult res;
  res.optima = std::move(optima);
  for (int i = 1; i < total; ++i)
    if (values[i] > values[res.best]) res.best = i;
  res.converged = conv[res.best] != 0;
  return res;
}

// ------------------------------------------------------------ CurveEngine

CurveEngine::CurveEngine(const CQEnsemble& e, const SolverConfig& cfg)
    : e_(e), cfg_(cfg), obj_(e), nx_(static_cast<int>(e.size())), chi_(holevo_chi(e)), sw_rate_(0.0) {
  sw_rate_ = std::max(shannon_entropy(e.probs()) - chi_, 0.0);
  for (int x = 0; x < nx_; ++x)
    if (e.probs()[x] > 0.0) rows_.push_back(x);
  // Constant channel posterior (index 0) and the point masses.
  Eigen::VectorXd p(nx_);
  for (int x = 0; x < nx_; ++x) p(x) = e.probs()[x];
  post_.push_back(p);
  for (int x : rows_) post_.push_back(Eigen::VectorXd::Unit(nx_, x));
  for (const auto& pi : post_) {
    const MutualInfoPair t = obj_.posterior_terms(pi.data());
    post_rate_.push_back(t.iux - t.iuq);
    post_gain_.push_back(t.iuq);
  }
}

void CurveEngine::pool_channel(const Eigen::MatrixXd& q) {
  if (nx_ > cfg_.lp_max_alphabet) return;
  const auto& p = obj_.probs();
  for (Eigen::Index u = 0; u < q.cols(); ++u) {
    double pu = 0.0;
    for (int x = 0; x < nx_; ++x) pu += p[x] * q(x, u);
    if (pu <= 1e-13) continue;
    Eigen::VectorXd pi(nx_);
    for (int x = 0; x < nx_; ++x) pi(x) = p[x] * q(x, u) / pu;
    const MutualInfoPair t = obj_.posterior_terms(pi.data());
    post_.push_back(std::move(pi));
    post_rate_.push_back(t.iux - t.iuq);
    post_gain_.push_back(t.iuq);
  }
}

const LagrangePoint& CurveEngine::solve_s(double s) {
  auto found = ladder_.find(s);
  if (found != ladder_.end()) return found->second;
  // Continuation: warm start from the maximizer at the nearest slope.
  const Eigen::MatrixXd* warm = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& [s2, lp] : ladder_) {
    const double dist = std::abs(std::log(s2) - std::log(s));
    if (dist < best_dist) {
      best_dist = dist;
      warm = &lp.channel.matrix();
    }
  }
  MultiStartResult r = run_lagrangian(obj_, s, cfg_, solves_++, warm);
  for (const auto& q : r.optima) pool_channel(q);
  const AuxChannel w(r.optima[r.best]);
  const MutualInfoPair v = obj_.evaluate(w.matrix());
  if (!r.converged) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "s=%.6g: best start reached the iteration cap", s);
    flags_.emplace_back(buf);
  }
  return ladder_.emplace(s, LagrangePoint{s, v.iux - v.iuq, v.iuq, w, r.converged}).first->second;
}

void CurveEngine::bracket(double rate) {
  if (trivial() || rate >= sw_rate_) return;
  if (ladder_.empty()) {
    for (double s : {0.25, 1.0, 4.0}) solve_s(s);
  }
  for (int step = 0; step < 48; ++step) {
    // Rate decreases with s; find the tightest s_a < s_b with
    // rate(s_a) >= rate >= rate(s_b).
    const LagrangePoint* a = nullptr;
    const LagrangePoint* b = nullptr;
    for (const auto& [s, lp] : ladder_) {
      if (lp.rate >= rate) a = &lp;
    }
    for (auto it = ladder_.rbegin(); it != ladder_.rend(); ++it) {
      if (it->second.rate <= rate) b = &it->second;
    }
    double next;
    if (!a) {
      next = ladder_.begin()->first / 4.0;
      if (next < 1e-5) break;
    } else if (!b) {
      next = ladder_.rbegin()->first * 4.0;
      if (next > 1e5) break;
    } else {
      if (a->s >= b->s || a->rate - b->rate < 1e-6 || b->s / a->s < 1.0005) break;
      next = std::sqrt(a->s * b->s);
    }
    solve_s(next);
  }
}

void CurveEngine::sweep(double rmax, double spacing) {
  if (trivial()) return;
  for (int k = -6; k <= 6; ++k) solve_s(std::ldexp(1.0, k));
  const double top = std::min(rmax, sw_rate_);
  while (static_cast<int>(ladder_.size()) < cfg_.max_ladder) {
    std::vector<double> next;
    // Extend the ends of the ladder.
    const auto& low = *ladder_.begin();
    if (low.second.rate < top - spacing && low.first > 1e-4) next.push_back(low.first / 4.0);
    const auto& high = *ladder_.rbegin();
    if (high.second.rate > spacing && high.first < 1e4) next.push_back(high.first * 4.0);
    // Split gaps inside [0, top].
    for (auto it = ladder_.begin(); std::next(it) != ladder_.end(); ++it) {
      const auto& l = it->second;
      const auto& r = std::next(it)->second;
      const double hi = std::min(l.rate, top), lo = std::max(r.rate, 0.0);
      if (hi - lo > spacing && r.s / l.s > 1.001) next.push_back(std::sqrt(l.s * r.s));
    }
    if (next.empty()) break;
    for (double s : next) {
      if (static_cast<int>(ladder_.size()) >= cfg_.max_ladder) break;
      solve_s(s);
    }
  }
}

std::vector<LagrangePoint> CurveEngine::support() const {
  std::vector<LagrangePoint> out;
  for (const auto& kv : ladder_) out.push_back(kv.second);
  return out;
}

double CurveEngine::slope_near(double rate) const {
  double s = 0.0;
  for (const auto& [s2, lp] : ladder_)
    if (lp.rate >= rate) s = s2;
  return s;
}

CurvePoint CurveEngine::make_point(double rate, const AuxChannel& w, double s) const {
  const MutualInfoPair v = obj_.evaluate(w.matrix());
  CurvePoint pt;
  pt.comm_rate = rate;
  pt.distilled = v.iuq;
  pt.cr_rate = rate + v.iuq;
  pt.channel = w;
  pt.slope_param = s;
  pt.witness_rate = v.iux - v.iuq;
  return pt;
}

CurvePoint CurveEngine::lp_point(double rate) const {
  const int m = static_cast<int>(rows_.size());
  const int n = static_cast<int>(post_.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, n + 1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) a(i, j) = post_[j](rows_[i]);
    a(m, j) = post_rate_[j];
  }
  a(m, n) = 1.0;  // slack on the rate row
  Eigen::VectorXd b(m + 1), c = Eigen::VectorXd::Zero(n + 1);
  for (int i = 0; i < m; ++i) b(i) = obj_.probs()[rows_[i]];
  b(m) = rate;
  for (int j = 0; j < n; ++j) c(j) = post_gain_[j];
  // Feasible start: the constant posterior, point masses of all support
  // symbols but the first, and the slack.
  std::vector<int> basis{0};
  for (int i = 1; i < m; ++i) basis.push_back(1 + i);
  basis.push_back(n);
  const LpResult lp = simplex_max(a, b, c, basis);
  if (!lp.ok) return chord_point(rate);

  const auto& p = obj_.probs();
  std::vector<Eigen::VectorXd> cols;
  for (int j = 0; j < n; ++j) {
    if (lp.x(j) <= 1e-15) continue;
    Eigen::VectorXd col = Eigen::VectorXd::Zero(nx_);
    for (int x : rows_) col(x) = lp.x(j) * post_[j](x) / p[x];
    cols.push_back(col);
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(nx_, std::max<int>(static_cast<int>(cols.size()), nx_ + 1));
  for (std::size_t k = 0; k < cols.size(); ++k) q.col(static_cast<Eigen::Index>(k)) = cols[k];
  for (int x = 0; x < nx_; ++x) {
    const double sum = q.row(x).sum();
    if (sum > 0.0) {
      q.row(x) /= sum;
    } else {
      q(x, 0) = 1.0;
    }
  }
  CurvePoint pt = make_point(rate, AuxChannel(q), slope_near(rate));
  // Round-off may push the witness marginally over budget; the chord is the
  // safe alternative in that case.
  if (pt.witness_rate > rate + cfg_.feas_tol) {
    CurvePoint alt = chord_point(rate);
    if (alt.witness_rate <= rate + cfg_.feas_tol) return alt;
  }
  return pt;
}

CurvePoint CurveEngine::chord_point(double rate) const {
  struct Node {
    double rate, gain;
    const AuxChannel* w;
    double s;
  };
  const AuxChannel constant = AuxChannel::constant(nx_, nx_ + 1);
  const AuxChannel ident = AuxChannel::identity_padded(nx_, nx_ + 1);
  std::vector<Node> nodes{{0.0, 0.0, &constant, 0.0}, {sw_rate_, chi_, &ident, 0.0}};
  for (const auto& [s, lp] : ladder_) nodes.push_back({lp.rate, lp.gain, &lp.channel, s});
  std::sort(nodes.begin(), nodes.end(), [](const Node& l, const Node& r) {
    return l.rate < r.rate || (l.rate == r.rate && l.gain > r.gain);
  });
  // Upper hull (monotone chain).
  std::vector<Node> hull;
  for (const auto& nd : nodes) {
    if (!hull.empty() && nd.gain <= hull.back().gain) continue;
    while (hull.size() >= 2) {
      const Node& o = hull[hull.size() - 2];
      const Node& a = hull.back();
      const double cross = (a.rate - o.rate) * (nd.gain - o.gain) - (a.gain - o.gain) * (nd.rate - o.rate);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(nd);
  }
  std::size_t k = 0;
  while (k + 1 < hull.size() && hull[k + 1].rate <= rate) ++k;
  if (k + 1 == hull.size() || hull[k].rate >= rate) return make_point(rate, *hull[k].w, hull[k].s);
  const Node& lo = hull[k];
  const Node& hi = hull[k + 1];
  const double lambda = (rate - lo.rate) / (hi.rate - lo.rate);
  return make_point(rate, time_share(*lo.w, *hi.w, lambda), hi.s);
}

CurvePoint CurveEngine::at(double rate) const {
  if (trivial()) {
    CurvePoint pt = make_point(rate, AuxChannel::constant(nx_, nx_ + 1), 0.0);
    pt.distilled = 0.0;
    pt.cr_rate = rate;
    return pt;
  }
  if (rate >= sw_rate_) return make_point(rate, AuxChannel::identity_padded(nx_, nx_ + 1), 0.0);
  CurvePoint best = nx_ <= cfg_.lp_max_alphabet ? lp_point(rate) : chord_point(rate);
  // Ties towards smaller rate: a Lagrangian maximizer is used only when it
  // strictly improves on the assembled point.
  for (const auto& [s, lp] : ladder_) {
    if (lp.rate <= rate + cfg_.feas_tol && lp.gain > best.distilled + 1e-12) best = make_point(rate, lp.channel, s);
  }
  best.converged = true;
  for (const auto& [s, lp] : ladder_) best.converged = best.converged && lp.converged;
  return best;
}

}  // namespace detail

// ------------------------------------------------------------ public API

std::vector<double> RGrid::values() const {
  if (count < 1 || !(max >= min) || min < 0.0) throw Error(ErrorCode::BadParam, "grid needs count >= 1 and 0 <= min <= max");
  std::vector<double> v;
  if (count == 1) return {min};
  for (int i = 0; i < count; ++i) v.push_back(min + (max - min) * i / (count - 1));
  return v;
}

RateGain eval_pair(const CQEnsemble& e, const AuxChannel& w) {
  if (w.in_size() != static_cast<int>(e.size())) {
    throw Error(ErrorCode::SizeMismatch, "channel input size does not match the alphabet");
  }
  const MutualInfoPair v = ChannelObjective(e).evaluate(w.matrix());
  return {v.iux - v.iuq, v.iuq};
}

LagrangePoint maximize_lagrangian(const CQEnsemble& e, double s, const SolverConfig& cfg, int point_index,
                                  const AuxChannel* warm) {
  if (!(s >= 0.0)) throw Error(ErrorCode::BadParam, "slope must be nonnegative");
  const ChannelObjective obj(e);
  const Eigen::MatrixXd* w = warm ? &warm->matrix() : nullptr;
  const detail::MultiStartResult r = detail::run_lagrangian(obj, s, cfg, point_index, w);
  const AuxChannel best(r.optima[r.best]);
  const MutualInfoPair v = obj.evaluate(best.matrix());
  return {s, v.iux - v.iuq, v.iuq, best, r.converged};
}

CurvePoint solve_dstar(const CQEnsemble& e, double rate, const SolverConfig& cfg) {
  if (!(rate >= 0.0)) throw Error(ErrorCode::BadParam, "rate must be nonnegative");
  detail::CurveEngine engine(e, cfg);
  engine.bracket(rate);
  return engine.at(rate);
}

TradeoffCurve trace_curve(const CQEnsemble& e, const RGrid& grid, const SolverConfig& cfg) {
  const std::vector<double> rs = grid.values();
  detail::CurveEngine engine(e, cfg);
  const double spacing = rs.size() > 1 ? (rs.back() - rs.front()) / static_cast<double>(rs.size() - 1) : 0.05;
  engine.sweep(rs.back(), std::max(spacing, 1e-3));
  // Supporting lines at every grid rate first, so each point is assembled
  // from the full posterior pool.
  for (double r : rs) engine.bracket(r);
  TradeoffCurve curve;
  curve.ensemble_id = e.label();
  curve.chi = engine.chi();
  curve.sw = sw_point(e);
  for (double r : rs) curve.points.push_back(engine.at(r));
  curve.support = engine.support();
  curve.flags = engine.flags();
  return curve;
}

CurveReport check_curve(const TradeoffCurve& c, double slack) {
  CurveReport rep;
  const auto& pts = c.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].distilled > c.chi + 1e-6) rep.bounded = false;
    if (i == 0) continue;
    if (!(pts[i].comm_rate > pts[i - 1].comm_rate)) rep.increasing_r = false;
    if (pts[i].distilled < pts[i - 1].distilled - 1e-6) rep.monotone = false;
    if (i + 1 < pts.size()) {
      const double r0 = pts[i - 1].comm_rate, r1 = pts[i].comm_rate, r2 = pts[i + 1].comm_rate;
      const double chord = pts[i - 1].distilled + (pts[i + 1].distilled - pts[i - 1].distilled) * (r1 - r0) / (r2 - r0);
      const double d2 = 2.0 * (chord - pts[i].distilled);
      rep.max_second_diff = std::max(rep.max_second_diff, d2);
      rep.max_abs_second_diff = std::max(rep.max_abs_second_diff, std::abs(d2));
      if (d2 > slack) rep.concave = false;
    }
  }
  return rep;
}

AdditivityReport check_additivity(const CQEnsemble& e1, const CQEnsemble& e2, double rate, const SolverConfig& cfg) {
  if (e1.size() * e2.size() > 6) {
    throw Error(ErrorCode::EnvelopeExceeded, "additivity check supports |X1||X2| <= 6");
  }
  if (!(rate >= 0.0)) throw Error(ErrorCode::BadParam, "rate must be nonnegative");
  AdditivityReport rep;
  rep.rate = rate;
  rep.joint = solve_dstar(tensor_product(e1, e2), rate, cfg).distilled;

  detail::CurveEngine c1(e1, cfg), c2(e2, cfg);
  c1.sweep(rate, 0.02);
  c2.sweep(rate, 0.02);
  auto split = [&](double r1) { return c1.at(r1).distilled + c2.at(rate - r1).distilled; };
  // The split objective is concave in r1: coarse scan, then golden section.
  const int coarse = 40;
  int best_k = 0;
  double best = -1.0;
  for (int k = 0; k <= coarse; ++k) {
    const double v = split(rate * k / coarse);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  double lo = rate * std::max(best_k - 1, 0) / coarse, hi = rate * std::min(best_k + 1, coarse) / coarse;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = split(x1), f2 = split(x2);
  for (int it = 0; it < 40 && hi - lo > 1e-7; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = split(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = split(x1);
    }
  }
  rep.best_r1 = rate * best_k / coarse;
  rep.split = best;
  if (std::max(f1, f2) > best) {
    rep.split = std::max(f1, f2);
    rep.best_r1 = f1 > f2 ? x1 : x2;
  }
  rep.gap = rep.joint - rep.split;
  return rep;
}

std::vector<RateGain> uniform_curve_closed_form(const std::vector<double>& lambdas) {
  constexpr double kLog2e = std::numbers::log2e;
  std::vector<RateGain> out;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw Error(ErrorCode::DomainError, "lambda must be positive");
    double a, frac, logterm;
    if (lam > 700.0) {
      a = 1.0 / lam;
      frac = 0.0;
      logterm = std::log(lam);
    } else {
      const double em1 = std::expm1(lam);
      a = 1.0 / lam - 1.0 / em1;
      frac = lam / em1;
      logterm = std::log(lam / -std::expm1(-lam));
    }
    if (lam < 1e-3) a = 0.5 - lam / 12.0;
    a = std::clamp(a, 0.0, 1.0);
    const double h = binary_entropy(a);
    const double r = h - 1.0 + kLog2e * (frac - 1.0 + logterm);
    out.push_back({std::max(r, 0.0), 1.0 - h});
  }
  return out;
}

double concave_envelope_at(const std::vector<RateGain>& pts, double r) {
  std::vector<RateGain> sorted = pts;
  std::sort(sorted.begin(), sorted.end(), [](const RateGain& a, const RateGain& b) {
    return a.rate < b.rate || (a.rate == b.rate && a.gain > b.gain);
  });
  std::vector<RateGain> hull;
  for (const auto& p : sorted) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      if ((a.rate - o.rate) * (p.gain - o.gain) - (a.gain - o.gain) * (p.rate - o.rate) >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    if (!hull.empty() && hull.back().rate == p.rate) continue;
    hull.push_back(p);
  }
  if (hull.empty()) return 0.0;
  if (r <= hull.front().rate) return hull.front().gain;
  double best = hull.front().gain;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    best = std::max(best, hull[k].gain);
    if (r >= hull[k].rate && r <= hull[k + 1].rate) {
      const double t = (r - hull[k].rate) / (hull[k + 1].rate - hull[k].rate);
      return std::max(best, hull[k].gain + t * (hull[k + 1].gain - hull[k].gain));
    }
  }
  return std::max(best, hull.back().gain);
}

}  // namespace crdist
