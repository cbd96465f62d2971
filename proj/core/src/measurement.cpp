#include "crdist/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crdist/error.hpp"
#include "crdist/info.hpp"
#include "solver_internal.hpp"

namespace crdist {

namespace {

constexpr double kLogFloor = 1e-14;

CVector haar_ket(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

// Block (i, j) of a (da*db)-square matrix.
inline auto block(const CMatrix& m, int db, int i, int j) { return m.block(i * db, j * db, db, db); }

// Tr(a b) for complex matrices.
inline cplx trace_product(const CMatrix& a, const CMatrix& b) { return (a.array() * b.transpose().array()).sum(); }

}  // namespace

Povm random_povm(int dim, int k, std::mt19937_64& rng) {
  if (k < 1 || dim < 1) throw Error(ErrorCode::BadParam, "random_povm needs dim >= 1 and k >= 1");
  std::vector<CVector> kets;
  for (int i = 0; i < k; ++i) kets.push_back(haar_ket(dim, rng));
  return povm_from_kets(kets);
}

// ------------------------------------------------------------ objective

PovmObjective::PovmObjective(const BipartiteState& rho)
    : da_(rho.dim_a), db_(rho.dim_b), rho_(rho.state.matrix()), h_b_(vn_entropy_of(rho.reduced_b())) {}

double PovmObjective::value(const Povm& m) const {
  if (m.dim() != da_) throw Error(ErrorCode::InvalidPovm, "POVM dimension differs from Alice's");
  double cond = 0.0;
  for (const auto& e : m.elements()) {
    CMatrix tau = CMatrix::Zero(db_, db_);
    for (int a = 0; a < da_; ++a)
      for (int a2 = 0; a2 < da_; ++a2)
        if (e(a, a2) != 0.0) tau += e(a, a2) * block(rho_, db_, a2, a);
    const double p = tau.trace().real();
    if (p < 1e-15) continue;
    cond += p * vn_entropy_of(tau / p);
  }
  return std::max(h_b_ - cond, 0.0);
}

double PovmObjective::value(const std::vector<CVector>& kets) const { return eval(kets, nullptr); }

double PovmObjective::value_and_gradient(const std::vector<CVector>& kets, std::vector<CVector>& grad) const {
  return eval(kets, &grad);
}

double PovmObjective::eval(const std::vector<CVector>& kets, std::vector<CVector>* grad) const {
  const bool want_grad = grad != nullptr;
  const int k = static_cast<int>(kets.size());
  CMatrix s = CMatrix::Zero(da_, da_);
  for (const auto& v : kets) s += v * v.adjoint();
  const Spectrum sp = eig_hermitian(s);
  RVector inv_root(da_);
  for (int i = 0; i < da_; ++i) inv_root(i) = 1.0 / std::sqrt(std::max(sp.values(i), 1e-300));
  const CMatrix t = sp.vectors * inv_root.asDiagonal() * sp.vectors.adjoint();

  std::vector<CMatrix> g(k);
  double cond = 0.0;
  for (int x = 0; x < k; ++x) {
    const CVector w = t * kets[x];
    CMatrix tau = CMatrix::Zero(db_, db_);
    for (int a = 0; a < da_; ++a)
      for (int a2 = 0; a2 < da_; ++a2) tau += (w(a) * std::conj(w(a2))) * block(rho_, db_, a2, a);
    const double p = tau.trace().real();
    g[x] = CMatrix::Zero(da_, da_);
    if (p < 1e-15) continue;
    const Spectrum st = eig_hermitian(tau / p, 1e-6);
    RVector lam = st.values, lg(db_);
    for (int b = 0; b < db_; ++b) {
      if (lam(b) < 0.0) lam(b) = 0.0;
      lg(b) = std::log2(std::max(lam(b), kLogFloor));
    }
    cond += p * entropy_of_spectrum(lam);
    if (!want_grad) continue;
    // d chi / d E_x = Tr_B[rho (1 (x) log2 rho_x)]
    const CMatrix l = st.vectors * lg.asDiagonal() * st.vectors.adjoint();
    for (int a = 0; a < da_; ++a)
      for (int a2 = 0; a2 < da_; ++a2) g[x](a, a2) = trace_product(block(rho_, db_, a, a2), l);
  }
  const double value = h_b_ - cond;
  if (!want_grad) return value;

  // Chain rule through E_x = T v v^dag T with T = S^{-1/2}: direct term
  // T G T v plus the term through S, N v, where N is the adjoint of the
  // Frechet derivative of S^{-1/2} applied to K.
  CMatrix kmat = CMatrix::Zero(da_, da_);
  for (int x = 0; x < k; ++x) {
    const CMatrix vv = kets[x] * kets[x].adjoint();
    kmat += vv * t * g[x] + g[x] * t * vv;
  }
  CMatrix kp = sp.vectors.adjoint() * kmat * sp.vectors;
  for (int i = 0; i < da_; ++i)
    for (int j = 0; j < da_; ++j) {
      const double si = std::max(sp.values(i), 1e-300), sj = std::max(sp.values(j), 1e-300);
      double gamma;
      if (std::abs(si - sj) <= 1e-10 * std::max(si, sj)) {
        gamma = -0.5 * std::pow(si, -1.5);
      } else {
        gamma = (1.0 / std::sqrt(si) - 1.0 / std::sqrt(sj)) / (si - sj);
      }
      kp(i, j) *= gamma;
    }
  const CMatrix n = sp.vectors * kp * sp.vectors.adjoint();
  grad->resize(k);
  for (int x = 0; x < k; ++x) (*grad)[x] = 2.0 * (t * g[x] * t * kets[x] + n * kets[x]);
  return value;
}

// ------------------------------------------------------------ optimizer

namespace {

struct KetAscent {
  std::vector<CVector> kets;
  double value;
  bool converged;
};

KetAscent ascend(const PovmObjective& f, std::vector<CVector> kets, const MeasureConfig& cfg) {
  std::vector<CVector> grad, gtrial, trial(kets.size());
  double val = f.value_and_gradient(kets, grad);
  double eta = 0.1;
  std::vector<double> history{val};
  bool converged = false;
  for (int it = 0; it < cfg.max_iters; ++it) {
    bool accepted = false;
    for (int h = 0; h < 60 && !accepted; ++h) {
      for (std::size_t x = 0; x < kets.size(); ++x) trial[x] = kets[x] + eta * grad[x];
      double v;
      try {
        v = f.value_and_gradient(trial, gtrial);
      } catch (const Error&) {
        v = -1.0;
      }
      if (v >= val) {
        accepted = true;
        kets.swap(trial);
        grad.swap(gtrial);
        val = v;
        eta = std::min(eta * 1.5, 1e3);
      } else {
        eta *= 0.5;
      }
    }
    history.push_back(val);
    if (!accepted) {
      converged = true;
      break;
    }
    if (it + 1 >= cfg.stall_window) {
      const double old = history[history.size() - 1 - static_cast<std::size_t>(cfg.stall_window)];
      if (std::abs(val - old) <= cfg.rel_tol * std::max(1.0, std::abs(val))) {
        converged = true;
        break;
      }
    }
  }
  return {std::move(kets), val, converged};
}

// Normalized kets w_x = S^{-1/2} v_x with zero outcomes dropped and
// parallel ones merged.
std::vector<CVector> canonical_kets(const std::vector<CVector>& kets) {
  CMatrix s = CMatrix::Zero(kets.front().size(), kets.front().size());
  for (const auto& v : kets) s += v * v.adjoint();
  const CMatrix t = inv_sqrt_psd(s, 1e-300);
  std::vector<CVector> out;
  for (const auto& v : kets) {
    CVector w = t * v;
    const double n2 = w.squaredNorm();
    if (n2 < 1e-12) continue;
    bool merged = false;
    for (auto& o : out) {
      const double on2 = o.squaredNorm();
      const double overlap = std::abs(o.dot(w)) / std::sqrt(on2 * n2);
      if (overlap > 1.0 - 1e-10) {
        o *= std::sqrt((on2 + n2) / on2);
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(w);
  }
  return out;
}

}  // namespace

MeasurementReport d1_infty(const BipartiteState& rho, const MeasureConfig& cfg,
                           const std::vector<std::vector<CVector>>& extra_starts) {
  const int da = rho.dim_a;
  if (da > 4) throw Error(ErrorCode::EnvelopeExceeded, "measurement search supports dim_a <= 4");
  const int k = cfg.outcomes > 0 ? cfg.outcomes : da * da;
  const PovmObjective f(rho);

  std::vector<std::vector<CVector>> starts = extra_starts;
  // Computational basis and the eigenbasis of Alice's marginal, each
  // outcome repeated to fill k slots.
  auto basis_start = [&](const CMatrix& u) {
    std::vector<CVector> kets;
    for (int x = 0; x < k; ++x) kets.push_back(u.col(x % da));
    return kets;
  };
  starts.push_back(basis_start(CMatrix::Identity(da, da)));
  starts.push_back(basis_start(eig_hermitian(rho.reduced_a()).vectors));
  const int structured = static_cast<int>(starts.size());
  for (int i = 0; i < cfg.starts; ++i) {
    auto rng = detail::stream_rng(cfg.seed, 0x4d45u, static_cast<std::uint64_t>(i));
    std::vector<CVector> kets;
    for (int x = 0; x < k; ++x) kets.push_back(haar_ket(da, rng));
    starts.push_back(std::move(kets));
  }

  std::vector<KetAscent> results(starts.size());
  detail::parallel_for(static_cast<int>(starts.size()), cfg.threads, [&](int i) {
    KetAscent r = ascend(f, starts[i], cfg);
    if (i < structured) {
      // Keep the exact start when it beats the optimizer's end point.
      const double v0 = f.value(starts[i]);
      if (v0 > r.value) r = {starts[i], v0, r.converged};
    }
    results[i] = std::move(r);
  });
  int best = 0;
  for (int i = 1; i < static_cast<int>(results.size()); ++i)
    if (results[i].value > results[best].value) best = i;

  MeasurementReport rep;
  rep.kets = canonical_kets(results[best].kets);
  rep.povm = povm_from_kets(rep.kets);
  rep.n_outcomes = static_cast<int>(rep.povm.size());
  rep.value = f.value(rep.povm);
  rep.converged = results[best].converged;
  return rep;
}

MeasurementReport accessible_info(const CQEnsemble& e, const MeasureConfig& cfg) {
  if (e.dim() > 4) throw Error(ErrorCode::EnvelopeExceeded, "accessible information supports d <= 4");
  MeasurementReport rep = d1_infty(swapped_bipartite(e), cfg);
  // Holevo bound as a sanity check on the optimizer.
  if (rep.value > holevo_chi(e) + 1e-9) rep.converged = false;
  return rep;
}

double scan_accessible_info(const CQEnsemble& e, int n_theta, int n_phi) {
  if (e.dim() != 2) throw Error(ErrorCode::BadParam, "the projective scan is for qubit ensembles");
  if (n_theta < 2 || n_phi < 1) throw Error(ErrorCode::BadParam, "scan needs n_theta >= 2, n_phi >= 1");
  auto info = [&](double theta, double phi) {
    const CVector up = (CVector(2) << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)).finished();
    const CVector dn = (CVector(2) << -std::polar(std::sin(theta / 2), -phi), std::cos(theta / 2)).finished();
    const Povm m = Povm(2, {up * up.adjoint(), dn * dn.adjoint()});
    return classical_mutual_info(outcome_joint(e, m));
  };
  const double pi = std::numbers::pi;
  double best = -1.0, bt = 0.0, bp = 0.0;
  for (int j = 0; j < n_phi; ++j) {
    const double phi = n_phi == 1 ? 0.0 : 2.0 * pi * j / n_phi;
    for (int i = 0; i < n_theta; ++i) {
      const double theta = pi * i / (n_theta - 1);
      const double v = info(theta, phi);
      if (v > best) {
        best = v;
        bt = theta;
        bp = phi;
      }
    }
  }
  // Golden-section refinement, one coordinate at a time.
  auto refine = [&](auto&& fn, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
    double fa = fn(a), fb = fn(b);
    for (int it = 0; it < 80; ++it) {
      if (fa < fb) {
        lo = a;
        a = b;
        fa = fb;
        b = lo + r * (hi - lo);
        fb = fn(b);
      } else {
        hi = b;
        b = a;
        fb = fa;
        a = hi - r * (hi - lo);
        fa = fn(a);
      }
    }
    return fa > fb ? std::pair{a, fa} : std::pair{b, fb};
  };
  const double dt = pi / (n_theta - 1);
  const double dp = n_phi == 1 ? 0.0 : 2.0 * pi / n_phi;
  for (int round = 0; round < (n_phi == 1 ? 1 : 4); ++round) {
    auto [t, vt] = refine([&](double th) { return info(th, bp); }, bt - dt, bt + dt);
    if (vt > best) {
      best = vt;
      bt = t;
    }
    if (n_phi > 1) {
      auto [p, vp] = refine([&](double ph) { return info(bt, ph); }, bp - dp, bp + dp);
      if (vp > best) {
        best = vp;
        bp = p;
      }
    }
  }
  return best;
}

C1Report c1_curve(const BipartiteState& rho, const RGrid& grid, const MeasureConfig& mcfg, const SolverConfig& scfg,
                  const std::vector<Povm>& fixed) {
  if (rho.dim_a > 4) throw Error(ErrorCode::EnvelopeExceeded, "measurement search supports dim_a <= 4");
  C1Report rep;
  if (!fixed.empty()) {
    rep.measurements = fixed;
  } else {
    rep.measurements.push_back(d1_infty(rho, mcfg).povm);
    rep.measurements.push_back(Povm::computational(rho.dim_a));
    rep.measurements.push_back(Povm::from_basis(eig_hermitian(rho.reduced_a()).vectors));
    for (int i = 0; i < mcfg.starts; ++i) {
      auto rng = detail::stream_rng(mcfg.seed, 0x4331u, static_cast<std::uint64_t>(i));
      rep.measurements.push_back(random_povm(rho.dim_a, rho.dim_a * rho.dim_a, rng));
    }
  }
  std::vector<TradeoffCurve> curves;
  for (const auto& m : rep.measurements) curves.push_back(trace_curve(measure_ensemble(rho, m), grid, scfg));

  rep.raw = curves.front();
  rep.raw.ensemble_id = "c1";
  rep.measurement_of_point.assign(rep.raw.points.size(), 0);
  for (std::size_t j = 1; j < curves.size(); ++j) {
    rep.raw.chi = std::max(rep.raw.chi, curves[j].chi);
    for (std::size_t i = 0; i < rep.raw.points.size(); ++i) {
      if (curves[j].points[i].distilled > rep.raw.points[i].distilled) {
        rep.raw.points[i] = curves[j].points[i];
        rep.measurement_of_point[i] = static_cast<int>(j);
      }
    }
    for (const auto& f : curves[j].flags) rep.raw.flags.push_back(f);
  }
  std::vector<RateGain> pts{{0.0, 0.0}};
  for (const auto& p : rep.raw.points) pts.push_back({p.comm_rate, p.distilled});
  rep.hull = rep.raw;
  for (auto& p : rep.hull.points) {
    p.distilled = std::max(p.distilled, concave_envelope_at(pts, p.comm_rate));
    p.cr_rate = p.comm_rate + p.distilled;
  }
  return rep;
}

namespace {

std::vector<CVector> product_kets(const std::vector<CVector>& a, const std::vector<CVector>& b) {
  std::vector<CVector> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      CVector v(x.size() * y.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) v.segment(i * y.size(), y.size()) = x(i) * y;
      out.push_back(v);
    }
  return out;
}

AdditivityCheck compare(const BipartiteState& rho, const BipartiteState& sigma, const MeasureConfig& cfg) {
  if (rho.dim_a * sigma.dim_a > 4) throw Error(ErrorCode::EnvelopeExceeded, "joint dim_a must be <= 4");
  AdditivityCheck rep;
  const MeasurementReport r1 = d1_infty(rho, cfg);
  const MeasurementReport r2 = d1_infty(sigma, cfg);
  rep.first = r1.value;
  rep.second = r2.value;
  const BipartiteState joint = tensor_product(rho, sigma);
  const auto witness = product_kets(r1.kets, r2.kets);
  rep.product_witness = PovmObjective(joint).value(witness);
  rep.joint = std::max(d1_infty(joint, cfg, {witness}).value, rep.product_witness);
  rep.gap = rep.joint - (rep.first + rep.second);
  return rep;
}

}  // namespace

AdditivityCheck check_separable_additivity(const SeparableDecomposition& rho, const BipartiteState& sigma,
                                           const MeasureConfig& cfg) {
  return compare(separable_state(rho), sigma, cfg);
}

AdditivityCheck check_pure_additivity(const BipartiteState& psi, const BipartiteState& sigma, const MeasureConfig& cfg) {
  const double purity = psi.state.purity();
  if (purity < 1.0 - 1e-8) throw Error(ErrorCode::NotPure, "purity " + std::to_string(purity));
  AdditivityCheck rep = compare(psi, sigma, cfg);
  rep.entanglement = entanglement_entropy(psi);
  return rep;
}

}  // namespace crdist
