#include "crdist/channel_objective.hpp"

#include <cmath>

#include "crdist/error.hpp"
#include "crdist/info.hpp"

namespace crdist {

namespace {

constexpr double kLogFloor = 1e-300;

double xlog2x(double v) { return v > 0.0 ? v * std::log2(v) : 0.0; }

}  // namespace

ChannelObjective::ChannelObjective(const CQEnsemble& e, Path path)
    : nx_(static_cast<int>(e.size())),
      dim_(e.dim()),
      qubit_(path == Path::Auto && e.dim() == 2),
      p_(e.probs().values()),
      h_avg_(vn_entropy_of(e.average_state())) {
  rho_.reserve(nx_);
  for (const auto& s : e.states()) rho_.push_back(s.matrix());
  if (qubit_) {
    for (const auto& r : rho_) {
      // rho = (1 + x X + y Y + z Z) / 2
      bloch_.emplace_back(2.0 * r(0, 1).real(), -2.0 * r(0, 1).imag(), (r(0, 0) - r(1, 1)).real());
    }
  }
}

// Entropy of the normalized mixture sum_x weights[x] rho_x / mass. When the
// gradient outputs are requested the matrix log (generic path) or its Bloch
// form log2 rho = a 1 + c (n . sigma) (qubit path) is returned as well.
double ChannelObjective::column_entropy(const double* weights, double mass, CMatrix* log_out,
                                        Eigen::Vector3d* bloch_dir, double* log_a, double* log_c) const {
  if (qubit_) {
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (int x = 0; x < nx_; ++x)
      if (weights[x] != 0.0) b += weights[x] * bloch_[x];
    b /= mass;
    const double t = std::min(b.norm(), 1.0);
    const double lp = (1.0 + t) / 2.0, lm = (1.0 - t) / 2.0;
    if (bloch_dir) {
      const double log_p = std::log2(std::max(lp, kLogFloor));
      const double log_m = std::log2(std::max(lm, kLogFloor));
      *log_a = 0.5 * (log_p + log_m);
      *log_c = 0.5 * (log_p - log_m);
      *bloch_dir = t > 1e-15 ? Eigen::Vector3d(b / t) : Eigen::Vector3d::Zero();
    }
    return std::max(-(xlog2x(lp) + xlog2x(lm)), 0.0);
  }
  CMatrix m = CMatrix::Zero(dim_, dim_);
  for (int x = 0; x < nx_; ++x)
    if (weights[x] != 0.0) m += weights[x] * rho_[x];
  m /= mass;
  if (!log_out) return vn_entropy_of(m);
  const Spectrum s = eig_hermitian(m);
  RVector w = s.values;
  RVector lg(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) < 0.0 && w(k) >= -1e-10) w(k) = 0.0;
    lg(k) = std::log2(std::max(w(k), kLogFloor));
  }
  *log_out = s.vectors * lg.asDiagonal() * s.vectors.adjoint();
  return entropy_of_spectrum(w);
}

MutualInfoPair ChannelObjective::column(const double* c) const {
  std::vector<double> w(nx_);
  double pu = 0.0;
  for (int x = 0; x < nx_; ++x) {
    w[x] = p_[x] * c[x];
    pu += w[x];
  }
  if (pu <= 0.0) return {0.0, 0.0};
  double iux = 0.0;
  for (int x = 0; x < nx_; ++x)
    if (w[x] > 0.0) iux += w[x] * std::log2(c[x] / pu);
  const double h = column_entropy(w.data(), pu, nullptr, nullptr, nullptr, nullptr);
  return {iux, pu * (h_avg_ - h)};
}

MutualInfoPair ChannelObjective::posterior_terms(const double* pi) const {
  double kl = 0.0;
  for (int x = 0; x < nx_; ++x)
    if (pi[x] > 0.0) kl += pi[x] * std::log2(pi[x] / p_[x]);
  const double h = column_entropy(pi, 1.0, nullptr, nullptr, nullptr, nullptr);
  return {std::max(kl, 0.0), h_avg_ - h};
}

MutualInfoPair ChannelObjective::evaluate(const Eigen::MatrixXd& q) const {
  if (q.rows() != nx_) throw Error(ErrorCode::SizeMismatch, "channel rows differ from the alphabet size");
  MutualInfoPair total{0.0, h_avg_};
  for (Eigen::Index u = 0; u < q.cols(); ++u) {
    const MutualInfoPair c = column(q.col(u).data());
    double pu = 0.0;
    for (int x = 0; x < nx_; ++x) pu += p_[x] * q(x, u);
    total.iux += c.iux;
    total.iuq += c.iuq - pu * h_avg_;
  }
  return total;
}

MutualInfoPair ChannelObjective::evaluate(const Eigen::MatrixXd& q, Eigen::MatrixXd& grad_iux,
                                          Eigen::MatrixXd& grad_iuq) const {
  if (q.rows() != nx_) throw Error(ErrorCode::SizeMismatch, "channel rows differ from the alphabet size");
  const Eigen::Index nu = q.cols();
  grad_iux.setZero(nx_, nu);
  grad_iuq.setZero(nx_, nu);
  MutualInfoPair total{0.0, h_avg_};
  std::vector<double> w(nx_);
  CMatrix log_rho;
  Eigen::Vector3d dir;
  double la = 0.0, lc = 0.0;
  for (Eigen::Index u = 0; u < nu; ++u) {
    double pu = 0.0;
    for (int x = 0; x < nx_; ++x) {
      w[x] = p_[x] * q(x, u);
      pu += w[x];
    }
    if (pu <= 0.0) {
      // Empty column: I(U;X) gradient diverges towards -inf, I(U;Q)'s is
      // finite but irrelevant since the mirror step never revives zeros.
      for (int x = 0; x < nx_; ++x) grad_iux(x, u) = p_[x] * std::log2(kLogFloor);
      continue;
    }
    for (int x = 0; x < nx_; ++x) {
      const double ratio = std::max(q(x, u), kLogFloor) / pu;
      if (w[x] > 0.0) total.iux += w[x] * std::log2(q(x, u) / pu);
      grad_iux(x, u) = p_[x] * std::log2(ratio);
    }
    const double h = column_entropy(w.data(), pu, &log_rho, &dir, &la, &lc);
    total.iuq -= pu * h;
    for (int x = 0; x < nx_; ++x) {
      const double tr = qubit_ ? la + lc * bloch_[x].dot(dir) : trace_product_real(rho_[x], log_rho);
      grad_iuq(x, u) = p_[x] * tr;
    }
  }
  return total;
}

}  // namespace crdist
