#include "crdist/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "crdist/error.hpp"

namespace crdist {

// ---------------------------------------------------------------- ProbVector

ProbVector::ProbVector(std::vector<double> probs, double tol) : p_(std::move(probs)) {
  if (p_.empty()) throw Error(ErrorCode::InvalidState, "empty probability vector");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidState, "negative or NaN probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw Error(ErrorCode::InvalidState, "probabilities sum to " + std::to_string(sum));
  }
}

ProbVector ProbVector::uniform(std::size_t n) { return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n))); }

ProbVector ProbVector::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double& w : weights) {
    w = std::max(w, 0.0);
    sum += w;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::InvalidState, "cannot normalize zero weights");
  for (double& w : weights) w /= sum;
  return ProbVector(std::move(weights));
}

// ---------------------------------------------------------------- CQEnsemble

CQEnsemble::CQEnsemble(ProbVector probs, std::vector<DensityMatrix> states, std::string label)
    : dim_(0), probs_(std::move(probs)), states_(std::move(states)), label_(std::move(label)) {
  if (probs_.size() != states_.size()) {
    throw Error(ErrorCode::SizeMismatch, "ensemble has " + std::to_string(probs_.size()) +
                                             " probabilities but " + std::to_string(states_.size()) + " states");
  }
  dim_ = states_.front().dim();
  for (const auto& s : states_) {
    if (s.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "ensemble states differ in dimension");
  }
}

CMatrix CQEnsemble::average_state() const {
  CMatrix avg = CMatrix::Zero(dim_, dim_);
  for (std::size_t x = 0; x < size(); ++x) avg += probs_[x] * states_[x].matrix();
  return avg;
}

bool CQEnsemble::all_pure(double tol) const {
  for (const auto& s : states_)
    if (s.purity() < 1.0 - tol) return false;
  return true;
}

// ---------------------------------------------------------------- AuxChannel

AuxChannel::AuxChannel(Eigen::MatrixXd rows, double tol) : m_(std::move(rows)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw Error(ErrorCode::SizeMismatch, "empty channel");
  for (Eigen::Index x = 0; x < m_.rows(); ++x) {
    double sum = 0.0;
    for (Eigen::Index u = 0; u < m_.cols(); ++u) {
      if (!(m_(x, u) >= 0.0)) throw Error(ErrorCode::InvalidState, "channel entry is negative");
      sum += m_(x, u);
    }
    if (std::abs(sum - 1.0) > tol) throw Error(ErrorCode::InvalidState, "channel row does not sum to 1");
  }
}

AuxChannel AuxChannel::identity(int n) { return AuxChannel(Eigen::MatrixXd::Identity(n, n)); }

AuxChannel AuxChannel::identity_padded(int n, int out_size) {
  if (out_size < n) throw Error(ErrorCode::SizeMismatch, "identity_padded needs out_size >= n");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, out_size);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return AuxChannel(m);
}

AuxChannel AuxChannel::constant(int in_size, int out_size) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(in_size, out_size);
  m.col(0).setOnes();
  return AuxChannel(m);
}

AuxChannel AuxChannel::binary_symmetric(double flip) {
  if (!(flip >= 0.0 && flip <= 1.0)) throw Error(ErrorCode::DomainError, "flip probability outside [0,1]");
  Eigen::MatrixXd m(2, 2);
  m << 1.0 - flip, flip, flip, 1.0 - flip;
  return AuxChannel(m);
}

// ---------------------------------------------------------------- states

BipartiteState::BipartiteState(int a, int b, DensityMatrix s) : dim_a(a), dim_b(b), state(std::move(s)) {
  if (a <= 0 || b <= 0 || state.dim() != a * b) {
    throw Error(ErrorCode::DimensionMismatch, "bipartite state dimension " + std::to_string(state.dim()) +
                                                  " != " + std::to_string(a) + "*" + std::to_string(b));
  }
}

BipartiteState BipartiteState::from_ket(int dim_a, int dim_b, const CVector& ket) {
  return BipartiteState(dim_a, dim_b, DensityMatrix::from_ket(ket));
}

CMatrix BipartiteState::reduced_a() const { return partial_trace(state.matrix(), dim_a, dim_b, Keep::A); }
CMatrix BipartiteState::reduced_b() const { return partial_trace(state.matrix(), dim_a, dim_b, Keep::B); }

std::vector<int> EhsState::register_dims() const {
  std::vector<int> dims = classical_dims;
  dims.push_back(quantum_dim);
  return dims;
}

EhsState ehs_embed(const CQEnsemble& e) {
  const int nx = static_cast<int>(e.size());
  const int d = e.dim();
  CMatrix m = CMatrix::Zero(nx * d, nx * d);
  for (int x = 0; x < nx; ++x) m.block(x * d, x * d, d, d) = e.probs()[x] * e.state(x).matrix();
  return EhsState{{nx}, d, DensityMatrix(m)};
}

EhsState extend_with_channel(const CQEnsemble& e, const AuxChannel& w) {
  const int nx = static_cast<int>(e.size());
  if (w.in_size() != nx) {
    throw Error(ErrorCode::SizeMismatch, "channel input size " + std::to_string(w.in_size()) +
                                             " != alphabet size " + std::to_string(nx));
  }
  const int nu = w.out_size();
  const int d = e.dim();
  const int n = nu * nx * d;
  CMatrix m = CMatrix::Zero(n, n);
  for (int u = 0; u < nu; ++u)
    for (int x = 0; x < nx; ++x) {
      const double weight = e.probs()[x] * w(x, u);
      if (weight == 0.0) continue;
      const int off = (u * nx + x) * d;
      m.block(off, off, d, d) = weight * e.state(x).matrix();
    }
  return EhsState{{nu, nx}, d, DensityMatrix(m)};
}

CQEnsemble measure_ensemble(const BipartiteState& rho, const Povm& m) { return measure_ensemble(rho, m, nullptr); }

CQEnsemble measure_ensemble(const BipartiteState& rho, const Povm& m, std::vector<int>* kept_outcomes) {
  if (m.dim() != rho.dim_a) {
    throw Error(ErrorCode::InvalidPovm, "POVM acts on dimension " + std::to_string(m.dim()) +
                                            ", Alice holds " + std::to_string(rho.dim_a));
  }
  const CMatrix id_b = CMatrix::Identity(rho.dim_b, rho.dim_b);
  std::vector<double> weights;
  std::vector<CMatrix> conditional;
  if (kept_outcomes) kept_outcomes->clear();
  for (std::size_t x = 0; x < m.size(); ++x) {
    const CMatrix root = tensor(mat_sqrt_psd(m[x]), id_b);
    const CMatrix post = root * rho.state.matrix() * root;
    const CMatrix reduced = partial_trace(post, rho.dim_a, rho.dim_b, Keep::B);
    const double px = reduced.trace().real();
    if (px < 1e-12) continue;
    weights.push_back(px);
    conditional.push_back(reduced / px);
    if (kept_outcomes) kept_outcomes->push_back(static_cast<int>(x));
  }
  std::vector<DensityMatrix> states;
  states.reserve(conditional.size());
  for (const auto& c : conditional) states.emplace_back(c, 1e-9);
  return CQEnsemble(ProbVector::normalized(std::move(weights)), std::move(states));
}

CQEnsemble tensor_product(const CQEnsemble& e1, const CQEnsemble& e2) {
  std::vector<double> probs;
  std::vector<DensityMatrix> states;
  for (std::size_t x1 = 0; x1 < e1.size(); ++x1)
    for (std::size_t x2 = 0; x2 < e2.size(); ++x2) {
      probs.push_back(e1.probs()[x1] * e2.probs()[x2]);
      states.emplace_back(tensor(e1.state(x1).matrix(), e2.state(x2).matrix()));
    }
  std::string label;
  if (!e1.label().empty() || !e2.label().empty()) label = e1.label() + "*" + e2.label();
  return CQEnsemble(ProbVector::normalized(std::move(probs)), std::move(states), label);
}

BipartiteState tensor_product(const BipartiteState& rho, const BipartiteState& sigma) {
  const CMatrix joint = tensor(rho.state.matrix(), sigma.state.matrix());
  // factors in (A, B, A', B') order; regroup as (A, A', B, B').
  const int dims[] = {rho.dim_a, rho.dim_b, sigma.dim_a, sigma.dim_b};
  const int perm[] = {0, 2, 1, 3};
  return BipartiteState(rho.dim_a * sigma.dim_a, rho.dim_b * sigma.dim_b,
                        DensityMatrix(permute_registers(joint, dims, perm)));
}

BipartiteState ehs_bipartite(const CQEnsemble& e) {
  const EhsState s = ehs_embed(e);
  return BipartiteState(static_cast<int>(e.size()), e.dim(), s.state);
}

BipartiteState swapped_bipartite(const CQEnsemble& e) {
  const int nx = static_cast<int>(e.size());
  const int d = e.dim();
  CMatrix m = CMatrix::Zero(nx * d, nx * d);
  for (int x = 0; x < nx; ++x) {
    CMatrix label = CMatrix::Zero(nx, nx);
    label(x, x) = 1.0;
    m += e.probs()[x] * tensor(e.state(x).matrix(), label);
  }
  return BipartiteState(d, nx, DensityMatrix(m));
}

// ---------------------------------------------------------------- named

namespace {

CVector ket2(cplx a, cplx b) {
  CVector v(2);
  v << a, b;
  return v;
}

CQEnsemble pure_ensemble(const std::vector<CVector>& kets, std::string label) {
  std::vector<DensityMatrix> states;
  for (const auto& k : kets) states.push_back(DensityMatrix::from_ket(k));
  return CQEnsemble(ProbVector::uniform(kets.size()), std::move(states), std::move(label));
}

}  // namespace

std::vector<std::string> named_ensemble_ids() {
  return {"two_state", "three_state", "bb84", "uniform_sphere", "orthogonal_pair"};
}

CQEnsemble named_ensemble(std::string_view name, const std::vector<double>& params,
                          std::vector<std::string>* warnings) {
  const double r = 1.0 / std::numbers::sqrt2;
  if (name == "two_state") {
    return pure_ensemble({ket2(1.0, 0.0), ket2(r, r)}, "two_state");
  }
  if (name == "orthogonal_pair") {
    return pure_ensemble({ket2(1.0, 0.0), ket2(0.0, 1.0)}, "orthogonal_pair");
  }
  if (name == "three_state") {
    CVector a = CVector::Zero(3), b = CVector::Zero(3), c = CVector::Zero(3);
    a(0) = 1.0;
    b(0) = r;
    b(1) = r;
    c(2) = 1.0;
    return pure_ensemble({a, b, c}, "three_state");
  }
  if (name == "bb84") {
    const double theta = params.empty() ? std::numbers::pi / 8.0 : params.front();
    if (!std::isfinite(theta)) throw Error(ErrorCode::BadParam, "bb84 angle must be finite");
    if ((theta <= 0.0 || theta > std::numbers::pi / 4.0) && warnings) {
      warnings->push_back("bb84 angle " + std::to_string(theta) + " outside (0, pi/4]");
    }
    const double c = std::cos(theta), s = std::sin(theta);
    return pure_ensemble({ket2(1.0, 0.0), ket2(c, s), ket2(0.0, 1.0), ket2(-s, c)}, "bb84");
  }
  if (name == "uniform_sphere") {
    const double np = params.empty() ? 64.0 : params.front();
    if (!(np >= 1.0) || np != std::floor(np)) throw Error(ErrorCode::BadParam, "uniform_sphere needs an integer N >= 1");
    const int n = static_cast<int>(np);
    std::vector<CVector> kets;
    kets.reserve(n);
    const double golden = std::numbers::pi * (1.0 + std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double polar = std::acos(1.0 - 2.0 * (i + 0.5) / n);
      const double azimuth = golden * i;
      kets.push_back(ket2(std::cos(polar / 2.0), std::polar(std::sin(polar / 2.0), azimuth)));
    }
    return pure_ensemble(kets, "uniform_sphere");
  }
  throw Error(ErrorCode::UnknownName, "no named ensemble '" + std::string(name) + "'");
}

}  // namespace crdist
