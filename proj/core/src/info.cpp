#include "crdist/info.hpp"

#include <cmath>
#include <string>

#include "crdist/error.hpp"

namespace crdist {

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return std::max(h, 0.0);
}

double shannon_entropy(const ProbVector& p) { return shannon_entropy(std::span<const double>(p.values())); }

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::DomainError, "binary_entropy argument " + std::to_string(p));
  const double q[] = {p, 1.0 - p};
  return shannon_entropy(std::span<const double>(q));
}

double holevo_chi(const CQEnsemble& e) {
  double avg = 0.0;
  for (std::size_t x = 0; x < e.size(); ++x) {
    if (e.probs()[x] > 0.0) avg += e.probs()[x] * vn_entropy(e.state(x));
  }
  return std::max(vn_entropy_of(e.average_state()) - avg, 0.0);
}

double cond_entropy_x_given_q(const CQEnsemble& e) {
  return std::max(shannon_entropy(e.probs()) - holevo_chi(e), 0.0);
}

double mutual_info_ux(const ProbVector& p, const AuxChannel& w) {
  if (static_cast<int>(p.size()) != w.in_size()) {
    throw Error(ErrorCode::SizeMismatch, "channel input size does not match the distribution");
  }
  const int nx = w.in_size(), nu = w.out_size();
  std::vector<double> pu(nu, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int u = 0; u < nu; ++u) pu[u] += p[x] * w(x, u);
  double mi = 0.0;
  for (int x = 0; x < nx; ++x)
    for (int u = 0; u < nu; ++u) {
      const double j = p[x] * w(x, u);
      if (j > 0.0) mi += j * std::log2(w(x, u) / pu[u]);
    }
  return std::max(mi, 0.0);
}

double mutual_info_uq(const CQEnsemble& e, const AuxChannel& w) {
  if (static_cast<int>(e.size()) != w.in_size()) {
    throw Error(ErrorCode::SizeMismatch, "channel input size does not match the alphabet");
  }
  const int d = e.dim();
  double cond = 0.0;
  for (int u = 0; u < w.out_size(); ++u) {
    CMatrix rho_u = CMatrix::Zero(d, d);
    double pu = 0.0;
    for (int x = 0; x < w.in_size(); ++x) {
      const double j = e.probs()[x] * w(x, u);
      if (j == 0.0) continue;
      rho_u += j * e.state(x).matrix();
      pu += j;
    }
    if (pu <= 0.0) continue;
    cond += pu * vn_entropy_of(rho_u / pu);
  }
  return std::max(vn_entropy_of(e.average_state()) - cond, 0.0);
}

namespace {

double group_entropy(const EhsState& s, std::span<const int> partition, std::initializer_list<int> groups) {
  std::vector<int> keep;
  for (int r = 0; r < static_cast<int>(partition.size()); ++r)
    for (int g : groups)
      if (partition[r] == g) keep.push_back(r);
  if (keep.empty()) return 0.0;
  const auto dims = s.register_dims();
  return vn_entropy_of(reduce(s.state.matrix(), dims, keep));
}

void check_partition(const EhsState& s, std::span<const int> partition) {
  if (static_cast<int>(partition.size()) != s.register_count()) {
    throw Error(ErrorCode::BadPartition, "partition lists " + std::to_string(partition.size()) + " registers, state has " +
                                             std::to_string(s.register_count()));
  }
  bool has_a = false, has_b = false;
  for (int g : partition) {
    if (g < -1 || g > 2) throw Error(ErrorCode::BadPartition, "group index must be in {-1, 0, 1, 2}");
    has_a |= g == 0;
    has_b |= g == 1;
  }
  if (!has_a || !has_b) throw Error(ErrorCode::BadPartition, "groups A and B must be nonempty");
}

}  // namespace

double cond_mutual_info(const EhsState& s, std::span<const int> partition) {
  check_partition(s, partition);
  return group_entropy(s, partition, {0, 2}) + group_entropy(s, partition, {1, 2}) -
         group_entropy(s, partition, {0, 1, 2}) - group_entropy(s, partition, {2});
}

double mutual_info(const EhsState& s, std::span<const int> partition) {
  check_partition(s, partition);
  return group_entropy(s, partition, {0}) + group_entropy(s, partition, {1}) - group_entropy(s, partition, {0, 1});
}

SwPoint sw_point(const CQEnsemble& e) {
  const double c = shannon_entropy(e.probs());
  const double chi = holevo_chi(e);
  const double r = std::max(c - chi, 0.0);
  return SwPoint{c, r, c - r};
}

double entanglement_entropy(const BipartiteState& psi) {
  const double purity = psi.state.purity();
  if (purity < 1.0 - 1e-8) throw Error(ErrorCode::NotPure, "purity " + std::to_string(purity));
  return vn_entropy_of(psi.reduced_a());
}

double classical_mutual_info(const Eigen::MatrixXd& joint) {
  const Eigen::VectorXd px = joint.rowwise().sum();
  const Eigen::RowVectorXd py = joint.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index x = 0; x < joint.rows(); ++x)
    for (Eigen::Index y = 0; y < joint.cols(); ++y) {
      const double j = joint(x, y);
      if (j > 0.0) mi += j * std::log2(j / (px(x) * py(y)));
    }
  return std::max(mi, 0.0);
}

Eigen::MatrixXd outcome_joint(const CQEnsemble& e, const Povm& m) {
  if (m.dim() != e.dim()) throw Error(ErrorCode::InvalidPovm, "POVM dimension differs from the ensemble's");
  Eigen::MatrixXd j(e.size(), m.size());
  for (std::size_t x = 0; x < e.size(); ++x)
    for (std::size_t y = 0; y < m.size(); ++y)
      j(x, y) = std::max(0.0, e.probs()[x] * trace_product_real(e.state(x).matrix(), m[y]));
  return j;
}

}  // namespace crdist
