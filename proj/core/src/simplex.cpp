#include "simplex.hpp"

#include <cmath>
#include <limits>

namespace crdist::detail {

LpResult simplex_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                     std::vector<int> basis, int max_pivots) {
  const Eigen::Index m = a.rows(), n = a.cols();
  LpResult res;
  Eigen::MatrixXd bmat(m, m);
  for (Eigen::Index i = 0; i < m; ++i) bmat.col(i) = a.col(basis[i]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(bmat);
  if (!lu.isInvertible()) return res;

  // Tableau rows: B^-1 A | B^-1 b.
  Eigen::MatrixXd t(m, n + 1);
  t.leftCols(n) = lu.solve(a);
  t.col(n) = lu.solve(b);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (t(i, n) < -1e-9) return res;
    t(i, n) = std::max(t(i, n), 0.0);
  }
  // Reduced costs c_j - c_B B^-1 a_j.
  Eigen::VectorXd cb(m);
  for (Eigen::Index i = 0; i < m; ++i) cb(i) = c(basis[i]);
  Eigen::RowVectorXd reduced = c.transpose() - cb.transpose() * t.leftCols(n);

  constexpr double kTol = 1e-11;
  int degenerate = 0;
  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    const bool bland = degenerate > 50;
    Eigen::Index enter = -1;
    double best = kTol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (reduced(j) > best) {
        enter = j;
        if (bland) break;
        best = reduced(j);
      }
    }
    if (enter < 0) {
      res.ok = true;
      break;
    }
    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > 1e-12) {
        const double r = t(i, n) / t(i, enter);
        if (r < ratio - 1e-15 || (bland && std::abs(r - ratio) <= 1e-15 && basis[i] < basis[leave])) {
          ratio = r;
          leave = i;
        }
      }
    }
    if (leave < 0) return res;  // unbounded; cannot happen for bounded pools
    degenerate = ratio < 1e-14 ? degenerate + 1 : 0;

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    reduced -= reduced(enter) * t.row(leave).head(n);
    basis[leave] = static_cast<int>(enter);
  }
  // Fresh solve on the final basis to shed accumulated pivot round-off.
  for (Eigen::Index i = 0; i < m; ++i) bmat.col(i) = a.col(basis[i]);
  const Eigen::VectorXd xb = bmat.fullPivLu().solve(b);
  res.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) res.x(basis[i]) = std::max(xb(i), 0.0);
  res.value = c.dot(res.x);
  return res;
}

}  // namespace crdist::detail
