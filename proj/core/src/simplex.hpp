#pragma once

#include <vector>

#include <Eigen/Dense>

namespace crdist::detail {

struct LpResult {
  bool ok = false;
  double value = 0.0;
  Eigen::VectorXd x;
};

/// Dense primal simplex for  max c.x  s.t.  A x = b, x >= 0, started from a
/// caller-supplied feasible basis (column indices, one per row). Dantzig
/// pricing with a switch to Bland's rule after repeated degenerate pivots.
LpResult simplex_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                     std::vector<int> basis, int max_pivots = 20000);

}  // namespace crdist::detail
