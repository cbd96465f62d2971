#pragma once

// Shared fixtures for the unit tests and the acceptance binary: standard
// states, reference values frozen from independent oracles, and
// finite-difference gradient checks.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "crdist/channel_objective.hpp"
#include "crdist/ensemble_io.hpp"
#include "crdist/ensembles.hpp"
#include "crdist/info.hpp"
#include "crdist/measurement.hpp"

namespace crdist::fixtures {

// Reference values. Each was computed outside this library: closed-form
// eigenvalues, a 200001-point projective scan and word-by-word enumeration
// of typical sets (numpy).
inline constexpr double kChiTwoState = 0.6008760366928562;       // h2((1 + 2^-1/2) / 2)
inline constexpr double kAccTwoState = 0.39912396330714395;      // projective scan
inline constexpr double kH2Third = 0.9182958340544896;           // h2(1/3)
inline constexpr double kMassTwoState[3] = {0.9006675989586225,  // n = 8, delta = 0.15
                                            0.9141419596042528,  // n = 12
                                            0.9273629389099046}; // n = 16
inline constexpr double kUniformD10 = 0.5311483438409483;        // closed form at lambda = 10

inline CVector ket(std::initializer_list<cplx> amps) {
  CVector v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (const auto& a : amps) v[i++] = a;
  return v;
}

inline BipartiteState bell() {
  const double r = 1.0 / std::sqrt(2.0);
  return BipartiteState::from_ket(2, 2, ket({r, 0, 0, r}));
}

/// cos(t)|00> + sin(t)|11>
inline BipartiteState schmidt_pair(double t) {
  return BipartiteState::from_ket(2, 2, ket({std::cos(t), 0, 0, std::sin(t)}));
}

inline BipartiteState product_state() { return BipartiteState::from_ket(2, 2, ket({1, 0, 0, 0})); }

inline CMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

/// Full-rank random density matrix.
inline DensityMatrix random_state(int dim, std::mt19937_64& rng) {
  const CMatrix g = ginibre(dim, dim, rng);
  return DensityMatrix::normalized(g * g.adjoint());
}

inline DensityMatrix random_pure(int dim, std::mt19937_64& rng) {
  return DensityMatrix::from_ket(ginibre(dim, 1, rng).col(0).normalized());
}

/// Separable qubit pair with three product terms.
inline SeparableDecomposition separable_pair() {
  const double r = 1.0 / std::sqrt(2.0);
  SeparableDecomposition d;
  d.weights = {0.5, 0.3, 0.2};
  d.alice = {DensityMatrix::from_ket(ket({1, 0})), DensityMatrix::from_ket(ket({r, r})),
             DensityMatrix::from_ket(ket({0.6, 0.8}))};
  d.bob = {DensityMatrix::from_ket(ket({0.8, 0.6})), DensityMatrix::from_ket(ket({0, 1})),
           DensityMatrix::from_ket(ket({r, -r}))};
  return d;
}

/// Row-stochastic matrix with Dirichlet(1) rows, entries bounded below.
inline Eigen::MatrixXd interior_channel(int rows, int cols, std::mt19937_64& rng, double floor = 0.02) {
  std::exponential_distribution<double> ex(1.0);
  Eigen::MatrixXd q(rows, cols);
  for (int x = 0; x < rows; ++x) {
    double s = 0.0;
    for (int u = 0; u < cols; ++u) s += (q(x, u) = ex(rng) + floor);
    q.row(x) /= s;
  }
  return q;
}

/// Largest relative error between the analytic gradient of
/// G_s = (1 + s) I(U;Q) - s I(U;X) and central differences, over `points`
/// random interior channels.
inline double lagrangian_gradient_error(const CQEnsemble& e, double s, int points, std::uint64_t seed,
                                        ChannelObjective::Path path = ChannelObjective::Path::Auto) {
  const ChannelObjective obj(e, path);
  const int nx = static_cast<int>(e.size()), nu = nx + 1;
  const double h = 1e-5;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  auto g_s = [&](const Eigen::MatrixXd& q) {
    const MutualInfoPair v = obj.evaluate(q);
    return (1.0 + s) * v.iuq - s * v.iux;
  };
  for (int k = 0; k < points; ++k) {
    Eigen::MatrixXd q = interior_channel(nx, nu, rng);
    Eigen::MatrixXd gx, gq;
    obj.evaluate(q, gx, gq);
    const Eigen::MatrixXd analytic = (1.0 + s) * gq - s * gx;
    Eigen::MatrixXd fd(nx, nu);
    for (int x = 0; x < nx; ++x)
      for (int u = 0; u < nu; ++u) {
        Eigen::MatrixXd a = q, b = q;
        a(x, u) += h;
        b(x, u) -= h;
        fd(x, u) = (g_s(a) - g_s(b)) / (2.0 * h);
      }
    worst = std::max(worst, (fd - analytic).norm() / std::max(analytic.norm(), 1e-12));
  }
  return worst;
}

/// Same for the measurement objective I(X;Q) as a function of the POVM
/// kets, on random full-rank two-qubit states.
inline double povm_gradient_error(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const BipartiteState rho(2, 2, random_state(4, rng));
    const PovmObjective obj(rho);
    std::vector<CVector> kets;
    for (int x = 0; x < 4; ++x) kets.push_back(ginibre(2, 1, rng).col(0));
    std::vector<CVector> grad;
    obj.value_and_gradient(kets, grad);
    double num = 0.0, den = 0.0;
    for (int x = 0; x < 4; ++x)
      for (int i = 0; i < 2; ++i)
        for (const cplx dir : {cplx(1, 0), cplx(0, 1)}) {
          auto a = kets, b = kets;
          a[x][i] += h * dir;
          b[x][i] -= h * dir;
          const double fd = (obj.value(a) - obj.value(b)) / (2.0 * h);
          const double an = dir.real() != 0.0 ? grad[x][i].real() : grad[x][i].imag();
          num += (fd - an) * (fd - an);
          den += an * an;
        }
    worst = std::max(worst, std::sqrt(num) / std::max(std::sqrt(den), 1e-12));
  }
  return worst;
}

}  // namespace crdist::fixtures
