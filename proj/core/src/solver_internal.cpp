#include "solver_internal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace crdist::detail {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t point, std::uint64_t start) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(point >> 32),
                    static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(start >> 32)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd dirichlet_channel(int nx, int nu, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::MatrixXd q(nx, nu);
  for (int x = 0; x < nx; ++x) {
    for (int u = 0; u < nu; ++u) q(x, u) = expo(rng) + 1e-300;
    q.row(x) /= q.row(x).sum();
  }
  return q;
}

Eigen::MatrixXd smooth_channel(const Eigen::MatrixXd& q, double weight) {
  return (1.0 - weight) * q + Eigen::MatrixXd::Constant(q.rows(), q.cols(), weight / static_cast<double>(q.cols()));
}

Eigen::MatrixXd snap_channel(const Eigen::MatrixXd& q, double cut) {
  Eigen::MatrixXd s = q;
  for (Eigen::Index x = 0; x < s.rows(); ++x) {
    for (Eigen::Index u = 0; u < s.cols(); ++u)
      if (s(x, u) < cut) s(x, u) = 0.0;
    const double sum = s.row(x).sum();
    if (sum > 0.0) {
      s.row(x) /= sum;
    } else {
      s.row(x) = q.row(x);
    }
  }
  return s;
}

AscentResult mirror_ascent(const ChannelFn& f, const std::vector<double>& p, Eigen::MatrixXd q0, int max_iters,
                           int window, double rel_tol) {
  const Eigen::Index nx = q0.rows(), nu = q0.cols();
  AscentResult res;
  res.q = std::move(q0);
  Eigen::MatrixXd grad(nx, nu), gtrial(nx, nu), trial(nx, nu);
  res.value = f(res.q, &grad);
  double eta = 1.0;
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(max_iters) + 1);
  history.push_back(res.value);

  for (int it = 0; it < max_iters; ++it) {
    bool accepted = false;
    for (int halving = 0; halving < 60 && !accepted; ++halving) {
      for (Eigen::Index x = 0; x < nx; ++x) {
        if (p[x] <= 0.0) {
          trial.row(x) = res.q.row(x);
          continue;
        }
        double gmax = -std::numeric_limits<double>::infinity();
        for (Eigen::Index u = 0; u < nu; ++u)
          if (res.q(x, u) > 0.0) gmax = std::max(gmax, grad(x, u));
        double sum = 0.0;
        for (Eigen::Index u = 0; u < nu; ++u) {
          const double v = res.q(x, u) > 0.0 ? res.q(x, u) * std::exp(eta * (grad(x, u) - gmax) / p[x]) : 0.0;
          trial(x, u) = v;
          sum += v;
        }
        trial.row(x) /= sum;
      }
      const double v = f(trial, &gtrial);
      if (v >= res.value) {
        accepted = true;
        res.q.swap(trial);
        grad.swap(gtrial);
        res.value = v;
        eta = std::min(eta * 1.5, 1e6);
      } else {
        eta *= 0.5;
      }
    }
    res.iters = it + 1;
    history.push_back(res.value);
    if (!accepted) {
      // No ascent direction survives round-off: a stationary point.
      res.converged = true;
      break;
    }
    if (it + 1 >= window) {
      const double old = history[history.size() - 1 - static_cast<std::size_t>(window)];
      if (std::abs(res.value - old) <= rel_tol * std::max(1.0, std::abs(res.value))) {
        res.converged = true;
        break;
      }
    }
  }
  return res;
}

void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

AuxChannel time_share(const AuxChannel& a, const AuxChannel& b, double lambda) {
  const Eigen::Index nx = a.matrix().rows();
  std::vector<Eigen::VectorXd> cols;
  auto add = [&](const Eigen::MatrixXd& m, double w) {
    if (w <= 0.0) return;
    for (Eigen::Index u = 0; u < m.cols(); ++u)
      if (m.col(u).maxCoeff() > 0.0) cols.push_back(w * m.col(u));
  };
  add(a.matrix(), 1.0 - lambda);
  add(b.matrix(), lambda);
  Eigen::MatrixXd q(nx, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) q.col(static_cast<Eigen::Index>(k)) = cols[k];
  for (Eigen::Index x = 0; x < nx; ++x) q.row(x) /= q.row(x).sum();
  return AuxChannel(q);
}

AuxChannel pad_outputs(const Eigen::MatrixXd& q, int nu) {
  if (q.cols() >= nu) return AuxChannel(q);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q.rows(), nu);
  out.leftCols(q.cols()) = q;
  return AuxChannel(out);
}

}  // namespace crdist::detail
