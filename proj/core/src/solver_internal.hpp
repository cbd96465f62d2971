#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "crdist/tradeoff.hpp"

namespace crdist::detail {

/// Independent stream for (seed, point, start).
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t point, std::uint64_t start);

/// Row-stochastic matrix with Dirichlet(1) rows.
Eigen::MatrixXd dirichlet_channel(int nx, int nu, std::mt19937_64& rng);

/// Mixes a channel with the uniform one so every entry is positive.
Eigen::MatrixXd smooth_channel(const Eigen::MatrixXd& q, double weight = 1e-6);

/// Zeroes entries below `cut` and renormalizes rows.
Eigen::MatrixXd snap_channel(const Eigen::MatrixXd& q, double cut = 1e-7);

/// Value and gradient with respect to the channel entries.
using ChannelFn = std::function<double(const Eigen::MatrixXd& q, Eigen::MatrixXd* grad)>;

struct AscentResult {
  Eigen::MatrixXd q;
  double value = 0.0;
  int iters = 0;
  bool converged = false;
};

/// Mirror (exponentiated-gradient) ascent on the product of row simplices,
/// equivalent to gradient ascent on row-softmax logits in the metric
/// weighted by p(x). Step sizes adapt: x1.5 after an accepted step, halved
/// when the objective would decrease.
AscentResult mirror_ascent(const ChannelFn& f, const std::vector<double>& p, Eigen::MatrixXd q0, int max_iters,
                           int window, double rel_tol);

/// Runs `count` independent jobs on up to `threads` workers. Results are
/// written by index so the outcome does not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

/// Tagged union of two channels used with probabilities (1-lambda, lambda),
/// with empty outputs removed.
AuxChannel time_share(const AuxChannel& a, const AuxChannel& b, double lambda);

/// Pads a channel with empty outputs up to `nu` columns.
AuxChannel pad_outputs(const Eigen::MatrixXd& q, int nu);

}  // namespace crdist::detail
