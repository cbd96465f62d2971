#pragma once

// Typical and conditionally typical sequences and projectors at small
// blocklength, evaluated exactly through letter-count types.
//
// A word is typical when every letter count is within n*delta of n*p(a).
// Projectors use the eigenbasis of the state: eigen-indices with equal
// eigenvalues are grouped into one letter (so the projector does not depend
// on the basis chosen inside a degenerate eigenspace) and zero-eigenvalue
// letters may not occur.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "crdist/ensembles.hpp"

namespace crdist {

struct TypicalSetSpec {
  int alphabet_size;
  int n;
  double delta;
  ProbVector distribution;

  TypicalSetSpec(int alphabet_size, int n, double delta, ProbVector distribution);
};

bool typical_membership(const TypicalSetSpec& ts, std::span<const int> word);

struct Count {
  std::optional<std::uint64_t> exact;  ///< empty when it does not fit in 64 bits
  double log2;                         ///< -inf for an empty set
};

/// Exact size of the typical set, summed over letter-count types.
Count typical_set_size(const TypicalSetSpec& ts);

/// |N((u,x)) - P(x|u) N(u)| <= n delta for all (u, x); P has rows u.
bool conditionally_typical_membership(const AuxChannel& p, std::span<const int> u_word, std::span<const int> x_word,
                                      double delta);

/// Structured typical projector: one block per distinct conditioning
/// letter, each the typical projector of a state on the block's positions.
class ProjectorHandle {
 public:
  struct Block {
    std::vector<int> positions;
    CMatrix basis;                        ///< eigenvectors of the block state (columns)
    std::vector<int> group_of_index;      ///< eigen-index -> letter group
    std::vector<double> group_prob;       ///< group probabilities (multiplicity * eigenvalue)
    double delta;
  };

  ProjectorHandle(int n, std::vector<Block> blocks);

  int n() const noexcept { return n_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  /// Tr Pi as an exact count and its log2.
  Count trace() const;

  /// Tr[(sigma_1 (x) ... (x) sigma_n) Pi] for per-position states; exact
  /// dynamic program over letter counts.
  double mass(const std::vector<const CMatrix*>& position_states) const;

  /// Dense matrix of the projector (n log2 d <= 12).
  CMatrix dense() const;

 private:
  int n_;
  int dim_;
  std::vector<Block> blocks_;
};

ProjectorHandle typical_projector(const DensityMatrix& rho, int n, double delta);

/// Per-block projectors of rho_u on I_u = {i : u_i = u}.
ProjectorHandle cond_typical_projector(const std::vector<DensityMatrix>& rho_u, std::span<const int> u_word, double delta);

struct BoundRow {
  int n;
  double delta;
  std::string quantity;
  double value;
  double ci_low;
  double ci_high;
};

struct TraceBoundReport {
  std::vector<BoundRow> rows;
  double c_fit = 0.0;        ///< max over n of ((1/n) log2 Tr Pi_Q - H(Q)) / delta
  double c_fit_cond = 0.0;   ///< same for the conditional projector Pi_{Q|X}
  double c_bound = 0.0;      ///< sum_k |log2 lambda_k| over the nonzero spectrum of the average state
  bool mass_nondecreasing = true;
  std::string csv() const;
  std::string summary() const;
};

/// Exact traces and retained masses of Pi_Q, Pi_{Q|X}(x^n) and
/// Pi_{Q|U}(u^n) over a ladder of blocklengths; conditional quantities are
/// averaged over `trials` sampled words (exact per word, Bernoulli draws for
/// the Wilson interval). The conditional delta is delta + |X| delta' with
/// delta' = delta / |X|.
TraceBoundReport verify_trace_bounds(const CQEnsemble& e, const AuxChannel& w, const std::vector<int>& n_list,
                                     double delta, int trials, std::mt19937_64& rng);

/// Wilson 95% score interval.
std::pair<double, double> wilson_interval(int successes, int trials);

struct EntropyBoundReport {
  int trials = 0;
  int violations = 0;
  double max_violation = -1e300;  ///< largest H(sigma) - bound
};

/// Randomized check of H(sigma) <= 1 + eps log2 D + (1 - eps) log2(Tr B + 1)
/// with eps = 1 - Tr(sigma B), 0 <= B <= 1.
EntropyBoundReport entropy_bound_check(int dim, int trials, std::mt19937_64& rng);

struct GFunction {
  int n = 0;
  std::vector<std::vector<int>> codewords;  ///< chosen u^n
  std::vector<int> table;                   ///< x^n index (base |X|, position 0 most significant) -> codeword, -1 = u0
  double residual_mass = 0.0;
  bool stalled = false;
  double h_x_given_g = 0.0;   ///< (1/n) H(X^n | g)
  double h_q_given_g = 0.0;   ///< blockwise upper bound on (1/n) H(Q^n | g)
  double h_x_given_u = 0.0;
  double h_q_given_u = 0.0;
  bool x_window_ok = false;   ///< |h_x_given_g - H(X|U)| <= delta + 3 delta
  bool q_window_ok = false;   ///< h_q_given_g <= H(Q|U) + delta + 3 delta
};

/// Greedy construction of g: X^n -> U^n u {u0}. Envelope |X|^n <= 2^20 and
/// |U|^n <= 2^16.
GFunction build_g(const CQEnsemble& e, const AuxChannel& w, int n, double delta, double epsilon);

}  // namespace crdist
