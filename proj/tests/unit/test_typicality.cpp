#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crdist/error.hpp"
#include "crdist/info.hpp"
#include "crdist/typicality.hpp"
#include "fixtures.hpp"

namespace crdist {
namespace {

std::vector<int> word_of(std::size_t idx, int base, int n) {
  std::vector<int> w(n);
  for (int i = n - 1; i >= 0; --i) {
    w[i] = static_cast<int>(idx % base);
    idx /= base;
  }
  return w;
}

TEST(TypicalMembership, Examples) {
  const TypicalSetSpec ts(2, 4, 0.25, ProbVector::uniform(2));
  const int w0011[] = {0, 0, 1, 1}, w0000[] = {0, 0, 0, 0};
  EXPECT_TRUE(typical_membership(ts, w0011));
  EXPECT_FALSE(typical_membership(ts, w0000));
  const TypicalSetSpec loose(2, 4, 1.0, ProbVector({0.9, 0.1}));
  EXPECT_TRUE(typical_membership(loose, w0000));
  const int short_word[] = {0, 1};
  try {
    typical_membership(ts, short_word);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(TypicalSetSize, Examples) {
  const Count c = typical_set_size(TypicalSetSpec(2, 4, 0.25, ProbVector::uniform(2)));
  ASSERT_TRUE(c.exact.has_value());
  EXPECT_EQ(*c.exact, 14u);
  EXPECT_NEAR(c.log2, std::log2(14.0), 1e-12);
  EXPECT_EQ(*typical_set_size(TypicalSetSpec(2, 10, 1e-6, ProbVector::uniform(2))).exact, 252u);
  EXPECT_EQ(*typical_set_size(TypicalSetSpec(5, 1, 1.0, ProbVector::uniform(5))).exact, 5u);
}

TEST(TypicalSetSize, MatchesEnumeration) {
  for (int n = 1; n <= 12; ++n)
    for (double p0 : {0.5, 0.7, 0.9})
      for (double delta : {0.05, 0.15, 0.3}) {
        const TypicalSetSpec ts(2, n, delta, ProbVector({p0, 1.0 - p0}));
        std::uint64_t count = 0;
        for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) count += typical_membership(ts, word_of(i, 2, n));
        EXPECT_EQ(*typical_set_size(ts).exact, count) << "n=" << n << " p0=" << p0 << " delta=" << delta;
      }
}

TEST(TypicalSetSize, LargeSetsReportLog) {
  const Count c = typical_set_size(TypicalSetSpec(4, 200, 0.5, ProbVector::uniform(4)));
  EXPECT_FALSE(c.exact.has_value());
  EXPECT_NEAR(c.log2, 400.0, 1e-6);
}

TEST(CondTypicalMembership, Examples) {
  const AuxChannel id = AuxChannel::identity(2);
  const int u[] = {0, 1, 1, 0, 1, 0, 0, 1};
  EXPECT_TRUE(conditionally_typical_membership(id, u, u, 0.01));
  const int x_far[] = {1, 0, 0, 1, 1, 0, 0, 1};
  EXPECT_FALSE(conditionally_typical_membership(id, u, x_far, 0.2));
  // A constant reverse channel reduces to plain typicality within each block.
  const AuxChannel flat(Eigen::MatrixXd::Constant(2, 2, 0.5));
  const int x_bal[] = {0, 1, 0, 1, 1, 1, 0, 0};
  EXPECT_TRUE(conditionally_typical_membership(flat, u, x_bal, 0.01));
  const int x_skew[] = {0, 1, 0, 0, 1, 0, 0, 1};
  EXPECT_FALSE(conditionally_typical_membership(flat, u, x_skew, 0.2));
  const int short_word[] = {0};
  EXPECT_THROW(conditionally_typical_membership(id, u, short_word, 0.1), Error);
}

TEST(TypicalProjector, Examples) {
  EXPECT_EQ(*typical_projector(DensityMatrix::basis_state(2, 0), 16, 0.1).trace().exact, 1u);
  EXPECT_EQ(*typical_projector(DensityMatrix::maximally_mixed(2), 20, 0.01).trace().exact, 1u << 20);
  const CQEnsemble e = named_ensemble("two_state");
  EXPECT_EQ(*typical_projector(DensityMatrix(e.average_state()), 10, 0.1).trace().exact, 55u);
}

TEST(TypicalProjector, HandleTraceMatchesDense) {
  std::mt19937_64 rng(3);
  for (int n : {2, 4, 6}) {
    const DensityMatrix rho = fixtures::random_state(4, rng);
    const ProjectorHandle h = typical_projector(rho, n, 0.2);
    const CMatrix p = h.dense();
    EXPECT_NEAR(p.trace().real(), static_cast<double>(*h.trace().exact), 1e-8);
    EXPECT_LE((p * p - p).norm(), 1e-8);
  }
  const ProjectorHandle big = typical_projector(DensityMatrix::maximally_mixed(2), 13, 0.1);
  EXPECT_THROW(big.dense(), Error);
}

TEST(TypicalProjector, MassMatchesOracleAndDense) {
  const CQEnsemble e = named_ensemble("two_state");
  const CMatrix avg = e.average_state();
  const int ns[] = {8, 12, 16};
  for (int k = 0; k < 3; ++k) {
    const ProjectorHandle h = typical_projector(DensityMatrix(avg), ns[k], 0.15);
    const std::vector<const CMatrix*> states(ns[k], &avg);
    EXPECT_NEAR(h.mass(states), fixtures::kMassTwoState[k], 1e-12);
  }
  // Mass of a non-commuting product state against the dense projector.
  std::mt19937_64 rng(4);
  const DensityMatrix rho = fixtures::random_state(2, rng), sigma = fixtures::random_state(2, rng);
  const ProjectorHandle h = typical_projector(rho, 6, 0.2);
  CMatrix prod = sigma.matrix();
  for (int i = 1; i < 6; ++i) prod = tensor(prod, sigma.matrix());
  const std::vector<const CMatrix*> states(6, &sigma.matrix());
  EXPECT_NEAR(h.mass(states), (prod * h.dense()).trace().real(), 1e-10);
}

TEST(TypicalProjector, MassNondecreasingInDelta) {
  const CMatrix avg = named_ensemble("three_state").average_state();
  const std::vector<const CMatrix*> states(12, &avg);
  double prev = 0.0;
  for (double delta : {0.02, 0.05, 0.1, 0.2, 0.4}) {
    const double m = typical_projector(DensityMatrix(avg), 12, delta).mass(states);
    EXPECT_GE(m, prev - 1e-15);
    prev = m;
  }
}

TEST(CondTypicalProjector, Examples) {
  const CQEnsemble e = named_ensemble("two_state");
  const std::vector<DensityMatrix> rho_u = {DensityMatrix(e.average_state()), DensityMatrix::basis_state(2, 1)};
  const int same[] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(*cond_typical_projector(rho_u, same, 0.1).trace().exact, 55u);
  const int mixed_word[] = {0, 1, 0, 1};
  std::mt19937_64 rng(1);
  const std::vector<DensityMatrix> flat = {DensityMatrix::maximally_mixed(3), fixtures::random_state(3, rng)};
  EXPECT_EQ(*cond_typical_projector(flat, mixed_word, 5.0).trace().exact, 81u);
  // Orthogonal pure letters: each block retains exactly one word.
  const std::vector<DensityMatrix> pure = {DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 1)};
  EXPECT_EQ(*cond_typical_projector(pure, mixed_word, 0.1).trace().exact, 1u);
  const std::vector<DensityMatrix> mm = {DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)};
  EXPECT_EQ(*cond_typical_projector(mm, mixed_word, 0.1).trace().exact, 16u);
}

TEST(TraceBounds, MaximallyMixedIsExact) {
  const CQEnsemble e(ProbVector({1.0}), {DensityMatrix::maximally_mixed(2)});
  std::mt19937_64 rng(42);
  const TraceBoundReport r = verify_trace_bounds(e, AuxChannel::identity(1), {4, 8}, 0.1, 20, rng);
  for (const auto& row : r.rows) {
    if (row.quantity == "log2_trace_q") EXPECT_NEAR(row.value, row.n, 1e-12);
    if (row.quantity == "mass_q") EXPECT_NEAR(row.value, 1.0, 1e-12);
  }
}

TEST(TraceBounds, TwoStateLadder) {
  const CQEnsemble e = named_ensemble("two_state");
  std::mt19937_64 rng(42);
  const TraceBoundReport r = verify_trace_bounds(e, AuxChannel::identity(2), {8, 12, 16}, 0.15, 200, rng);
  EXPECT_TRUE(r.mass_nondecreasing);
  EXPECT_LE(r.c_fit, r.c_bound);
  int k = 0;
  for (const auto& row : r.rows)
    if (row.quantity == "mass_q") EXPECT_NEAR(row.value, fixtures::kMassTwoState[k++], 1e-12);
  EXPECT_EQ(k, 3);
  EXPECT_NE(r.csv().find("n,delta,quantity,value,ci_low,ci_high"), std::string::npos);
}

TEST(TraceBounds, WilsonInterval) {
  const auto [lo, hi] = wilson_interval(50, 100);
  EXPECT_NEAR(lo, 0.4038, 1e-4);
  EXPECT_NEAR(hi, 0.5962, 1e-4);
  EXPECT_EQ(wilson_interval(0, 10).first, 0.0);
}

TEST(EntropyBound, NoViolations) {
  std::mt19937_64 rng(7);
  const EntropyBoundReport r = entropy_bound_check(8, 1000, rng);
  EXPECT_EQ(r.trials, 1000);
  EXPECT_EQ(r.violations, 0);
  EXPECT_LE(r.max_violation, 1e-9);
}

TEST(BuildG, IdentityChannel) {
  // Below one count of slack each typical u^n owns only x^n = u^n, so g is
  // the identity on the typical set and everything else falls to u0. At n = 8
  // that leaves most of the mass uncovered, which is reported as a stall.
  const CQEnsemble e = named_ensemble("two_state");
  const GFunction g = build_g(e, AuxChannel::identity(2), 8, 0.05, 0.1);
  EXPECT_TRUE(g.stalled);
  int residual_words = 0;
  for (std::size_t i = 0; i < g.table.size(); ++i) {
    if (g.table[i] < 0) {
      ++residual_words;
      continue;
    }
    EXPECT_EQ(word_of(i, 2, 8), g.codewords[g.table[i]]);
  }
  EXPECT_EQ(g.codewords.size(), 70u);
  EXPECT_NEAR(g.h_x_given_g, g.residual_mass * std::log2(residual_words) / 8.0, 1e-12);
  EXPECT_NEAR(g.h_x_given_u, 0.0, 1e-12);
  // With more slack the extraction completes and both windows hold.
  const GFunction wide = build_g(e, AuxChannel::identity(2), 10, 0.2, 0.1);
  EXPECT_FALSE(wide.stalled);
  EXPECT_LE(wide.residual_mass, 0.1);
  EXPECT_TRUE(wide.x_window_ok);
  EXPECT_TRUE(wide.q_window_ok);
}

TEST(BuildG, ConstantChannel) {
  const GFunction g = build_g(named_ensemble("two_state"), AuxChannel::constant(2, 2), 10, 0.15, 0.1);
  EXPECT_EQ(g.codewords.size(), 1u);
  EXPECT_NEAR(g.h_x_given_u, 1.0, 1e-12);
  EXPECT_NEAR(g.h_x_given_g, 1.0, 0.15);
  EXPECT_TRUE(g.x_window_ok);
}

TEST(BuildG, BinarySymmetricWindows) {
  const GFunction g = build_g(named_ensemble("two_state"), AuxChannel::binary_symmetric(0.25), 10, 0.15, 0.1);
  EXPECT_TRUE(g.x_window_ok);
  EXPECT_TRUE(g.q_window_ok);
  EXPECT_EQ(g.table.size(), 1024u);
}

TEST(BuildG, Envelope) {
  try {
    build_g(named_ensemble("two_state"), AuxChannel::identity(2), 21, 0.1, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EnvelopeExceeded);
  }
}

}  // namespace
}  // namespace crdist
