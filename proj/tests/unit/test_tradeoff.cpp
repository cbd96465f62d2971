#include <gtest/gtest.h>

#include <cmath>

#include "crdist/error.hpp"
#include "crdist/tradeoff.hpp"
#include "fixtures.hpp"

namespace crdist {
namespace {

SolverConfig quick() {
  SolverConfig cfg;
  cfg.starts = 8;
  return cfg;
}

TEST(EvalPair, Examples) {
  const RateGain a = eval_pair(named_ensemble("two_state"), AuxChannel::identity(2));
  EXPECT_NEAR(a.rate, 1.0 - fixtures::kChiTwoState, 1e-12);
  EXPECT_NEAR(a.gain, fixtures::kChiTwoState, 1e-12);
  const RateGain b = eval_pair(named_ensemble("two_state"), AuxChannel::constant(2));
  EXPECT_NEAR(b.rate, 0.0, 1e-12);
  EXPECT_NEAR(b.gain, 0.0, 1e-12);
  const RateGain c = eval_pair(named_ensemble("orthogonal_pair"), AuxChannel::identity(2));
  EXPECT_NEAR(c.rate, 0.0, 1e-12);
  EXPECT_NEAR(c.gain, 1.0, 1e-12);
  EXPECT_THROW(eval_pair(named_ensemble("three_state"), AuxChannel::identity(2)), Error);
}

TEST(SolveDstar, TwoStatePlateauAndOrigin) {
  const CQEnsemble e = named_ensemble("two_state");
  const CurvePoint p = solve_dstar(e, 1.0 - fixtures::kChiTwoState, quick());
  EXPECT_NEAR(p.distilled, fixtures::kChiTwoState, 1e-3);
  EXPECT_EQ(p.cr_rate, p.comm_rate + p.distilled);
  EXPECT_NEAR(solve_dstar(e, 0.0, quick()).distilled, 0.0, 1e-3);
  for (double r : {0.6, 1.0}) EXPECT_NEAR(solve_dstar(e, r, quick()).distilled, fixtures::kChiTwoState, 1e-3);
}

TEST(SolveDstar, ThreeStateZeroRate) {
  EXPECT_GE(solve_dstar(named_ensemble("three_state"), 0.0, quick()).distilled, fixtures::kH2Third - 1e-3);
}

TEST(SolveDstar, WitnessReproducesPoint) {
  for (const char* name : {"two_state", "three_state", "bb84"}) {
    const CQEnsemble e = named_ensemble(name);
    for (double r : {0.05, 0.15, 0.3}) {
      const CurvePoint p = solve_dstar(e, r, quick());
      const RateGain v = eval_pair(e, p.channel);
      EXPECT_NEAR(v.gain, p.distilled, 1e-9) << name << " R=" << r;
      EXPECT_NEAR(v.rate, p.witness_rate, 1e-9) << name << " R=" << r;
      EXPECT_LE(p.witness_rate, r + 1e-9) << name << " R=" << r;
      EXPECT_EQ(p.channel.out_size(), static_cast<int>(e.size()) + 1);
    }
  }
}

TEST(SolveDstar, DominatesMeshSearch) {
  const CQEnsemble two = named_ensemble("two_state");
  for (double r : {0.0, 0.1, 0.2, 0.3, 0.4})
    EXPECT_GE(solve_dstar(two, r, quick()).distilled, brute_dstar(two, r, 24).distilled - 2e-3) << r;
  const CQEnsemble three = named_ensemble("three_state");
  for (double r : {0.0, 0.1, 0.2})
    EXPECT_GE(solve_dstar(three, r, quick()).distilled, brute_dstar(three, r, 8).distilled - 2e-3) << r;
}

TEST(BruteDstar, CornersAndEnvelope) {
  const CQEnsemble e = named_ensemble("two_state");
  EXPECT_GE(brute_dstar(e, 0.0, 6).distilled, 0.0);
  EXPECT_NEAR(brute_dstar(e, 1.0 - fixtures::kChiTwoState + 1e-9, 6).distilled, fixtures::kChiTwoState, 1e-9);
  try {
    brute_dstar(named_ensemble("bb84"), 0.1, 4);
    FAIL();
  } catch (const Error& ex) {
    EXPECT_EQ(ex.code(), ErrorCode::EnvelopeExceeded);
  }
}

TEST(TraceCurve, OrthogonalPairIsFlat) {
  const TradeoffCurve c = trace_curve(named_ensemble("orthogonal_pair"), RGrid{0.0, 1.0, 5}, quick());
  for (const auto& p : c.points) EXPECT_NEAR(p.distilled, 1.0, 1e-6);
}

TEST(TraceCurve, TwoStateShape) {
  const CQEnsemble e = named_ensemble("two_state");
  const TradeoffCurve c = trace_curve(e, RGrid{0.0, 0.5, 21}, quick());
  ASSERT_EQ(c.points.size(), 21u);
  const CurveReport rep = check_curve(c);
  EXPECT_TRUE(rep.increasing_r && rep.monotone && rep.bounded && rep.concave);
  const double rsw = 1.0 - fixtures::kChiTwoState;
  for (const auto& p : c.points) {
    EXPECT_EQ(p.cr_rate, p.comm_rate + p.distilled);
    // On or above the time-sharing chord from (0,0) to the plateau corner.
    EXPECT_GE(p.distilled, fixtures::kChiTwoState * std::min(p.comm_rate / rsw, 1.0) - 1e-6);
    if (p.comm_rate >= rsw) EXPECT_NEAR(p.distilled, fixtures::kChiTwoState, 1e-3);
  }
  EXPECT_NEAR(c.points.front().distilled, 0.0, 1e-3);
}

TEST(TraceCurve, AgreesWithPointSolves) {
  const CQEnsemble e = named_ensemble("two_state");
  const TradeoffCurve c = trace_curve(e, RGrid{0.0, 0.4, 5}, quick());
  for (const auto& p : c.points) EXPECT_NEAR(p.distilled, solve_dstar(e, p.comm_rate, quick()).distilled, 1e-4);
}

TEST(Gradients, LagrangianMatchesFiniteDifferences) {
  EXPECT_LE(fixtures::lagrangian_gradient_error(named_ensemble("two_state"), 0.7, 50, 1), 1e-4);
  EXPECT_LE(fixtures::lagrangian_gradient_error(named_ensemble("three_state"), 1.3, 50, 2), 1e-4);
  EXPECT_LE(fixtures::lagrangian_gradient_error(named_ensemble("bb84"), 2.0, 20, 3), 1e-4);
  EXPECT_LE(fixtures::lagrangian_gradient_error(named_ensemble("two_state"), 0.7, 20, 4, ChannelObjective::Path::Generic),
            1e-4);
}

TEST(Gradients, QubitPathMatchesGenericPath) {
  const CQEnsemble e = named_ensemble("bb84");
  const ChannelObjective fast(e), slow(e, ChannelObjective::Path::Generic);
  EXPECT_TRUE(fast.uses_qubit_path());
  EXPECT_FALSE(slow.uses_qubit_path());
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd q = fixtures::interior_channel(4, 5, rng);
    const MutualInfoPair a = fast.evaluate(q), b = slow.evaluate(q);
    EXPECT_NEAR(a.iux, b.iux, 1e-12);
    EXPECT_NEAR(a.iuq, b.iuq, 1e-10);
  }
}

TEST(QStar, Endpoints) {
  const CQEnsemble e = named_ensemble("two_state");
  const auto pts = qstar_curve(e, {0.0, 1.0}, quick());
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].qstar, fixtures::kChiTwoState, 1e-6);
  EXPECT_NEAR(pts[1].qstar, 0.0, 1e-6);
  const CQEnsemble mixed(ProbVector({0.5, 0.5}), {DensityMatrix::maximally_mixed(2), DensityMatrix::basis_state(2, 0)});
  try {
    qstar_curve(mixed, {0.0});
    FAIL();
  } catch (const Error& ex) {
    EXPECT_EQ(ex.code(), ErrorCode::NotPureEnsemble);
  }
}

TEST(Duality, TwoState) {
  const CQEnsemble e = named_ensemble("two_state");
  const double hxq = 1.0 - fixtures::kChiTwoState;
  const DualityReport rep = check_duality(e, {0.0, 0.25 * hxq, 0.5 * hxq, 0.75 * hxq, hxq}, quick());
  EXPECT_LE(rep.max_residual, 1e-3);
  EXPECT_NEAR(rep.h_q, fixtures::kChiTwoState, 1e-12);
}

TEST(Additivity, TrivialFactors) {
  const CQEnsemble a = named_ensemble("two_state");
  const CQEnsemble one(ProbVector({1.0}), {DensityMatrix::basis_state(2, 0)});
  const AdditivityReport r = check_additivity(a, one, 0.2, quick());
  EXPECT_NEAR(r.joint, solve_dstar(a, 0.2, quick()).distilled, 1e-4);
  EXPECT_LE(std::abs(r.gap), 5e-3);
  const CQEnsemble o = named_ensemble("orthogonal_pair");
  const AdditivityReport oo = check_additivity(o, o, 0.0, quick());
  EXPECT_NEAR(oo.joint, 2.0, 1e-6);
  EXPECT_NEAR(oo.split, 2.0, 1e-6);
}

TEST(Additivity, EnvelopeExceeded) {
  const CQEnsemble t = named_ensemble("three_state");
  try {
    check_additivity(t, t, 0.0, quick());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EnvelopeExceeded);
  }
}

TEST(UniformClosedForm, Limits) {
  const auto small = uniform_curve_closed_form({0.01});
  EXPECT_LE(std::abs(small[0].gain), 0.02);
  EXPECT_LE(std::abs(small[0].rate), 0.02);
  EXPECT_NEAR(uniform_curve_closed_form({10.0})[0].gain, fixtures::kUniformD10, 1e-9);
  const auto big = uniform_curve_closed_form({30.0, 100.0});
  EXPECT_GE(big[0].gain, 0.75);
  EXPECT_GT(big[1].gain, big[0].gain);
  EXPECT_GT(big[1].rate, big[0].rate);
  try {
    uniform_curve_closed_form({0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(UniformSphere, CoarseLatticeBelowClosedForm) {
  std::vector<double> lambdas;
  for (double l = 0.05; l <= 60.0; l *= 1.15) lambdas.push_back(l);
  std::vector<RateGain> env{{0.0, 0.0}};
  for (const auto& p : uniform_curve_closed_form(lambdas)) env.push_back(p);
  SolverConfig cfg = quick();
  cfg.rel_tol = 1e-7;
  cfg.max_iters = 3000;
  const TradeoffCurve c = trace_curve(named_ensemble("uniform_sphere", {16}), RGrid{0.1, 2.0, 3}, cfg);
  for (const auto& p : c.points) EXPECT_LE(std::abs(p.distilled - concave_envelope_at(env, p.comm_rate)), 0.1);
}

}  // namespace
}  // namespace crdist
