#include <gtest/gtest.h>

#include <cmath>

#include "crdist/ensemble_io.hpp"
#include "crdist/ensembles.hpp"
#include "crdist/error.hpp"
#include "crdist/info.hpp"
#include "crdist/measurement.hpp"
#include "fixtures.hpp"

namespace crdist {
namespace {

using fixtures::ket;

TEST(EhsEmbed, SingleState) {
  std::mt19937_64 rng(1);
  const DensityMatrix rho = fixtures::random_state(2, rng);
  const CQEnsemble e(ProbVector({1.0}), {rho});
  const EhsState s = ehs_embed(e);
  EXPECT_LE((s.state.matrix() - rho.matrix()).norm(), 1e-12);
}

TEST(EhsEmbed, OrthogonalPairIsDiagonal) {
  const EhsState s = ehs_embed(named_ensemble("orthogonal_pair"));
  RVector d(4);
  d << 0.5, 0, 0, 0.5;
  EXPECT_LE((s.state.matrix() - CMatrix(d.cast<cplx>().asDiagonal())).norm(), 1e-12);
}

TEST(EhsEmbed, TwoStateBlocks) {
  const CQEnsemble e = named_ensemble("two_state");
  const CMatrix m = ehs_embed(e).state.matrix();
  EXPECT_LE((m.block(0, 0, 2, 2) - 0.5 * e.state(0).matrix()).norm(), 1e-12);
  EXPECT_LE((m.block(2, 2, 2, 2) - 0.5 * e.state(1).matrix()).norm(), 1e-12);
  EXPECT_EQ(m.block(0, 2, 2, 2).norm(), 0.0);
  EXPECT_LE((partial_trace(m, 2, 2, Keep::B) - e.average_state()).norm(), 1e-10);
}

TEST(ExtendWithChannel, IdentitySupportedOnDiagonal) {
  const CQEnsemble e = named_ensemble("two_state");
  const EhsState s = extend_with_channel(e, AuxChannel::identity(2));
  const int dims[] = {2, 2, 2};
  const int keep_ux[] = {0, 1};
  const CMatrix ux = reduce(s.state.matrix(), dims, keep_ux);
  EXPECT_NEAR(ux(1, 1).real(), 0.0, 1e-14);  // u = 0, x = 1
  EXPECT_NEAR(ux(2, 2).real(), 0.0, 1e-14);  // u = 1, x = 0
  EXPECT_NEAR(ux(0, 0).real(), 0.5, 1e-12);
}

TEST(ExtendWithChannel, ConstantChannelAddsDummyRegister) {
  const CQEnsemble e = named_ensemble("two_state");
  const EhsState s = extend_with_channel(e, AuxChannel::constant(2));
  EXPECT_LE((s.state.matrix() - ehs_embed(e).state.matrix()).norm(), 1e-12);
}

TEST(ExtendWithChannel, BinarySymmetricMutualInformation) {
  const CQEnsemble e = named_ensemble("orthogonal_pair");
  const EhsState s = extend_with_channel(e, AuxChannel::binary_symmetric(0.11));
  const int part[] = {0, 1, -1};
  EXPECT_NEAR(mutual_info(s, part), 1.0 - binary_entropy(0.11), 1e-9);
  EXPECT_NEAR(1.0 - binary_entropy(0.11), 0.500, 1e-3);
}

TEST(ExtendWithChannel, SizeMismatch) {
  try {
    extend_with_channel(named_ensemble("three_state"), AuxChannel::identity(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeMismatch);
  }
}

TEST(MeasureEnsemble, ProductStateGivesConstantStates) {
  std::mt19937_64 rng(4);
  const DensityMatrix a = fixtures::random_state(2, rng), b = fixtures::random_state(2, rng);
  const BipartiteState rho(2, 2, DensityMatrix(tensor(a.matrix(), b.matrix())));
  const CQEnsemble e = measure_ensemble(rho, random_povm(2, 4, rng));
  for (const auto& s : e.states()) EXPECT_LE((s.matrix() - b.matrix()).norm(), 1e-9);
}

TEST(MeasureEnsemble, BellInComputationalBasis) {
  const CQEnsemble e = measure_ensemble(fixtures::bell(), Povm::computational(2));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(e.probs()[0], 0.5, 1e-12);
  EXPECT_LE((e.state(0).matrix() - projector(ket({1, 0}))).norm(), 1e-12);
  EXPECT_LE((e.state(1).matrix() - projector(ket({0, 1}))).norm(), 1e-12);
}

TEST(MeasureEnsemble, EhsRoundTrip) {
  const CQEnsemble e = named_ensemble("three_state");
  const CQEnsemble back = measure_ensemble(ehs_bipartite(e), Povm::computational(3));
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t x = 0; x < 3; ++x) {
    EXPECT_NEAR(back.probs()[x], e.probs()[x], 1e-12);
    EXPECT_LE((back.state(x).matrix() - e.state(x).matrix()).norm(), 1e-10);
  }
}

TEST(NamedEnsemble, TwoState) {
  const CQEnsemble e = named_ensemble("two_state");
  ASSERT_EQ(e.size(), 2u);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_LE((e.state(0).matrix() - projector(ket({1, 0}))).norm(), 1e-12);
  EXPECT_LE((e.state(1).matrix() - projector(ket({r, r}))).norm(), 1e-12);
  EXPECT_NEAR(e.probs()[1], 0.5, 0.0);
}

TEST(NamedEnsemble, Bb84Kets) {
  const double t = M_PI / 8, c = std::cos(t), s = std::sin(t);
  const CQEnsemble e = named_ensemble("bb84", {t});
  ASSERT_EQ(e.size(), 4u);
  const CVector kets[] = {ket({1, 0}), ket({c, s}), ket({0, 1}), ket({-s, c})};
  for (int x = 0; x < 4; ++x) {
    EXPECT_LE((e.state(x).matrix() - projector(kets[x])).norm(), 1e-12);
    EXPECT_NEAR(e.probs()[x], 0.25, 0.0);
  }
  EXPECT_LE((named_ensemble("bb84").average_state() - e.average_state()).norm(), 1e-15);
}

TEST(NamedEnsemble, Bb84AngleOutsideRangeWarns) {
  std::vector<std::string> warnings;
  named_ensemble("bb84", {1.2}, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(NamedEnsemble, ThreeStateAndSphere) {
  const CQEnsemble e = named_ensemble("three_state");
  EXPECT_EQ(e.dim(), 3);
  EXPECT_EQ(e.size(), 3u);
  const CQEnsemble s = named_ensemble("uniform_sphere", {64});
  EXPECT_EQ(s.size(), 64u);
  // A quasi-uniform sphere averages to nearly the maximally mixed state.
  EXPECT_LE((s.average_state() - 0.5 * CMatrix::Identity(2, 2)).norm(), 0.02);
}

TEST(NamedEnsemble, UnknownName) {
  try {
    named_ensemble("five_state");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownName);
  }
}

TEST(ProbVector, Validation) {
  EXPECT_THROW(ProbVector({0.5, 0.6}), Error);
  EXPECT_THROW(ProbVector({1.5, -0.5}), Error);
  EXPECT_NO_THROW(ProbVector({0.25, 0.75}));
}

TEST(TensorProduct, EnsembleIndexing) {
  const CQEnsemble a = named_ensemble("two_state"), b = named_ensemble("orthogonal_pair");
  const CQEnsemble ab = tensor_product(a, b);
  ASSERT_EQ(ab.size(), 4u);
  EXPECT_LE((ab.state(1).matrix() - tensor(a.state(0).matrix(), b.state(1).matrix())).norm(), 1e-12);
  EXPECT_NEAR(holevo_chi(ab), holevo_chi(a) + holevo_chi(b), 1e-9);
}

TEST(TensorProduct, BipartiteRegrouping) {
  const BipartiteState ab = tensor_product(fixtures::bell(), fixtures::product_state());
  EXPECT_EQ(ab.dim_a, 4);
  EXPECT_EQ(ab.dim_b, 4);
  EXPECT_NEAR(entanglement_entropy(ab), 1.0, 1e-9);
}

TEST(EnsembleIo, RoundTrip) {
  const CQEnsemble e = named_ensemble("bb84");
  const CQEnsemble back = parse_ensemble(format_ensemble(e));
  ASSERT_EQ(back.size(), e.size());
  for (std::size_t x = 0; x < e.size(); ++x) EXPECT_LE((back.state(x).matrix() - e.state(x).matrix()).norm(), 1e-12);
}

TEST(EnsembleIo, KetAndDensityMatrixForms) {
  const CQEnsemble e = parse_ensemble(R"({"dim": 2, "probs": [0.5, 0.5],
    "states": [{"ket": [[1, 0], [0, 0]]},
               {"dm": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]}]})");
  EXPECT_NEAR(holevo_chi(e), fixtures::kChiTwoState, 1e-12);
}

TEST(EnsembleIo, ParseErrorsNameTheField) {
  try {
    parse_ensemble(R"({"dim": 2, "probs": [0.5, 0.5], "states": [{"ket": [[1, 0], [0, 0]]}, {"kat": 1}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("states[1]"), std::string::npos) << e.what();
  }
  try {
    parse_ensemble("{\"dim\": 2,\n \"probs\": [0.5 0.5]}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
}

TEST(EnsembleIo, SeparableDecompositionMustMatchState) {
  const std::string ok = R"({"dim_a": 2, "dim_b": 2,
    "separable": [{"q": 0.5, "a": {"ket": [[1,0],[0,0]]}, "b": {"ket": [[1,0],[0,0]]}},
                  {"q": 0.5, "a": {"ket": [[0,0],[1,0]]}, "b": {"ket": [[0,0],[1,0]]}}]})";
  const BipartiteFile f = parse_bipartite(ok);
  ASSERT_TRUE(f.separable.has_value());
  EXPECT_NEAR(f.state.state.matrix()(3, 3).real(), 0.5, 1e-12);
}

}  // namespace
}  // namespace crdist
