#include <gtest/gtest.h>

#include "support.hpp"

using namespace stripeband;
using namespace testing_support;

TEST(Ingest, ExampleFixtureReproducesMatrices) {
  auto m = example51();
  EXPECT_EQ(m.d1, 1.0);
  EXPECT_EQ(m.d2, 3.5);
  EXPECT_EQ(m.L(0, 0), 3.0);
  EXPECT_EQ(m.L(0, 1), -1.0);
  EXPECT_EQ(m.L(1, 0), 14.0);
  EXPECT_EQ(m.L(1, 1), -3.5);
  EXPECT_EQ(m.M(1, 0), -0.2);
  EXPECT_FALSE(m.M_identity);
  EXPECT_EQ(m.S[0](1, 1), 0.125);
  EXPECT_TRUE(validate_model(m).pass());
}

TEST(Ingest, EmptyNonlinearBlocksGiveZeroForms) {
  auto m = parse_model(R"({"diffusion": [1, 3.5], "linear": [3, -1, 14, -3.5], "unfolding": "identity",
                           "quadratic": [], "cubic": []})");
  EXPECT_TRUE(m.M_identity);
  EXPECT_FALSE(m.has_quadratic());
  for (int i = 0; i < 2; ++i)
    for (double t : m.T[i]) EXPECT_EQ(t, 0.0);
}

TEST(Ingest, AsymmetricQuadraticIsRejectedWithEntryName) {
  try {
    parse_model(R"({"diffusion": [1, 2], "linear": [1, -1, 3, -2],
                    "quadratic": [[[1, 0.5], [0.25, 1]], [[0, 0], [0, 0]]]})");
    FAIL() << "expected a parse error";
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::validation);
    EXPECT_NE(std::string(e.what()).find("quadratic[0]"), std::string::npos);
  }
}

TEST(Ingest, AsymmetricCubicIsRejected) {
  EXPECT_THROW(parse_model(R"({"diffusion": [1, 2], "linear": [1, -1, 3, -2],
                               "cubic": [[0, 1, 0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0, 0, 0]]})"),
               error);
}

TEST(Ingest, MalformedDocumentReportsLine) {
  try {
    parse_model("{\n  \"diffusion\": [1, 2],\n  \"linear\": [1, -1, 3 -2]\n}");
    FAIL() << "expected a parse error";
  } catch (const error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Ingest, MissingFieldAndWrongShape) {
  EXPECT_THROW(parse_model(R"({"linear": [1, -1, 3, -2]})"), error);
  EXPECT_THROW(parse_model(R"({"diffusion": [1], "linear": [1, -1, 3, -2]})"), error);
  EXPECT_THROW(parse_model(R"({"diffusion": [1, 2], "linear": [1, -1, 3, "x"]})"), error);
  EXPECT_THROW(parse_model(R"({"diffusion": [1, 2], "linear": [1, -1, 3, -2], "unfolding": "zero"})"), error);
}

TEST(Ingest, MissingFileIsAnIoError) {
  try {
    load_model("/nonexistent/model.json");
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::io);
  }
}

TEST(Ingest, JsonRoundTripIsExact) {
  auto m = example51();
  auto back = parse_model(model_to_json(m).dump());
  EXPECT_EQ(back.d1, m.d1);
  EXPECT_EQ(back.d2, m.d2);
  EXPECT_EQ(back.L, m.L);
  EXPECT_EQ(back.M, m.M);
  EXPECT_EQ(back.S[0], m.S[0]);
  EXPECT_EQ(back.S[1], m.S[1]);
  EXPECT_EQ(back.T, m.T);
  EXPECT_EQ(back.M_identity, m.M_identity);
}

TEST(Klausmeier, DoubleRootAtThreshold) {
  auto s = homogeneous_states({500, 0.45, 0.9, 0});
  EXPECT_NEAR(s.u_plus, 0.45, 1e-15);
  EXPECT_NEAR(s.u_minus, 0.45, 1e-15);
  EXPECT_NEAR(s.v_plus, 1.0, 1e-15);
  EXPECT_NEAR(s.v_minus, 1.0, 1e-15);
  EXPECT_THROW(homogeneous_states({500, 0.45, 0.8, 0}), error);
}

TEST(Klausmeier, VegetatedStateSolvesReaction) {
  double a = 1.2, m = 0.45;
  auto s = homogeneous_states({500, m, a, 0});
  for (auto [u, v] : {std::pair{s.u_plus, s.v_plus}, std::pair{s.u_minus, s.v_minus}}) {
    EXPECT_NEAR(a - u - u * v * v, 0.0, 1e-12);
    EXPECT_NEAR(-m * v + u * v * v, 0.0, 1e-12);
    EXPECT_NEAR(u * v, m, 1e-12);
  }
}

TEST(Klausmeier, NormalFormAtThreshold) {
  auto r = klausmeier_normal_form({500, 0.45, 0, 0});
  EXPECT_NEAR(r.lambda_M, -0.137, 0.02 * 0.137);
  EXPECT_TRUE(validate_model(r.model).pass());
  EXPECT_TRUE(check_turing(r.model).pass) << check_turing(r.model).reason;
  EXPECT_NEAR(klausmeier_criticality(r.a_T, 500, 0.45), 0.0, 1e-9);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(r.model.S[0](i, i), -r.model.S[1](i, i));
  EXPECT_EQ(r.model.S[0](0, 1), -r.model.S[1](0, 1));
}

TEST(Klausmeier, UnfoldingMatchesCenteredDifference) {
  double m = 0.45;
  auto r = klausmeier_normal_form({500, m, 0, 0});
  double h = 1e-5;
  auto Lof = [&](double a) { return klausmeier_linear(m, homogeneous_states({500, m, a, 0}).v_plus); };
  mat2 fd = (Lof(r.a_T + h) - Lof(r.a_T - h)) / (2 * h);
  EXPECT_LT((fd - r.model.M).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Klausmeier, BracketWithoutSignChangeIsReported) {
  try {
    klausmeier_normal_form({500, 0.45, 0, 0}, 3.0, 4.0);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::numerical);
  }
}
