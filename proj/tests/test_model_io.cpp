#include <gtest/gtest.h>

#include "riccap/errors.hpp"
#include "riccap/model_io.hpp"

namespace riccap {
namespace {

constexpr const char* kScalarDoc = R"({
  "noise": {"A": [[0.5]], "B": [[1]], "C": [[1]], "N": [[1]], "K_W": [[1]], "K_S1": [[0]]},
  "input": {"F": [[0.5]], "G": [[1]], "Gamma": [[1]], "D": [[1]], "K_Z": [[3]]},
  "channel": {"H": [[1]], "kappa": 2}
})";

std::string error_of(const std::string& text) {
  try {
    parse_model_text(text);
  } catch (const ModelError& e) {
    return e.what();
  }
  return {};
}

TEST(ParseModel, ReadsAllSections) {
  const ModelDocument doc = parse_model_text(kScalarDoc);
  EXPECT_DOUBLE_EQ(doc.noise.A(0, 0), 0.5);
  ASSERT_TRUE(doc.input.has_value());
  EXPECT_DOUBLE_EQ(doc.input->K_Z(0, 0), 3.0);
  ASSERT_TRUE(doc.channel.has_value());
  EXPECT_DOUBLE_EQ(doc.channel->kappa, 2.0);
  EXPECT_EQ(doc.noise.mu_S1.size(), 1);
  EXPECT_EQ(doc.input->K_Xi1, Matrix::Zero(1, 1));
  EXPECT_TRUE(validate(doc.noise, *doc.input, *doc.channel).ok());
}

TEST(ParseModel, ScalarsAreOneByOne) {
  const ModelDocument doc = parse_model_text(
      R"({"noise": {"A": 0.5, "B": 1, "C": 1, "N": 1, "K_W": 1}, "channel": {"H": 1, "kappa": 1}})");
  EXPECT_EQ(doc.noise.A.rows(), 1);
  EXPECT_FALSE(doc.input.has_value());
}

TEST(ParseModel, MissingStateMeansMemoryless) {
  const ModelDocument doc = parse_model_text(
      R"({"noise": {"N": [[1, 0], [0, 1]], "K_W": [[1, 0], [0, 1]]},
          "input": {"D": [[1, 0], [0, 1]], "K_Z": [[0.5, 0], [0, 0.5]]},
          "channel": {"H": [[1, 0], [0, 2]], "kappa": 1}})");
  EXPECT_EQ(doc.noise.state_dim(), 0);
  EXPECT_EQ(doc.noise.B.rows(), 0);
  EXPECT_EQ(doc.noise.B.cols(), 2);
  EXPECT_EQ(doc.noise.C.rows(), 2);
  EXPECT_EQ(doc.input->state_dim(), 0);
  EXPECT_EQ(doc.input->Gamma.rows(), 2);
  EXPECT_TRUE(validate(doc.noise, *doc.input, *doc.channel).ok());
}

TEST(ParseModel, EmptyArraysTakeShapeFromContext) {
  const ModelDocument doc =
      parse_model_text(R"({"noise": {"A": [], "B": [], "C": [], "N": [[1]], "K_W": [[1]]}})");
  EXPECT_EQ(doc.noise.C.rows(), 1);
  EXPECT_EQ(doc.noise.C.cols(), 0);
  EXPECT_TRUE(validate(doc.noise).ok());
}

TEST(ParseModel, RaggedRowsAreRejected) {
  EXPECT_EQ(error_of(R"({"noise": {"A": [[1, 2], [3]], "B": [[1], [1]], "C": [[1, 1]], "N": 1, "K_W": 1}})"),
            "A is not rectangular");
}

TEST(ParseModel, NonNumericEntryIsRejected) {
  EXPECT_EQ(error_of(R"({"noise": {"A": [["x"]], "B": 1, "C": 1, "N": 1, "K_W": 1}})"),
            "A has a non-numeric entry");
}

TEST(ParseModel, MalformedJsonIsRejected) {
  EXPECT_NE(error_of(R"({"noise": )").find("malformed JSON"), std::string::npos);
}

TEST(ParseModel, MissingRequiredFieldIsNamed) {
  EXPECT_EQ(error_of(R"({"noise": {"A": 1, "B": 1, "C": 1, "N": 1}})"), "noise.K_W is missing");
  EXPECT_EQ(error_of(R"({"input": {}})"), "model document has no noise section");
}

TEST(ParseModel, MeanAcceptsFlatAndColumnForms) {
  const ModelDocument a = parse_model_text(
      R"({"noise": {"A": [[0.5, 0], [0, 0.2]], "B": [[1], [1]], "C": [[1, 1]], "N": 1, "K_W": 1,
                    "mu_S1": [1, 2]}})");
  const ModelDocument b = parse_model_text(
      R"({"noise": {"A": [[0.5, 0], [0, 0.2]], "B": [[1], [1]], "C": [[1, 1]], "N": 1, "K_W": 1,
                    "mu_S1": [[1], [2]]}})");
  EXPECT_EQ(a.noise.mu_S1, b.noise.mu_S1);
  EXPECT_DOUBLE_EQ(a.noise.mu_S1[1], 2.0);
}

TEST(ParseModel, RoundTripIsExact) {
  ModelDocument doc = parse_model_text(kScalarDoc);
  doc.noise.A(0, 0) = 0.1 + 0.2;  // not exactly representable in short decimal
  const nlohmann::json j{{"noise", to_json(doc.noise)},
                         {"input", to_json(*doc.input)},
                         {"channel", to_json(*doc.channel)}};
  const ModelDocument back = parse_model_text(j.dump());
  EXPECT_EQ(back.noise.A, doc.noise.A);
  EXPECT_EQ(back.input->F, doc.input->F);
  EXPECT_EQ(back.input->K_Z, doc.input->K_Z);
  EXPECT_EQ(back.channel->H, doc.channel->H);
}

TEST(LoadModel, MissingFileIsAModelError) {
  EXPECT_THROW(load_model("/nonexistent/model.json"), ModelError);
}

}  // namespace
}  // namespace riccap
