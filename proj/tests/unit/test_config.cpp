#include "app/config.hpp"

#include <gtest/gtest.h>

namespace hypdyn {
namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text, "cfg");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
    return e.what();
  }
  return "";
}

TEST(Config, ParsesNestedBlocks) {
  const auto c = parse_config(R"(# header
experiment = krylov   # trailing comment
seed = 12
operator {
  kind = direct_sum
  part {
    kind = rotation2d
    turns = 0.25
  }
  part {
    kind = volterra
    grid = 4
  }
}
)");
  EXPECT_EQ(c.get_string("experiment"), "krylov");
  EXPECT_EQ(c.get_int("seed"), 12);
  const auto* op = c.block("operator");
  ASSERT_NE(op, nullptr);
  const auto parts = op->blocks_named("part");
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[1]->get_int("grid"), 4);
  EXPECT_EQ(parts[1]->path(), "operator.part");
  EXPECT_EQ(op->find("kind")->line, 5);
  EXPECT_EQ(c.get_int("missing", 7), 7);
  EXPECT_FALSE(c.get_bool("flag", false));
}

TEST(Config, SerializeRoundTrip) {
  const auto c = parse_config("a = 1\nb {\n  c = x y\n  d {\n    e = -2.5\n  }\n}\nb {\n  c = 3\n}\n");
  const std::string once = serialize_config(c);
  EXPECT_EQ(serialize_config(parse_config(once)), once);
  EXPECT_EQ(once, "a = 1\nb {\n  c = x y\n  d {\n    e = -2.5\n  }\n}\nb {\n  c = 3\n}\n");
}

TEST(Config, ErrorsNameLineAndField) {
  EXPECT_NE(message_of("a = 1\n}\n").find("cfg:2"), std::string::npos);
  auto m = message_of("x {\n  a = 1\n  a = 2\n}\n");
  EXPECT_NE(m.find("cfg:3"), std::string::npos) << m;
  EXPECT_NE(m.find("x.a"), std::string::npos) << m;
  EXPECT_NE(message_of("a = 1\nnot a pair\n").find("cfg:2"), std::string::npos);
  m = message_of("outer {\n  inner {\n  }\n");
  EXPECT_NE(m.find("outer"), std::string::npos) << m;
  EXPECT_NE(m.find("never closed"), std::string::npos) << m;
  EXPECT_NE(message_of("k =\n").find("empty value"), std::string::npos);
  EXPECT_NE(message_of("1k = 2\n").find("invalid key"), std::string::npos);

  const auto c = parse_config("n = ten\n");
  try {
    c.get_int("n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'n'"), std::string::npos);
  }
}

TEST(Config, Scalars) {
  EXPECT_EQ(parse_scalar("2", "z"), Scalar(2.0, 0.0));
  EXPECT_EQ(parse_scalar("-i", "z"), Scalar(0.0, -1.0));
  EXPECT_EQ(parse_scalar("1.5-2i", "z"), Scalar(1.5, -2.0));
  EXPECT_EQ(parse_scalar("1e-3+2e-4i", "z"), Scalar(1e-3, 2e-4));
  EXPECT_EQ(parse_scalar("-1e+2-i", "z"), Scalar(-100.0, -1.0));
  EXPECT_EQ(parse_scalar("+3i", "z"), Scalar(0.0, 3.0));
  EXPECT_THROW(parse_scalar("1+", "z"), Error);
  EXPECT_THROW(parse_scalar("abc", "z"), Error);
  for (Scalar z : {Scalar(0.1, -0.3), Scalar(-0.0, 1e-300), Scalar(1.0 / 3.0, 2.0 / 7.0)})
    EXPECT_EQ(parse_scalar(format_scalar(z), "z"), z);
  EXPECT_EQ(parse_double_strict(format_double(0.1 + 0.2), "x"), 0.1 + 0.2);
  EXPECT_THROW(parse_double_strict("nan", "x"), Error);
  EXPECT_THROW(parse_int_strict("3.5", "x"), Error);
}

TEST(Config, VectorsKeepTheirField) {
  const Vector r = vector_from_text("1, 2.5", "x");
  EXPECT_EQ(r.field(), Field::real);
  EXPECT_EQ(vector_to_text(r), "1,2.5");
  const Vector c = vector_from_text("1,2+0i", "x");
  EXPECT_EQ(c.field(), Field::complex);
  EXPECT_EQ(vector_from_text(vector_to_text(c), "x").field(), Field::complex);
}

std::vector<OperatorModel> catalogue() {
  CMatrix m(2, 2);
  m << Scalar(1, 2), Scalar(0, -1), Scalar(0.5, 0), Scalar(-3, 0.25);
  const auto B = OperatorModel::backward_shift(WeightSequence::exp2decay(), 5);
  return {
      OperatorModel::dense(Field::complex, m),
      OperatorModel::identity(3),
      B,
      OperatorModel::forward_shift(WeightSequence::list({1, 2, 3}), 4),
      OperatorModel::identity_plus(OperatorModel::backward_shift(WeightSequence::harmonic(), 6)),
      OperatorModel::volterra(7),
      OperatorModel::composition_j(7),
      OperatorModel::rotation2d(0.1),
      OperatorModel::scalar_multiple(Scalar(0.5, -0.5), B),
      OperatorModel::direct_sum({B, OperatorModel::rotation2d(1.0 / 3.0), OperatorModel::volterra(3)}),
      OperatorModel::extension_su(B, Vector::real({1, 0, 0, 0, 2})),
      OperatorModel::matrix_exponential(B, 0.7),
  };
}

TEST(Config, OperatorRoundTrip) {
  for (const auto& op : catalogue()) {
    const ConfigNode node = operator_to_config(op);
    const std::string text = serialize_config(node);
    const auto back = operator_from_config(parse_config(text));
    EXPECT_EQ(describe(back), describe(op)) << text;
    EXPECT_EQ(back.dim(), op.dim());
    EXPECT_EQ(back.field(), op.field());
    EXPECT_EQ((materialize(back) - materialize(op)).norm(), 0.0) << text;
    EXPECT_EQ(serialize_config(operator_to_config(back)), text);
  }
}

TEST(Config, OperatorErrorsPointAtTheField) {
  auto msg = [](const std::string& text) {
    try {
      const auto root = parse_config(text, "cfg");
      operator_from_config(*root.block("operator"));
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::config);
      return std::string(e.what());
    }
    return std::string();
  };
  auto m = msg("operator {\n  kind = identity_plus\n  inner {\n    kind = backward_shift\n    dim = 0\n  }\n}\n");
  EXPECT_NE(m.find("operator.inner.dim"), std::string::npos) << m;
  EXPECT_NE(m.find("line 5"), std::string::npos) << m;
  m = msg("operator {\n  kind = warp\n}\n");
  EXPECT_NE(m.find("operator.kind"), std::string::npos) << m;
  m = msg("operator {\n  kind = volterra\n  grid = 4\n  turns = 1\n}\n");
  EXPECT_NE(m.find("operator.turns"), std::string::npos) << m;
  m = msg("operator {\n  kind = dense\n  entries = 1,2;3\n}\n");
  EXPECT_NE(m.find("square"), std::string::npos) << m;
  m = msg("operator {\n  kind = extension_su\n  u = 1,2\n  base {\n    kind = volterra\n    grid = 3\n  }\n}\n");
  EXPECT_NE(m.find("operator.u"), std::string::npos) << m;
  m = msg("operator {\n  kind = backward_shift\n  weights = list:1,2\n  dim = 5\n}\n");
  EXPECT_NE(m.find("operator.weights"), std::string::npos) << m;
}

}  // namespace
}  // namespace hypdyn
