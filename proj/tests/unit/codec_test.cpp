#include <gtest/gtest.h>

#include "dtq/codec.hpp"
#include "dtq/errors.hpp"
#include "dtq/random.hpp"
#include "dtq/sampler.hpp"

using namespace dtq;

TEST(Codec, CanonicalText) {
  EXPECT_EQ(serialize(DecisionTree::leaf(false)), R"({"leaf":0})");
  EXPECT_EQ(serialize(trees::dictator(0)), R"({"var":0,"on0":{"leaf":0},"on1":{"leaf":1}})");
  EXPECT_EQ(parse_tree(R"({"leaf":0})"), DecisionTree::leaf(false));
  EXPECT_EQ(parse_tree(R"({"var":0,"on0":{"leaf":0},"on1":{"leaf":1}})"), trees::dictator(0));
}

TEST(Codec, AcceptsAnyKeyOrderAndWhitespace) {
  const auto t = parse_tree(" { \"on1\" : {\"leaf\":1}, \"var\": 3,\n \"on0\": {\"leaf\" : 0} } ");
  EXPECT_EQ(t, trees::dictator(3));
}

TEST(Codec, ThousandSampledTreesRoundTrip) {
  const RandomStream root(2024);
  int done = 0;
  for (Model m : kAllModels) {
    const TreeSampler sampler(m, 7, 10);
    for (std::uint64_t i = 0; i < 250; ++i, ++done) {
      RandomStream rng = root.substream(static_cast<std::uint64_t>(done));
      const auto tree = sampler(rng);
      const auto text = serialize(tree);
      const auto back = parse_tree(text);
      EXPECT_EQ(back, tree);
      EXPECT_EQ(serialize(back), text);
    }
  }
  EXPECT_EQ(done, 1000);
}

TEST(Codec, SyntaxErrorsReportByteOffset) {
  try {
    parse_tree(R"({"leaf":1)");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where().rfind("byte ", 0), 0U) << e.where();
  }
}

TEST(Codec, SchemaErrorsReportJsonPointer) {
  auto where = [](const char* text) {
    try {
      parse_tree(text);
    } catch (const ParseError& e) {
      return e.where();
    }
    return std::string("no error");
  };
  EXPECT_EQ(where(R"({"leaf":2})"), "/leaf");
  EXPECT_EQ(where(R"({"leaf":1,"x":0})"), "/");
  EXPECT_EQ(where(R"({"var":0,"on0":{"leaf":0}})"), "/");
  EXPECT_EQ(where(R"({"var":0,"on0":{"leaf":0},"on1":{"leaf":true}})"), "/on1/leaf");
  EXPECT_EQ(where(R"({"var":-1,"on0":{"leaf":0},"on1":{"leaf":1}})"), "/var");
  EXPECT_EQ(where(R"({"var":0,"on0":{"var":1.5,"on0":{"leaf":0},"on1":{"leaf":1}},"on1":{"leaf":1}})"),
            "/on0/var");
  EXPECT_EQ(where(R"([1,2])"), "/");
}
