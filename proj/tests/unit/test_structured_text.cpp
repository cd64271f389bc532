#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "generators.hpp"
#include "xtsi/error.hpp"
#include "xtsi/structured_text.hpp"

using namespace xtsi;

TEST(StructuredText, NestedBlocksAndComments) {
  auto root = text::parse(
      "top = 1  # trailing\n"
      "# whole-line comment\n"
      "outer {\n"
      "  name = a b\n"
      "  inner {\n"
      "    xs = 1, 2.5, -3e2\n"
      "  }\n"
      "}\n",
      "t.txt");
  EXPECT_EQ(root.integer("top"), 1);
  ASSERT_EQ(root.children.size(), 1u);
  const auto& outer = root.children[0];
  EXPECT_EQ(outer.type, "outer");
  EXPECT_EQ(outer.line, 3u);
  EXPECT_EQ(outer.str("name"), "a b");
  auto inner = outer.blocks("inner");
  ASSERT_EQ(inner.size(), 1u);
  EXPECT_EQ(inner[0]->numbers("xs"), (std::vector<double>{1.0, 2.5, -300.0}));
}

TEST(StructuredText, ErrorsCarryLines) {
  auto line_of = [](const char* src) {
    try {
      text::parse(src, "e.txt");
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("a = 1\n}\n"), 2u);
  EXPECT_EQ(line_of("a = 1\njunk\n"), 2u);
  EXPECT_EQ(line_of("a = 1\na = 2\n"), 2u);
  EXPECT_EQ(line_of("a =\n"), 1u);
  EXPECT_EQ(line_of("x {\n  a = 1\n"), 1u);
}

TEST(StructuredText, TypedAccessors) {
  auto root = text::parse("n = 3.5\ni = 4\nw = x, y\n", "acc.txt");
  EXPECT_THROW(root.integer("n"), ParseError);
  EXPECT_EQ(root.integer("i"), 4);
  EXPECT_EQ(root.words("w"), (std::vector<std::string>{"x", "y"}));
  EXPECT_THROW(root.number("w"), ParseError);
  EXPECT_THROW(root.str("missing"), ParseError);
  EXPECT_FALSE(root.number_or("missing").has_value());
  EXPECT_EQ(*root.number_or("n"), 3.5);
}

TEST(StructuredText, SerializeRoundTrip) {
  const char* src = "a = 1\nb {\n  c = hello\n  d {\n    e = 2\n  }\n}\nb {\n  c = again\n}\n";
  auto root = text::parse(src, "rt.txt");
  EXPECT_EQ(text::serialize(root), src);
  EXPECT_EQ(text::serialize(text::parse(text::serialize(root), "rt2.txt")), src);
}

TEST(StructuredTextProperty, FormatExactRoundTrips) {
  gen::Rng rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 10000) {
    std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    std::string s = text::format_exact(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
    ++checked;
  }
}
