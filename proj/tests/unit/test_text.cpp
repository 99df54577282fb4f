#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "anisolve/random.hpp"
#include "anisolve/text.hpp"

using namespace anisolve;

TEST(Text, TrimAndSplit) {
  EXPECT_EQ(text::trim("  a b \t"), "a b");
  EXPECT_EQ(text::trim(""), "");
  const auto parts = text::split(" a, b ,,c", ',');
  ASSERT_EQ(parts.size(), 4u);
  EXPECT_EQ(parts[0], "a");
  EXPECT_EQ(parts[2], "");
  EXPECT_EQ(text::split_whitespace("  x  y\tz ").size(), 3u);
}

TEST(Text, ParseNumbers) {
  EXPECT_EQ(text::parse_double("1.5"), 1.5);
  EXPECT_EQ(text::parse_double("+2e-3"), 2e-3);
  EXPECT_EQ(text::parse_double(" 4 "), 4.0);
  EXPECT_EQ(text::parse_double("inf"), std::numeric_limits<double>::infinity());
  EXPECT_EQ(text::parse_double("-inf"), -std::numeric_limits<double>::infinity());
  EXPECT_FALSE(text::parse_double("1.5x"));
  EXPECT_FALSE(text::parse_double(""));
  EXPECT_EQ(text::parse_integer("129"), 129);
  EXPECT_FALSE(text::parse_integer("12.5"));
}

TEST(Text, FormatRoundTrips) {
  EXPECT_EQ(text::format_double(0.0), "0");
  EXPECT_EQ(text::format_double(-0.0), "0");
  EXPECT_EQ(text::format_double(0.1), "0.1");
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.below(200)) - 100);
    EXPECT_EQ(*text::parse_double(text::format_double(x)), x == 0.0 ? 0.0 : x);
  }
}
