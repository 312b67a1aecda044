#include <sstream>

#include <gtest/gtest.h>

#include "levelfit/format.hpp"
#include "levelfit/io.hpp"
#include "levelfit/random.hpp"

namespace levelfit {
namespace {

PointCloud parse(const std::string& text) {
  std::istringstream in(text);
  return parse_points(in, "cloud.csv");
}

std::string ingest_error(const std::string& text) {
  try {
    parse(text);
  } catch (const IngestError& e) {
    return e.what();
  }
  return "";
}

TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UnitDoublesAreInRange) {
  EXPECT_EQ(unit_double(0, 0), 0.0);
  EXPECT_LT(unit_double(0xffffffff, 0xffffffff), 1.0);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < 100000; ++i) sum += uniform_coordinate(3, 0, i, static_cast<int>(i % 3));
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 123456789.125}) {
    double back = 0.0;
    ASSERT_TRUE(parse_double(format_double(v), back));
    EXPECT_EQ(back, v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  double v = 0.0;
  EXPECT_TRUE(parse_double("+2", v));
  EXPECT_FALSE(parse_double("2x", v));
  EXPECT_FALSE(parse_double("", v));
}

TEST(Ingest, ThreePointCloud) {
  const PointCloud k = parse("-0.5\n0\n0.25\n");
  EXPECT_EQ(k.dimension(), 1);
  ASSERT_EQ(k.size(), 3);
  EXPECT_EQ(k.points(0, 0), -0.5);
  EXPECT_EQ(k.points(2, 0), 0.25);
}

TEST(Ingest, CommentsBlankLinesAndWhitespace) {
  const PointCloud k = parse("# header\n\n 1.5 , -2\n# mid\n3,4\r\n");
  EXPECT_EQ(k.dimension(), 2);
  ASSERT_EQ(k.size(), 2);
  EXPECT_EQ(k.points(0, 0), 1.5);
  EXPECT_EQ(k.points(0, 1), -2.0);
  EXPECT_EQ(k.points(1, 1), 4.0);
}

TEST(Ingest, HundredRowsInTwoColumns) {
  std::string text;
  for (int i = 0; i < 100; ++i) text += std::to_string(i * 0.01) + "," + std::to_string(-i * 0.005) + "\n";
  const PointCloud k = parse(text);
  EXPECT_EQ(k.dimension(), 2);
  EXPECT_EQ(k.size(), 100);
}

TEST(Ingest, ErrorsCarryLineNumbers) {
  EXPECT_EQ(ingest_error(""), "cloud.csv: no points found");
  EXPECT_EQ(ingest_error("# only a comment\n"), "cloud.csv: no points found");
  EXPECT_EQ(ingest_error("1,2\n3\n"), "cloud.csv:2: expected 2 columns, found 1");
  EXPECT_EQ(ingest_error("1,2\n\n3,abc\n"), "cloud.csv:3: column 2 is not a finite number: 'abc'");
  EXPECT_EQ(ingest_error("inf\n"), "cloud.csv:1: column 1 is not a finite number: 'inf'");
  EXPECT_THROW(ingest_points("/nonexistent/cloud.csv"), IngestError);
}

TEST(ParseBox, AxesAndErrors) {
  const BoxDomain b = parse_box("-1,1; 0,2.5");
  EXPECT_EQ(b, BoxDomain({-1.0, 0.0}, {1.0, 2.5}));
  EXPECT_THROW(parse_box("1,-1"), std::invalid_argument);
  EXPECT_THROW(parse_box("0,1,2"), std::invalid_argument);
  EXPECT_THROW(parse_box("a,b"), std::invalid_argument);
}

TEST(ParseDegrees, ListsAndErrors) {
  EXPECT_EQ(parse_degrees("2,7,17,26"), (std::vector<int>{2, 7, 17, 26}));
  EXPECT_THROW(parse_degrees("2,x"), std::invalid_argument);
  EXPECT_THROW(parse_degrees("-1"), std::invalid_argument);
  EXPECT_THROW(parse_degrees("2.5"), std::invalid_argument);
}

int count_runs(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int runs = 0;
  bool prev = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    const bool in_set = line.back() == '1';
    if (in_set && !prev) ++runs;
    prev = in_set;
  }
  return runs;
}

TEST(PlotData, RowCountAndHeader) {
  std::ostringstream out;
  write_plot_data(out, Polynomial::constant(PolyBasis::monomial(1, 2), 1.0), BoxDomain::symmetric_unit(1), 1001);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0, in_set = 0;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("#", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "x1,p,in_set");
  while (std::getline(in, line)) {
    ++rows;
    in_set += line.back() == '1';
  }
  EXPECT_EQ(rows, 1001);
  EXPECT_EQ(in_set, 1001);
}

TEST(PlotData, BivariateIsRowMajorWithFirstAxisSlowest) {
  std::ostringstream out;
  write_plot_data(out, Polynomial::zero(PolyBasis::monomial(2, 1)), BoxDomain::symmetric_unit(2), 3);
  const std::string text = out.str();
  EXPECT_NE(text.find("row-major"), std::string::npos);
  EXPECT_NE(text.find("x1,x2,p,in_set\n-1,-1,0,0\n-1,0,0,0\n-1,1,0,0\n0,-1,0,0\n"), std::string::npos);
}

TEST(PlotData, SeventhDegreeFitHasTwoRuns) {
  PointCloud k;
  k.points.resize(3, 1);
  k.points << -0.5, 0.0, 0.25;
  const FitResult r = fit(k, BoxDomain::symmetric_unit(1), 7);
  ASSERT_TRUE(r.optimal());
  std::ostringstream out;
  write_plot_data(out, r.polynomial, r.box, 1001);
  EXPECT_EQ(count_runs(out.str()), 2);
}

}  // namespace
}  // namespace levelfit
