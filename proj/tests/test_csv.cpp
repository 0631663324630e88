#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "polysart/csv.hpp"
#include "polysart/error.hpp"

using namespace polysart;

TEST(Csv, SkipsCommentsAndBlankLines) {
  std::istringstream in("# comment\n\nx,y\n1,2\n\n# more\n3,4.5\n");
  const auto t = csv::read(in, "mem", "x,y");
  EXPECT_EQ(t.columns, 2u);
  ASSERT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.at(1, 1), 4.5);
  EXPECT_EQ(t.line_numbers[1], 7u);
}

TEST(Csv, HeaderMismatchNamesSourceAndLine) {
  std::istringstream in("a,b\n1,2\n");
  try {
    csv::read(in, "file.csv", "x,y");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("file.csv:1"), std::string::npos);
  }
}

TEST(Csv, RejectsNonNumericCells) {
  std::istringstream in("1,2\n3,abc\n");
  try {
    csv::read(in, "mem");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("mem:2"), std::string::npos);
  }
}

TEST(Csv, RejectsRaggedRows) {
  std::istringstream in("1,2\n3\n");
  EXPECT_THROW(csv::read(in, "mem"), Error);
}

TEST(Csv, FormatRoundTripsDoubles) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 0.4948, std::nextafter(1.0, 2.0)}) {
    EXPECT_EQ(std::stod(csv::format(v)), v) << csv::format(v);
  }
}

TEST(Csv, WriteRowThenReadBack) {
  std::ostringstream out;
  const double row[] = {1.0 / 7.0, -3.25, 1e-17};
  csv::write_row(out, row, 3);
  std::istringstream in(out.str());
  const auto t = csv::read(in, "mem");
  ASSERT_EQ(t.values.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(t.values[k], row[k]);
}
