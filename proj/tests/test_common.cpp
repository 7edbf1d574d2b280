#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "hatewatch/common.hpp"
#include "hatewatch/csv.hpp"

using namespace hatewatch;

TEST(Groups, LabelsRoundTrip) {
  for (Group g : kAllGroups) {
    EXPECT_EQ(parse_group(to_string(g)), g);
    EXPECT_EQ(parse_group(slug(g)), g);
  }
  EXPECT_EQ(to_string(Group::LGBTQ), "LGBTQ+");
  EXPECT_EQ(parse_group("LGBTQ"), Group::LGBTQ);
  EXPECT_FALSE(parse_group("Martian"));
  EXPECT_THROW(require_group("Martian"), ValidationError);
}

TEST(Groups, SetOperations) {
  GroupSet s;
  EXPECT_TRUE(s.empty());
  s.insert(Group::Jewish);
  EXPECT_TRUE(s.contains(Group::Jewish));
  EXPECT_FALSE(s.contains(Group::Black));
  GroupSet t;
  t.insert(Group::Black);
  s |= t;
  EXPECT_TRUE(s.contains(Group::Black));
}

TEST(Dates, ParseFormatAndArithmetic) {
  const Date d = Date::parse("2020-03-11");
  EXPECT_EQ(d.year(), 2020);
  EXPECT_EQ(d.month(), 3u);
  EXPECT_EQ(d.day(), 11u);
  EXPECT_EQ(d.to_string(), "2020-03-11");
  EXPECT_EQ((d + 21).to_string(), "2020-04-01");
  EXPECT_EQ(Date::parse("2021-07-17") - d, 493);
  EXPECT_EQ(Date::from_ymd(1970, 1, 1).days(), 0);
  EXPECT_THROW(Date::parse("2020-02-30"), ValidationError);
  EXPECT_THROW(Date::parse("2020-3-11"), ValidationError);
  EXPECT_THROW(Date::parse(""), ValidationError);
}

TEST(Dates, LeapDay) {
  EXPECT_EQ(Date::parse("2020-02-29").to_string(), "2020-02-29");
  EXPECT_THROW(Date::parse("2021-02-29"), ValidationError);
}

TEST(Dates, InclusiveRange) {
  const DateRange r{Date::parse("2020-03-11"), Date::parse("2020-03-13")};
  EXPECT_EQ(r.length(), 3);
  EXPECT_TRUE(r.contains(r.first));
  EXPECT_TRUE(r.contains(r.last));
  EXPECT_FALSE(r.contains(r.last + 1));
}

TEST(YearMonths, OrderAndSuccessor) {
  const YearMonth dec{2020, 12};
  EXPECT_EQ(dec.next(), (YearMonth{2021, 1}));
  EXPECT_EQ(dec.to_string(), "2020-12");
  EXPECT_EQ(YearMonth::parse("2021-01"), dec.next());
  EXPECT_EQ(YearMonth::of(Date::parse("2020-12-31")), dec);
  EXPECT_LT(dec, dec.next());
}

TEST(Timestamps, Iso8601Variants) {
  const Timestamp base = parse_timestamp("2020-05-26T13:45:12Z");
  EXPECT_EQ(format_timestamp(base), "2020-05-26T13:45:12Z");
  EXPECT_EQ(parse_timestamp("2020-05-26T13:45:12.750Z"), base);
  EXPECT_EQ(parse_timestamp("2020-05-26T15:45:12+02:00"), base);
  EXPECT_EQ(parse_timestamp("2020-05-26T06:45:12-07:00"), base);
  EXPECT_EQ(parse_timestamp("2020-05-26"), base - (13 * 3600 + 45 * 60 + 12));
  EXPECT_EQ(date_of(base).to_string(), "2020-05-26");
  EXPECT_THROW(parse_timestamp("26/05/2020"), ValidationError);
  EXPECT_THROW(parse_timestamp("2020-05-26T25:00:00Z"), ValidationError);
}

TEST(Timestamps, DateOfNegativeTimes) {
  EXPECT_EQ(date_of(-1).to_string(), "1969-12-31");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Csv, QuotedFieldsAndLines) {
  std::istringstream in("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n\"multi\nline\",z\n");
  csv::Reader r(in);
  csv::expect_header(r, {"a", "b"});
  auto row = r.next();
  ASSERT_TRUE(row);
  EXPECT_EQ((*row)[0], "x, y");
  EXPECT_EQ((*row)[1], "he said \"hi\"");
  EXPECT_EQ(r.line(), 2u);
  row = r.next();
  ASSERT_TRUE(row);
  EXPECT_EQ((*row)[0], "multi\nline");
  EXPECT_EQ(r.line(), 3u);
  EXPECT_FALSE(r.next());
}

TEST(Csv, WrongHeaderIsRejected) {
  std::istringstream in("x,y\n");
  csv::Reader r(in);
  EXPECT_THROW(csv::expect_header(r, {"a", "b"}), ValidationError);
}

TEST(Csv, WriteThenReadIsLossless) {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "", "line\nbreak"};
  std::stringstream buf;
  csv::write_row(buf, fields);
  csv::Reader r(buf);
  const auto row = r.next();
  ASSERT_TRUE(row);
  EXPECT_EQ(*row, fields);
}

TEST(Csv, UnterminatedQuoteThrows) {
  std::istringstream in("\"open,field\n");
  csv::Reader r(in);
  EXPECT_THROW(r.next(), ValidationError);
}
