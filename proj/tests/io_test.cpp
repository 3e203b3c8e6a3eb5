#include "qsdc/io.hpp"

#include <gtest/gtest.h>

namespace qsdc::io {
namespace {

TEST(IoTest, FormatNumberNineSignificantDigits) {
  EXPECT_EQ(format_number(0.123456789123), "0.123456789");
  EXPECT_EQ(format_number(2.0 / 3.0), "0.666666667");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.875), "0.875");
  EXPECT_EQ(format_number(123456789.0), "123456789");
}

TEST(IoTest, BitsToString) {
  EXPECT_EQ(bits_to_string({1, 0, 1, 1, 0}), "10110");
  EXPECT_EQ(bits_to_string({}), "");
}

TEST(IoTest, FieldsCsvLayout) {
  const Fields fields = {{"alpha", "1"}, {"beta", "2.5"}, {"tag", "x"}};
  EXPECT_EQ(fields_csv(fields), "alpha,beta,tag\n1,2.5,x\n");
}

TEST(IoTest, FieldsJsonRoundTrip) {
  const Fields fields = {{"alpha", "1"}, {"tag", "x"}};
  const auto obj = fields_json(fields);
  EXPECT_EQ(obj.at("alpha").get<std::string>(), "1");
  EXPECT_EQ(obj.at("tag").get<std::string>(), "x");
}

TEST(IoTest, TableCsvUsesLfAndHeader) {
  analysis::CurveTable table;
  table.columns = {"x", "y"};
  table.rows = {{0.0, 1.0}, {0.5, 2.0 / 3.0}};
  EXPECT_EQ(table_csv(table), "x,y\n0,1\n0.5,0.666666667\n");
}

TEST(IoTest, TableJsonSchema) {
  analysis::CurveTable table;
  table.columns = {"x"};
  table.rows = {{1.0}};
  const auto obj = table_json(table);
  ASSERT_TRUE(obj.contains("columns"));
  ASSERT_TRUE(obj.contains("rows"));
  EXPECT_EQ(obj["columns"][0].get<std::string>(), "x");
  EXPECT_DOUBLE_EQ(obj["rows"][0][0].get<double>(), 1.0);
}

TEST(IoTest, ReportFieldsCoverTheContract) {
  RunReport rep;
  rep.decoys_checked = 4;
  rep.detections = 1;
  rep.empirical_detection_rate = 0.25;
  rep.analytic_detection_rate = 0.3;
  rep.aborted = true;
  const auto fields = report_fields(rep);
  auto value_of = [&fields](const std::string& key) -> std::string {
    for (const auto& [k, v] : fields) {
      if (k == key) return v;
    }
    return "<missing>";
  };
  EXPECT_EQ(value_of("decoys_checked"), "4");
  EXPECT_EQ(value_of("detections"), "1");
  EXPECT_EQ(value_of("empirical_detection_rate"), "0.25");
  EXPECT_EQ(value_of("analytic_detection_rate"), "0.3");
  EXPECT_EQ(value_of("aborted"), "true");
  EXPECT_EQ(value_of("recovered_bits"), "");
  EXPECT_EQ(value_of("bit_error_count"), "0");
}

TEST(IoTest, EstimateFields) {
  RateEstimate est;
  est.trials = 1000;
  est.detections = 875;
  est.rate = 0.875;
  est.standard_error = 0.0104;
  const auto fields = estimate_fields(est, 0.875);
  EXPECT_EQ(fields.front().first, "trials");
  EXPECT_EQ(fields.front().second, "1000");
  EXPECT_EQ(fields.back().first, "analytic_detection_rate");
  EXPECT_EQ(fields.back().second, "0.875");
}

}  // namespace
}  // namespace qsdc::io
