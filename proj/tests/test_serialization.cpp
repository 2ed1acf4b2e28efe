// JSON round trips and fixed-schema CSV formatting.

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "skglass/serialization.hpp"

using namespace skglass;
using nlohmann::json;

TEST(EnvironmentJson, CatalogRoundTrip) {
  for (const auto& env :
       {EnvironmentSpec::gaussian(), EnvironmentSpec::rademacher(),
        EnvironmentSpec::uniform_centered(),
        EnvironmentSpec::shifted_exponential()}) {
    const json j = env;
    const EnvironmentSpec back = environment_from_json(j);
    EXPECT_TRUE(back == env) << env.name();
  }
}

TEST(EnvironmentJson, DiscreteRoundTripKeepsAtoms) {
  const auto env =
      EnvironmentSpec::discrete_custom({{2.0, 0.2}, {-0.5, 0.8}});
  const json j = env;
  EXPECT_EQ(j.at("family"), "discrete_custom");
  const EnvironmentSpec back = environment_from_json(j);
  ASSERT_EQ(back.atoms().size(), 2u);
  EXPECT_DOUBLE_EQ(back.atoms()[0].value, 2.0);
  EXPECT_TRUE(back == env);
}

TEST(EnvironmentJson, ParseFromNameOrInlineJson) {
  EXPECT_EQ(parse_environment("rademacher").name(), "rademacher");
  const auto env = parse_environment(
      R"({"family":"discrete_custom","params":{"atoms":[
          {"value":2.0,"prob":0.2},{"value":-0.5,"prob":0.8}]}})");
  EXPECT_EQ(env.name(), "discrete_custom");
  EXPECT_THROW(parse_environment("cauchy"), validation_error);
}

TEST(CouplingTensorJson, RoundTripAndValidation) {
  const CouplingTensor t =
      sample_couplings(EnvironmentSpec::uniform_centered(), 3, 2, 17);
  const json j = t;
  const CouplingTensor back = j.get<CouplingTensor>();
  EXPECT_EQ(back.n, 3);
  EXPECT_EQ(back.p, 2);
  EXPECT_EQ(back.values, t.values);
  EXPECT_EQ(back.seed, 17u);

  json bad = j;
  bad["values"] = std::vector<double>{1.0, 2.0};
  EXPECT_THROW(bad.get<CouplingTensor>(), validation_error);
}

TEST(FormatFloat, SeventeenDigitRoundTrip) {
  for (const double x :
       {0.1, -1.0 / 3.0, 1e-300, 3.141592653589793, 12345.6789, 0.0,
        2.2250738585072014e-308}) {
    EXPECT_EQ(std::stod(format_float(x)), x);
  }
}

TEST(CsvTable, SchemaHeaderAndRows) {
  CsvTable table({"env", "n", "value"});
  table.row().add("gaussian").add(4).add(0.5);
  table.row().add("rademacher").add(6).add(-1.0 / 3.0);
  const std::string text = table.to_string();
  EXPECT_EQ(text.substr(0, 18), "# schema_version=1");
  EXPECT_NE(text.find("env,n,value\n"), std::string::npos);
  EXPECT_NE(text.find("gaussian,4,0.5\n"), std::string::npos);
  EXPECT_NE(text.find("-0.33333333333333331"), std::string::npos);
  EXPECT_EQ(table.row_count(), 2u);
}

TEST(EnergiesCsv, DebugExportEnumeratesAllConfigurations) {
  const CouplingTensor t =
      sample_couplings(EnvironmentSpec::rademacher(), 3, 2, 5);
  std::ostringstream out;
  write_energies_csv(t, out);
  const std::string text = out.str();
  int lines = 0;
  for (const char c : text) lines += c == '\n';
  EXPECT_EQ(lines, 2 + 8);  // schema + header + 2^3 rows
  EXPECT_NE(text.find("bits,magnetization,energy"), std::string::npos);
}

TEST(EstimateJson, FreeEnergyFields) {
  const auto fe = estimate_free_energy(EnvironmentSpec::rademacher(),
                                       ModelParams{3, 2, 0.8, 0.0}, 20, 3);
  const json j = fe;
  EXPECT_EQ(j.at("env"), "rademacher");
  EXPECT_EQ(j.at("replicas"), 20);
  EXPECT_EQ(j.at("params").at("n"), 3);
  EXPECT_TRUE(j.contains("alpha_hat"));
  EXPECT_TRUE(j.contains("stderr"));
}

TEST(EstimateJson, ComparisonReportVerdictString) {
  const auto report = compare_free_energy(
      EnvironmentSpec::rademacher(), EnvironmentSpec::gaussian(),
      ModelParams{3, 2, 0.5, 0.0}, 40, 7);
  const json j = report;
  EXPECT_EQ(j.at("quantity"), "free_energy");
  const std::string verdict = j.at("verdict");
  EXPECT_TRUE(verdict == "within_bound" ||
              verdict == "within_bound_plus_noise");
  EXPECT_TRUE(j.contains("constant_used"));
  EXPECT_TRUE(j.contains("bound_kind"));
}

TEST(EstimateJson, InterpolationScanSamples) {
  const auto scan = scan_interpolation_path(EnvironmentSpec::rademacher(),
                                            {2, 2, 0.0}, 0.5, 3, 10, 1);
  const json j = scan;
  ASSERT_EQ(j.at("samples").size(), 3u);
  EXPECT_FALSE(j.at("samples")[0].contains("deriv_fd"));
  EXPECT_TRUE(j.at("samples")[1].contains("deriv_fd"));
}
