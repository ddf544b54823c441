#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "levy_spde/errors.hpp"
#include "levy_spde/io.hpp"

using namespace levy_spde;

namespace {

NoiseRealization small_noise() {
  return sample_white_noise(make_grid({0.0, -1.0}, {1.0, 2.0}, {3, 4}), 1.3, 77);
}

std::string to_binary(const NoiseRealization& noise) {
  std::ostringstream out(std::ios::binary);
  write_noise_binary(out, noise);
  return out.str();
}

}  // namespace

TEST(NoiseBinary, RoundTrip) {
  const auto noise = small_noise();
  std::istringstream in(to_binary(noise), std::ios::binary);
  const auto back = read_noise_binary(in);
  EXPECT_EQ(back.grid, noise.grid);
  EXPECT_EQ(back.alpha, noise.alpha);
  EXPECT_EQ(back.seed, noise.seed);
  EXPECT_EQ(back.increments, noise.increments);
}

TEST(NoiseBinary, LayoutIsLittleEndianWithHeader) {
  const auto bytes = to_binary(small_noise());
  // magic + version + dim + 2 origin + 2 extent + 2 cells + alpha + seed + count + 12 increments
  EXPECT_EQ(bytes.size(), 4u + 4 + 4 + 16 + 16 + 16 + 8 + 8 + 8 + 12 * 8);
  EXPECT_EQ(bytes.substr(0, 4), "LVYN");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), kNoiseFormatVersion);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2u);
}

TEST(NoiseBinary, RejectsBadMagic) {
  auto bytes = to_binary(small_noise());
  bytes[0] = 'X';
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_noise_binary(in), ParameterError);
}

TEST(NoiseBinary, RejectsUnknownVersion) {
  auto bytes = to_binary(small_noise());
  bytes[4] = 9;
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_noise_binary(in), ParameterError);
}

TEST(NoiseBinary, RejectsTruncation) {
  const auto bytes = to_binary(small_noise());
  std::istringstream in(bytes.substr(0, bytes.size() - 3), std::ios::binary);
  EXPECT_THROW(read_noise_binary(in), ParameterError);
}

TEST(Csv, NoiseColumns) {
  std::ostringstream out;
  write_noise_csv(out, small_noise());
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "i0,i1,increment");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 12);
}

TEST(Csv, FieldColumns) {
  Field f;
  f.eval_points = {{0.5, 0.25}};
  f.values = {1.5};
  std::ostringstream st, sp;
  write_field_csv(st, f, true);
  write_field_csv(sp, f, false);
  EXPECT_EQ(st.str(), "t,x1,value\n0.5,0.25,1.5\n");
  EXPECT_EQ(sp.str(), "x1,x2,value\n0.5,0.25,1.5\n");
}

TEST(Csv, VerdictRows) {
  std::ostringstream out;
  write_verdict_csv(out, {existence_verdict(Operator::Wave, 3, 0.5)});
  EXPECT_EQ(out.str(), "equation,d,alpha,mild,generalized,random_field\nwave,3,0.5,false,true,false\n");
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.35}) {
    const auto s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
  EXPECT_EQ(format_double(0.35), "0.35");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Json, GridGreenAndTestFunctionRoundTrip) {
  const auto g = make_grid({0.0, -1.5}, {2.0, 3.0}, {4, 6});
  EXPECT_EQ(grid_from_json(to_json(g)), g);
  const GreenFunction green{Operator::Poisson, 5};
  EXPECT_EQ(green_from_json(to_json(green)), green);
  const TestFunction phi{{0.1, 0.2}, {0.3, 0.4}, -2.0};
  EXPECT_EQ(test_from_json(to_json(phi)), phi);
  const auto reparsed = nlohmann::json::parse(to_json(phi).dump());
  EXPECT_EQ(test_from_json(reparsed), phi);
}

TEST(Json, MalformedInputIsRejected) {
  EXPECT_THROW(grid_from_json(nlohmann::json::object()), ParameterError);
  EXPECT_THROW(grid_from_json({{"origin", {0.0}}, {"extent", {-1.0}}, {"cells", {2}}}), ParameterError);
  EXPECT_THROW(green_from_json({{"operator", "laplace"}, {"dim", 1}}), ParameterError);
  EXPECT_THROW(test_from_json({{"center", {0.0}}, {"radii", {"wide"}}}), ParameterError);
}

TEST(Json, NonFiniteNumbersBecomeStrings) {
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(number(2.0), 2.0);
  const auto j = to_json(heat_norm_closed(1.0, 1.9, 3));
  EXPECT_EQ(j["value"], "inf");
  EXPECT_EQ(j["diverged"], true);
}
