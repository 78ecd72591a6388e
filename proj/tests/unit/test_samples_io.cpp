#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "psd/errors.hpp"
#include "psd/samples_io.hpp"
#include "test_support.hpp"

namespace psd {
namespace {

std::filesystem::path temp(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

TEST(SamplesIo, CsvRoundTripIsBitExact) {
  Xoshiro256 rng(1);
  Matrix s = testing::random_points(rng, 50, 3, -1e3, 1e3);
  s(0, 0) = 1e-300;
  s(1, 1) = -0.1;
  write_samples(temp("psd_s.csv"), s, SampleFormat::kCsv);
  EXPECT_EQ(read_samples(temp("psd_s.csv"), SampleFormat::kCsv, 3), s);
}

TEST(SamplesIo, BinaryRoundTripIsBitExact) {
  Xoshiro256 rng(2);
  const Matrix s = testing::random_points(rng, 17, 2, -1, 1);
  write_samples(temp("psd_s.bin"), s, SampleFormat::kBinary);
  EXPECT_EQ(read_samples(temp("psd_s.bin"), SampleFormat::kBinary, 2), s);
  EXPECT_THROW(read_samples(temp("psd_s.bin"), SampleFormat::kBinary, 0), ArgumentError);
  EXPECT_EQ(std::filesystem::file_size(temp("psd_s.bin")), 17u * 2u * 8u);
}

TEST(SamplesIo, EmptyFileIsZeroRows) {
  write_samples(temp("psd_e.csv"), Matrix(0, 2), SampleFormat::kCsv);
  EXPECT_EQ(std::filesystem::file_size(temp("psd_e.csv")), 0u);
  EXPECT_EQ(read_samples(temp("psd_e.csv"), SampleFormat::kCsv, 2).rows(), 0);
}

TEST(SamplesIo, RejectsRaggedOrGarbage) {
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_samples_csv(ragged), ArgumentError);
  std::istringstream junk("1,abc\n");
  EXPECT_THROW(read_samples_csv(junk), ArgumentError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace psd
