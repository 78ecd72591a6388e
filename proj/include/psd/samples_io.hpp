#pragma once

// Sample files: headerless CSV (one row per sample, d columns, shortest
// round-trip decimals) or raw little-endian float64, row-major.

#include <filesystem>
#include <iosfwd>

#include "psd/kernel.hpp"

namespace psd {

enum class SampleFormat { kCsv, kBinary };

void write_samples_csv(std::ostream& out, const Matrix& samples);
void write_samples(const std::filesystem::path& path, const Matrix& samples,
                   SampleFormat format);

Matrix read_samples_csv(std::istream& in);
/// `dim` is required for the binary format and checked for CSV when > 0.
Matrix read_samples(const std::filesystem::path& path, SampleFormat format,
                    Index dim = 0);

/// Shortest decimal that round-trips to `v`.
std::string format_double(double v);

}  // namespace psd
