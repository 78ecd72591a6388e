#include "psd/samples_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "psd/errors.hpp"

namespace psd {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_samples_csv(std::ostream& out, const Matrix& samples) {
  std::string line;
  for (Index i = 0; i < samples.rows(); ++i) {
    line.clear();
    for (Index k = 0; k < samples.cols(); ++k) {
      if (k > 0) line.push_back(',');
      line += format_double(samples(i, k));
    }
    line.push_back('\n');
    out << line;
  }
}

void write_samples(const std::filesystem::path& path, const Matrix& samples,
                   SampleFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  if (format == SampleFormat::kCsv) {
    write_samples_csv(out, samples);
    return;
  }
  static_assert(std::endian::native == std::endian::little,
                "binary sample format assumes a little-endian host");
  for (Index i = 0; i < samples.rows(); ++i) {
    for (Index k = 0; k < samples.cols(); ++k) {
      const double v = samples(i, k);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  }
}

Matrix read_samples_csv(std::istream& in) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    Index count = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw ArgumentError("samples CSV: bad number on row " + std::to_string(rows + 1));
      }
      values.push_back(v);
      ++count;
      p = res.ptr;
      if (p < end && (*p == ',' || *p == '\r')) ++p;
    }
    if (cols >= 0 && count != cols) {
      throw ArgumentError("samples CSV: ragged row " + std::to_string(rows + 1));
    }
    cols = count;
    ++rows;
  }
  if (rows == 0) return Matrix(0, 0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) m(i, k) = values[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

Matrix read_samples(const std::filesystem::path& path, SampleFormat format,
                    Index dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open samples file " + path.string());
  if (format == SampleFormat::kCsv) {
    Matrix m = read_samples_csv(in);
    if (dim > 0 && m.rows() > 0 && m.cols() != dim) {
      throw ArgumentError("samples file has wrong dimension");
    }
    if (m.rows() == 0 && dim > 0) return Matrix(0, dim);
    return m;
  }
  if (dim <= 0) throw ArgumentError("binary samples need an explicit dimension");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const std::size_t row_bytes = static_cast<std::size_t>(dim) * sizeof(double);
  if (bytes.size() % row_bytes != 0) {
    throw ArgumentError("binary samples size is not a multiple of the row size");
  }
  const auto rows = static_cast<Index>(bytes.size() / row_bytes);
  Matrix m(rows, dim);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < dim; ++k) {
      double v;
      std::memcpy(&v, bytes.data() + (static_cast<std::size_t>(i * dim + k)) * sizeof(double),
                  sizeof(double));
      m(i, k) = v;
    }
  }
  return m;
}

}  // namespace psd
