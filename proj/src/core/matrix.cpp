#include "dysalign/core/matrix.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "dysalign/core/error.hpp"

namespace dysalign {

namespace {

constexpr char kMagic[4] = {'N', 'A', 'F', 'M'};
constexpr std::size_t kHeaderBytes = 12;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const std::string& in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  return v;
}

void check_finite(const std::vector<float>& data) {
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!std::isfinite(data[i])) throw NumericError("non-finite matrix entry at index " + std::to_string(i));
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::uint32_t rows, std::uint32_t cols)
    : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, 0.0f) {}

FeatureMatrix::FeatureMatrix(std::uint32_t rows, std::uint32_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != std::size_t(rows) * cols)
    throw ShapeError("matrix data length " + std::to_string(data_.size()) + " != " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  check_finite(data_);
}

std::vector<double> FeatureMatrix::column(std::uint32_t c) const {
  std::vector<double> out(rows_);
  for (std::uint32_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<double> FeatureMatrix::row(std::uint32_t r) const {
  std::vector<double> out(cols_);
  for (std::uint32_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
  return out;
}

std::string encode_matrix(const FeatureMatrix& m) {
  std::string out;
  out.reserve(kHeaderBytes + m.data().size() * 4);
  out.append(kMagic, 4);
  put_u32(out, m.rows());
  put_u32(out, m.cols());
  for (float f : m.data()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

FeatureMatrix decode_matrix(const std::string& bytes) {
  if (bytes.size() < 4) throw TruncatedFileError("NAFM header truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw BadMagicError("missing NAFM magic");
  if (bytes.size() < kHeaderBytes) throw TruncatedFileError("NAFM header truncated");
  const std::uint32_t rows = get_u32(bytes, 4);
  const std::uint32_t cols = get_u32(bytes, 8);
  const std::uint64_t count = std::uint64_t(rows) * cols;
  constexpr std::uint64_t kMaxCount = (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes) / 4;
  if (count > kMaxCount || count > std::numeric_limits<std::size_t>::max() / 4)
    throw DimensionOverflowError("NAFM dimensions overflow: " + std::to_string(rows) + "x" + std::to_string(cols));
  const std::uint64_t expected = kHeaderBytes + count * 4;
  if (bytes.size() < expected)
    throw TruncatedFileError("NAFM payload truncated: expected " + std::to_string(expected) + " bytes, got " +
                             std::to_string(bytes.size()));
  if (bytes.size() > expected) throw FormatError("NAFM file has trailing bytes");
  std::vector<float> data(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
  return FeatureMatrix(rows, cols, std::move(data));
}

FeatureMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open matrix file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return decode_matrix(buffer.str());
  } catch (const BadMagicError& e) {
    throw BadMagicError(path.string() + ": " + e.what());
  } catch (const TruncatedFileError& e) {
    throw TruncatedFileError(path.string() + ": " + e.what());
  } catch (const DimensionOverflowError& e) {
    throw DimensionOverflowError(path.string() + ": " + e.what());
  }
}

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write matrix file " + path.string());
  const std::string bytes = encode_matrix(m);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing matrix file " + path.string());
}

}  // namespace dysalign
