#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dysalign {

// Dense row-major float matrix; rows are channels, columns are frames.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::uint32_t rows, std::uint32_t cols);
  // Throws ShapeError when data.size() != rows * cols, NumericError on
  // non-finite entries.
  FeatureMatrix(std::uint32_t rows, std::uint32_t cols, std::vector<float> data);

  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }
  const std::vector<float>& data() const { return data_; }

  float operator()(std::uint32_t r, std::uint32_t c) const { return data_[std::size_t(r) * cols_ + c]; }
  float& operator()(std::uint32_t r, std::uint32_t c) { return data_[std::size_t(r) * cols_ + c]; }

  std::vector<double> column(std::uint32_t c) const;
  std::vector<double> row(std::uint32_t r) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::vector<float> data_;
};

// NAFM container: "NAFM", u32 LE rows, u32 LE cols, rows*cols f32 LE.
std::string encode_matrix(const FeatureMatrix& m);
FeatureMatrix decode_matrix(const std::string& bytes);

FeatureMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m);

}  // namespace dysalign
